#pragma once

#include <optional>

#include "rpmi/interferometer.hpp"
#include "rpmi/pnseq.hpp"

namespace rpmi {

/// Output of the N-fold correlation of one intensity record.
struct CorrelationResult {
    double s_n = 0.0;               // (1/M) sum_j prod_i I_j^i
    double leading_amplitude = 0.0; // 2 (N_p/(2MN))^N
    double n_fold_angle = 0.0;      // N*theta implied by s_n on the principal branch
    /// s_n minus the leading term, available when the true theta is supplied.
    std::optional<double> residual;
};

/// Additive phase-error budget: shot-noise floor plus modulation-jitter term.
struct ErrorBudget {
    double shot_term = 0.0;        // radians, 1/sqrt(N*N_p)
    double modulation_term = 0.0;  // radians, (sqrt(2^(N-1)(N-1)/(MN)) + 1)*dphi
    double total = 0.0;            // exact sum of the two
};

/// Fringe amplitude of the N-fold correlation, 2 (N_p/(2MN))^N.
double leading_amplitude(const InterferometerConfig& cfg);

/// Closed-form expectation 2 (N_p/(2MN))^N cos(N*theta).
double expected_sn(double theta, const InterferometerConfig& cfg);

/// N-fold correlation S_N = (1/M) sum_j prod_i I_j^i with a fixed summation
/// order (left-to-right over j, product over i) for bit-reproducibility.
/// Supplying the true theta fills the residual field.
CorrelationResult correlate(const IntensityRecord& record,
                            std::optional<double> known_theta = std::nullopt);

/// Normalized noiseless correlation g(theta) = (2^(N-1)/M) sum_j prod_i
/// cos(theta + phi_j^i), evaluated by direct products. The leading term of g
/// is cos(N*theta) with unit coefficient; S_N = leading_amplitude * g.
double normalized_correlation(const PhaseSequenceSet& phases, double theta);

/// Same quantity via the independent expansion oracle: each product of N
/// cosines is expanded into its 2^(N-1) constituent cosine terms by explicit
/// sign-pattern enumeration. Refuses slot counts above 24.
double normalized_correlation_expansion(const PhaseSequenceSet& phases, double theta);

/// Normalized cross-term residual g(theta) - cos(N*theta) computed with the
/// expansion oracle, after cross-checking oracle and direct evaluation agree
/// to 1e-12 (relative, floored at an absolute 1e-12 for near-cancellations).
double normalized_residual(const PhaseSequenceSet& phases, double theta);

/// Physical-units residual S_N(theta) - expected_sn(theta) for a noiseless
/// designed or random set: leading_amplitude(cfg) * normalized_residual.
double cross_term_residual(const PhaseSequenceSet& phases, double theta,
                           const InterferometerConfig& cfg);

/// Principal-branch inverse of expected_sn: acos(s_n/amplitude)/N, valid
/// unambiguously for theta in (0, pi/N). Values beyond the amplitude by more
/// than 1e-9 relative raise OutOfRangeError; smaller excursions clamp.
double estimate_theta(double s_n, const InterferometerConfig& cfg);

/// First-order error propagation delta_s / |dS_N/dtheta|. Raises
/// SingularOperatingPointError at fringe turning points (|sin(N theta)| < 1e-9).
double error_propagation(double delta_s, double theta, const InterferometerConfig& cfg);

/// Shot term 1/sqrt(N*N_p) plus modulation term (sqrt(2^(N-1)(N-1)/(MN))+1)*delta_phi.
ErrorBudget error_budget(const InterferometerConfig& cfg, double delta_phi);

}  // namespace rpmi
