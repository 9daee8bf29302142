#include "rpmi/correlator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

#include "rpmi/errors.hpp"

namespace rpmi {

namespace {

constexpr int kMaxExpansionSlots = 24;  // 2^(N-1) cosine terms per column

void require_record_shape(const IntensityRecord& record) {
    if (record.values.rows < 2 || record.values.cols < 1) {
        throw std::invalid_argument("correlation needs at least 2 slots and 1 unit");
    }
}

}  // namespace

double leading_amplitude(const InterferometerConfig& cfg) {
    const double per_port = cfg.effective_photons() /
                            (2.0 * cfg.phase_units * cfg.slots);
    return 2.0 * std::pow(per_port, cfg.slots);
}

double expected_sn(double theta, const InterferometerConfig& cfg) {
    return leading_amplitude(cfg) * std::cos(cfg.slots * theta);
}

CorrelationResult correlate(const IntensityRecord& record,
                            std::optional<double> known_theta) {
    require_record_shape(record);
    const int slots = record.values.rows;
    const int units = record.values.cols;
    double sum = 0.0;
    for (int j = 0; j < units; ++j) {
        double prod = 1.0;
        for (int i = 0; i < slots; ++i) prod *= record.values.at(i, j);
        sum += prod;
    }
    CorrelationResult out;
    out.s_n = sum / units;
    out.leading_amplitude = leading_amplitude(record.config);
    if (out.leading_amplitude > 0.0) {
        double ratio = out.s_n / out.leading_amplitude;
        ratio = std::clamp(ratio, -1.0, 1.0);
        out.n_fold_angle = std::acos(ratio);
    } else {
        out.n_fold_angle = std::numeric_limits<double>::quiet_NaN();
    }
    if (known_theta) {
        out.residual = out.s_n - expected_sn(*known_theta, record.config);
    }
    return out;
}

double normalized_correlation(const PhaseSequenceSet& phases, double theta) {
    const int slots = phases.slots();
    const int units = phases.units();
    double sum = 0.0;
    for (int j = 0; j < units; ++j) {
        double prod = 1.0;
        for (int i = 0; i < slots; ++i) prod *= std::cos(theta + phases.at(i, j));
        sum += prod;
    }
    return std::ldexp(sum / units, slots - 1);
}

double normalized_correlation_expansion(const PhaseSequenceSet& phases, double theta) {
    const int slots = phases.slots();
    const int units = phases.units();
    if (slots > kMaxExpansionSlots) {
        throw std::invalid_argument("expansion oracle refuses more than " +
                                    std::to_string(kMaxExpansionSlots) + " slots (2^(N-1) terms)");
    }
    // prod_i cos(a_i) = 2^(1-N) * sum over sign patterns e (e_1 fixed +1) of
    // cos(sum_i e_i a_i); the 2^(N-1) factor in g cancels it exactly.
    const std::uint32_t patterns = std::uint32_t{1} << (slots - 1);
    double sum = 0.0;
    for (int j = 0; j < units; ++j) {
        for (std::uint32_t mask = 0; mask < patterns; ++mask) {
            // Bit i-1 of mask set means slot i (1-based from the second row)
            // enters with sign -1.
            const int k = slots - 2 * std::popcount(mask);
            double psi = phases.at(0, j);
            for (int i = 1; i < slots; ++i) {
                psi += (mask >> (i - 1) & 1u) ? -phases.at(i, j) : phases.at(i, j);
            }
            sum += std::cos(k * theta + psi);
        }
    }
    return sum / units;
}

double normalized_residual(const PhaseSequenceSet& phases, double theta) {
    const double direct = normalized_correlation(phases, theta);
    const double oracle = normalized_correlation_expansion(phases, theta);
    const double scale = std::max({std::fabs(direct), std::fabs(oracle), 1.0});
    if (std::fabs(direct - oracle) > 1e-12 * scale) {
        throw std::logic_error("internal error: expansion oracle disagrees with direct product (" +
                               std::to_string(oracle) + " vs " + std::to_string(direct) + ")");
    }
    return oracle - std::cos(phases.slots() * theta);
}

double cross_term_residual(const PhaseSequenceSet& phases, double theta,
                           const InterferometerConfig& cfg) {
    if (phases.slots() != cfg.slots || phases.units() != cfg.phase_units) {
        throw std::invalid_argument("phase set dimensions do not match the configuration");
    }
    return leading_amplitude(cfg) * normalized_residual(phases, theta);
}

double estimate_theta(double s_n, const InterferometerConfig& cfg) {
    const double amp = leading_amplitude(cfg);
    if (!(amp > 0.0) || !std::isfinite(amp)) {
        throw std::invalid_argument("leading amplitude is zero or non-finite; cannot invert");
    }
    if (std::fabs(s_n) > amp * (1.0 + 1e-9)) {
        throw OutOfRangeError("correlation value " + std::to_string(s_n) +
                              " exceeds the fringe amplitude " + std::to_string(amp) +
                              " beyond tolerance");
    }
    double ratio = s_n / amp;
    if (ratio > 1.0 || ratio < -1.0) {
        std::clog << "warning: clamping correlation ratio " << ratio << " to the fringe range\n";
        ratio = std::clamp(ratio, -1.0, 1.0);
    }
    return std::acos(ratio) / cfg.slots;
}

double error_propagation(double delta_s, double theta, const InterferometerConfig& cfg) {
    const double slope_mag = cfg.slots * leading_amplitude(cfg) *
                             std::fabs(std::sin(cfg.slots * theta));
    if (std::fabs(std::sin(cfg.slots * theta)) < 1e-9) {
        throw SingularOperatingPointError(
            "fringe turning point: |sin(N*theta)| < 1e-9 at theta=" + std::to_string(theta));
    }
    return delta_s / slope_mag;
}

ErrorBudget error_budget(const InterferometerConfig& cfg, double delta_phi) {
    if (!(delta_phi >= 0.0)) throw std::invalid_argument("delta_phi must be >= 0");
    ErrorBudget budget;
    budget.shot_term = 1.0 / std::sqrt(static_cast<double>(cfg.slots) * cfg.effective_photons());
    const double variance_factor = std::ldexp(1.0, cfg.slots - 1) * (cfg.slots - 1) /
                                   (static_cast<double>(cfg.phase_units) * cfg.slots);
    budget.modulation_term = (std::sqrt(variance_factor) + 1.0) * delta_phi;
    budget.total = budget.shot_term + budget.modulation_term;
    return budget;
}

}  // namespace rpmi
