#pragma once

#include <cstdint>
#include <vector>

#include "rpmi/matrix.hpp"
#include "rpmi/pnseq.hpp"

namespace rpmi {

/// Operating parameters of one sampling period: N_p photons split over
/// N slots x M phase units, sampled at the Nyquist period of the detection
/// band's upper edge.
struct InterferometerConfig {
    double n_photons = 1e6;        // average photons per sampling period, N_p
    double wavelength = 1.064e-6;  // meters
    double upper_freq = 5000.0;    // detection-band upper edge f_u, hertz
    double sampling_period = 1e-4; // T_s, seconds; must equal 1/(2 f_u)
    int slots = 2;                 // N
    int phase_units = 4;           // M
    /// Optical losses and detector quantum efficiency folded into one
    /// multiplicative photon-budget factor in (0, 1].
    double photon_budget = 1.0;

    /// Modulator switching rate implied by the schedule, N*M/T_s.
    double modulator_rate() const {
        return static_cast<double>(slots) * phase_units / sampling_period;
    }
    /// Mean photons per phase unit after the budget factor, N_p/(M*N).
    double photons_per_unit() const {
        return n_photons * photon_budget / (static_cast<double>(phase_units) * slots);
    }
    double effective_photons() const { return n_photons * photon_budget; }

    /// Throws std::invalid_argument on any violated invariant, including the
    /// Nyquist rule |T_s - 1/(2 f_u)| <= 1e-12 relative.
    void validate() const;
};

/// Nyquist sampling period for a band limited at f_u.
double nyquist_sampling_period(double upper_freq);

/// The signal phase theta as a function of time within a sampling period.
/// Time-varying signals are evaluated with a zero-order hold at each phase
/// unit's timestamp.
class PhaseSignal {
public:
    enum class Kind { kConstant, kPathDifference, kSampledWaveform };

    static PhaseSignal constant(double theta);
    /// theta = 4*pi*delta_l/wavelength.
    static PhaseSignal path_difference(double delta_l, double wavelength);
    /// Zero-order hold over (timestamp, theta) samples; timestamps must be
    /// strictly increasing. Times before the first sample read the first.
    static PhaseSignal sampled_waveform(std::vector<double> timestamps,
                                        std::vector<double> thetas);

    Kind kind() const { return kind_; }
    double theta_at(double t) const;

private:
    PhaseSignal() = default;
    Kind kind_ = Kind::kConstant;
    double theta_ = 0.0;
    std::vector<double> times_;
    std::vector<double> thetas_;
};

/// Noise switches and the seed of the deterministic random stream.
struct NoiseModel {
    bool shot_noise = false;
    double phase_jitter_std = 0.0;  // radians
    std::uint64_t rng_seed = 1;

    void validate() const;
};

/// One sampling period of measured intensity differences I_j^i, with the
/// configuration and noise snapshots needed to replay it.
struct IntensityRecord {
    RowMatrix values;  // slots x phase_units
    InterferometerConfig config;
    NoiseModel noise;
    std::uint64_t period_index = 0;
};

/// theta = 4*pi*delta_l/lambda. Throws std::invalid_argument for lambda <= 0.
double theta_from_path_difference(double delta_l, double lambda);

/// Noiseless per-unit intensity difference (N_p/(M*N)) * cos(theta + phi).
double ideal_intensity(double theta, double phi, const InterferometerConfig& cfg);

/// Simulates one sampling period. Per unit: the modulated phase picks up a
/// Gaussian jitter draw when enabled; with shot noise the reading is the
/// difference of two Poisson draws with means (N_p/(2MN))(1 +- cos(theta+phi)),
/// otherwise the exact cosine value. The random stream is derived from
/// (noise.rng_seed, period_index) so distinct periods are independent and the
/// whole simulation replays bit-identically.
IntensityRecord simulate_sampling_period(const InterferometerConfig& cfg,
                                         const PhaseSignal& signal,
                                         const PhaseSequenceSet& phases,
                                         const NoiseModel& noise,
                                         std::uint64_t period_index = 0);

}  // namespace rpmi
