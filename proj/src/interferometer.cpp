#include "rpmi/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "rpmi/rng.hpp"

namespace rpmi {

namespace {

double draw_poisson(std::mt19937_64& rng, double mean) {
    if (mean < 0.0) {
        throw std::logic_error("internal error: negative Poisson mean " + std::to_string(mean));
    }
    if (mean == 0.0) return 0.0;
    std::poisson_distribution<long long> dist(mean);
    return static_cast<double>(dist(rng));
}

}  // namespace

void InterferometerConfig::validate() const {
    if (!(n_photons > 0.0)) throw std::invalid_argument("n_photons must be positive");
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
    if (!(upper_freq > 0.0)) throw std::invalid_argument("upper_freq must be positive");
    if (!(sampling_period > 0.0)) throw std::invalid_argument("sampling_period must be positive");
    if (slots < 2) throw std::invalid_argument("slots must be >= 2");
    if (phase_units < 1) throw std::invalid_argument("phase_units must be >= 1");
    if (!(photon_budget > 0.0) || photon_budget > 1.0) {
        throw std::invalid_argument("photon_budget must lie in (0, 1]");
    }
    const double nyquist = nyquist_sampling_period(upper_freq);
    if (std::fabs(sampling_period - nyquist) > 1e-12 * nyquist) {
        throw std::invalid_argument("sampling_period must equal 1/(2*upper_freq) to 1e-12 relative");
    }
}

double nyquist_sampling_period(double upper_freq) {
    if (!(upper_freq > 0.0)) throw std::invalid_argument("upper_freq must be positive");
    return 1.0 / (2.0 * upper_freq);
}

PhaseSignal PhaseSignal::constant(double theta) {
    PhaseSignal s;
    s.kind_ = Kind::kConstant;
    s.theta_ = theta;
    return s;
}

PhaseSignal PhaseSignal::path_difference(double delta_l, double wavelength) {
    PhaseSignal s;
    s.kind_ = Kind::kPathDifference;
    s.theta_ = theta_from_path_difference(delta_l, wavelength);
    return s;
}

PhaseSignal PhaseSignal::sampled_waveform(std::vector<double> timestamps,
                                          std::vector<double> thetas) {
    if (timestamps.empty() || timestamps.size() != thetas.size()) {
        throw std::invalid_argument("sampled waveform needs equal-length nonempty arrays");
    }
    for (std::size_t k = 0; k < timestamps.size(); ++k) {
        if (!std::isfinite(timestamps[k]) || !std::isfinite(thetas[k])) {
            throw std::invalid_argument("sampled waveform entries must be finite");
        }
        if (k > 0 && timestamps[k] <= timestamps[k - 1]) {
            throw std::invalid_argument("sampled waveform timestamps must be strictly increasing");
        }
    }
    PhaseSignal s;
    s.kind_ = Kind::kSampledWaveform;
    s.times_ = std::move(timestamps);
    s.thetas_ = std::move(thetas);
    return s;
}

double PhaseSignal::theta_at(double t) const {
    if (kind_ != Kind::kSampledWaveform) return theta_;
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return thetas_.front();
    return thetas_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

void NoiseModel::validate() const {
    if (!(phase_jitter_std >= 0.0)) {
        throw std::invalid_argument("phase_jitter_std must be >= 0");
    }
}

double theta_from_path_difference(double delta_l, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("wavelength must be positive");
    return 4.0 * std::numbers::pi * delta_l / lambda;
}

double ideal_intensity(double theta, double phi, const InterferometerConfig& cfg) {
    return cfg.photons_per_unit() * std::cos(theta + phi);
}

IntensityRecord simulate_sampling_period(const InterferometerConfig& cfg,
                                         const PhaseSignal& signal,
                                         const PhaseSequenceSet& phases,
                                         const NoiseModel& noise,
                                         std::uint64_t period_index) {
    cfg.validate();
    noise.validate();
    if (phases.slots() != cfg.slots || phases.units() != cfg.phase_units) {
        throw std::invalid_argument("phase set dimensions do not match the configuration");
    }

    std::mt19937_64 rng(derive_stream_seed(noise.rng_seed, period_index));
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    const double unit_dt = cfg.sampling_period /
                           (static_cast<double>(cfg.slots) * cfg.phase_units);
    const double mean_per_unit = cfg.photons_per_unit();

    IntensityRecord rec{.values = RowMatrix(cfg.slots, cfg.phase_units),
                        .config = cfg,
                        .noise = noise,
                        .period_index = period_index};
    for (int i = 0; i < cfg.slots; ++i) {
        for (int j = 0; j < cfg.phase_units; ++j) {
            // Mid-unit timestamp; constant signals evaluate identically everywhere.
            const double t = (static_cast<double>(i) * cfg.phase_units + j + 0.5) * unit_dt;
            const double theta = signal.theta_at(t);
            double phi = phases.at(i, j);
            if (noise.phase_jitter_std > 0.0) {
                phi += noise.phase_jitter_std * unit_normal(rng);
            }
            const double c = std::cos(theta + phi);
            if (!noise.shot_noise) {
                rec.values.at(i, j) = mean_per_unit * c;
            } else {
                const double p1 = draw_poisson(rng, 0.5 * mean_per_unit * (1.0 + c));
                const double p2 = draw_poisson(rng, 0.5 * mean_per_unit * (1.0 - c));
                rec.values.at(i, j) = p1 - p2;
            }
        }
    }
    return rec;
}

}  // namespace rpmi
