#include "rpmi/opll.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rpmi {

void OpllConfig::validate() const {
    if (!(noise_psd > 0.0)) throw std::invalid_argument("noise_psd must be positive");
    if (!(loop_bandwidth > 0.0)) throw std::invalid_argument("loop_bandwidth must be positive");
    if (!(transimpedance > 0.0)) throw std::invalid_argument("transimpedance must be positive");
    if (!(responsivity > 0.0)) throw std::invalid_argument("responsivity must be positive");
    if (!(received_power > 0.0)) throw std::invalid_argument("received_power must be positive");
}

double detector_gain(const OpllConfig& cfg) {
    cfg.validate();
    return 2.0 * cfg.transimpedance * cfg.responsivity * cfg.received_power;
}

double residual_phase_error(const OpllConfig& cfg) {
    cfg.validate();
    return std::sqrt(cfg.noise_psd * cfg.loop_bandwidth) / detector_gain(cfg);
}

OpllConfig default_opll_config() {
    OpllConfig cfg;
    cfg.transimpedance = 1e4;   // V/A
    cfg.responsivity = 0.8;     // A/W
    cfg.received_power = 1e-6;  // W
    cfg.loop_bandwidth = 1e4;   // Hz
    // Back out the noise PSD that puts the residual at 0.3 degrees. The gain
    // is computed inline because the config is not yet fully populated.
    const double target = 0.3 * std::numbers::pi / 180.0;
    const double gain = 2.0 * cfg.transimpedance * cfg.responsivity * cfg.received_power;
    cfg.noise_psd = target * target * gain * gain / cfg.loop_bandwidth;
    return cfg;
}

}  // namespace rpmi
