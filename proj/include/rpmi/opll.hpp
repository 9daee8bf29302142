#pragma once

namespace rpmi {

/// Steady-state parameters of the optical phase-locked loop that bounds the
/// modulator phase error.
struct OpllConfig {
    double noise_psd = 0.0;       // N0, signal-power units per hertz
    double loop_bandwidth = 0.0;  // B_L, hertz (one-sided)
    double transimpedance = 0.0;  // r, volts per ampere
    double responsivity = 0.0;    // R, amperes per watt
    double received_power = 0.0;  // P, watts

    /// Throws std::invalid_argument unless every field is positive.
    void validate() const;
};

/// Intensity-difference detector gain A = 2*r*R*P.
double detector_gain(const OpllConfig& cfg);

/// Steady-state residual phase error sqrt(N0*B_L)/A, radians.
double residual_phase_error(const OpllConfig& cfg);

/// Default operating point, chosen so residual_phase_error comes out at
/// 0.3 degrees with a 10 kHz loop and microwatt-level received power.
OpllConfig default_opll_config();

}  // namespace rpmi
