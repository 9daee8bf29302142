#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpmi/correlator.hpp"
#include "rpmi/interferometer.hpp"
#include "rpmi/opll.hpp"
#include "rpmi/pnseq.hpp"

namespace rpmi {

inline constexpr const char* kVersion = "0.1.0";

/// How the scenario's phase set is constructed.
struct PhaseSetSpec {
    PhaseSetMode mode = PhaseSetMode::kDesigned;
    std::string poly = "1+x+x^2";   // designed mode: generator polynomial text
    std::uint32_t lfsr_seed = 1;    // designed mode: LFSR start state
    /// Strict selections require a fully subset-XOR-free shift family and
    /// fail otherwise; non-strict selections pad with dependent shifts and
    /// record the achieved rank.
    bool strict = true;
    std::uint64_t random_seed = 1;  // uniform mode
};

/// The signal phase under measurement.
struct SignalSpec {
    std::string kind = "constant";  // constant | path_difference | sampled
    double theta = 0.0;             // constant kind, radians
    double delta_l = 0.0;           // path_difference kind, meters
    std::vector<double> timestamps; // sampled kind
    std::vector<double> thetas;
};

/// Sweep axes; each runner consumes the one it needs.
struct SweepSpec {
    std::vector<double> theta_grid;   // radians
    std::vector<double> np_grid;      // photons per sampling period
    std::vector<double> jitter_grid;  // radians
};

/// A fully specified run: configuration, phase-set recipe, signal, noise,
/// sweep axis and trial count.
struct Scenario {
    InterferometerConfig interferometer;
    PhaseSetSpec phase_set;
    SignalSpec signal;
    NoiseModel noise;
    SweepSpec sweep;
    int trials = 200;
    std::string out_dir;
    std::string format = "csv";

    /// Cross-field validation (module invariants plus consistency such as
    /// phase_units == 2^order for designed sets). Throws std::invalid_argument.
    void validate() const;
    PhaseSequenceSet build_phases() const;
    PhaseSignal build_signal() const;
};

/// One record of a sweep; the meaning of x and of the statistics columns
/// depends on the report kind (theta, photon number, or jitter std).
struct SweepPoint {
    double x = 0.0;
    double s_n = 0.0;
    double expected = 0.0;
    double theta_hat = 0.0;
    double residual = 0.0;
    double sigma = 0.0;
};

/// Result of a runner: sweep records plus derived metrics and enough
/// provenance (scenario echo, seed, version) to replay bit-identically.
struct Report {
    std::string kind;
    Scenario scenario;
    std::vector<SweepPoint> points;
    nlohmann::json metrics;
    nlohmann::json provenance;
    std::optional<PhaseSequenceSet> phase_set;
};

void to_json(nlohmann::json& j, const PhaseSetSpec& spec);
void from_json(const nlohmann::json& j, PhaseSetSpec& spec);
void to_json(nlohmann::json& j, const SignalSpec& spec);
void from_json(const nlohmann::json& j, SignalSpec& spec);
void to_json(nlohmann::json& j, const SweepSpec& spec);
void from_json(const nlohmann::json& j, SweepSpec& spec);
void to_json(nlohmann::json& j, const Scenario& scenario);
void from_json(const nlohmann::json& j, Scenario& scenario);
void to_json(nlohmann::json& j, const SweepPoint& point);
nlohmann::json report_to_json(const Report& report);

/// Inclusive arithmetic grid; the stop value is included when it lands
/// within a relative 1e-9 of a step.
std::vector<double> linspace_grid(double start, double stop, double step);
/// Parses the "start:stop:step" CLI form.
std::vector<double> parse_grid(const std::string& text);

/// Ordinary least squares y = slope*x + intercept with the slope's standard
/// error (needs >= 3 points for a nonzero error estimate).
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Linearly interpolated zero crossings of y(x) over a sampled grid.
std::vector<double> zero_crossings(const std::vector<double>& x,
                                   const std::vector<double>& y);

/// Baseline scenarios used when the CLI is run without a config file.
Scenario default_sequences_scenario();
Scenario default_fringe_scenario();
Scenario default_montecarlo_scenario();
Scenario default_jitter_scenario();
Scenario worked_example_scenario();

/// The canonical worked example: 40 Hz..5 kHz band, 10 slots of 256 phase
/// units on the order-8 generator, reporting the modulator rate, the
/// designed-set residual and the additive error budget at 0.3 degrees of
/// modulation jitter.
Report run_worked_example();

/// Noiseless theta sweep with zero-crossing fringe analysis. A single-slot
/// configuration degenerates to the plain cosine fringe and is evaluated in
/// closed form.
Report run_fringe_sweep(const Scenario& scenario);

/// Monte Carlo shot-noise study over the N_p grid at a fixed operating
/// theta (default at mid-fringe, N*theta = pi/2): per-point estimator spread
/// and the fitted log-log scaling slope.
Report run_shot_noise_scaling(const Scenario& scenario);

/// Monte Carlo modulation-jitter study over the jitter grid with the
/// closed-form modulation budget overlaid per point.
Report run_jitter_study(const Scenario& scenario);

/// Builds and summarizes the scenario's phase set (offsets, rank, closure).
Report run_sequences(const Scenario& scenario);

/// Points table in the kind-specific CSV schema (sequences reports render
/// the phase set itself).
std::string report_points_csv(const Report& report);
/// Short human-readable digest of the headline metrics.
std::string report_summary(const Report& report);
/// Writes the report into out_dir as report.csv/report.json (sequences:
/// phase_set.csv/phase_set.json) and always a summary.txt alongside.
void write_report(const Report& report, const std::string& out_dir,
                  const std::string& format);

}  // namespace rpmi
