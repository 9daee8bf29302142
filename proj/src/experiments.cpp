#include "rpmi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rpmi/errors.hpp"
#include "rpmi/io.hpp"

namespace rpmi {

namespace {

constexpr double kPi = std::numbers::pi;

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json make_provenance(const Scenario& scenario) {
    return {{"seed", scenario.noise.rng_seed},
            {"version", kVersion},
            {"timestamp", iso_timestamp()}};
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double rms_about(const std::vector<double>& v, double center) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (double x : v) acc += (x - center) * (x - center);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Operating point for the noise studies: the scenario's constant signal
/// phase, or mid-fringe N*theta = pi/2 when left at zero.
double operating_theta(const Scenario& scenario) {
    if (scenario.signal.kind == "sampled") {
        throw std::invalid_argument("noise studies need a constant operating phase");
    }
    const double theta = scenario.build_signal().theta_at(0.0);
    if (theta != 0.0) return theta;
    return kPi / (2.0 * scenario.interferometer.slots);
}

nlohmann::json selection_metrics(const PhaseSequenceSet& set) {
    nlohmann::json j;
    if (set.design) {
        j["offsets"] = set.design->shifts;
        j["rank"] = set.design->independent_rank;
        j["subset_xor_free"] = set.design->subset_xor_free;
        j["poly"] = set.design->poly.to_string();
        j["lfsr_seed"] = set.design->lfsr_seed;
    }
    return j;
}

}  // namespace

void to_json(nlohmann::json& j, const PhaseSetSpec& spec) {
    j = {{"mode", spec.mode == PhaseSetMode::kDesigned ? "designed" : "uniform"},
         {"poly", spec.poly},
         {"lfsr_seed", spec.lfsr_seed},
         {"strict", spec.strict},
         {"random_seed", spec.random_seed}};
}

void from_json(const nlohmann::json& j, PhaseSetSpec& spec) {
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "designed") {
            spec.mode = PhaseSetMode::kDesigned;
        } else if (mode == "uniform") {
            spec.mode = PhaseSetMode::kUniformRandom;
        } else {
            throw std::invalid_argument("phase_set.mode must be 'designed' or 'uniform'");
        }
    }
    spec.poly = j.value("poly", spec.poly);
    spec.lfsr_seed = j.value("lfsr_seed", spec.lfsr_seed);
    spec.strict = j.value("strict", spec.strict);
    spec.random_seed = j.value("random_seed", spec.random_seed);
}

void to_json(nlohmann::json& j, const SignalSpec& spec) {
    j = {{"kind", spec.kind},
         {"theta", spec.theta},
         {"delta_l", spec.delta_l},
         {"timestamps", spec.timestamps},
         {"thetas", spec.thetas}};
}

void from_json(const nlohmann::json& j, SignalSpec& spec) {
    spec.kind = j.value("kind", spec.kind);
    spec.theta = j.value("theta", spec.theta);
    spec.delta_l = j.value("delta_l", spec.delta_l);
    spec.timestamps = j.value("timestamps", spec.timestamps);
    spec.thetas = j.value("thetas", spec.thetas);
}

void to_json(nlohmann::json& j, const SweepSpec& spec) {
    j = {{"theta_grid", spec.theta_grid},
         {"np_grid", spec.np_grid},
         {"jitter_grid", spec.jitter_grid}};
}

void from_json(const nlohmann::json& j, SweepSpec& spec) {
    if (j.contains("theta_grid")) {
        const auto& g = j.at("theta_grid");
        if (g.is_object()) {
            spec.theta_grid = linspace_grid(g.at("start").get<double>(),
                                            g.at("stop").get<double>(),
                                            g.at("step").get<double>());
        } else {
            spec.theta_grid = g.get<std::vector<double>>();
        }
    }
    spec.np_grid = j.value("np_grid", spec.np_grid);
    if (j.contains("jitter_grid_deg")) {
        spec.jitter_grid.clear();
        for (double deg : j.at("jitter_grid_deg").get<std::vector<double>>()) {
            spec.jitter_grid.push_back(deg * kPi / 180.0);
        }
    } else {
        spec.jitter_grid = j.value("jitter_grid", spec.jitter_grid);
    }
}

void to_json(nlohmann::json& j, const Scenario& scenario) {
    j = {{"interferometer", scenario.interferometer},
         {"phase_set", scenario.phase_set},
         {"signal", scenario.signal},
         {"noise", scenario.noise},
         {"sweep", scenario.sweep},
         {"trials", scenario.trials},
         {"out_dir", scenario.out_dir},
         {"format", scenario.format}};
}

void from_json(const nlohmann::json& j, Scenario& scenario) {
    if (j.contains("interferometer")) j.at("interferometer").get_to(scenario.interferometer);
    if (j.contains("phase_set")) j.at("phase_set").get_to(scenario.phase_set);
    if (j.contains("signal")) j.at("signal").get_to(scenario.signal);
    if (j.contains("noise")) j.at("noise").get_to(scenario.noise);
    if (j.contains("sweep")) j.at("sweep").get_to(scenario.sweep);
    scenario.trials = j.value("trials", scenario.trials);
    scenario.out_dir = j.value("out_dir", scenario.out_dir);
    scenario.format = j.value("format", scenario.format);
}

void to_json(nlohmann::json& j, const SweepPoint& point) {
    j = {{"x", point.x},
         {"s_n", point.s_n},
         {"expected", point.expected},
         {"theta_hat", point.theta_hat},
         {"residual", point.residual},
         {"sigma", point.sigma}};
}

nlohmann::json report_to_json(const Report& report) {
    nlohmann::json j{{"kind", report.kind},
                     {"scenario", report.scenario},
                     {"points", report.points},
                     {"metrics", report.metrics},
                     {"provenance", report.provenance}};
    if (report.phase_set) j["phase_set"] = phase_set_to_json(*report.phase_set);
    return j;
}

void Scenario::validate() const {
    interferometer.validate();
    noise.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (format != "csv" && format != "json") {
        throw std::invalid_argument("format must be 'csv' or 'json'");
    }
    if (signal.kind != "constant" && signal.kind != "path_difference" &&
        signal.kind != "sampled") {
        throw std::invalid_argument("signal.kind must be constant, path_difference or sampled");
    }
    if (phase_set.mode == PhaseSetMode::kDesigned) {
        const GeneratorPolynomial poly = GeneratorPolynomial::parse(phase_set.poly);
        if (interferometer.phase_units != (1 << poly.order())) {
            throw std::invalid_argument(
                "designed sets need phase_units == 2^order (order " +
                std::to_string(poly.order()) + " implies " +
                std::to_string(1 << poly.order()) + " units, config has " +
                std::to_string(interferometer.phase_units) + ")");
        }
        if (phase_set.lfsr_seed == 0 ||
            (phase_set.lfsr_seed >> poly.order()) != 0) {
            throw std::invalid_argument("lfsr_seed must be a nonzero state of order bits");
        }
    }
}

PhaseSequenceSet Scenario::build_phases() const {
    if (phase_set.mode == PhaseSetMode::kDesigned) {
        const GeneratorPolynomial poly = GeneratorPolynomial::parse(phase_set.poly);
        return phase_set.strict
                   ? build_phase_set(poly, interferometer.slots, phase_set.lfsr_seed)
                   : build_phase_set_best_effort(poly, interferometer.slots,
                                                 phase_set.lfsr_seed);
    }
    return random_phase_set(interferometer.slots, interferometer.phase_units,
                            phase_set.random_seed);
}

PhaseSignal Scenario::build_signal() const {
    if (signal.kind == "constant") return PhaseSignal::constant(signal.theta);
    if (signal.kind == "path_difference") {
        return PhaseSignal::path_difference(signal.delta_l, interferometer.wavelength);
    }
    if (signal.kind == "sampled") {
        return PhaseSignal::sampled_waveform(signal.timestamps, signal.thetas);
    }
    throw std::invalid_argument("unknown signal kind '" + signal.kind + "'");
}

std::vector<double> linspace_grid(double start, double stop, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (stop < start) throw std::invalid_argument("grid stop must be >= start");
    const double span = stop - start;
    const long count = static_cast<long>(std::floor(span / step * (1.0 + 1e-9))) + 1;
    if (count > 10'000'000L) throw std::invalid_argument("grid has too many points");
    std::vector<double> grid(count);
    for (long k = 0; k < count; ++k) grid[k] = start + static_cast<double>(k) * step;
    return grid;
}

std::vector<double> parse_grid(const std::string& text) {
    std::istringstream ss(text);
    std::string part;
    std::vector<double> parts;
    while (std::getline(ss, part, ':')) {
        std::size_t pos = 0;
        parts.push_back(std::stod(part, &pos));
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("grid must have the form start:stop:step, got '" + text + "'");
    }
    return linspace_grid(parts[0], parts[1], parts[2]);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("line fit needs >= 2 paired points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ss_res = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double r = y[k] - (fit.intercept + fit.slope * x[k]);
            ss_res += r * r;
        }
        fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
    }
    return fit;
}

std::vector<double> zero_crossings(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("mismatched crossing arrays");
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        if (y[k] == 0.0) {
            if (out.empty() || out.back() != x[k]) out.push_back(x[k]);
        } else if ((y[k] > 0.0) != (y[k + 1] > 0.0) && y[k + 1] != 0.0) {
            out.push_back(x[k] - y[k] * (x[k + 1] - x[k]) / (y[k + 1] - y[k]));
        }
    }
    if (!x.empty() && !y.empty() && y.back() == 0.0 &&
        (out.empty() || out.back() != x.back())) {
        out.push_back(x.back());
    }
    return out;
}

Scenario default_sequences_scenario() {
    Scenario s;
    s.interferometer.slots = 5;
    s.interferometer.phase_units = 16;
    s.phase_set.poly = GeneratorPolynomial::primitive(4).to_string();
    return s;
}

Scenario default_fringe_scenario() {
    Scenario s;
    s.interferometer.slots = 4;
    s.interferometer.phase_units = 16;
    s.phase_set.poly = GeneratorPolynomial::primitive(4).to_string();
    s.sweep.theta_grid = linspace_grid(0.0, 2.0 * kPi, 0.005);
    return s;
}

Scenario default_montecarlo_scenario() {
    Scenario s;
    s.interferometer.slots = 4;
    s.interferometer.phase_units = 16;
    s.phase_set.poly = GeneratorPolynomial::primitive(4).to_string();
    s.noise.shot_noise = true;
    s.trials = 250;
    for (int half_decade = 8; half_decade <= 16; ++half_decade) {
        s.sweep.np_grid.push_back(std::pow(10.0, 0.5 * half_decade));
    }
    return s;
}

Scenario default_jitter_scenario() {
    Scenario s;
    s.interferometer.slots = 10;
    s.interferometer.phase_units = 512;
    s.phase_set.poly = GeneratorPolynomial::primitive(9).to_string();
    s.trials = 400;
    for (double deg : {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.8}) {
        s.sweep.jitter_grid.push_back(deg * kPi / 180.0);
    }
    return s;
}

Scenario worked_example_scenario() {
    Scenario s;
    s.interferometer.n_photons = 1e6;
    s.interferometer.upper_freq = 5000.0;
    s.interferometer.sampling_period = nyquist_sampling_period(5000.0);
    s.interferometer.slots = 10;
    s.interferometer.phase_units = 256;
    s.phase_set.poly = "1+x^2+x^3+x^4+x^8";
    // A fully subset-XOR-free family of 9 shifts does not exist at order 8
    // (the shift family spans an 8-dimensional GF(2) space), so this
    // configuration runs in best-effort mode and reports the achieved rank.
    s.phase_set.strict = false;
    s.sweep.theta_grid = linspace_grid(0.0, kPi / 10.0, kPi / 1000.0);
    return s;
}

Report run_worked_example() {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario scenario = worked_example_scenario();
    scenario.validate();
    const InterferometerConfig& cfg = scenario.interferometer;
    const PhaseSequenceSet set = scenario.build_phases();

    Report report;
    report.kind = "worked-example";
    report.scenario = scenario;
    report.phase_set = set;

    const double amp = leading_amplitude(cfg);
    double max_resid = 0.0;
    double sum_abs_resid = 0.0;
    for (double theta : scenario.sweep.theta_grid) {
        const double resid_norm = normalized_residual(set, theta);
        const double expected = expected_sn(theta, cfg);
        SweepPoint p;
        p.x = theta;
        p.expected = expected;
        p.s_n = expected + amp * resid_norm;
        p.residual = amp * resid_norm;
        p.theta_hat = std::numeric_limits<double>::quiet_NaN();
        report.points.push_back(p);
        max_resid = std::max(max_resid, std::fabs(resid_norm));
        sum_abs_resid += std::fabs(resid_norm);
    }

    const double delta_phi = 0.3 * kPi / 180.0;
    const ErrorBudget budget = error_budget(cfg, delta_phi);
    const OpllConfig opll = default_opll_config();

    report.metrics["sampling_period_s"] = cfg.sampling_period;
    report.metrics["phase_units"] = cfg.phase_units;
    report.metrics["slots"] = cfg.slots;
    report.metrics["modulator_rate_hz"] = cfg.modulator_rate();
    report.metrics["budget"] = budget;
    report.metrics["delta_phi_deg"] = 0.3;
    report.metrics["budget_modulation_term_deg"] = budget.modulation_term * 180.0 / kPi;
    report.metrics["budget_total_deg"] = budget.total * 180.0 / kPi;
    report.metrics["selection"] = selection_metrics(set);
    report.metrics["residual_normalized_max"] = max_resid;
    report.metrics["residual_normalized_mean_abs"] =
        sum_abs_resid / static_cast<double>(report.points.size());
    report.metrics["opll"] = {{"config", opll},
                              {"gain", detector_gain(opll)},
                              {"residual_rad", residual_phase_error(opll)},
                              {"residual_deg", residual_phase_error(opll) * 180.0 / kPi}};
    report.metrics["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.provenance = make_provenance(scenario);
    return report;
}

Report run_fringe_sweep(const Scenario& scenario) {
    Report report;
    report.kind = "fringe";
    report.scenario = scenario;
    if (scenario.sweep.theta_grid.empty()) {
        throw std::invalid_argument("fringe sweep needs a nonempty theta grid");
    }

    const int slots = scenario.interferometer.slots;
    std::vector<double> g_values;
    double amp = 0.0;
    if (slots == 1) {
        // Single-slot degenerate case: one all-2*pi phase row, so the sweep
        // is the plain cosine fringe S_1 = (N_p/M) cos(theta) in closed form.
        const auto& cfg = scenario.interferometer;
        if (!(cfg.n_photons > 0.0) || cfg.phase_units < 1) {
            throw std::invalid_argument("single-slot sweep needs positive photons and units");
        }
        amp = cfg.n_photons * cfg.photon_budget / cfg.phase_units;
        for (double theta : scenario.sweep.theta_grid) g_values.push_back(std::cos(theta));
    } else {
        scenario.validate();
        const PhaseSequenceSet set = scenario.build_phases();
        report.phase_set = set;
        amp = leading_amplitude(scenario.interferometer);
        for (double theta : scenario.sweep.theta_grid) {
            g_values.push_back(normalized_correlation(set, theta));
        }
    }

    double num = 0.0, den = 0.0;  // least-squares coefficient of cos(N theta)
    for (std::size_t k = 0; k < g_values.size(); ++k) {
        const double theta = scenario.sweep.theta_grid[k];
        const double c = std::cos(slots * theta);
        const double expected = amp * c;
        SweepPoint p;
        p.x = theta;
        p.s_n = amp * g_values[k];
        p.expected = expected;
        p.residual = p.s_n - expected;
        p.theta_hat = std::numeric_limits<double>::quiet_NaN();
        report.points.push_back(p);
        num += g_values[k] * c;
        den += c * c;
    }

    const std::vector<double> crossings = zero_crossings(scenario.sweep.theta_grid, g_values);
    std::vector<double> spacings;
    for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
        spacings.push_back(crossings[k + 1] - crossings[k]);
    }
    const double fit_coeff = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();

    report.metrics["crossing_count"] = crossings.size();
    report.metrics["mean_crossing_spacing"] = mean_of(spacings);
    report.metrics["expected_crossing_spacing"] = kPi / slots;
    report.metrics["fringe_period"] = 2.0 * mean_of(spacings);
    report.metrics["amplitude_expected"] = amp;
    report.metrics["amplitude_fit_coefficient"] = fit_coeff;
    // Log-space relative mismatch of fitted vs expected amplitude; safe for
    // amplitudes that underflow a direct ratio.
    report.metrics["log_amplitude_error"] =
        fit_coeff > 0.0 ? std::fabs(std::log(fit_coeff)) : std::numeric_limits<double>::infinity();
    report.metrics["modulator_rate_hz"] = scenario.interferometer.modulator_rate();
    report.provenance = make_provenance(scenario);
    return report;
}

Report run_shot_noise_scaling(const Scenario& scenario) {
    scenario.validate();
    if (scenario.trials < 100) {
        throw std::invalid_argument("scaling study needs >= 100 trials per point");
    }
    const auto& grid = scenario.sweep.np_grid;
    if (grid.empty()) throw std::invalid_argument("scaling study needs a nonempty np grid");
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    if (!(*lo > 0.0)) throw std::invalid_argument("np grid values must be positive");
    if (*hi / *lo < 1e3) {
        throw std::invalid_argument("np grid must span at least three decades");
    }

    Report report;
    report.kind = "montecarlo";
    report.scenario = scenario;
    const PhaseSequenceSet set = scenario.build_phases();
    report.phase_set = set;
    const double theta_star = operating_theta(scenario);
    const PhaseSignal signal = PhaseSignal::constant(theta_star);

    // Zero-noise control: the estimator must return theta_star exactly.
    InterferometerConfig cfg0 = scenario.interferometer;
    cfg0.n_photons = grid.front();
    const NoiseModel quiet{.shot_noise = false, .phase_jitter_std = 0.0,
                           .rng_seed = scenario.noise.rng_seed};
    const IntensityRecord baseline = simulate_sampling_period(cfg0, signal, set, quiet, 0);
    const double zero_noise_error =
        std::fabs(estimate_theta(correlate(baseline).s_n, cfg0) - theta_star);

    std::vector<double> log_np, log_sigma;
    nlohmann::json failures = nlohmann::json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        InterferometerConfig cfg = scenario.interferometer;
        cfg.n_photons = grid[k];
        NoiseModel noise = scenario.noise;
        noise.shot_noise = true;
        std::vector<double> estimates, s_values;
        long failed = 0;
        for (int t = 0; t < scenario.trials; ++t) {
            const std::uint64_t period = static_cast<std::uint64_t>(k) * scenario.trials + t;
            const IntensityRecord rec = simulate_sampling_period(cfg, signal, set, noise, period);
            const double s = correlate(rec).s_n;
            s_values.push_back(s);
            try {
                estimates.push_back(estimate_theta(s, cfg));
            } catch (const OutOfRangeError&) {
                ++failed;  // estimator saturated; excluded from the spread
            }
        }
        failures.push_back(failed);
        SweepPoint p;
        p.x = grid[k];
        p.s_n = mean_of(s_values);
        p.expected = expected_sn(theta_star, cfg);
        p.theta_hat = mean_of(estimates);
        p.residual = p.theta_hat - theta_star;
        p.sigma = sample_std(estimates);
        report.points.push_back(p);
        if (p.sigma > 0.0 && std::isfinite(p.sigma)) {
            log_np.push_back(std::log(grid[k]));
            log_sigma.push_back(std::log(p.sigma));
        }
    }

    const LineFit fit = fit_line(log_np, log_sigma);
    report.metrics["slope"] = fit.slope;
    report.metrics["slope_stderr"] = fit.slope_stderr;
    report.metrics["intercept"] = fit.intercept;
    report.metrics["theta_star"] = theta_star;
    report.metrics["zero_noise_error"] = zero_noise_error;
    report.metrics["trials"] = scenario.trials;
    report.metrics["failed_trials"] = failures;
    report.metrics["np_min"] = *lo;
    report.metrics["np_max"] = *hi;
    report.provenance = make_provenance(scenario);
    return report;
}

Report run_jitter_study(const Scenario& scenario) {
    scenario.validate();
    if (scenario.sweep.jitter_grid.empty()) {
        throw std::invalid_argument("jitter study needs a nonempty jitter grid");
    }
    for (double dphi : scenario.sweep.jitter_grid) {
        if (!(dphi >= 0.0)) throw std::invalid_argument("jitter values must be >= 0");
    }

    Report report;
    report.kind = "jitter";
    report.scenario = scenario;
    const PhaseSequenceSet set = scenario.build_phases();
    report.phase_set = set;
    const InterferometerConfig& cfg = scenario.interferometer;
    const double theta_star = operating_theta(scenario);
    const PhaseSignal signal = PhaseSignal::constant(theta_star);

    bool monotone = true;
    double prev_error = -1.0;
    for (std::size_t k = 0; k < scenario.sweep.jitter_grid.size(); ++k) {
        const double dphi = scenario.sweep.jitter_grid[k];
        NoiseModel noise = scenario.noise;
        noise.shot_noise = false;
        noise.phase_jitter_std = dphi;
        std::vector<double> estimates, s_values;
        long failed = 0;
        for (int t = 0; t < scenario.trials; ++t) {
            const std::uint64_t period = static_cast<std::uint64_t>(k) * scenario.trials + t;
            const IntensityRecord rec = simulate_sampling_period(cfg, signal, set, noise, period);
            const double s = correlate(rec).s_n;
            s_values.push_back(s);
            try {
                estimates.push_back(estimate_theta(s, cfg));
            } catch (const OutOfRangeError&) {
                ++failed;
            }
        }
        const double empirical = rms_about(estimates, theta_star);
        SweepPoint p;
        p.x = dphi;
        p.s_n = mean_of(s_values);
        p.expected = error_budget(cfg, dphi).modulation_term;  // closed-form overlay
        p.theta_hat = mean_of(estimates);
        p.residual = p.theta_hat - theta_star;
        p.sigma = empirical;
        report.points.push_back(p);
        if (prev_error >= 0.0 && empirical < prev_error) monotone = false;
        prev_error = empirical;
        if (failed > 0) {
            report.metrics["failed_trials_at_" + format_double(dphi)] = failed;
        }
    }

    // Reference operating point of the canonical worked example, for overlay.
    InterferometerConfig anchor_cfg;
    anchor_cfg.slots = 10;
    anchor_cfg.phase_units = 256;
    const double anchor_mod = error_budget(anchor_cfg, 0.3 * kPi / 180.0).modulation_term;
    report.metrics["anchor"] = {{"slots", 10},
                                {"phase_units", 256},
                                {"delta_phi_deg", 0.3},
                                {"modulation_term_deg", anchor_mod * 180.0 / kPi}};
    report.metrics["theta_star"] = theta_star;
    report.metrics["trials"] = scenario.trials;
    report.metrics["monotone_increasing"] = monotone;
    report.provenance = make_provenance(scenario);
    return report;
}

Report run_sequences(const Scenario& scenario) {
    scenario.validate();
    Report report;
    report.kind = "sequences";
    report.scenario = scenario;
    const PhaseSequenceSet set = scenario.build_phases();
    report.phase_set = set;
    report.metrics["N"] = set.slots();
    report.metrics["M"] = set.units();
    report.metrics["mode"] = set.mode == PhaseSetMode::kDesigned ? "designed" : "uniform";
    report.metrics["n"] = set.design ? nlohmann::json(set.design->poly.order())
                                     : nlohmann::json(nullptr);
    report.metrics["selection"] = selection_metrics(set);
    report.metrics["closure_defect"] = set.max_closure_defect();
    report.provenance = make_provenance(scenario);
    return report;
}

std::string report_points_csv(const Report& report) {
    if (report.kind == "sequences") {
        if (!report.phase_set) throw std::logic_error("sequences report lacks its phase set");
        return phase_set_to_csv(*report.phase_set);
    }
    std::string out;
    auto row = [&out](std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out += ',';
            out += format_double(v);
            first = false;
        }
        out += '\n';
    };
    if (report.kind == "montecarlo") {
        out = "n_photons,sigma_theta,mean_theta_hat,bias,mean_s_n,expected_s_n\n";
        for (const auto& p : report.points) {
            row({p.x, p.sigma, p.theta_hat, p.residual, p.s_n, p.expected});
        }
    } else if (report.kind == "jitter") {
        out = "delta_phi,empirical_error,budget_modulation_term,mean_theta_hat,bias\n";
        for (const auto& p : report.points) {
            row({p.x, p.sigma, p.expected, p.theta_hat, p.residual});
        }
    } else {  // fringe, worked-example: theta sweeps
        out = "theta,s_n,expected,residual\n";
        for (const auto& p : report.points) {
            row({p.x, p.s_n, p.expected, p.residual});
        }
    }
    return out;
}

std::string report_summary(const Report& report) {
    std::ostringstream out;
    out.precision(10);
    out << "kind: " << report.kind << '\n';
    const auto& m = report.metrics;
    if (report.kind == "worked-example") {
        out << "sampling period: " << m.at("sampling_period_s").get<double>() << " s\n"
            << "modulator rate: " << m.at("modulator_rate_hz").get<double>() << " Hz\n"
            << "modulation budget term: " << m.at("budget_modulation_term_deg").get<double>()
            << " deg at delta_phi = 0.3 deg\n"
            << "selection rank: " << m.at("selection").at("rank").get<int>() << " of "
            << report.scenario.interferometer.slots - 1 << " (subset_xor_free: "
            << (m.at("selection").at("subset_xor_free").get<bool>() ? "true" : "false")
            << ")\n"
            << "max |normalized residual|: " << m.at("residual_normalized_max").get<double>()
            << '\n';
    } else if (report.kind == "fringe") {
        out << "zero crossings: " << m.at("crossing_count").get<std::size_t>()
            << ", mean spacing: " << m.at("mean_crossing_spacing").get<double>()
            << " (expected " << m.at("expected_crossing_spacing").get<double>() << ")\n"
            << "log amplitude error: " << m.at("log_amplitude_error").get<double>() << '\n';
    } else if (report.kind == "montecarlo") {
        out << "log-log slope of sigma(theta_hat) vs N_p: " << m.at("slope").get<double>()
            << " +- " << m.at("slope_stderr").get<double>() << '\n'
            << "zero-noise control error: " << m.at("zero_noise_error").get<double>() << '\n';
    } else if (report.kind == "jitter") {
        out << "monotone increasing: "
            << (m.at("monotone_increasing").get<bool>() ? "true" : "false") << '\n'
            << "anchor modulation term: "
            << m.at("anchor").at("modulation_term_deg").get<double>() << " deg\n";
    } else if (report.kind == "sequences") {
        out << "N: " << m.at("N").get<int>() << ", M: " << m.at("M").get<int>() << '\n';
        if (!m.at("selection").empty()) {
            out << "rank: " << m.at("selection").at("rank").get<int>() << ", subset_xor_free: "
                << (m.at("selection").at("subset_xor_free").get<bool>() ? "true" : "false")
                << '\n';
        }
        out << "closure defect: " << m.at("closure_defect").get<double>() << '\n';
    }
    return out.str();
}

void write_report(const Report& report, const std::string& out_dir,
                  const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const bool sequences = report.kind == "sequences";
    if (format == "json") {
        const fs::path path = fs::path(out_dir) / (sequences ? "phase_set.json" : "report.json");
        if (sequences) {
            write_text_file(path.string(), phase_set_to_json(*report.phase_set).dump(2) + "\n");
        } else {
            write_text_file(path.string(), report_to_json(report).dump(2) + "\n");
        }
    } else {
        const fs::path path = fs::path(out_dir) / (sequences ? "phase_set.csv" : "report.csv");
        write_text_file(path.string(), report_points_csv(report));
    }
    write_text_file((fs::path(out_dir) / "summary.txt").string(), report_summary(report));
}

}  // namespace rpmi
