#include "rpmi/io.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rpmi {

namespace {

std::vector<std::vector<double>> parse_csv_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            std::size_t pos = 0;
            row.push_back(std::stod(field, &pos));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("CSV rows have inconsistent column counts");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("CSV text contains no rows");
    return rows;
}

RowMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
    RowMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

std::string matrix_to_csv(const RowMatrix& m) {
    std::string out;
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            if (j) out += ',';
            out += format_double(m.at(i, j));
        }
        out += '\n';
    }
    return out;
}

bool designed_alphabet(const RowMatrix& m) {
    const double q = std::numbers::pi / 2;
    for (int i = 0; i + 1 < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            const double v = m.at(i, j);
            if (v != 0.0 && v != q && v != 2 * q && v != 3 * q) return false;
        }
    }
    return true;
}

nlohmann::json matrix_rows(const RowMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

RowMatrix matrix_from_rows(const nlohmann::json& rows) {
    if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
        throw std::invalid_argument("expected a nonempty array of arrays");
    }
    RowMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(rows[i].size()) != m.cols) {
            throw std::invalid_argument("matrix rows have inconsistent column counts");
        }
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string phase_set_to_csv(const PhaseSequenceSet& set) {
    return matrix_to_csv(set.phases);
}

PhaseSequenceSet phase_set_from_csv(const std::string& text) {
    PhaseSequenceSet set;
    set.phases = to_matrix(parse_csv_matrix(text));
    set.mode = designed_alphabet(set.phases) ? PhaseSetMode::kDesigned
                                             : PhaseSetMode::kUniformRandom;
    set.validate();
    return set;
}

nlohmann::json phase_set_to_json(const PhaseSequenceSet& set) {
    nlohmann::json j;
    j["N"] = set.slots();
    j["M"] = set.units();
    j["mode"] = set.mode == PhaseSetMode::kDesigned ? "designed" : "uniform";
    if (set.design) {
        j["n"] = set.design->poly.order();
        j["poly"] = set.design->poly.to_string();
        j["shifts"] = set.design->shifts;
        j["lfsr_seed"] = set.design->lfsr_seed;
        j["rank"] = set.design->independent_rank;
        j["subset_xor_free"] = set.design->subset_xor_free;
    } else {
        j["n"] = nullptr;
        j["poly"] = nullptr;
        j["shifts"] = nullptr;
    }
    j["phases"] = matrix_rows(set.phases);
    return j;
}

PhaseSequenceSet phase_set_from_json(const nlohmann::json& j) {
    PhaseSequenceSet set;
    set.phases = matrix_from_rows(j.at("phases"));
    const bool has_design = j.contains("poly") && !j.at("poly").is_null();
    if (j.contains("mode")) {
        set.mode = j.at("mode").get<std::string>() == "designed"
                       ? PhaseSetMode::kDesigned
                       : PhaseSetMode::kUniformRandom;
    } else {
        set.mode = has_design ? PhaseSetMode::kDesigned : PhaseSetMode::kUniformRandom;
    }
    if (has_design) {
        DesignInfo info{GeneratorPolynomial::parse(j.at("poly").get<std::string>()),
                        j.value("lfsr_seed", std::uint32_t{1}),
                        j.at("shifts").get<std::vector<int>>(), 0, true};
        info.independent_rank = j.value("rank", static_cast<int>(info.shifts.size()));
        info.subset_xor_free = j.value("subset_xor_free", true);
        set.design = std::move(info);
    }
    set.validate();
    return set;
}

std::string record_to_csv(const IntensityRecord& record) {
    return matrix_to_csv(record.values);
}

nlohmann::json record_to_json(const IntensityRecord& record) {
    return {{"values", matrix_rows(record.values)},
            {"config", record.config},
            {"noise", record.noise},
            {"period_index", record.period_index}};
}

IntensityRecord record_from_json(const nlohmann::json& j) {
    IntensityRecord rec;
    rec.values = matrix_from_rows(j.at("values"));
    rec.config = j.at("config").get<InterferometerConfig>();
    rec.noise = j.at("noise").get<NoiseModel>();
    rec.period_index = j.value("period_index", std::uint64_t{0});
    return rec;
}

void to_json(nlohmann::json& j, const InterferometerConfig& cfg) {
    j = {{"n_photons", cfg.n_photons},
         {"wavelength", cfg.wavelength},
         {"upper_freq", cfg.upper_freq},
         {"sampling_period", cfg.sampling_period},
         {"slots", cfg.slots},
         {"phase_units", cfg.phase_units},
         {"photon_budget", cfg.photon_budget}};
}

void from_json(const nlohmann::json& j, InterferometerConfig& cfg) {
    cfg.n_photons = j.value("n_photons", cfg.n_photons);
    cfg.wavelength = j.value("wavelength", cfg.wavelength);
    cfg.upper_freq = j.value("upper_freq", cfg.upper_freq);
    // The sampling period follows the Nyquist rule unless pinned explicitly.
    cfg.sampling_period = j.value("sampling_period", nyquist_sampling_period(cfg.upper_freq));
    cfg.slots = j.value("slots", cfg.slots);
    cfg.phase_units = j.value("phase_units", cfg.phase_units);
    cfg.photon_budget = j.value("photon_budget", cfg.photon_budget);
}

void to_json(nlohmann::json& j, const NoiseModel& noise) {
    j = {{"shot_noise", noise.shot_noise},
         {"phase_jitter_std", noise.phase_jitter_std},
         {"rng_seed", noise.rng_seed}};
}

void from_json(const nlohmann::json& j, NoiseModel& noise) {
    noise.shot_noise = j.value("shot_noise", noise.shot_noise);
    noise.phase_jitter_std = j.value("phase_jitter_std", noise.phase_jitter_std);
    noise.rng_seed = j.value("rng_seed", noise.rng_seed);
}

void to_json(nlohmann::json& j, const OpllConfig& cfg) {
    j = {{"noise_psd", cfg.noise_psd},
         {"loop_bandwidth", cfg.loop_bandwidth},
         {"transimpedance", cfg.transimpedance},
         {"responsivity", cfg.responsivity},
         {"received_power", cfg.received_power}};
}

void from_json(const nlohmann::json& j, OpllConfig& cfg) {
    cfg.noise_psd = j.value("noise_psd", cfg.noise_psd);
    cfg.loop_bandwidth = j.value("loop_bandwidth", cfg.loop_bandwidth);
    cfg.transimpedance = j.value("transimpedance", cfg.transimpedance);
    cfg.responsivity = j.value("responsivity", cfg.responsivity);
    cfg.received_power = j.value("received_power", cfg.received_power);
}

void to_json(nlohmann::json& j, const CorrelationResult& result) {
    j = {{"s_n", result.s_n},
         {"leading_amplitude", result.leading_amplitude},
         {"n_fold_angle", result.n_fold_angle}};
    j["residual"] = result.residual ? nlohmann::json(*result.residual) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const ErrorBudget& budget) {
    j = {{"shot_term", budget.shot_term},
         {"modulation_term", budget.modulation_term},
         {"total", budget.total}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file for reading: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out.flush()) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace rpmi
