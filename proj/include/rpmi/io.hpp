#pragma once

#include <string>

#include "json.hpp"
#include "rpmi/correlator.hpp"
#include "rpmi/interferometer.hpp"
#include "rpmi/opll.hpp"
#include "rpmi/pnseq.hpp"

namespace rpmi {

/// Shortest exact decimal form used in every CSV cell (17 significant
/// digits), so written values re-read bit-identically.
std::string format_double(double v);

/// One row per time slot, M comma-separated radian values per row.
std::string phase_set_to_csv(const PhaseSequenceSet& set);

/// Inverse of phase_set_to_csv. The mode is inferred: rows restricted to the
/// designed four-letter alphabet load as designed, anything else as uniform.
/// Design provenance is not representable in CSV and is left empty.
PhaseSequenceSet phase_set_from_csv(const std::string& text);

/// JSON object {n, N, M, poly, shifts, phases} plus mode/provenance fields;
/// n, poly and shifts are null for uniform-random sets.
nlohmann::json phase_set_to_json(const PhaseSequenceSet& set);
PhaseSequenceSet phase_set_from_json(const nlohmann::json& j);

/// N rows x M columns of intensity differences.
std::string record_to_csv(const IntensityRecord& record);

/// Record with embedded config and noise snapshots, sufficient for replay.
nlohmann::json record_to_json(const IntensityRecord& record);
IntensityRecord record_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const InterferometerConfig& cfg);
void from_json(const nlohmann::json& j, InterferometerConfig& cfg);
void to_json(nlohmann::json& j, const NoiseModel& noise);
void from_json(const nlohmann::json& j, NoiseModel& noise);
void to_json(nlohmann::json& j, const OpllConfig& cfg);
void from_json(const nlohmann::json& j, OpllConfig& cfg);
void to_json(nlohmann::json& j, const CorrelationResult& result);
void to_json(nlohmann::json& j, const ErrorBudget& budget);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rpmi
