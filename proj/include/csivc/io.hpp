#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "csivc/estimator.hpp"
#include "csivc/model.hpp"
#include "csivc/simulation.hpp"

namespace csivc::io {

// 17 significant digits; "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);

// Strict numeric parse of a whole field; throws ValidationError.
double parse_number(std::string_view field, std::string_view what);

// Header `y,delta,t,x1,...,xd`. Throws IoError when unreadable and
// ValidationError (with the line number) on malformed content.
std::vector<RawRow> read_observations_csv(const std::filesystem::path& path);
void write_observations_csv(const std::filesystem::path& path, const Dataset& data);

void write_curves_csv(const std::filesystem::path& path, const CoefficientCurves& curves);
CoefficientCurves read_curves_csv(const std::filesystem::path& path);
void write_link_csv(const std::filesystem::path& path, const LinkEstimate& link);

void write_summary_csv(const std::filesystem::path& path, const SimSummary& summary);
void write_link_summary_csv(const std::filesystem::path& path, const SimSummary& summary);
// Long format: rep,curve,grid,value (undefined link points are omitted).
void write_replications_csv(const std::filesystem::path& path, const SimSummary& summary);

struct RunConfig {
  FitConfig fit;
  SimConfig sim;
};

// JSON document {"fit": {...}, "simulation": {...}}; both sections optional,
// unknown keys rejected. "bandwidths" is "auto" or {"h1", "h2", "h_link"}.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig read_config(const std::filesystem::path& path);
nlohmann::json to_json(const FitConfig& config);
nlohmann::json to_json(const SimConfig& config);

nlohmann::json diagnostics_json(const ModelFit& fit);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace csivc::io
