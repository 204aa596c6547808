#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hca/attack.hpp"
#include "hca/linprog.hpp"
#include "hca/problems.hpp"
#include "hca/scenarios.hpp"
#include "hca/scm.hpp"

namespace hca::io {

using nlohmann::json;

// Shortest round-trip decimal text, locale-independent, bit-stable.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
// Write-temp-then-rename so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// LP interchange. Infinite bounds serialize as null.
json lp_to_json(const LinearProgram& lp);
LinearProgram lp_from_json(const json& j);

json attack_config_to_json(const AttackConfig& cfg);
// Overlay: fields present in j replace those in base; everything else keeps
// its default, so the echo always shows the fully resolved configuration.
AttackConfig attack_config_from_json(const json& j, AttackConfig base);

json attack_report_to_json(const AttackReport& rep);

// Result payload: everything except wall-clock, which belongs to the manifest.
json scenario_result_to_json(const ScenarioResult& res);

// RFC 4180: CRLF line endings, quotes doubled, fields with separators quoted.
std::string csv_escape(const std::string& field);
std::string dataset_csv(const DataSet& ds);
std::string skew_csv(const std::vector<SkewRow>& rows);
std::string energy_csv(const std::vector<EnergyRow>& rows);
std::string edges_csv(const Graph& g);
std::string profiles_csv(const EnergyProfiles& prof);

// Edge list "src,dst,cost[,confounder]", header row optional.
Graph graph_from_edges_csv(const std::string& text);

// "hour,demand_kwh,avail_pv" rows in hour order, header row optional.
EnergyProfiles profiles_from_csv(const std::string& text);

// {"c": [...]} — the confounder lift vector for ad-hoc attacks.
std::vector<double> lift_from_json(const json& j);

// Deterministic DOT: nodes sorted by name, edges in insertion order, styled
// by membership in the given solutions (first = base, second = adversarial).
std::string graph_dot(const Graph& g,
                      const std::vector<std::vector<double>>& solutions);

// Writes result.json plus the family-specific tables into dir and fills
// res.artifact_files with the relative names written.
std::vector<std::string> write_scenario_artifacts(const std::filesystem::path& dir,
                                                  ScenarioResult& res);

} // namespace hca::io
