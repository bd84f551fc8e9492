#pragma once

// File formats of the pipeline artifacts: design.json, the CSV tables,
// front.svg and the SHA-256 digests recorded in manifest.json.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/des.hpp"
#include "chainforge/gfa.hpp"
#include "chainforge/model.hpp"
#include "chainforge/pareto.hpp"
#include "chainforge/plan.hpp"

namespace chainforge::report {

/// "%.9g", with "nan"/"inf"/"-inf" spelled out and negative zero printed
/// as 0.
std::string format_number(double value);

/// DC coordinates, z (warehouse x DC), y (DC x customer), d_hl and the
/// per-region weighted distance W.
nlohmann::json design_to_json(const NetworkInstance& instance, const gfa::GfaResult& result);
/// Reads a design back by identifier and checks it against the instance.
/// Throws ParseError on malformed documents and ValidationError on designs
/// that break the single-channel rules.
NetworkDesign design_from_json(const NetworkInstance& instance, const nlohmann::json& doc);
NetworkDesign load_design(const NetworkInstance& instance, const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories. Throws Error when
/// the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// epsilon, Z1, Z1_se, Z2, Z2_se, inventory_cost, unfulfilled_cost,
/// order_cost; one row per grid point in grid order, failed points as nan.
std::string solutions_csv(const pareto::SolutionPool& pool);
/// The same columns plus on_front (0/1).
std::string front_csv(const pareto::SolutionPool& pool);
/// Parses a solutions or front table; rows with non-finite objectives come
/// back as failed solutions. Front flags are recomputed.
pareto::SolutionPool parse_solutions_csv(const std::string& text);

/// Scatter of all solutions (Z2 horizontal, Z1 vertical) with front
/// members highlighted and joined by a dashed polyline.
std::string front_svg(const pareto::SolutionPool& pool);

struct ValidationRow {
  std::size_t solution = 0;  // grid index of the plan
  const OperationalPlan* plan = nullptr;
  des::ValidationSummary summary;
};

/// One row per validated plan: DES cost means and standard errors, the
/// optimizer's expected costs, and per-region and total service levels.
std::string validation_csv(const NetworkInstance& instance, const std::vector<ValidationRow>& rows);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace chainforge::report
