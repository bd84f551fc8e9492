#pragma once

// The pipeline stages behind the command-line tool: gfa -> optimize ->
// pareto -> validate. Every stage reads its inputs from files and writes its
// artifacts under the output directory, so stages can run separately.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/des.hpp"
#include "chainforge/error.hpp"
#include "chainforge/pareto.hpp"
#include "chainforge/stochastic.hpp"

namespace chainforge::pipeline {

inline constexpr const char* kDefaultEpsilonGrid = "3e-5:3e-2:8";

struct Options {
  std::filesystem::path instance;
  std::filesystem::path out = "results";
  std::uint64_t seed = 42;
  int jobs = 1;
  // gfa
  int gfa_restarts = 8;
  // optimize
  std::optional<std::filesystem::path> design;  // default out/design.json
  std::string epsilon_grid = kDefaultEpsilonGrid;
  pareto::Spacing spacing = pareto::Spacing::Log;
  int replications = 50;
  std::optional<double> safety_stock;
  stochastic::BalanceForm balance = stochastic::BalanceForm::Delivered;
  std::optional<std::filesystem::path> dump_models;
  // pareto
  std::optional<std::filesystem::path> solutions;  // default out/solutions.csv
  // validate
  std::optional<std::filesystem::path> solution;  // one plan file
  int runs = 30;
  des::Backlog backlog = des::Backlog::Wait;
  int orders_per_period = 1;
  double lead_time = 0.0;

  /// Progress messages; ignored when empty.
  std::function<void(const std::string&)> log;

  /// Throws ConfigError naming the offending flag.
  void validate() const;
};

/// A failure inside one stage. Exit code 2 marks unreadable inputs and bad
/// flags, 1 everything else.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message, int exit_code)
      : Error(stage + ": " + message), stage_(std::move(stage)), exit_code_(exit_code) {}

  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

/// Files written by a stage, relative to the output directory.
using Artifacts = std::vector<std::filesystem::path>;

Artifacts run_gfa_stage(const Options& options);
Artifacts run_optimize_stage(const Options& options);
Artifacts run_pareto_stage(const Options& options);
/// Validates `options.solution` when set, otherwise every front member
/// listed in out/front.csv.
Artifacts run_validate_stage(const Options& options);
/// All four stages in order.
Artifacts run_pipeline(const Options& options);

/// Writes out/manifest.json: tool version, command, flags, seed, start and
/// end timestamps, the instance digest and digests of `artifacts`.
void write_manifest(const Options& options, const std::string& command,
                    const nlohmann::json& flags, const Artifacts& artifacts,
                    const std::string& started_at);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace chainforge::pipeline
