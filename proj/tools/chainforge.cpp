// Command-line entry point: gfa, optimize, pareto, validate and run.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "chainforge/pipeline.hpp"

namespace {

using chainforge::pipeline::Artifacts;
using chainforge::pipeline::Options;

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("chainforge");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("CHAINFORGE_LOG")) {
    spdlog::cfg::helpers::load_levels(level);
  }
}

void add_optimize_flags(CLI::App* cmd, Options& o, std::string& spacing, std::string& balance,
                        std::string& design) {
  cmd->add_option("--design", design, "Design file (default <out>/design.json)");
  cmd->add_option("--epsilon-grid", o.epsilon_grid, "Epsilon grid lo:hi:steps")
      ->capture_default_str();
  cmd->add_option("--spacing", spacing, "Grid spacing")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  cmd->add_option("--replications", o.replications, "Monte Carlo replications per epsilon")
      ->capture_default_str();
  cmd->add_option("--safety-stock", o.safety_stock, "Override the safety stock fraction v");
  cmd->add_option("--balance", balance, "Inventory balance form")
      ->check(CLI::IsMember({"delivered", "demand"}))
      ->capture_default_str();
  cmd->add_option("--dump-models", o.dump_models,
                  "Write replication-0 period models as LP text to this directory");
}

void add_validate_flags(CLI::App* cmd, Options& o, std::string& backlog) {
  cmd->add_option("--runs", o.runs, "Simulation runs per plan")->capture_default_str();
  cmd->add_option("--backlog", backlog, "Unfilled orders are dropped or wait")
      ->check(CLI::IsMember({"drop", "wait"}))
      ->capture_default_str();
  cmd->add_option("--orders-per-period", o.orders_per_period,
                  "Orders per customer and period")
      ->capture_default_str();
  cmd->add_option("--lead-time", o.lead_time, "Replenishment lead time in periods")
      ->capture_default_str();
}

nlohmann::json flags_json(const CLI::App& app, const CLI::App& sub) {
  nlohmann::json flags = nlohmann::json::object();
  for (const auto* a : {&app, &sub}) {
    for (const auto* opt : a->get_options()) {
      if (opt->get_name() == "--help" || opt->count() == 0) continue;
      const auto values = opt->results();
      flags[opt->get_name()] = values.size() == 1 ? nlohmann::json(values.front())
                                                  : nlohmann::json(values);
    }
  }
  return flags;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"chainforge: food supply chain design, optimization and validation"};
  app.set_version_flag("--version", std::string(CHAINFORGE_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  std::string out = o.out.string();
  std::string spacing = "log", balance = "delivered", backlog = "wait", design;
  std::string solutions, solution, instance;
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Maximum concurrent workers")->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();

  auto* gfa = app.add_subcommand("gfa", "Place DCs and link the network; writes design.json");
  gfa->add_option("instance", instance, "Instance file")->required();
  gfa->add_option("--restarts", o.gfa_restarts, "Random restarts per region")
      ->capture_default_str();

  auto* optimize = app.add_subcommand(
      "optimize", "Epsilon sweep; writes solutions.csv and plans/plan_<i>.json");
  optimize->add_option("instance", instance, "Instance file")->required();
  add_optimize_flags(optimize, o, spacing, balance, design);

  auto* pareto = app.add_subcommand("pareto", "Extract the front; writes front.csv and front.svg");
  pareto->add_option("--solutions", solutions, "Solutions table (default <out>/solutions.csv)");

  auto* validate = app.add_subcommand("validate", "Replay plans by simulation; writes validation.csv");
  validate->add_option("instance", instance, "Instance file (default: the plan's)");
  validate->add_option("--solution", solution,
                       "Plan file (default: every front member under <out>)");
  validate->add_option("--design", design, "Design file (default: the plan's)");
  add_validate_flags(validate, o, backlog);

  auto* run = app.add_subcommand("run", "All stages: gfa, optimize, pareto, validate");
  run->add_option("instance", instance, "Instance file")->required();
  run->add_option("--restarts", o.gfa_restarts, "Random restarts per region")
      ->capture_default_str();
  add_optimize_flags(run, o, spacing, balance, design);
  add_validate_flags(run, o, backlog);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  o.out = out;
  o.instance = instance;
  o.spacing = spacing == "linear" ? chainforge::pareto::Spacing::Linear
                                  : chainforge::pareto::Spacing::Log;
  o.balance = balance == "demand" ? chainforge::stochastic::BalanceForm::Demand
                                  : chainforge::stochastic::BalanceForm::Delivered;
  o.backlog = backlog == "drop" ? chainforge::des::Backlog::Drop : chainforge::des::Backlog::Wait;
  if (!design.empty()) o.design = design;
  if (!solutions.empty()) o.solutions = solutions;
  if (!solution.empty()) o.solution = solution;
  o.log = [](const std::string& m) { spdlog::info("{}", m); };

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const auto started = chainforge::pipeline::utc_timestamp();
  try {
    Artifacts written;
    if (command == "gfa") written = chainforge::pipeline::run_gfa_stage(o);
    if (command == "optimize") written = chainforge::pipeline::run_optimize_stage(o);
    if (command == "pareto") written = chainforge::pipeline::run_pareto_stage(o);
    if (command == "validate") written = chainforge::pipeline::run_validate_stage(o);
    if (command == "run") written = chainforge::pipeline::run_pipeline(o);
    chainforge::pipeline::write_manifest(o, command, flags_json(app, *sub), written, started);
    for (const auto& f : written) spdlog::info("wrote {}", (o.out / f).string());
  } catch (const chainforge::pipeline::StageError& e) {
    std::cerr << "chainforge: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "chainforge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
