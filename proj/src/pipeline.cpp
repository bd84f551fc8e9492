#include "chainforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/gfa.hpp"
#include "chainforge/plan.hpp"
#include "chainforge/random.hpp"
#include "chainforge/report.hpp"

namespace chainforge::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

void Options::validate() const {
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (gfa_restarts < 1) throw ConfigError("--restarts must be >= 1");
  if (replications < 1) throw ConfigError("--replications must be >= 1");
  if (runs < 1) throw ConfigError("--runs must be >= 1");
  if (safety_stock && !(*safety_stock >= 0.0 && *safety_stock <= 1.0)) {
    throw ConfigError("--safety-stock must lie in [0, 1]");
  }
  if (orders_per_period < 1) throw ConfigError("--orders-per-period must be >= 1");
  if (!(lead_time >= 0.0)) throw ConfigError("--lead-time must be >= 0");
  pareto::parse_grid(epsilon_grid, spacing);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

void say(const Options& o, const std::string& message) {
  if (o.log) o.log(message);
}

template <class F>
Artifacts guarded(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ParseError& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const ValidationError& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const ConfigError& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, e.what(), 2);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), 1);
  }
}

NetworkInstance load_for(const Options& o, const fs::path& path) {
  if (path.empty()) throw ConfigError("no instance file given");
  auto inst = load_instance(path);
  if (o.safety_stock) inst.safety_stock_fraction = *o.safety_stock;
  return inst;
}

fs::path absolute_path(const fs::path& p) { return fs::absolute(p).lexically_normal(); }

fs::path plan_file(std::size_t index) {
  return fs::path("plans") / ("plan_" + std::to_string(index) + ".json");
}

std::size_t plan_index(const fs::path& path) {
  const auto stem = path.stem().string();
  const auto pos = stem.rfind('_');
  if (pos != std::string::npos) {
    try {
      std::size_t used = 0;
      const auto v = std::stoul(stem.substr(pos + 1), &used);
      if (used == stem.size() - pos - 1) return v;
    } catch (const std::exception&) {
    }
  }
  return 0;
}

}  // namespace

Artifacts run_gfa_stage(const Options& o) {
  return guarded("gfa", [&] {
    o.validate();
    const auto inst = load_for(o, o.instance);
    gfa::GfaConfig cfg;
    cfg.restarts = o.gfa_restarts;
    cfg.rng_seed = o.seed;
    const auto result = gfa::run_gfa(inst, cfg);
    for (const auto& r : result.regions) {
      say(o, "gfa: region " + r.region_id + " W = " + report::format_number(r.objective) +
                 (r.converged ? "" : " (not converged)"));
    }
    report::write_text(o.out / "design.json", report::design_to_json(inst, result).dump(2) + "\n");
    return Artifacts{"design.json"};
  });
}

Artifacts run_optimize_stage(const Options& o) {
  return guarded("optimize", [&] {
    o.validate();
    const auto inst = load_for(o, o.instance);
    const fs::path design_path = o.design.value_or(o.out / "design.json");
    const auto design = report::load_design(inst, design_path);
    const auto grid = pareto::parse_grid(o.epsilon_grid, o.spacing);

    pareto::SweepOptions sw;
    sw.jobs = std::min<int>(o.jobs, static_cast<int>(grid.size()));
    sw.estimate.jobs = std::max(1, o.jobs / sw.jobs);
    sw.estimate.run.balance = o.balance;
    say(o, "optimize: " + std::to_string(grid.size()) + " epsilon values x " +
               std::to_string(o.replications) + " replications");
    const auto pool = pareto::sweep(inst, design, grid, o.replications, o.seed, sw);

    Artifacts written;
    report::write_text(o.out / "solutions.csv", report::solutions_csv(pool));
    written.push_back("solutions.csv");
    for (std::size_t i = 0; i < pool.solutions.size(); ++i) {
      const auto& s = pool.solutions[i];
      if (!s.ok()) {
        say(o, "optimize: epsilon " + report::format_number(s.epsilon) + " failed: " + s.error);
        continue;
      }
      auto plan = make_plan(inst, design, *s.estimate, o.seed);
      plan.instance_path = absolute_path(o.instance).string();
      plan.design_path = absolute_path(design_path).string();
      report::write_text(o.out / plan_file(i), plan_to_json(plan).dump(2) + "\n");
      written.push_back(plan_file(i));
    }
    if (o.dump_models) {
      // Replication 0 of every grid point, one file per period.
      for (std::size_t i = 0; i < grid.size(); ++i) {
        stochastic::RunOptions run;
        run.balance = o.balance;
        run.on_model = [&](int period, const milp::LinearModel& model) {
          std::ostringstream text;
          model.write_lp(text);
          report::write_text(*o.dump_models / ("eps" + std::to_string(i) + "_t" +
                                               std::to_string(period) + ".lp"),
                             text.str());
        };
        try {
          stochastic::run_replication(inst, design, grid[i], derive_seed(o.seed, 0), run);
        } catch (const InfeasiblePeriod&) {
          // the models up to the failing period are still dumped
        }
      }
    }
    if (std::none_of(pool.solutions.begin(), pool.solutions.end(),
                     [](const auto& s) { return s.ok(); })) {
      throw Error("every epsilon value failed: " + pool.solutions.front().error);
    }
    return written;
  });
}

Artifacts run_pareto_stage(const Options& o) {
  return guarded("pareto", [&] {
    const fs::path path = o.solutions.value_or(o.out / "solutions.csv");
    const auto pool = report::parse_solutions_csv(report::read_text(path));
    say(o, "pareto: " + std::to_string(pool.front().size()) + " of " +
               std::to_string(pool.solutions.size()) + " solutions on the front");
    report::write_text(o.out / "front.csv", report::front_csv(pool));
    report::write_text(o.out / "front.svg", report::front_svg(pool));
    return Artifacts{"front.csv", "front.svg"};
  });
}

Artifacts run_validate_stage(const Options& o) {
  return guarded("validate", [&] {
    o.validate();
    std::vector<std::pair<std::size_t, fs::path>> plans;
    if (o.solution) {
      plans.emplace_back(plan_index(*o.solution), *o.solution);
    } else {
      const auto pool = report::parse_solutions_csv(report::read_text(o.out / "front.csv"));
      for (auto i : pool.front()) plans.emplace_back(i, o.out / plan_file(i));
      if (plans.empty()) throw Error("no front solution to validate");
    }
    des::SimConfig cfg;
    cfg.backlog = o.backlog;
    cfg.orders_per_period = o.orders_per_period;
    cfg.lead_time = o.lead_time;

    std::vector<OperationalPlan> loaded;
    for (const auto& p : plans) loaded.push_back(load_plan(p.second));
    std::vector<report::ValidationRow> rows;
    std::optional<NetworkInstance> inst;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const auto& plan = loaded[k];
      const fs::path inst_path = o.instance.empty() ? fs::path(plan.instance_path) : o.instance;
      const fs::path design_path = o.design.value_or(plan.design_path);
      auto instance = load_instance(inst_path);
      const auto design = report::load_design(instance, design_path);
      say(o, "validate: solution " + std::to_string(plans[k].first) + ", " +
                 std::to_string(o.runs) + " runs");
      auto summary = des::validate_plan(instance, design, plan, cfg, o.runs, o.seed, o.jobs);
      summary.reports.clear();
      rows.push_back({plans[k].first, &loaded[k], std::move(summary)});
      if (!inst) inst = std::move(instance);
    }
    report::write_text(o.out / "validation.csv", report::validation_csv(*inst, rows));
    return Artifacts{"validation.csv"};
  });
}

Artifacts run_pipeline(const Options& o) {
  Artifacts all;
  for (auto* stage : {&run_gfa_stage, &run_optimize_stage, &run_pareto_stage, &run_validate_stage}) {
    Options opt = o;
    if (stage == &run_validate_stage) opt.solution.reset();
    const auto written = stage(opt);
    all.insert(all.end(), written.begin(), written.end());
  }
  return all;
}

void write_manifest(const Options& o, const std::string& command, const json& flags,
                    const Artifacts& artifacts, const std::string& started_at) {
  json outputs = json::object();
  for (const auto& a : artifacts) {
    outputs[a.generic_string()] = report::sha256_file(o.out / a);
  }
  json instance = nullptr;
  if (!o.instance.empty() && fs::exists(o.instance)) {
    instance = {{"path", o.instance.string()}, {"sha256", report::sha256_file(o.instance)}};
  }
  const json manifest = {{"tool", "chainforge"},
                         {"version", CHAINFORGE_VERSION},
                         {"command", command},
                         {"flags", flags},
                         {"seed", o.seed},
                         {"started_at", started_at},
                         {"finished_at", utc_timestamp()},
                         {"instance", instance},
                         {"outputs", outputs}};
  report::write_text(o.out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace chainforge::pipeline
