#pragma once

// Summary of one epsilon solution as stored in plans/plan_<idx>.json: the
// objectives, mean cost breakdown, initial stock and mean trajectories, plus
// the linkages it was computed under.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/model.hpp"
#include "chainforge/stochastic.hpp"

namespace chainforge {

struct OperationalPlan {
  std::string instance_path;
  std::string design_path;
  double epsilon = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
  double safety_stock_fraction = 0.0;  // v the plan was optimized with
  double z1 = 0.0;
  double z1_se = 0.0;
  double z2 = 0.0;
  double z2_se = 0.0;
  stochastic::PeriodCosts costs;
  stochastic::PeriodCosts cost_se;
  std::vector<std::string> dc_ids;
  std::vector<std::string> dc_supplier;   // warehouse id per DC
  std::vector<std::string> customer_ids;
  std::vector<std::string> customer_dc;   // DC id per customer
  std::vector<double> initial_inventory;  // per DC
  std::vector<std::vector<double>> mean_inventory;  // [t][dc]
  std::vector<std::vector<double>> mean_order;      // [t][dc]
  std::vector<std::vector<double>> mean_shipped;    // [t][customer]
};

OperationalPlan make_plan(const NetworkInstance& instance, const NetworkDesign& design,
                          const stochastic::EstimateResult& estimate, std::uint64_t seed);

/// True when the plan's linkages are exactly those of `design`.
bool linkages_match(const OperationalPlan& plan, const NetworkInstance& instance,
                    const NetworkDesign& design);

nlohmann::json plan_to_json(const OperationalPlan& plan);
OperationalPlan plan_from_json(const nlohmann::json& doc);
OperationalPlan load_plan(const std::filesystem::path& path);

}  // namespace chainforge
