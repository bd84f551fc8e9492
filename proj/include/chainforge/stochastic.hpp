#pragma once

// Phase II: sampled demand and supply-loss scenarios, the per-period
// accessibility/cost model, and Monte Carlo estimates of the two objectives.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "chainforge/accessibility.hpp"
#include "chainforge/milp.hpp"
#include "chainforge/model.hpp"

namespace chainforge::stochastic {

/// One realization of the uncertain parameters over the horizon.
struct Scenario {
  std::uint64_t seed = 0;
  int horizon = 0;
  std::size_t warehouses = 0;
  std::size_t dcs = 0;
  std::vector<std::vector<double>> demand;  // [t][customer], kg
  std::vector<double> supply;               // delivered fraction, [t][w][h] flattened

  double supply_factor(int t, std::size_t w, std::size_t h) const {
    return supply[(static_cast<std::size_t>(t) * warehouses + w) * dcs + h];
  }
};

/// Demands from N(mu, sigma^2) truncated at zero and supply factors from
/// U(low, high) for every warehouse-DC pair, linked or not, so the draws do
/// not depend on the design.
Scenario sample_scenario(const NetworkInstance& instance, std::uint64_t seed);

enum class BalanceForm {
  Delivered,  // Inv_t = Inv_{t-1} - sum c + delivered x
  Demand,     // Inv_t = Inv_{t-1} - sum D + delivered x
};

/// Variable indices of an assembled period model.
struct PeriodModel {
  milp::LinearModel model;
  std::vector<std::size_t> order;      // x per DC (from its supplier)
  std::vector<std::size_t> inventory;  // Inv per DC
  std::vector<std::size_t> shipped;    // c per customer (on its linked DC)
  std::vector<std::size_t> unmet;      // g per customer
  /// Quality auxiliary per (region, nutrient); npos when the value is fixed
  /// by the bounds and no variable is needed.
  std::vector<std::vector<std::size_t>> aux;
  std::vector<std::vector<std::size_t>> binary;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct PeriodInputs {
  std::span<const double> previous_inventory;  // per DC
  std::span<const double> demand;              // per customer
  std::span<const double> delivered_fraction;  // per DC, from its supplier
  double epsilon = 0.0;
  int period = 0;
  BalanceForm balance = BalanceForm::Delivered;
};

/// Assembles the period model: maximize the normalized transportation and
/// quality terms minus epsilon times inventory, unfulfilled and order cost.
/// Throws InfeasibleBounds when a DC's safety stock exceeds its capacity.
PeriodModel build_period_model(const NetworkInstance& instance,
                               const NetworkDesign& design,
                               const accessibility::ResolvedScales& scales,
                               const PeriodInputs& inputs);

struct PeriodCosts {
  double inventory = 0.0;
  double unfulfilled = 0.0;
  double order = 0.0;

  double total() const { return inventory + unfulfilled + order; }
};

struct PeriodDecision {
  int period = 0;
  std::vector<double> previous_inventory;  // per DC
  std::vector<double> demand;              // per customer
  std::vector<double> delivered_fraction;  // per DC
  std::vector<double> order;               // per DC
  std::vector<double> inventory;           // per DC
  std::vector<double> shipped;             // per customer
  std::vector<double> unmet;               // per customer
  std::vector<std::vector<double>> aux;    // [region][nutrient]
  double objective = 0.0;      // phi_t as solved
  double accessibility = 0.0;  // sum_i (-w^T I^T + w^Q I^Q)
  PeriodCosts costs;
  std::vector<accessibility::AccessibilitySnapshot> regions;
  int nodes = 0;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  std::vector<PeriodDecision> periods;
  double phi = 0.0;            // sum of period objectives
  double accessibility = 0.0;  // sum over periods
  PeriodCosts costs;           // sums over periods
};

struct RunOptions {
  BalanceForm balance = BalanceForm::Delivered;
  /// Inventory before the first period; defaults to the safety stock.
  std::optional<std::vector<double>> initial_inventory;
  milp::SolverOptions solver;
  /// Called with every assembled model before it is solved.
  std::function<void(int period, const milp::LinearModel&)> on_model;
};

/// Safety stock v * S_h per DC; throws InfeasibleBounds if it exceeds a
/// DC's capacity.
std::vector<double> safety_stock(const NetworkInstance& instance,
                                 const NetworkDesign& design);

ReplicationResult run_replication(const NetworkInstance& instance,
                                  const NetworkDesign& design, double epsilon,
                                  const Scenario& scenario,
                                  const RunOptions& options = {});

ReplicationResult run_replication(const NetworkInstance& instance,
                                  const NetworkDesign& design, double epsilon,
                                  std::uint64_t seed,
                                  const RunOptions& options = {});

struct EstimateOptions {
  RunOptions run;
  int jobs = 1;
  bool keep_replications = false;
};

struct EstimateResult {
  double epsilon = 0.0;
  int replications = 0;
  double z1 = 0.0;
  double z1_se = 0.0;
  double z2 = 0.0;
  double z2_se = 0.0;
  double affordability_term = 0.0;  // sum_i sum_t w^A I^A
  PeriodCosts mean_costs;
  PeriodCosts cost_se;  // standard error of each mean cost
  std::vector<double> initial_inventory;            // per DC
  std::vector<std::vector<double>> mean_inventory;  // [t][dc]
  std::vector<std::vector<double>> mean_order;      // [t][dc]
  std::vector<std::vector<double>> mean_shipped;    // [t][customer]
  std::vector<ReplicationResult> runs;              // when kept
};

/// Replication s uses derive_seed(master_seed, s). Results are reduced in
/// replication order, so the estimate does not depend on `jobs`.
EstimateResult estimate_objectives(const NetworkInstance& instance,
                                   const NetworkDesign& design, double epsilon,
                                   int replications, std::uint64_t master_seed,
                                   const EstimateOptions& options = {});

/// Mean and standard error (sd / sqrt(n), 0 for n = 1).
std::pair<double, double> mean_and_se(std::span<const double> values);

/// Re-checks one decision against the balance, bound, capacity, demand
/// split and nonnegativity rules from raw numbers. Returns the largest
/// violation found.
double audit_decision(const NetworkInstance& instance, const NetworkDesign& design,
                      const PeriodDecision& decision,
                      BalanceForm balance = BalanceForm::Delivered);

}  // namespace chainforge::stochastic
