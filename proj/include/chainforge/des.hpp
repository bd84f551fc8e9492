#pragma once

// Discrete-event replay of a plan: customer orders arrive at random times
// and are filled all-or-nothing from DC stock; DCs review at every period
// start under an (S, s) policy.

#include <cstdint>
#include <optional>
#include <vector>

#include "chainforge/model.hpp"
#include "chainforge/plan.hpp"

namespace chainforge::des {

enum class Backlog { Drop, Wait };

struct SimConfig {
  int horizon = 0;  // 0 uses the instance horizon
  /// Order-up-to level per DC; defaults to the DC capacity.
  std::optional<std::vector<double>> order_up_to;
  int orders_per_period = 1;  // per customer
  double lead_time = 0.0;     // periods
  Backlog backlog = Backlog::Wait;
  std::uint64_t rng_seed = 1;
  bool record_events = false;

  void validate() const;
};

/// Fraction of product volume in successful orders; 0/0 counts as 1.
double service_level(double successful_volume, double total_volume);

enum class EventKind { PeriodEnd, Receipt, Review, Order };

/// One inventory movement at a DC, kept when `record_events` is set.
struct LoggedEvent {
  double time = 0.0;
  EventKind kind = EventKind::Order;
  std::size_t dc = 0;
  std::size_t customer = 0;  // orders only
  double quantity = 0.0;     // shipped or received
  double on_hand_before = 0.0;
};

struct SimReport {
  double inventory_cost = 0.0;
  double unfulfilled_cost = 0.0;
  double order_cost = 0.0;
  double total_cost = 0.0;
  std::vector<double> region_service;  // per region
  double service = 1.0;
  long orders_placed = 0;
  long orders_successful = 0;
  long orders_dropped = 0;
  long orders_waited = 0;  // unsuccessful on arrival, queued
  std::vector<double> initial_inventory;
  std::vector<double> received;
  std::vector<double> shipped;
  std::vector<double> final_inventory;
  std::vector<LoggedEvent> events;
};

/// Runs one replay starting from `initial_inventory` (Inv_{h,0}). Order
/// sizes and delivered fractions come from the scenario drawn with
/// `config.rng_seed`, so run r matched to optimizer replication r sees the
/// same demand.
SimReport simulate(const NetworkInstance& instance, const NetworkDesign& design,
                   const std::vector<double>& initial_inventory, const SimConfig& config);

/// As above, starting from the plan's initial stock with the plan's safety
/// stock fraction. Throws ConfigError if the plan was computed under other
/// linkages.
SimReport simulate(const NetworkInstance& instance, const NetworkDesign& design,
                   const OperationalPlan& plan, const SimConfig& config);

struct Statistic {
  double mean = 0.0;
  double se = 0.0;
};

struct ValidationSummary {
  int runs = 0;
  Statistic inventory_cost, unfulfilled_cost, order_cost, total_cost, service;
  std::vector<Statistic> region_service;
  std::vector<SimReport> reports;
};

/// `runs` replays; run r uses derive_seed(master_seed, r), the same seed as
/// optimizer replication r.
ValidationSummary validate_plan(const NetworkInstance& instance,
                                const NetworkDesign& design, const OperationalPlan& plan,
                                SimConfig config, int runs, std::uint64_t master_seed,
                                int jobs = 1);

}  // namespace chainforge::des
