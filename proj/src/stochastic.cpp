#include "chainforge/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <tuple>

#include "chainforge/error.hpp"
#include "chainforge/random.hpp"

namespace chainforge::stochastic {

Scenario sample_scenario(const NetworkInstance& instance, std::uint64_t seed) {
  Scenario s;
  s.seed = seed;
  s.horizon = instance.horizon;
  s.warehouses = instance.warehouses.size();
  s.dcs = instance.dcs.size();
  RandomStream demand_rng(derive_seed(seed, 0));
  RandomStream supply_rng(derive_seed(seed, 1));
  s.demand.resize(static_cast<std::size_t>(s.horizon));
  for (auto& period : s.demand) {
    period.reserve(instance.customers.size());
    for (const auto& c : instance.customers) {
      period.push_back(std::max(0.0, demand_rng.normal(c.demand.mean, c.demand.stddev())));
    }
  }
  s.supply.reserve(static_cast<std::size_t>(s.horizon) * s.warehouses * s.dcs);
  for (int t = 0; t < s.horizon; ++t) {
    for (std::size_t w = 0; w < s.warehouses; ++w) {
      for (std::size_t h = 0; h < s.dcs; ++h) {
        s.supply.push_back(supply_rng.uniform(instance.supply.low, instance.supply.high));
      }
    }
  }
  return s;
}

std::vector<double> safety_stock(const NetworkInstance& instance,
                                 const NetworkDesign& design) {
  auto floor = derive_mean_local_demand(design, instance);
  for (std::size_t h = 0; h < floor.size(); ++h) {
    floor[h] *= instance.safety_stock_fraction;
    if (floor[h] > instance.dcs[h].capacity) {
      throw InfeasibleBounds(instance.dcs[h].id,
                             "DC '" + instance.dcs[h].id + "': safety stock " +
                                 std::to_string(floor[h]) + " exceeds capacity " +
                                 std::to_string(instance.dcs[h].capacity));
    }
  }
  return floor;
}

PeriodModel build_period_model(const NetworkInstance& instance,
                               const NetworkDesign& design,
                               const accessibility::ResolvedScales& scales,
                               const PeriodInputs& in) {
  using milp::Relation;
  using milp::Term;
  const auto floor = safety_stock(instance, design);
  const std::size_t H = instance.dcs.size();
  const std::size_t L = instance.customers.size();
  const double eps = in.epsilon;
  const std::string tag = "_t" + std::to_string(in.period);

  PeriodModel pm;
  auto& m = pm.model;
  for (std::size_t h = 0; h < H; ++h) {
    const auto& dc = instance.dcs[h];
    const auto& wh = instance.warehouses[design.dc_supplier[h]];
    pm.order.push_back(m.add_variable("x_" + wh.id + "_" + dc.id + tag, 0.0, wh.capacity,
                                      -eps * wh.order_cost_to(dc.id)));
  }
  for (std::size_t h = 0; h < H; ++h) {
    const auto& dc = instance.dcs[h];
    pm.inventory.push_back(m.add_variable("inv_" + dc.id + tag, floor[h], dc.capacity,
                                          -eps * dc.inventory_unit_cost));
  }
  for (std::size_t l = 0; l < L; ++l) {
    const auto& c = instance.customers[l];
    const auto h = design.customer_dc[l];
    const auto& region = instance.regions[c.region];
    const double effort = instance.path_weight(h, l) * design.distances[h][l];
    const double d = in.demand[l];
    pm.shipped.push_back(
        m.add_variable("c_" + instance.dcs[h].id + "_" + c.id + tag, 0.0, d,
                       -region.weights.transportation / scales.transportation * effort));
    pm.unmet.push_back(m.add_variable("g_" + instance.dcs[h].id + "_" + c.id + tag, 0.0, d,
                                      -eps * region.unfulfilled_unit_cost));
  }

  for (std::size_t h = 0; h < H; ++h) {
    const auto& dc = instance.dcs[h];
    std::vector<Term> terms{{pm.inventory[h], 1.0}, {pm.order[h], -in.delivered_fraction[h]}};
    double rhs = in.previous_inventory[h];
    for (auto l : design.customers_of(h)) {
      if (in.balance == BalanceForm::Delivered) {
        terms.push_back({pm.shipped[l], 1.0});
      } else {
        rhs -= in.demand[l];
      }
    }
    m.add_constraint("balance_" + dc.id + tag, std::move(terms), Relation::Equal, rhs);
  }
  for (std::size_t w = 0; w < instance.warehouses.size(); ++w) {
    std::vector<Term> terms;
    for (std::size_t h = 0; h < H; ++h) {
      if (design.dc_supplier[h] == w) terms.push_back({pm.order[h], 1.0});
    }
    if (terms.empty()) continue;
    m.add_constraint("wcap_" + instance.warehouses[w].id + tag, std::move(terms),
                     Relation::LessEqual, instance.warehouses[w].capacity);
  }
  for (std::size_t l = 0; l < L; ++l) {
    m.add_constraint("demand_" + instance.customers[l].id + tag,
                     {{pm.shipped[l], 1.0}, {pm.unmet[l], 1.0}}, Relation::Equal,
                     in.demand[l]);
  }

  // Quality: a_ij = (beta_j * sum Inv - R_ij)^+ through one binary. The big-M
  // constants come from the inventory bounds of the region.
  pm.aux.resize(instance.regions.size());
  pm.binary.resize(instance.regions.size());
  for (std::size_t i = 0; i < instance.regions.size(); ++i) {
    const auto& region = instance.regions[i];
    const auto dcs = instance.dcs_in_region(i);
    double cap_sum = 0.0, floor_sum = 0.0;
    for (auto h : dcs) {
      cap_sum += instance.dcs[h].capacity;
      floor_sum += floor[h];
    }
    for (const auto& nutrient : instance.nutrients) {
      std::size_t a = PeriodModel::npos, b = PeriodModel::npos;
      const double req = accessibility::nutrient_requirement(region, nutrient,
                                                             instance.persons_per_area);
      const double beta = nutrient.per_kg_content;
      const double m1 = std::max(0.0, beta * cap_sum - req);
      const double m2 = std::max(0.0, req - beta * floor_sum);
      const double gain = region.weights.quality / scales.quality * nutrient.weight;
      if (m1 > 0.0 && gain > 0.0) {
        const std::string name = region.id + "_" + nutrient.id + tag;
        a = m.add_variable("a_" + name, 0.0, m1, gain);
        std::vector<Term> terms{{a, 1.0}};
        for (auto h : dcs) terms.push_back({pm.inventory[h], -beta});
        if (m2 > 0.0) {
          b = m.add_binary("b_" + name);
          terms.push_back({b, m2});
          m.add_constraint("qon_" + name, {{a, 1.0}, {b, -m1}}, Relation::LessEqual, 0.0);
          m.add_constraint("qsur_" + name, std::move(terms), Relation::LessEqual, m2 - req);
        } else {
          m.add_constraint("qsur_" + name, std::move(terms), Relation::LessEqual, -req);
        }
      }
      pm.aux[i].push_back(a);
      pm.binary[i].push_back(b);
    }
  }
  return pm;
}

namespace {

void check_previous_inventory(const NetworkInstance& instance,
                              std::span<const double> floor,
                              std::span<const double> inventory) {
  if (inventory.size() != instance.dcs.size()) {
    throw ConfigError("initial inventory needs one value per DC");
  }
  for (std::size_t h = 0; h < inventory.size(); ++h) {
    const double tol = 1e-6 * std::max(1.0, instance.dcs[h].capacity);
    if (inventory[h] < floor[h] - tol || inventory[h] > instance.dcs[h].capacity + tol) {
      throw ConfigError("DC '" + instance.dcs[h].id + "': initial inventory " +
                        std::to_string(inventory[h]) + " outside [safety stock, capacity]");
    }
  }
}

}  // namespace

ReplicationResult run_replication(const NetworkInstance& instance,
                                  const NetworkDesign& design, double epsilon,
                                  const Scenario& scenario, const RunOptions& options) {
  if (instance.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  const auto floor = safety_stock(instance, design);
  const auto scales = accessibility::resolve_scales(instance, design);
  const std::size_t H = instance.dcs.size();

  std::vector<double> inventory = options.initial_inventory.value_or(floor);
  check_previous_inventory(instance, floor, inventory);

  ReplicationResult rep;
  rep.seed = scenario.seed;
  for (int t = 0; t < instance.horizon; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    std::vector<double> delivered(H);
    for (std::size_t h = 0; h < H; ++h) {
      delivered[h] = scenario.supply_factor(t, design.dc_supplier[h], h);
    }
    PeriodInputs in{inventory, scenario.demand[ts], delivered, epsilon, t + 1, options.balance};
    auto pm = build_period_model(instance, design, scales, in);
    if (options.on_model) options.on_model(t + 1, pm.model);
    const auto res = milp::solve_milp(pm.model, options.solver);
    if (res.status != milp::SolveStatus::Optimal) {
      throw InfeasiblePeriod("replication seed " + std::to_string(scenario.seed) +
                             ", period " + std::to_string(t + 1) + ": solver returned " +
                             milp::to_string(res.status));
    }

    PeriodDecision d;
    d.period = t + 1;
    d.previous_inventory = inventory;
    d.demand = scenario.demand[ts];
    d.delivered_fraction = delivered;
    d.nodes = res.nodes;
    d.objective = res.objective;
    for (std::size_t h = 0; h < H; ++h) {
      d.order.push_back(res.values[pm.order[h]]);
      d.inventory.push_back(res.values[pm.inventory[h]]);
      d.costs.inventory += instance.dcs[h].inventory_unit_cost * d.inventory[h];
      d.costs.order += instance.warehouses[design.dc_supplier[h]].order_cost_to(
                           instance.dcs[h].id) *
                       d.order[h];
    }
    for (std::size_t l = 0; l < instance.customers.size(); ++l) {
      d.shipped.push_back(res.values[pm.shipped[l]]);
      d.unmet.push_back(res.values[pm.unmet[l]]);
      d.costs.unfulfilled +=
          instance.regions[instance.customers[l].region].unfulfilled_unit_cost * d.unmet[l];
    }
    for (std::size_t i = 0; i < instance.regions.size(); ++i) {
      auto snap = accessibility::evaluate_region(instance, design, scales, i, t + 1,
                                                 d.inventory, d.shipped);
      std::vector<double> aux;
      for (std::size_t j = 0; j < instance.nutrients.size(); ++j) {
        const auto var = pm.aux[i][j];
        if (var != PeriodModel::npos) {
          aux.push_back(res.values[var]);
        } else {
          const double req = accessibility::nutrient_requirement(
              instance.regions[i], instance.nutrients[j], instance.persons_per_area);
          aux.push_back(std::max(0.0, snap.accessible_nutrition[j] - req));
        }
      }
      d.aux.push_back(std::move(aux));
      const auto& w = instance.regions[i].weights;
      d.accessibility += -w.transportation * snap.transportation + w.quality * snap.quality;
      d.regions.push_back(std::move(snap));
    }

    inventory = d.inventory;
    rep.phi += d.objective;
    rep.accessibility += d.accessibility;
    rep.costs.inventory += d.costs.inventory;
    rep.costs.unfulfilled += d.costs.unfulfilled;
    rep.costs.order += d.costs.order;
    rep.periods.push_back(std::move(d));
  }
  return rep;
}

ReplicationResult run_replication(const NetworkInstance& instance,
                                  const NetworkDesign& design, double epsilon,
                                  std::uint64_t seed, const RunOptions& options) {
  return run_replication(instance, design, epsilon, sample_scenario(instance, seed),
                         options);
}

std::pair<double, double> mean_and_se(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

EstimateResult estimate_objectives(const NetworkInstance& instance,
                                   const NetworkDesign& design, double epsilon,
                                   int replications, std::uint64_t master_seed,
                                   const EstimateOptions& options) {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  const auto n = static_cast<std::size_t>(replications);
  std::vector<ReplicationResult> runs(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < n; s = next++) {
      try {
        runs[s] = run_replication(instance, design, epsilon, derive_seed(master_seed, s),
                                  options.run);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  const auto jobs = static_cast<std::size_t>(std::clamp(options.jobs, 1, replications));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EstimateResult est;
  est.epsilon = epsilon;
  est.replications = replications;
  const auto scales = accessibility::resolve_scales(instance, design);
  for (const auto& r : instance.regions) {
    est.affordability_term += r.weights.affordability *
                              accessibility::Normalizer(scales.affordability)(
                                  accessibility::affordability(r)) *
                              instance.horizon;
  }
  std::vector<double> acc, cost, inv_cost, unmet_cost, order_cost;
  const auto T = static_cast<std::size_t>(instance.horizon);
  const std::size_t H = instance.dcs.size();
  est.mean_inventory.assign(T, std::vector<double>(H, 0.0));
  est.mean_order.assign(T, std::vector<double>(H, 0.0));
  est.mean_shipped.assign(T, std::vector<double>(instance.customers.size(), 0.0));
  est.initial_inventory = runs.front().periods.front().previous_inventory;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& run : runs) {
    acc.push_back(run.accessibility);
    cost.push_back(run.costs.total());
    inv_cost.push_back(run.costs.inventory);
    unmet_cost.push_back(run.costs.unfulfilled);
    order_cost.push_back(run.costs.order);
    for (std::size_t t = 0; t < T; ++t) {
      const auto& p = run.periods[t];
      for (std::size_t h = 0; h < H; ++h) {
        est.mean_inventory[t][h] += p.inventory[h] * inv_n;
        est.mean_order[t][h] += p.order[h] * inv_n;
      }
      for (std::size_t l = 0; l < p.shipped.size(); ++l) {
        est.mean_shipped[t][l] += p.shipped[l] * inv_n;
      }
    }
  }
  const auto [acc_mean, acc_se] = mean_and_se(acc);
  const auto [cost_mean, cost_se] = mean_and_se(cost);
  est.z1 = est.affordability_term + acc_mean;
  est.z1_se = acc_se;
  est.z2 = cost_mean;
  est.z2_se = cost_se;
  std::tie(est.mean_costs.inventory, est.cost_se.inventory) = mean_and_se(inv_cost);
  std::tie(est.mean_costs.unfulfilled, est.cost_se.unfulfilled) = mean_and_se(unmet_cost);
  std::tie(est.mean_costs.order, est.cost_se.order) = mean_and_se(order_cost);
  if (options.keep_replications) est.runs = std::move(runs);
  return est;
}

double audit_decision(const NetworkInstance& instance, const NetworkDesign& design,
                      const PeriodDecision& d, BalanceForm balance) {
  double worst = 0.0;
  auto below = [&](double v, double bound) { worst = std::max(worst, bound - v); };
  auto above = [&](double v, double bound) { worst = std::max(worst, v - bound); };
  const auto floor = derive_mean_local_demand(design, instance);
  for (std::size_t h = 0; h < instance.dcs.size(); ++h) {
    double outflow = 0.0;
    for (std::size_t l = 0; l < instance.customers.size(); ++l) {
      if (design.customer_dc[l] != h) continue;
      outflow += balance == BalanceForm::Delivered ? d.shipped[l] : d.demand[l];
    }
    const double expected =
        d.previous_inventory[h] - outflow + d.delivered_fraction[h] * d.order[h];
    worst = std::max(worst, std::abs(d.inventory[h] - expected));
    below(d.inventory[h], instance.safety_stock_fraction * floor[h]);
    above(d.inventory[h], instance.dcs[h].capacity);
    below(d.order[h], 0.0);
  }
  for (std::size_t w = 0; w < instance.warehouses.size(); ++w) {
    double sent = 0.0;
    for (std::size_t h = 0; h < instance.dcs.size(); ++h) {
      if (design.dc_supplier[h] == w) sent += d.order[h];
    }
    above(sent, instance.warehouses[w].capacity);
  }
  for (std::size_t l = 0; l < instance.customers.size(); ++l) {
    worst = std::max(worst, std::abs(d.shipped[l] + d.unmet[l] - d.demand[l]));
    below(d.shipped[l], 0.0);
    below(d.unmet[l], 0.0);
  }
  return worst;
}

}  // namespace chainforge::stochastic
