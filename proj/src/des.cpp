#include "chainforge/des.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <queue>
#include <thread>

#include "chainforge/error.hpp"
#include "chainforge/random.hpp"
#include "chainforge/stochastic.hpp"

namespace chainforge::des {

void SimConfig::validate() const {
  if (horizon < 0) throw ConfigError("simulation horizon must be >= 1");
  if (orders_per_period < 1) throw ConfigError("orders per customer and period must be >= 1");
  if (!(lead_time >= 0.0)) throw ConfigError("lead time must be >= 0");
}

double service_level(double successful_volume, double total_volume) {
  if (total_volume <= 0.0) return 1.0;
  return std::clamp(successful_volume / total_volume, 0.0, 1.0);
}

namespace {

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Order;
  std::size_t customer = 0;
  long seq = 0;
  std::size_t dc = 0;
  double quantity = 0.0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.customer != b.customer) return a.customer > b.customer;
    return a.seq > b.seq;
  }
};

struct Waiting {
  std::size_t customer;
  double quantity;
};

}  // namespace

SimReport simulate(const NetworkInstance& instance, const NetworkDesign& design,
                   const std::vector<double>& initial_inventory, const SimConfig& config) {
  config.validate();
  const std::size_t H = instance.dcs.size();
  const std::size_t L = instance.customers.size();
  const int T = config.horizon > 0 ? config.horizon : instance.horizon;
  if (initial_inventory.size() != H) {
    throw ConfigError("initial inventory needs one value per DC");
  }
  const auto reorder_point = stochastic::safety_stock(instance, design);
  std::vector<double> up_to(H);
  for (std::size_t h = 0; h < H; ++h) {
    const double cap = instance.dcs[h].capacity;
    up_to[h] = config.order_up_to ? config.order_up_to->at(h) : cap;
    if (up_to[h] < reorder_point[h] || up_to[h] > cap) {
      throw ConfigError("DC '" + instance.dcs[h].id + "': order-up-to level must lie in [s, capacity]");
    }
    if (initial_inventory[h] < 0.0 || initial_inventory[h] > cap) {
      throw ConfigError("DC '" + instance.dcs[h].id + "': initial inventory outside [0, capacity]");
    }
  }

  NetworkInstance horizon_instance = instance;
  horizon_instance.horizon = T;
  const auto scenario = stochastic::sample_scenario(horizon_instance, config.rng_seed);
  RandomStream timing(derive_seed(config.rng_seed, 2));
  RandomStream sizes(derive_seed(config.rng_seed, 3));

  std::priority_queue<Event, std::vector<Event>, Later> queue;
  long seq = 0;
  const int k = config.orders_per_period;
  for (int t = 0; t < T; ++t) {
    queue.push({static_cast<double>(t), EventKind::Review, 0, seq++, 0, 0.0});
    for (std::size_t l = 0; l < L; ++l) {
      const auto& spec = instance.customers[l].demand;
      for (int o = 0; o < k; ++o) {
        double q = scenario.demand[static_cast<std::size_t>(t)][l];
        if (k > 1) {
          q = std::max(0.0, sizes.normal(spec.mean / k, spec.stddev() / std::sqrt(double(k))));
        }
        queue.push({t + timing.uniform(), EventKind::Order, l, seq++, design.customer_dc[l], q});
      }
    }
    queue.push({static_cast<double>(t + 1), EventKind::PeriodEnd, 0, seq++, 0, 0.0});
  }

  SimReport rep;
  rep.initial_inventory = initial_inventory;
  rep.received.assign(H, 0.0);
  rep.shipped.assign(H, 0.0);
  std::vector<double> inv = initial_inventory;
  std::vector<double> outstanding(H, 0.0);
  std::vector<std::deque<Waiting>> backlog(H);
  std::vector<double> placed_volume(instance.regions.size(), 0.0);
  std::vector<double> success_volume(instance.regions.size(), 0.0);

  auto log = [&](double time, EventKind kind, std::size_t h, std::size_t l, double qty) {
    if (config.record_events) rep.events.push_back({time, kind, h, l, qty, inv[h]});
  };
  auto ship = [&](double time, std::size_t h, std::size_t l, double qty) {
    log(time, EventKind::Order, h, l, qty);
    inv[h] -= qty;
    rep.shipped[h] += qty;
  };
  auto serve_backlog = [&](double time, std::size_t h) {
    auto& q = backlog[h];
    while (!q.empty() && q.front().quantity <= inv[h]) {
      ship(time, h, q.front().customer, q.front().quantity);
      q.pop_front();
    }
  };
  auto receive = [&](double time, std::size_t h, double qty) {
    log(time, EventKind::Receipt, h, 0, qty);
    inv[h] += qty;
    rep.received[h] += qty;
    serve_backlog(time, h);
  };

  while (!queue.empty()) {
    const Event e = queue.top();
    queue.pop();
    if (e.time > T) continue;  // receipts beyond the horizon never arrive
    switch (e.kind) {
      case EventKind::PeriodEnd:
        for (std::size_t h = 0; h < H; ++h) {
          rep.inventory_cost += instance.dcs[h].inventory_unit_cost * inv[h];
        }
        break;
      case EventKind::Receipt:
        outstanding[e.dc] -= e.quantity;
        receive(e.time, e.dc, e.quantity);
        break;
      case EventKind::Review: {
        const int t = static_cast<int>(e.time);
        std::vector<double> request(H, 0.0);
        std::vector<double> requested(instance.warehouses.size(), 0.0);
        for (std::size_t h = 0; h < H; ++h) {
          double position = inv[h] + outstanding[h];
          for (const auto& w : backlog[h]) position -= w.quantity;
          if (position > reorder_point[h]) continue;
          request[h] = up_to[h] - position;
          requested[design.dc_supplier[h]] += request[h];
        }
        for (std::size_t h = 0; h < H; ++h) {
          if (request[h] <= 0.0) continue;
          const auto w = design.dc_supplier[h];
          // An oversubscribed warehouse splits its capacity pro rata.
          const double cap = instance.warehouses[w].capacity;
          const double qty =
              requested[w] > cap ? request[h] * (cap / requested[w]) : request[h];
          if (qty <= 0.0) continue;
          rep.order_cost += instance.warehouses[w].order_cost_to(instance.dcs[h].id) * qty;
          const double delivered = scenario.supply_factor(t, w, h) * qty;
          if (config.lead_time == 0.0) {
            receive(e.time, h, delivered);
          } else {
            outstanding[h] += delivered;
            queue.push({e.time + config.lead_time, EventKind::Receipt, 0, seq++, h, delivered});
          }
        }
        break;
      }
      case EventKind::Order: {
        const auto h = e.dc;
        const auto region = instance.customers[e.customer].region;
        ++rep.orders_placed;
        placed_volume[region] += e.quantity;
        if (e.quantity <= inv[h]) {
          ++rep.orders_successful;
          success_volume[region] += e.quantity;
          ship(e.time, h, e.customer, e.quantity);
        } else if (config.backlog == Backlog::Drop) {
          ++rep.orders_dropped;
          rep.unfulfilled_cost += instance.regions[region].unfulfilled_unit_cost * e.quantity;
        } else {
          ++rep.orders_waited;
          backlog[h].push_back({e.customer, e.quantity});
        }
        break;
      }
    }
  }
  for (std::size_t h = 0; h < H; ++h) {
    for (const auto& w : backlog[h]) {
      rep.unfulfilled_cost +=
          instance.regions[instance.customers[w.customer].region].unfulfilled_unit_cost *
          w.quantity;
    }
  }
  rep.final_inventory = inv;
  rep.total_cost = rep.inventory_cost + rep.unfulfilled_cost + rep.order_cost;
  double placed = 0.0, success = 0.0;
  for (std::size_t i = 0; i < instance.regions.size(); ++i) {
    rep.region_service.push_back(service_level(success_volume[i], placed_volume[i]));
    placed += placed_volume[i];
    success += success_volume[i];
  }
  rep.service = service_level(success, placed);
  return rep;
}

SimReport simulate(const NetworkInstance& instance, const NetworkDesign& design,
                   const OperationalPlan& plan, const SimConfig& config) {
  if (!linkages_match(plan, instance, design)) {
    throw ConfigError("plan linkages do not match the network design");
  }
  NetworkInstance planned = instance;
  planned.safety_stock_fraction = plan.safety_stock_fraction;
  return simulate(planned, design, plan.initial_inventory, config);
}

ValidationSummary validate_plan(const NetworkInstance& instance,
                                const NetworkDesign& design, const OperationalPlan& plan,
                                SimConfig config, int runs, std::uint64_t master_seed,
                                int jobs) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (!linkages_match(plan, instance, design)) {
    throw ConfigError("plan linkages do not match the network design");
  }
  NetworkInstance planned = instance;
  planned.safety_stock_fraction = plan.safety_stock_fraction;
  const auto n = static_cast<std::size_t>(runs);
  std::vector<SimReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < n; r = next++) {
      try {
        SimConfig c = config;
        c.rng_seed = derive_seed(master_seed, r);
        reports[r] = simulate(planned, design, plan.initial_inventory, c);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, runs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < workers; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ValidationSummary out;
  out.runs = runs;
  auto stat = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(field(r));
    const auto [m, se] = stochastic::mean_and_se(v);
    return Statistic{m, se};
  };
  out.inventory_cost = stat([](const SimReport& r) { return r.inventory_cost; });
  out.unfulfilled_cost = stat([](const SimReport& r) { return r.unfulfilled_cost; });
  out.order_cost = stat([](const SimReport& r) { return r.order_cost; });
  out.total_cost = stat([](const SimReport& r) { return r.total_cost; });
  out.service = stat([](const SimReport& r) { return r.service; });
  for (std::size_t i = 0; i < instance.regions.size(); ++i) {
    out.region_service.push_back(
        stat([i](const SimReport& r) { return r.region_service[i]; }));
  }
  out.reports = std::move(reports);
  return out;
}

}  // namespace chainforge::des
