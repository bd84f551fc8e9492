#include "chainforge/pareto.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "chainforge/error.hpp"

namespace chainforge::pareto {

std::vector<double> parse_grid(const std::string& text, Spacing spacing) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("epsilon grid '" + text + "': expected lo:hi:steps");
  double lo, hi;
  long steps;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    steps = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("steps");
  } catch (const std::exception&) {
    throw ConfigError("epsilon grid '" + text + "': expected lo:hi:steps");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0 || hi < lo) {
    throw ConfigError("epsilon grid '" + text + "': need 0 <= lo <= hi");
  }
  if (steps < 1) throw ConfigError("epsilon grid '" + text + "': steps must be >= 1");
  if (spacing == Spacing::Log && lo <= 0) {
    throw ConfigError("epsilon grid '" + text + "': log spacing needs lo > 0");
  }
  std::vector<double> grid;
  for (long k = 0; k < steps; ++k) {
    if (steps == 1) {
      grid.push_back(lo);
      break;
    }
    const double f = static_cast<double>(k) / static_cast<double>(steps - 1);
    double v = spacing == Spacing::Log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    if (k == steps - 1) v = hi;
    grid.push_back(v);
  }
  return grid;
}

std::vector<std::size_t> extract_front(std::span<const ObjectivePoint> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& p = points[a];
    const auto& q = points[b];
    if (p.z2 != q.z2) return p.z2 < q.z2;
    if (p.z1 != q.z1) return p.z1 > q.z1;
    if (p.epsilon != q.epsilon) return p.epsilon < q.epsilon;
    return a < b;
  });
  // Sweeping by increasing Z2, a point survives iff its Z1 beats everything
  // seen so far; equal (Z1, Z2) pairs keep only the first in sort order.
  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    if (front.empty() || points[idx].z1 > points[front.back()].z1) front.push_back(idx);
  }
  return front;
}

std::vector<std::size_t> SolutionPool::front() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (solutions[i].on_front) out.push_back(i);
  }
  return out;
}

void mark_front(SolutionPool& pool) {
  std::vector<ObjectivePoint> points;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < pool.solutions.size(); ++i) {
    auto& s = pool.solutions[i];
    s.on_front = false;
    if (!s.ok()) continue;
    points.push_back({s.z1, s.z2, s.epsilon});
    index.push_back(i);
  }
  for (auto k : extract_front(points)) pool.solutions[index[k]].on_front = true;
}

SolutionPool sweep(const NetworkInstance& instance, const NetworkDesign& design,
                   std::span<const double> grid, int replications,
                   std::uint64_t master_seed, const SweepOptions& options) {
  if (grid.empty()) throw ConfigError("epsilon grid is empty");
  for (double e : grid) {
    if (!(e >= 0.0)) throw ConfigError("epsilon values must be >= 0");
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");

  SolutionPool pool;
  pool.solutions.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      auto& sol = pool.solutions[k];
      sol.epsilon = grid[k];
      try {
        auto est = stochastic::estimate_objectives(instance, design, grid[k], replications,
                                                   master_seed, options.estimate);
        sol.z1 = est.z1;
        sol.z1_se = est.z1_se;
        sol.z2 = est.z2;
        sol.z2_se = est.z2_se;
        sol.inventory_cost = est.mean_costs.inventory;
        sol.unfulfilled_cost = est.mean_costs.unfulfilled;
        sol.order_cost = est.mean_costs.order;
        sol.estimate = std::move(est);
      } catch (const std::exception& e) {
        sol.error = e.what();
      }
    }
  };
  const auto jobs = static_cast<std::size_t>(
      std::clamp<long>(options.jobs, 1, static_cast<long>(grid.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool_threads;
    for (std::size_t j = 0; j < jobs; ++j) pool_threads.emplace_back(worker);
  }
  mark_front(pool);
  return pool;
}

}  // namespace chainforge::pareto
