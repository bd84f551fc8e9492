#include "chainforge/gfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chainforge/error.hpp"
#include "chainforge/random.hpp"

namespace chainforge::gfa {

void GfaConfig::validate() const {
  for (const auto& [region, k] : dc_count_per_region) {
    if (k < 1) throw ConfigError("region '" + region + "': DC count must be >= 1");
  }
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(tolerance > 0)) throw ConfigError("tolerance must be > 0");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
}

double weber_objective(std::span<const WeightedPoint> points, Point site) {
  double total = 0.0;
  for (const auto& p : points) total += p.weight * euclidean_distance(site, p.location);
  return total;
}

WeiszfeldResult weiszfeld_single(std::span<const WeightedPoint> points,
                                 const GfaConfig& config,
                                 std::optional<Point> start) {
  if (points.empty()) throw InfeasibleConfig("weiszfeld_single needs a customer");
  Point current;
  if (start) {
    current = *start;
  } else {
    double wsum = 0.0;
    for (const auto& p : points) {
      current.x += p.weight * p.location.x;
      current.y += p.weight * p.location.y;
      wsum += p.weight;
    }
    current.x /= wsum;
    current.y /= wsum;
  }

  WeiszfeldResult result;
  result.objective_trace.push_back(weber_objective(points, current));
  for (int it = 1; it <= config.max_iterations; ++it) {
    double num_x = 0.0, num_y = 0.0, den = 0.0;
    for (const auto& p : points) {
      double d = euclidean_distance(current, p.location);
      if (d < kSingularityGuard) d = kSingularityGuard;
      num_x += p.weight * p.location.x / d;
      num_y += p.weight * p.location.y / d;
      den += p.weight / d;
    }
    const Point next{num_x / den, num_y / den};
    const double moved = euclidean_distance(current, next);
    current = next;
    result.iterations = it;
    result.objective_trace.push_back(weber_objective(points, current));
    if (moved <= config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.location = current;
  result.objective = result.objective_trace.back();
  return result;
}

namespace {

std::size_t nearest_site(Point p, const std::vector<Point>& sites) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const double d = euclidean_distance(p, sites[s]);
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

RegionPlacement single_start(std::span<const WeightedPoint> points, int k,
                             const GfaConfig& config, RandomStream& rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const auto j = i + rng.below(n - i);
    std::swap(order[i], order[j]);
  }
  RegionPlacement placement;
  for (int s = 0; s < k; ++s) placement.sites.push_back(points[order[s]].location);

  std::vector<std::size_t> assignment;
  for (int it = 1; it <= config.max_iterations; ++it) {
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = nearest_site(points[i].location, placement.sites);
    }
    // An empty cluster takes over the point that is worst served.
    for (int s = 0; s < k; ++s) {
      if (std::find(next.begin(), next.end(), s) != next.end()) continue;
      std::size_t worst = 0;
      double worst_cost = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto owner = next[i];
        if (std::count(next.begin(), next.end(), owner) < 2) continue;
        const double cost =
            points[i].weight * euclidean_distance(points[i].location,
                                                  placement.sites[owner]);
        if (cost > worst_cost) {
          worst_cost = cost;
          worst = i;
        }
      }
      next[worst] = static_cast<std::size_t>(s);
    }
    const bool repeated = next == assignment;
    assignment = std::move(next);

    double moved = 0.0;
    for (int s = 0; s < k; ++s) {
      std::vector<WeightedPoint> cluster;
      for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] == static_cast<std::size_t>(s)) cluster.push_back(points[i]);
      }
      // Starting on a customer would pin the site there (singularity guard),
      // so every relocation starts from the cluster centroid.
      const auto res = weiszfeld_single(cluster, config);
      moved = std::max(moved, euclidean_distance(res.location, placement.sites[s]));
      placement.sites[s] = res.location;
    }
    placement.iterations = it;
    if (repeated || moved <= config.tolerance) {
      placement.converged = true;
      break;
    }
  }

  placement.assignment.resize(n);
  placement.objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    placement.assignment[i] = nearest_site(points[i].location, placement.sites);
    placement.objective +=
        points[i].weight * euclidean_distance(points[i].location,
                                              placement.sites[placement.assignment[i]]);
  }
  return placement;
}

}  // namespace

RegionPlacement locate_region(std::span<const WeightedPoint> points, int k,
                              const GfaConfig& config, std::uint64_t seed) {
  config.validate();
  if (k < 1) throw InfeasibleConfig("DC count must be >= 1");
  if (static_cast<std::size_t>(k) > points.size()) {
    throw InfeasibleConfig("cannot place " + std::to_string(k) + " DCs for " +
                           std::to_string(points.size()) + " customers");
  }
  RegionPlacement best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.restarts; ++r) {
    RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    auto candidate = single_start(points, k, config, rng);
    if (candidate.objective < best.objective) best = std::move(candidate);
  }
  return best;
}

namespace {

/// Index of the nearest candidate; equal distances go to the lowest id.
template <typename IdOf>
std::size_t nearest_by_id(Point from, const std::vector<std::size_t>& candidates,
                          const std::vector<Point>& locations, IdOf id_of) {
  std::size_t best = candidates.front();
  double best_d = euclidean_distance(from, locations[best]);
  for (std::size_t c : candidates) {
    const double d = euclidean_distance(from, locations[c]);
    if (d < best_d || (d == best_d && id_of(c) < id_of(best))) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

NetworkDesign assign_linkages(const NetworkInstance& instance,
                              std::vector<Point> dc_locations) {
  std::vector<Point> warehouse_locations;
  std::vector<std::size_t> all_warehouses;
  for (std::size_t w = 0; w < instance.warehouses.size(); ++w) {
    warehouse_locations.push_back(instance.warehouses[w].location);
    all_warehouses.push_back(w);
  }
  std::vector<std::size_t> supplier(instance.dcs.size());
  for (std::size_t h = 0; h < instance.dcs.size(); ++h) {
    supplier[h] = nearest_by_id(dc_locations[h], all_warehouses, warehouse_locations,
                                [&](std::size_t w) -> const std::string& {
                                  return instance.warehouses[w].id;
                                });
  }
  std::vector<std::size_t> customer_dc(instance.customers.size());
  for (std::size_t l = 0; l < instance.customers.size(); ++l) {
    const auto candidates = instance.dcs_in_region(instance.customers[l].region);
    customer_dc[l] = nearest_by_id(instance.customers[l].location, candidates,
                                   dc_locations,
                                   [&](std::size_t h) -> const std::string& {
                                     return instance.dcs[h].id;
                                   });
  }
  return make_design(instance, std::move(dc_locations), std::move(supplier),
                     std::move(customer_dc));
}

GfaResult run_gfa(const NetworkInstance& instance, const GfaConfig& config) {
  config.validate();
  GfaResult result;
  std::vector<Point> locations(instance.dcs.size());
  for (std::size_t r = 0; r < instance.regions.size(); ++r) {
    const auto& region = instance.regions[r];
    const auto dcs = instance.dcs_in_region(r);
    const int k = static_cast<int>(dcs.size());
    if (auto it = config.dc_count_per_region.find(region.id);
        it != config.dc_count_per_region.end() && it->second != k) {
      throw InfeasibleConfig("region '" + region.id + "' declares " +
                             std::to_string(k) + " DCs but " +
                             std::to_string(it->second) + " were requested");
    }
    std::vector<WeightedPoint> points;
    for (auto l : instance.customers_in_region(r)) {
      points.push_back({instance.customers[l].location,
                        instance.customers[l].demand.mean});
    }
    if (static_cast<std::size_t>(k) > points.size()) {
      throw InfeasibleConfig("region '" + region.id + "' has more DCs than customers");
    }
    auto placement = locate_region(points, k, config,
                                   derive_seed(config.rng_seed, r));
    auto sites = placement.sites;
    std::sort(sites.begin(), sites.end(), [](Point a, Point b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    for (std::size_t i = 0; i < dcs.size(); ++i) locations[dcs[i]] = sites[i];

    result.regions.push_back(
        {region.id, placement.objective, placement.iterations, placement.converged});
    result.iterations += placement.iterations;
    result.converged = result.converged && placement.converged;
  }
  result.design = assign_linkages(instance, std::move(locations));
  // Report W under the final minimum-distance linkage.
  for (std::size_t r = 0; r < instance.regions.size(); ++r) {
    double w = 0.0;
    for (auto l : instance.customers_in_region(r)) {
      w += instance.customers[l].demand.mean * result.design.linked_distance(l);
    }
    result.regions[r].objective = w;
  }
  return result;
}

}  // namespace chainforge::gfa
