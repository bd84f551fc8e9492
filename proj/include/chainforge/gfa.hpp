#pragma once

// Phase I green-field placement: weighted geometric median (Weiszfeld) per
// cluster, alternated with nearest-site assignment when a region hosts
// several DCs, followed by minimum-distance linkage.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainforge/model.hpp"

namespace chainforge::gfa {

struct GfaConfig {
  /// DC count per region id. Regions left out use the number of DCs the
  /// instance declares; an explicit count must agree with it.
  std::map<std::string, int> dc_count_per_region;
  int max_iterations = 1000;
  double tolerance = 1e-4;  // km
  int restarts = 8;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// A customer site weighted by its mean demand.
struct WeightedPoint {
  Point location;
  double weight = 1.0;
};

/// Guard added to distances in the Weiszfeld update when the iterate sits on
/// a customer.
inline constexpr double kSingularityGuard = 1e-9;

/// sum_l weight_l * d(site, location_l)
double weber_objective(std::span<const WeightedPoint> points, Point site);

struct WeiszfeldResult {
  Point location;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective before the first update and after every iteration.
  std::vector<double> objective_trace;
};

/// Weighted geometric median by fixed-point iteration, started from the
/// weighted centroid unless `start` is given. A run that exhausts
/// `max_iterations` is returned with `converged == false`.
WeiszfeldResult weiszfeld_single(std::span<const WeightedPoint> points,
                                 const GfaConfig& config,
                                 std::optional<Point> start = std::nullopt);

struct RegionPlacement {
  std::vector<Point> sites;
  std::vector<std::size_t> assignment;  // site index per point
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Places `k` sites for the given customers by alternating nearest-site
/// assignment with per-cluster Weiszfeld relocation; keeps the best of
/// `config.restarts` random starts. Throws InfeasibleConfig if k exceeds the
/// number of points.
RegionPlacement locate_region(std::span<const WeightedPoint> points, int k,
                              const GfaConfig& config, std::uint64_t seed);

/// Links every customer to the nearest DC of its own region and every DC to
/// the nearest warehouse. Ties go to the lowest identifier.
NetworkDesign assign_linkages(const NetworkInstance& instance,
                              std::vector<Point> dc_locations);

struct RegionSummary {
  std::string region_id;
  double objective = 0.0;  // W, kg * km
  int iterations = 0;
  bool converged = false;
};

struct GfaResult {
  NetworkDesign design;
  std::vector<RegionSummary> regions;
  int iterations = 0;
  bool converged = true;
};

GfaResult run_gfa(const NetworkInstance& instance, const GfaConfig& config);

}  // namespace chainforge::gfa
