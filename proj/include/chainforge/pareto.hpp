#pragma once

// Epsilon sweep over the scalarized objective Z1 - eps * Z2 and extraction
// of the non-dominated set (maximize Z1, minimize Z2).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainforge/stochastic.hpp"

namespace chainforge::pareto {

enum class Spacing { Log, Linear };

/// Parses "lo:hi:steps". Log spacing needs lo > 0; steps == 1 yields {lo}.
std::vector<double> parse_grid(const std::string& text, Spacing spacing = Spacing::Log);

struct ParetoSolution {
  double epsilon = 0.0;
  double z1 = 0.0;
  double z1_se = 0.0;
  double z2 = 0.0;
  double z2_se = 0.0;
  double inventory_cost = 0.0;
  double unfulfilled_cost = 0.0;
  double order_cost = 0.0;
  bool on_front = false;
  std::string error;  // non-empty when the estimate failed
  std::optional<stochastic::EstimateResult> estimate;

  bool ok() const { return error.empty(); }
};

struct SolutionPool {
  std::vector<ParetoSolution> solutions;

  std::vector<std::size_t> front() const;
};

struct SweepOptions {
  stochastic::EstimateOptions estimate;
  int jobs = 1;  // grid points evaluated concurrently
};

/// One estimate per grid value, all with the same master seed. A failing
/// grid point is recorded with its error and the sweep continues. Front
/// flags are set on return.
SolutionPool sweep(const NetworkInstance& instance, const NetworkDesign& design,
                   std::span<const double> grid, int replications,
                   std::uint64_t master_seed, const SweepOptions& options = {});

struct ObjectivePoint {
  double z1 = 0.0;
  double z2 = 0.0;
  double epsilon = 0.0;
};

/// Indices of the non-dominated points in increasing Z2 order. Points equal
/// in both objectives collapse to the one with the lowest epsilon (then the
/// lowest index).
std::vector<std::size_t> extract_front(std::span<const ObjectivePoint> points);

/// Recomputes the on_front flags of `pool`; failed entries are never on it.
void mark_front(SolutionPool& pool);

}  // namespace chainforge::pareto
