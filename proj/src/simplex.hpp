#pragma once

// Dense bounded-variable simplex tableau shared by solve_lp and the
// branch-and-bound driver. Internal to the library.

#include <cstdint>
#include <memory>
#include <vector>

#include "chainforge/milp.hpp"

namespace chainforge::milp::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Original constraint rows with slack columns appended; used to recompute
/// basic values from scratch once a basis is final.
struct OriginalRows {
  std::size_t rows = 0;
  std::size_t cols = 0;  // structural + slack
  std::vector<double> a;  // row-major
  std::vector<double> b;
  double rhs_scale = 1.0;
};

class Tableau {
 public:
  Tableau(const LinearModel& model, const SolverOptions& options);

  /// Two-phase primal simplex from the slack/artificial basis.
  LpStatus solve();

  /// Tightens the bounds of a structural variable. The basis is kept, so the
  /// next `reoptimize` runs the dual simplex from the previous optimum.
  void set_bounds(std::size_t var, double lower, double upper);

  /// Dual simplex followed by a primal clean-up pass.
  LpStatus reoptimize();

  /// Recomputes basic values from the original rows with a fresh LU
  /// factorization of the basis matrix.
  void refine();

  double value(std::size_t var) const { return value_[var]; }
  std::vector<double> structural_values() const;
  /// Objective with costs scaled so the largest |c_j| is 1.
  double scaled_objective() const;
  int iterations() const { return iterations_; }

 private:
  enum class State : std::uint8_t { Basic, AtLower, AtUpper };

  double* row(std::size_t r) { return a_.data() + r * cols_; }
  const double* row(std::size_t r) const { return a_.data() + r * cols_; }
  bool is_fixed(std::size_t j) const { return hi_[j] - lo_[j] <= 0.0; }
  double primal_tolerance(double bound) const;

  void compute_reduced_costs();
  void pivot(std::size_t r, std::size_t q);
  LpStatus primal();
  LpStatus dual();
  void drop_artificials();
  void count_iteration();

  std::size_t structural_ = 0;
  std::size_t slack_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
  std::vector<double> d_;     // reduced costs
  std::vector<double> cost_;  // current phase costs
  std::vector<double> objective_;  // scaled phase-two costs, structural only
  std::vector<double> lo_, hi_, value_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> row_origin_;
  std::shared_ptr<const OriginalRows> original_;
  bool has_artificials_ = false;
  int iterations_ = 0;
  int iteration_limit_ = 0;
  int call_start_ = 0;
  double feasibility_tolerance_ = kFeasibilityTolerance;
};

}  // namespace chainforge::milp::detail
