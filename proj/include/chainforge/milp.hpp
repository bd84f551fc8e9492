#pragma once

// Small dense solver for the per-period models: bounded-variable primal and
// dual simplex on a full tableau, plus best-first branch-and-bound over
// binary variables. Models always maximize.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace chainforge::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTolerance = 1e-7;
inline constexpr double kIntegralityTolerance = 1e-6;

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;  // must be finite
  double upper = kInfinity;
  bool is_binary = false;
  double objective = 0.0;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

class LinearModel {
 public:
  std::size_t add_variable(std::string name, double lower, double upper,
                           double objective = 0.0);
  std::size_t add_binary(std::string name, double objective = 0.0);
  std::size_t add_constraint(std::string name, std::vector<Term> terms,
                             Relation relation, double rhs);

  void set_objective(std::size_t var, double coef) { vars_.at(var).objective = coef; }
  void set_bounds(std::size_t var, double lower, double upper);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  bool has_binaries() const;

  /// Throws ConfigError on inconsistent bounds, non-finite coefficients, a
  /// binary with bounds outside [0, 1], or an out-of-range variable index.
  void validate() const;

  double objective_value(const std::vector<double>& values) const;
  /// Largest bound or row violation of `values`.
  double max_violation(const std::vector<double>& values) const;

  /// Writes the model in an LP-format-like text layout.
  void write_lp(std::ostream& out) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };

const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  int iterations = 0;  // simplex pivots and bound flips
  int nodes = 0;       // branch-and-bound nodes, root included
  /// Set when the node limit stopped the search while an incumbent existed.
  bool has_incumbent = false;
};

struct SolverOptions {
  double feasibility_tolerance = kFeasibilityTolerance;
  double integrality_tolerance = kIntegralityTolerance;
  int node_limit = 200'000;
  int iteration_limit = 0;  // 0 picks a limit from the model size
};

/// Solves the LP relaxation (binary flags ignored). Infeasible and unbounded
/// models are reported through the status; NumericalError is thrown when the
/// simplex fails to make progress even under the smallest-index rule.
SolveResult solve_lp(const LinearModel& model, const SolverOptions& options = {});

/// Branch-and-bound over the binary variables: most fractional variable
/// first, best-first node selection on the LP bound.
SolveResult solve_milp(const LinearModel& model, const SolverOptions& options = {});

}  // namespace chainforge::milp
