#include "simplex.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "chainforge/error.hpp"

namespace chainforge::milp::detail {

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kOptimalityTolerance = 1e-9;
constexpr double kDropTolerance = 1e-13;

}  // namespace

Tableau::Tableau(const LinearModel& model, const SolverOptions& options)
    : feasibility_tolerance_(options.feasibility_tolerance) {
  const auto& vars = model.variables();
  const auto& cons = model.constraints();
  structural_ = vars.size();
  rows_ = cons.size();
  for (const auto& c : cons) {
    if (c.relation != Relation::Equal) ++slack_;
  }

  auto original = std::make_shared<OriginalRows>();
  original->rows = rows_;
  original->cols = structural_ + slack_;
  original->a.assign(rows_ * original->cols, 0.0);
  original->b.resize(rows_);
  std::vector<std::size_t> slack_of(rows_, SIZE_MAX);
  {
    std::size_t s = structural_;
    for (std::size_t i = 0; i < rows_; ++i) {
      double* r = original->a.data() + i * original->cols;
      for (const auto& t : cons[i].terms) r[t.var] += t.coef;
      if (cons[i].relation != Relation::Equal) {
        r[s] = cons[i].relation == Relation::LessEqual ? 1.0 : -1.0;
        slack_of[i] = s++;
      }
      original->b[i] = cons[i].rhs;
    }
  }

  lo_.assign(structural_ + slack_, 0.0);
  hi_.assign(structural_ + slack_, kInfinity);
  value_.assign(structural_ + slack_, 0.0);
  state_.assign(structural_ + slack_, State::AtLower);
  for (std::size_t j = 0; j < structural_; ++j) {
    lo_[j] = vars[j].lower;
    hi_[j] = vars[j].upper;
    value_[j] = lo_[j];
  }

  // Residual of each row with all structurals at their lower bounds decides
  // whether the slack can start basic or an artificial is needed.
  std::vector<double> residual(rows_);
  std::vector<bool> needs_artificial(rows_, false);
  std::size_t artificials = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = original->a.data() + i * original->cols;
    double lhs = 0.0;
    for (std::size_t j = 0; j < structural_; ++j) lhs += r[j] * value_[j];
    residual[i] = original->b[i] - lhs;
    if (slack_of[i] == SIZE_MAX) {
      needs_artificial[i] = true;
    } else {
      const double sigma = r[slack_of[i]];
      needs_artificial[i] = sigma * residual[i] < 0.0;
    }
    if (needs_artificial[i]) ++artificials;
  }
  has_artificials_ = artificials > 0;

  cols_ = structural_ + slack_ + artificials;
  a_.assign(rows_ * cols_, 0.0);
  lo_.resize(cols_, 0.0);
  hi_.resize(cols_, kInfinity);
  value_.resize(cols_, 0.0);
  state_.resize(cols_, State::AtLower);
  basis_.resize(rows_);
  row_origin_.resize(rows_);
  std::size_t art = structural_ + slack_;
  for (std::size_t i = 0; i < rows_; ++i) {
    row_origin_[i] = i;
    const double* src = original->a.data() + i * original->cols;
    double* dst = row(i);
    double scale;
    std::size_t basic;
    if (needs_artificial[i]) {
      scale = residual[i] >= 0.0 ? 1.0 : -1.0;
      basic = art++;
      dst[basic] = 1.0;
      value_[basic] = std::abs(residual[i]);
    } else {
      scale = src[slack_of[i]];
      basic = slack_of[i];
      value_[basic] = scale * residual[i];
    }
    for (std::size_t j = 0; j < original->cols; ++j) dst[j] = scale * src[j];
    basis_[i] = basic;
    state_[basic] = State::Basic;
  }
  original_ = std::move(original);

  double cmax = 0.0;
  for (const auto& v : vars) cmax = std::max(cmax, std::abs(v.objective));
  const double cscale = cmax > 0.0 ? 1.0 / cmax : 1.0;
  objective_.resize(structural_);
  for (std::size_t j = 0; j < structural_; ++j) objective_[j] = vars[j].objective * cscale;

  iteration_limit_ = options.iteration_limit > 0
                         ? options.iteration_limit
                         : static_cast<int>(50 * (rows_ + cols_) + 1000);
}

double Tableau::primal_tolerance(double bound) const {
  return feasibility_tolerance_ * 1e-2 * std::max(1.0, std::abs(bound));
}

void Tableau::count_iteration() {
  if (++iterations_ - call_start_ > iteration_limit_) {
    throw NumericalError("simplex iteration limit reached (" +
                         std::to_string(iteration_limit_) + ")");
  }
}

void Tableau::compute_reduced_costs() {
  d_ = cost_;
  for (std::size_t r = 0; r < rows_; ++r) {
    const double cb = cost_[basis_[r]];
    if (cb == 0.0) continue;
    const double* a = row(r);
    for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * a[j];
  }
  for (std::size_t r = 0; r < rows_; ++r) d_[basis_[r]] = 0.0;
}

void Tableau::pivot(std::size_t r, std::size_t q) {
  double* prow = row(r);
  const double inv = 1.0 / prow[q];
  std::vector<std::size_t> nz;
  nz.reserve(cols_);
  for (std::size_t j = 0; j < cols_; ++j) {
    if (prow[j] == 0.0) continue;
    prow[j] *= inv;
    if (std::abs(prow[j]) < kDropTolerance) {
      prow[j] = 0.0;
    } else {
      nz.push_back(j);
    }
  }
  prow[q] = 1.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i == r) continue;
    double* a = row(i);
    const double f = a[q];
    if (f == 0.0) continue;
    for (std::size_t j : nz) {
      a[j] -= f * prow[j];
      if (std::abs(a[j]) < kDropTolerance) a[j] = 0.0;
    }
    a[q] = 0.0;
  }
  const double f = d_[q];
  if (f != 0.0) {
    for (std::size_t j : nz) d_[j] -= f * prow[j];
  }
  d_[q] = 0.0;
  basis_[r] = q;
  state_[q] = State::Basic;
}

LpStatus Tableau::primal() {
  std::size_t degenerate = 0;
  bool bland = false;
  while (true) {
    std::size_t q = SIZE_MAX;
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] == State::Basic || is_fixed(j)) continue;
      const double dj = d_[j];
      const bool eligible = (state_[j] == State::AtLower && dj > kOptimalityTolerance) ||
                            (state_[j] == State::AtUpper && dj < -kOptimalityTolerance);
      if (!eligible) continue;
      if (bland) {
        q = j;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
      }
    }
    if (q == SIZE_MAX) return LpStatus::Optimal;

    const double dir = state_[q] == State::AtLower ? 1.0 : -1.0;
    double step = hi_[q] - lo_[q];
    std::size_t leave = SIZE_MAX;
    bool leave_upper = false;
    double leave_alpha = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double alpha = row(r)[q];
      if (std::abs(alpha) <= kPivotTolerance) continue;
      const double delta = -dir * alpha;
      const std::size_t b = basis_[r];
      double limit;
      bool to_upper;
      if (delta < 0.0) {
        limit = std::max(value_[b] - lo_[b], 0.0) / -delta;
        to_upper = false;
      } else {
        if (hi_[b] == kInfinity) continue;
        limit = std::max(hi_[b] - value_[b], 0.0) / delta;
        to_upper = true;
      }
      bool take;
      if (limit < step - 1e-12) {
        take = true;
      } else if (leave != SIZE_MAX && std::abs(limit - step) <= 1e-12) {
        take = bland ? b < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
      } else {
        take = false;
      }
      if (take) {
        step = limit;
        leave = r;
        leave_upper = to_upper;
        leave_alpha = alpha;
      }
    }
    if (leave == SIZE_MAX && step == kInfinity) return LpStatus::Unbounded;

    count_iteration();
    for (std::size_t r = 0; r < rows_; ++r) {
      const double alpha = row(r)[q];
      if (alpha != 0.0) value_[basis_[r]] -= dir * alpha * step;
    }
    value_[q] += dir * step;
    if (leave == SIZE_MAX) {
      state_[q] = state_[q] == State::AtLower ? State::AtUpper : State::AtLower;
      value_[q] = state_[q] == State::AtLower ? lo_[q] : hi_[q];
    } else {
      const std::size_t b = basis_[leave];
      value_[b] = leave_upper ? hi_[b] : lo_[b];
      state_[b] = leave_upper ? State::AtUpper : State::AtLower;
      pivot(leave, q);
    }

    if (step <= 1e-12) {
      if (++degenerate > rows_) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

LpStatus Tableau::dual() {
  while (true) {
    std::size_t r = SIZE_MAX;
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::size_t b = basis_[i];
      double viol = 0.0;
      if (value_[b] < lo_[b] - primal_tolerance(lo_[b])) {
        viol = lo_[b] - value_[b];
      } else if (hi_[b] != kInfinity && value_[b] > hi_[b] + primal_tolerance(hi_[b])) {
        viol = value_[b] - hi_[b];
      }
      if (viol > worst) {
        worst = viol;
        r = i;
      }
    }
    if (r == SIZE_MAX) return LpStatus::Optimal;

    const std::size_t leaving = basis_[r];
    const bool below = value_[leaving] < lo_[leaving];
    const double target = below ? lo_[leaving] : hi_[leaving];
    const double* a = row(r);
    std::size_t q = SIZE_MAX;
    double best_ratio = kInfinity;
    double best_alpha = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] == State::Basic || is_fixed(j)) continue;
      const double alpha = a[j];
      if (std::abs(alpha) <= kPivotTolerance) continue;
      const bool at_lower = state_[j] == State::AtLower;
      const bool eligible = below ? (at_lower ? alpha < 0.0 : alpha > 0.0)
                                  : (at_lower ? alpha > 0.0 : alpha < 0.0);
      if (!eligible) continue;
      const double ratio = std::abs(d_[j]) / std::abs(alpha);
      if (ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && std::abs(alpha) > best_alpha)) {
        best_ratio = ratio;
        best_alpha = std::abs(alpha);
        q = j;
      }
    }
    if (q == SIZE_MAX) return LpStatus::Infeasible;

    count_iteration();
    const double dx = (value_[leaving] - target) / a[q];
    for (std::size_t i = 0; i < rows_; ++i) {
      const double alpha = row(i)[q];
      if (alpha != 0.0) value_[basis_[i]] -= alpha * dx;
    }
    value_[q] += dx;
    value_[leaving] = target;
    state_[leaving] = below ? State::AtLower : State::AtUpper;
    pivot(r, q);
  }
}

void Tableau::drop_artificials() {
  const std::size_t first_art = structural_ + slack_;
  std::vector<bool> redundant(rows_, false);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (basis_[r] < first_art) continue;
    const double* a = row(r);
    std::size_t q = SIZE_MAX;
    double best = 1e-7;
    for (std::size_t j = 0; j < first_art; ++j) {
      if (state_[j] == State::Basic) continue;
      if (std::abs(a[j]) > best) {
        best = std::abs(a[j]);
        q = j;
      }
    }
    const std::size_t art = basis_[r];
    if (q == SIZE_MAX) {
      redundant[r] = true;
      continue;
    }
    value_[art] = 0.0;
    state_[art] = State::AtLower;
    pivot(r, q);
  }

  std::vector<double> compact;
  compact.reserve(rows_ * first_art);
  std::vector<std::size_t> basis, origin;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (redundant[r]) continue;
    compact.insert(compact.end(), row(r), row(r) + first_art);
    basis.push_back(basis_[r]);
    origin.push_back(row_origin_[r]);
  }
  a_ = std::move(compact);
  basis_ = std::move(basis);
  row_origin_ = std::move(origin);
  rows_ = basis_.size();
  cols_ = first_art;
  lo_.resize(cols_);
  hi_.resize(cols_);
  value_.resize(cols_);
  state_.resize(cols_);
  has_artificials_ = false;
}

LpStatus Tableau::solve() {
  call_start_ = iterations_;
  if (has_artificials_) {
    cost_.assign(cols_, 0.0);
    double infeasibility = 0.0;
    for (std::size_t j = structural_ + slack_; j < cols_; ++j) {
      cost_[j] = -1.0;
      infeasibility += value_[j];
    }
    compute_reduced_costs();
    primal();
    double remaining = 0.0;
    for (std::size_t j = structural_ + slack_; j < cols_; ++j) remaining += value_[j];
    double bscale = 1.0;
    for (double b : original_->b) bscale = std::max(bscale, std::abs(b));
    if (remaining > feasibility_tolerance_ * bscale) return LpStatus::Infeasible;
    drop_artificials();
  }
  cost_.assign(cols_, 0.0);
  std::copy(objective_.begin(), objective_.end(), cost_.begin());
  compute_reduced_costs();
  return primal();
}

void Tableau::set_bounds(std::size_t var, double lower, double upper) {
  lo_[var] = lower;
  hi_[var] = upper;
  if (state_[var] == State::Basic) return;
  const double old = value_[var];
  if (state_[var] == State::AtUpper && upper != kInfinity) {
    value_[var] = upper;
  } else {
    state_[var] = State::AtLower;
    value_[var] = lower;
  }
  const double delta = value_[var] - old;
  if (delta == 0.0) return;
  for (std::size_t r = 0; r < rows_; ++r) {
    const double alpha = row(r)[var];
    if (alpha != 0.0) value_[basis_[r]] -= alpha * delta;
  }
}

LpStatus Tableau::reoptimize() {
  call_start_ = iterations_;
  if (dual() == LpStatus::Infeasible) return LpStatus::Infeasible;
  return primal();
}

void Tableau::refine() {
  const auto& orig = *original_;
  const std::size_t m = rows_;
  if (m == 0) return;
  Eigen::MatrixXd basis(m, m);
  Eigen::VectorXd rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* r = orig.a.data() + row_origin_[i] * orig.cols;
    double acc = orig.b[row_origin_[i]];
    for (std::size_t j = 0; j < orig.cols; ++j) {
      if (state_[j] != State::Basic && r[j] != 0.0) acc -= r[j] * value_[j];
    }
    rhs(static_cast<Eigen::Index>(i)) = acc;
    for (std::size_t k = 0; k < m; ++k) {
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[basis_[k]];
    }
  }
  const Eigen::VectorXd x = basis.partialPivLu().solve(rhs);
  for (std::size_t k = 0; k < m; ++k) {
    const double v = x(static_cast<Eigen::Index>(k));
    if (!std::isfinite(v)) continue;
    const std::size_t j = basis_[k];
    // Round-off just outside a bound is snapped back onto it.
    if (v < lo_[j] && v > lo_[j] - primal_tolerance(lo_[j])) {
      value_[j] = lo_[j];
    } else if (v > hi_[j] && v < hi_[j] + primal_tolerance(hi_[j])) {
      value_[j] = hi_[j];
    } else {
      value_[j] = v;
    }
  }
}

std::vector<double> Tableau::structural_values() const {
  return {value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(structural_)};
}

double Tableau::scaled_objective() const {
  double total = 0.0;
  for (std::size_t j = 0; j < structural_; ++j) total += objective_[j] * value_[j];
  return total;
}

}  // namespace chainforge::milp::detail
