#include "chainforge/milp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <queue>

#include "chainforge/error.hpp"
#include "simplex.hpp"

namespace chainforge::milp {

std::size_t LinearModel::add_variable(std::string name, double lower, double upper,
                                      double objective) {
  vars_.push_back({std::move(name), lower, upper, false, objective});
  return vars_.size() - 1;
}

std::size_t LinearModel::add_binary(std::string name, double objective) {
  vars_.push_back({std::move(name), 0.0, 1.0, true, objective});
  return vars_.size() - 1;
}

std::size_t LinearModel::add_constraint(std::string name, std::vector<Term> terms,
                                        Relation relation, double rhs) {
  rows_.push_back({std::move(name), std::move(terms), relation, rhs});
  return rows_.size() - 1;
}

void LinearModel::set_bounds(std::size_t var, double lower, double upper) {
  auto& v = vars_.at(var);
  v.lower = lower;
  v.upper = upper;
}

bool LinearModel::has_binaries() const {
  return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.is_binary; });
}

void LinearModel::validate() const {
  for (const auto& v : vars_) {
    if (!std::isfinite(v.lower)) {
      throw ConfigError("variable '" + v.name + "': lower bound must be finite");
    }
    if (std::isnan(v.upper) || v.upper < v.lower) {
      throw ConfigError("variable '" + v.name + "': upper bound below lower bound");
    }
    if (!std::isfinite(v.objective)) {
      throw ConfigError("variable '" + v.name + "': objective coefficient is not finite");
    }
    if (v.is_binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw ConfigError("variable '" + v.name + "': binary bounds outside [0, 1]");
    }
  }
  for (const auto& c : rows_) {
    if (!std::isfinite(c.rhs)) {
      throw ConfigError("constraint '" + c.name + "': right-hand side is not finite");
    }
    for (const auto& t : c.terms) {
      if (t.var >= vars_.size()) {
        throw ConfigError("constraint '" + c.name + "': unknown variable index");
      }
      if (!std::isfinite(t.coef)) {
        throw ConfigError("constraint '" + c.name + "': coefficient is not finite");
      }
    }
  }
}

double LinearModel::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) total += vars_[j].objective * values.at(j);
  return total;
}

double LinearModel::max_violation(const std::vector<double>& values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max(worst, vars_[j].lower - values.at(j));
    worst = std::max(worst, values[j] - vars_[j].upper);
  }
  for (const auto& c : rows_) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values.at(t.var);
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

void LinearModel::write_lp(std::ostream& out) const {
  auto write_terms = [&](auto begin, auto end, auto coef_of, auto name_of) {
    bool first = true;
    for (auto it = begin; it != end; ++it) {
      const double c = coef_of(*it);
      if (c == 0.0) continue;
      out << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      if (std::abs(c) != 1.0) out << std::abs(c) << ' ';
      out << name_of(*it);
      first = false;
    }
    if (first) out << '0';
  };
  const auto prec = out.precision(12);
  out << "Maximize\n obj: ";
  write_terms(vars_.begin(), vars_.end(), [](const Variable& v) { return v.objective; },
              [](const Variable& v) -> const std::string& { return v.name; });
  out << "\nSubject To\n";
  for (const auto& c : rows_) {
    out << ' ' << c.name << ": ";
    write_terms(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.coef; },
                [&](const Term& t) -> const std::string& { return vars_[t.var].name; });
    out << (c.relation == Relation::LessEqual    ? " <= "
            : c.relation == Relation::Equal      ? " = "
                                                 : " >= ")
        << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : vars_) {
    if (v.is_binary) continue;
    out << ' ' << v.lower << " <= " << v.name << " <= ";
    if (v.upper == kInfinity) {
      out << "+inf\n";
    } else {
      out << v.upper << '\n';
    }
  }
  out << "Binaries\n";
  for (const auto& v : vars_) {
    if (v.is_binary) out << ' ' << v.name << '\n';
  }
  out << "End\n";
  out.precision(prec);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node_limit";
  }
  return "unknown";
}

namespace {

using detail::LpStatus;
using detail::Tableau;

SolveStatus convert(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return SolveStatus::Optimal;
    case LpStatus::Infeasible: return SolveStatus::Infeasible;
    case LpStatus::Unbounded: return SolveStatus::Unbounded;
  }
  return SolveStatus::Infeasible;
}

bool improves(double candidate, double reference) {
  if (reference == -kInfinity) return true;
  return candidate > reference + 1e-9 * (1.0 + std::abs(reference));
}

struct Node {
  double bound = 0.0;
  long seq = 0;
  std::shared_ptr<const Tableau> parent;
  std::size_t var = 0;
  double value = 0.0;  // both bounds of `var` are fixed to this
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  }
};

}  // namespace

SolveResult solve_lp(const LinearModel& model, const SolverOptions& options) {
  model.validate();
  SolveResult result;
  Tableau tableau(model, options);
  const auto status = tableau.solve();
  result.status = convert(status);
  result.iterations = tableau.iterations();
  if (status == LpStatus::Optimal) {
    tableau.refine();
    result.values = tableau.structural_values();
    result.objective = model.objective_value(result.values);
  }
  return result;
}

SolveResult solve_milp(const LinearModel& model, const SolverOptions& options) {
  model.validate();
  std::vector<std::size_t> binaries;
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].is_binary) binaries.push_back(j);
  }
  if (binaries.empty()) return solve_lp(model, options);

  SolveResult result;
  auto root = std::make_shared<Tableau>(model, options);
  const auto root_status = root->solve();
  result.iterations = root->iterations();
  result.nodes = 1;
  if (root_status != LpStatus::Optimal) {
    result.status = convert(root_status);
    return result;
  }

  const double tol = options.integrality_tolerance;
  double incumbent = -kInfinity;
  std::vector<double> incumbent_values;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;

  auto fractionality = [](double v) { return std::abs(v - std::round(v)); };
  auto branch = [&](const std::shared_ptr<const Tableau>& t, std::size_t var) {
    const double bound = t->scaled_objective();
    open.push({bound, seq++, t, var, 0.0});
    open.push({bound, seq++, t, var, 1.0});
  };

  // Handles a node whose LP is optimal: accept it as a leaf or branch.
  auto process = [&](std::shared_ptr<Tableau> t) {
    const double bound = t->scaled_objective();
    if (!improves(bound, incumbent)) return;
    std::size_t pick = SIZE_MAX;
    double worst = tol;
    for (auto j : binaries) {
      const double f = fractionality(t->value(j));
      if (f > worst) {
        worst = f;
        pick = j;
      }
    }
    if (pick != SIZE_MAX) {
      branch(t, pick);
      return;
    }
    // Integral within tolerance: fix the binaries exactly and re-solve so
    // that residual fractions cannot leak through big-M rows.
    Tableau polished = *t;
    for (auto j : binaries) {
      const double v = std::round(polished.value(j));
      polished.set_bounds(j, v, v);
    }
    const auto st = polished.reoptimize();
    result.iterations += polished.iterations() - t->iterations();
    if (st == LpStatus::Optimal) {
      polished.refine();
      const double obj = polished.scaled_objective();
      if (obj >= bound - 1e-9 * (1.0 + std::abs(bound))) {
        if (improves(obj, incumbent) || incumbent_values.empty()) {
          incumbent = obj;
          incumbent_values = polished.structural_values();
        }
        return;
      }
    }
    std::size_t leak = SIZE_MAX;
    double largest = 0.0;
    for (auto j : binaries) {
      const double f = fractionality(t->value(j));
      if (f > largest) {
        largest = f;
        leak = j;
      }
    }
    if (leak != SIZE_MAX) {
      branch(t, leak);
    } else if (st == LpStatus::Optimal) {
      const double obj = polished.scaled_objective();
      if (improves(obj, incumbent) || incumbent_values.empty()) {
        incumbent = obj;
        incumbent_values = polished.structural_values();
      }
    }
  };

  process(root);
  bool hit_limit = false;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (!improves(node.bound, incumbent)) continue;
    if (result.nodes >= options.node_limit) {
      hit_limit = true;
      break;
    }
    auto child = std::make_shared<Tableau>(*node.parent);
    node.parent.reset();
    const int before = child->iterations();
    child->set_bounds(node.var, node.value, node.value);
    const auto st = child->reoptimize();
    result.iterations += child->iterations() - before;
    ++result.nodes;
    if (st != LpStatus::Optimal) continue;
    process(std::move(child));
  }

  result.has_incumbent = !incumbent_values.empty();
  if (hit_limit) {
    result.status = SolveStatus::NodeLimit;
  } else {
    result.status = result.has_incumbent ? SolveStatus::Optimal : SolveStatus::Infeasible;
  }
  if (result.has_incumbent) {
    result.values = std::move(incumbent_values);
    result.objective = model.objective_value(result.values);
  }
  return result;
}

}  // namespace chainforge::milp
