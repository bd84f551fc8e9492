#include <doctest.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "chainforge/error.hpp"
#include "chainforge/milp.hpp"
#include "chainforge/random.hpp"

using namespace chainforge;
using namespace chainforge::milp;

namespace {

// Two continuous variables in [0, ub] and extra rows a0 x + a1 y (rel) b.
struct Row2 {
  double a0, a1;
  Relation rel;
  double b;
};

bool satisfied(const Row2& r, double x, double y) {
  const double lhs = r.a0 * x + r.a1 * y;
  const double tol = 1e-7 * (1.0 + std::abs(r.b));
  switch (r.rel) {
    case Relation::LessEqual: return lhs <= r.b + tol;
    case Relation::GreaterEqual: return lhs >= r.b - tol;
    case Relation::Equal: return std::abs(lhs - r.b) <= tol;
  }
  return false;
}

// Best vertex of a bounded 2-D polygon by enumerating line intersections.
std::optional<double> vertex_oracle(std::vector<Row2> rows, double ub, double c0,
                                    double c1) {
  std::vector<Row2> all = rows;
  all.push_back({1, 0, Relation::GreaterEqual, 0});
  all.push_back({0, 1, Relation::GreaterEqual, 0});
  all.push_back({1, 0, Relation::LessEqual, ub});
  all.push_back({0, 1, Relation::LessEqual, ub});
  std::optional<double> best;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const double det = all[i].a0 * all[j].a1 - all[i].a1 * all[j].a0;
      if (std::abs(det) < 1e-12) continue;
      const double x = (all[i].b * all[j].a1 - all[i].a1 * all[j].b) / det;
      const double y = (all[i].a0 * all[j].b - all[i].b * all[j].a0) / det;
      bool ok = true;
      for (const auto& r : all) ok = ok && satisfied(r, x, y);
      if (!ok) continue;
      const double v = c0 * x + c1 * y;
      if (!best || v > *best) best = v;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("lp with known optimum") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  LinearModel m;
  auto x = m.add_variable("x", 0, kInfinity, 3);
  auto y = m.add_variable("y", 0, kInfinity, 5);
  m.add_constraint("c1", {{x, 1}}, Relation::LessEqual, 4);
  m.add_constraint("c2", {{y, 2}}, Relation::LessEqual, 12);
  m.add_constraint("c3", {{x, 3}, {y, 2}}, Relation::LessEqual, 18);
  auto r = solve_lp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(36.0));
  CHECK(r.values[x] == doctest::Approx(2.0));
  CHECK(r.values[y] == doctest::Approx(6.0));
}

TEST_CASE("lp with equality and greater-equal rows") {
  // max -x - y, x + y >= 2, x - y = 1 -> x = 1.5, y = 0.5
  LinearModel m;
  auto x = m.add_variable("x", 0, 10, -1);
  auto y = m.add_variable("y", 0, 10, -1);
  m.add_constraint("ge", {{x, 1}, {y, 1}}, Relation::GreaterEqual, 2);
  m.add_constraint("eq", {{x, 1}, {y, -1}}, Relation::Equal, 1);
  auto r = solve_lp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.values[x] == doctest::Approx(1.5));
  CHECK(r.values[y] == doctest::Approx(0.5));
}

TEST_CASE("lp infeasible and unbounded") {
  LinearModel inf;
  auto x = inf.add_variable("x", 0, 1, 1);
  inf.add_constraint("c", {{x, 1}}, Relation::GreaterEqual, 2);
  CHECK(solve_lp(inf).status == SolveStatus::Infeasible);

  LinearModel unb;
  auto u = unb.add_variable("u", 0, kInfinity, 1);
  auto v = unb.add_variable("v", 0, kInfinity, 0);
  unb.add_constraint("c", {{u, 1}, {v, -1}}, Relation::LessEqual, 1);
  CHECK(solve_lp(unb).status == SolveStatus::Unbounded);
}

TEST_CASE("redundant equality rows are tolerated") {
  LinearModel m;
  auto x = m.add_variable("x", 0, 5, 1);
  auto y = m.add_variable("y", 0, 5, 2);
  m.add_constraint("e1", {{x, 1}, {y, 1}}, Relation::Equal, 4);
  m.add_constraint("e2", {{x, 2}, {y, 2}}, Relation::Equal, 8);
  auto r = solve_lp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(8.0));
}

TEST_CASE("degenerate lp terminates") {
  // Classic cycling example under largest-coefficient pricing.
  LinearModel m;
  auto x1 = m.add_variable("x1", 0, kInfinity, 10);
  auto x2 = m.add_variable("x2", 0, kInfinity, -57);
  auto x3 = m.add_variable("x3", 0, kInfinity, -9);
  auto x4 = m.add_variable("x4", 0, kInfinity, -24);
  m.add_constraint("r1", {{x1, 0.5}, {x2, -5.5}, {x3, -2.5}, {x4, 9}}, Relation::LessEqual, 0);
  m.add_constraint("r2", {{x1, 0.5}, {x2, -1.5}, {x3, -0.5}, {x4, 1}}, Relation::LessEqual, 0);
  m.add_constraint("r3", {{x1, 1}}, Relation::LessEqual, 1);
  auto r = solve_lp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("random 2-d lps match vertex enumeration") {
  RandomStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Row2> rows;
    const int nrows = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < nrows; ++i) {
      const auto kind = rng.below(3);
      rows.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3),
                      kind == 0   ? Relation::LessEqual
                      : kind == 1 ? Relation::GreaterEqual
                                  : Relation::Equal,
                      rng.uniform(-2, 6)});
    }
    const double c0 = rng.uniform(-2, 2), c1 = rng.uniform(-2, 2);
    LinearModel m;
    auto x = m.add_variable("x", 0, 5, c0);
    auto y = m.add_variable("y", 0, 5, c1);
    for (const auto& r : rows) m.add_constraint("r", {{x, r.a0}, {y, r.a1}}, r.rel, r.b);
    const auto oracle = vertex_oracle(rows, 5, c0, c1);
    const auto res = solve_lp(m);
    CAPTURE(trial);
    if (oracle) {
      REQUIRE(res.status == SolveStatus::Optimal);
      CHECK(res.objective == doctest::Approx(*oracle).epsilon(1e-6));
      CHECK(m.max_violation(res.values) <= 1e-7);
    } else {
      CHECK(res.status == SolveStatus::Infeasible);
    }
  }
}

TEST_CASE("random mixed-binary models match enumeration") {
  RandomStream rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const int nb = 1 + static_cast<int>(rng.below(4));
    LinearModel m;
    auto x = m.add_variable("x", 0, 5, rng.uniform(-1, 2));
    auto y = m.add_variable("y", 0, 5, rng.uniform(-1, 2));
    std::vector<std::size_t> bins;
    std::vector<double> bin_obj;
    for (int k = 0; k < nb; ++k) {
      bin_obj.push_back(rng.uniform(-2, 2));
      bins.push_back(m.add_binary("b" + std::to_string(k), bin_obj.back()));
    }
    struct MixedRow {
      double a0, a1;
      std::vector<double> ab;
      Relation rel;
      double b;
    };
    std::vector<MixedRow> rows;
    const int nrows = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < nrows; ++i) {
      MixedRow r{rng.uniform(-3, 3), rng.uniform(-3, 3), {},
                 rng.below(2) == 0 ? Relation::LessEqual : Relation::GreaterEqual,
                 rng.uniform(-2, 6)};
      std::vector<Term> terms{{x, r.a0}, {y, r.a1}};
      for (int k = 0; k < nb; ++k) {
        r.ab.push_back(rng.uniform(-4, 4));
        terms.push_back({bins[k], r.ab.back()});
      }
      m.add_constraint("r" + std::to_string(i), terms, r.rel, r.b);
      rows.push_back(r);
    }
    // Oracle: every binary assignment, then the 2-d vertex oracle.
    std::optional<double> best;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      std::vector<Row2> fixed;
      double constant = 0.0;
      for (int k = 0; k < nb; ++k) {
        if (mask & (1 << k)) constant += bin_obj[k];
      }
      for (const auto& r : rows) {
        double shift = 0.0;
        for (int k = 0; k < nb; ++k) {
          if (mask & (1 << k)) shift += r.ab[k];
        }
        fixed.push_back({r.a0, r.a1, r.rel, r.b - shift});
      }
      const auto v = vertex_oracle(fixed, 5, m.variables()[x].objective,
                                   m.variables()[y].objective);
      if (v && (!best || *v + constant > *best)) best = *v + constant;
    }
    const auto res = solve_milp(m);
    CAPTURE(trial);
    if (best) {
      REQUIRE(res.status == SolveStatus::Optimal);
      CHECK(res.objective == doctest::Approx(*best).epsilon(1e-6));
      CHECK(m.max_violation(res.values) <= 1e-7);
      for (auto b : bins) CHECK((res.values[b] == 0.0 || res.values[b] == 1.0));
    } else {
      CHECK(res.status == SolveStatus::Infeasible);
    }
  }
}

TEST_CASE("pure binary knapsacks match enumeration") {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(8));
    std::vector<double> value(n), weight(n);
    LinearModel m;
    std::vector<Term> terms;
    for (int i = 0; i < n; ++i) {
      value[i] = rng.uniform(1, 10);
      weight[i] = rng.uniform(1, 10);
      terms.push_back({m.add_binary("b" + std::to_string(i), value[i]), weight[i]});
    }
    const double cap = rng.uniform(5, 30);
    m.add_constraint("cap", terms, Relation::LessEqual, cap);
    double best = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double v = 0, w = 0;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) {
          v += value[i];
          w += weight[i];
        }
      }
      if (w <= cap) best = std::max(best, v);
    }
    const auto res = solve_milp(m);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("node limit reports incumbent") {
  LinearModel m;
  std::vector<Term> terms;
  for (int i = 0; i < 12; ++i) {
    terms.push_back({m.add_binary("b" + std::to_string(i), 1.0 + 0.01 * i), 2.0});
  }
  m.add_constraint("cap", terms, Relation::LessEqual, 11);
  SolverOptions opts;
  opts.node_limit = 2;
  const auto res = solve_milp(m, opts);
  CHECK(res.status == SolveStatus::NodeLimit);
  CHECK(res.nodes <= 2);
}

TEST_CASE("validation and lp dump") {
  LinearModel bad;
  bad.add_variable("x", 1, 0);
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  LinearModel free_lower;
  free_lower.add_variable("x", -kInfinity, 0);
  CHECK_THROWS_AS(solve_lp(free_lower), ConfigError);

  LinearModel m;
  auto x = m.add_variable("x", 0, 2, 1);
  auto b = m.add_binary("b", -1);
  m.add_constraint("link", {{x, 1}, {b, -2}}, Relation::LessEqual, 0);
  std::ostringstream out;
  m.write_lp(out);
  const auto text = out.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("link: x - 2 b <= 0") != std::string::npos);
  CHECK(text.find("Binaries\n b\n") != std::string::npos);
}
