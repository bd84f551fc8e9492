#include <doctest.h>

#include <cmath>
#include <ranges>
#include <vector>

#include "chainforge/error.hpp"
#include "chainforge/gfa.hpp"
#include "chainforge/milp.hpp"
#include "chainforge/random.hpp"
#include "chainforge/stochastic.hpp"
#include "test_support.hpp"

using namespace chainforge;
using namespace chainforge::stochastic;

namespace {

struct Small {
  NetworkInstance inst;
  NetworkDesign design;
};

// One warehouse at the origin, one DC at the origin, one customer 10 km away.
Small minimal() {
  Small s;
  s.inst = load_instance(testsupport::data_path("minimal.json"));
  s.design = make_design(s.inst, {{0, 0}}, {0}, {0});
  return s;
}

}  // namespace

TEST_CASE("scenario sampling") {
  const auto inst = load_instance(testsupport::data_path("qatar_beef.json"));
  const auto a = sample_scenario(inst, 123);
  const double sigma = std::sqrt(50.0);
  REQUIRE(a.demand.size() == 5);
  for (const auto& period : a.demand) {
    REQUIRE(period.size() == inst.customers.size());
    for (double d : period) {
      CHECK(d >= 560 - 5 * sigma);
      CHECK(d <= 560 + 5 * sigma);
    }
  }
  for (double f : a.supply) {
    CHECK(f >= 0.8);
    CHECK(f <= 0.9);
  }
  CHECK(a.supply.size() == 5 * 3 * 8);
  const auto b = sample_scenario(inst, 123);
  CHECK(a.demand == b.demand);
  CHECK(a.supply == b.supply);
  CHECK(sample_scenario(inst, 124).demand != a.demand);

  const auto m = minimal();
  for (const auto& period : sample_scenario(m.inst, 9).demand) CHECK(period[0] == 100.0);
}

TEST_CASE("demand is truncated at zero") {
  auto m = minimal();
  m.inst.default_demand = {1.0, 100.0, false};
  m.inst.customers[0].demand = m.inst.default_demand;
  m.inst.horizon = 200;
  bool saw_zero = false;
  const auto sc = sample_scenario(m.inst, 5);
  for (double d : sc.demand | std::views::join) {
    CHECK(d >= 0.0);
    saw_zero = saw_zero || d == 0.0;
  }
  CHECK(saw_zero);
}

TEST_CASE("null period solves to all zeros") {
  auto m = minimal();
  m.inst.safety_stock_fraction = 0.0;
  const auto scales = accessibility::resolve_scales(m.inst, m.design);
  const std::vector<double> prev{0.0}, demand{0.0}, delivered{0.9};
  const auto pm = build_period_model(m.inst, m.design, scales,
                                     {prev, demand, delivered, 1.0, 1, BalanceForm::Delivered});
  const auto res = milp::solve_milp(pm.model);
  REQUIRE(res.status == milp::SolveStatus::Optimal);
  for (double v : res.values) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("cost-dominated period ships everything at minimum cost") {
  auto m = minimal();
  const auto scales = accessibility::resolve_scales(m.inst, m.design);
  const std::vector<double> prev{20.0}, demand{100.0}, delivered{0.9};
  const auto pm = build_period_model(m.inst, m.design, scales,
                                     {prev, demand, delivered, 1e6, 1, BalanceForm::Delivered});
  const auto res = milp::solve_milp(pm.model);
  REQUIRE(res.status == milp::SolveStatus::Optimal);
  // Hand minimum: keep Inv at the floor 20, ship 100, order 100 / 0.9.
  CHECK(res.values[pm.inventory[0]] == doctest::Approx(20.0));
  CHECK(res.values[pm.shipped[0]] == doctest::Approx(100.0));
  CHECK(res.values[pm.unmet[0]] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(res.values[pm.order[0]] == doctest::Approx(100.0 / 0.9));
}

TEST_CASE("safety stock above capacity is reported with the DC") {
  auto m = minimal();
  m.inst.dcs[0].capacity = 10.0;  // floor is 0.2 * 100 = 20
  try {
    safety_stock(m.inst, m.design);
    FAIL("expected InfeasibleBounds");
  } catch (const InfeasibleBounds& e) {
    CHECK(e.dc_id() == "D1");
  }
}

TEST_CASE("plus term auxiliary equals the surplus over the requirement") {
  auto m = minimal();
  m.inst.nutrients[0] = {"N1", 1.0, 0.12, 1.0};  // requirement 0.12 * 1 * 1000 = 120
  m.inst.dcs[0].capacity = 200.0;
  m.inst.horizon = 5;
  for (double eps : {0.0, 1e-6, 1e-4, 1e-3, 1e-2, 1.0}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      auto inst = m.inst;
      inst.default_demand = {100.0, 400.0, false};
      inst.customers[0].demand = inst.default_demand;
      const auto rep = run_replication(inst, m.design, eps, seed);
      for (const auto& d : rep.periods) {
        CHECK(d.aux[0][0] == doctest::Approx(std::max(0.0, d.inventory[0] - 120.0)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("replications thread inventory and keep the balance") {
  const auto m = minimal();
  SUBCASE("horizon of one is a single period solve") {
    auto inst = m.inst;
    inst.horizon = 1;
    const auto rep = run_replication(inst, m.design, 1e-3, 77);
    REQUIRE(rep.periods.size() == 1);
    const auto scales = accessibility::resolve_scales(inst, m.design);
    const auto sc = sample_scenario(inst, 77);
    const std::vector<double> prev{20.0}, delivered{sc.supply_factor(0, 0, 0)};
    const auto pm = build_period_model(inst, m.design, scales,
                                       {prev, sc.demand[0], delivered, 1e-3, 1,
                                        BalanceForm::Delivered});
    const auto res = milp::solve_milp(pm.model);
    CHECK(rep.phi == doctest::Approx(res.objective));
  }
  SUBCASE("determinism") {
    const auto a = run_replication(m.inst, m.design, 1e-3, 5);
    const auto b = run_replication(m.inst, m.design, 1e-3, 5);
    CHECK(a.phi == b.phi);
    CHECK(a.periods.back().inventory == b.periods.back().inventory);
  }
  SUBCASE("balance over five periods") {
    auto inst = m.inst;
    inst.horizon = 5;
    inst.default_demand = {100.0, 900.0, false};
    inst.customers[0].demand = inst.default_demand;
    const auto rep = run_replication(inst, m.design, 1e-4, 3);
    double phi = 0.0;
    for (const auto& d : rep.periods) {
      const double expected = d.previous_inventory[0] - d.shipped[0] +
                              d.delivered_fraction[0] * d.order[0];
      CHECK(std::abs(d.inventory[0] - expected) <= 1e-6);
      CHECK(std::abs(d.shipped[0] + d.unmet[0] - d.demand[0]) <= 1e-6);
      CHECK(audit_decision(inst, m.design, d) <= 1e-6);
      phi += d.objective;
    }
    CHECK(rep.phi == doctest::Approx(phi).epsilon(1e-12));
    for (std::size_t t = 1; t < rep.periods.size(); ++t) {
      CHECK(rep.periods[t].previous_inventory == rep.periods[t - 1].inventory);
    }
  }
  SUBCASE("demand-form balance") {
    RunOptions opt;
    opt.balance = BalanceForm::Demand;
    const auto rep = run_replication(m.inst, m.design, 1e-3, 5, opt);
    for (const auto& d : rep.periods) {
      const double expected = d.previous_inventory[0] - d.demand[0] +
                              d.delivered_fraction[0] * d.order[0];
      CHECK(std::abs(d.inventory[0] - expected) <= 1e-6);
      CHECK(audit_decision(m.inst, m.design, d, BalanceForm::Demand) <= 1e-6);
    }
  }
}

TEST_CASE("estimates") {
  const auto m = minimal();
  SUBCASE("single deterministic replication has zero standard error") {
    EstimateOptions opt;
    opt.keep_replications = true;
    const auto est = estimate_objectives(m.inst, m.design, 1e-3, 1, 9, opt);
    REQUIRE(est.runs.size() == 1);
    CHECK(est.z1_se == 0.0);
    CHECK(est.z2_se == 0.0);
    CHECK(est.z2 == doctest::Approx(est.runs[0].costs.total()));
    CHECK(est.z1 == doctest::Approx(est.affordability_term + est.runs[0].accessibility));
  }
  SUBCASE("estimate is the mean of its half batches") {
    auto inst = m.inst;
    inst.default_demand = {100.0, 900.0, false};
    inst.customers[0].demand = inst.default_demand;
    EstimateOptions opt;
    opt.keep_replications = true;
    const auto full = estimate_objectives(inst, m.design, 1e-4, 4, 31, opt);
    const auto half = estimate_objectives(inst, m.design, 1e-4, 2, 31, opt);
    const double first = (full.runs[0].costs.total() + full.runs[1].costs.total()) / 2;
    const double second = (full.runs[2].costs.total() + full.runs[3].costs.total()) / 2;
    CHECK(half.z2 == doctest::Approx(first));
    CHECK(full.z2 == doctest::Approx((first + second) / 2));
  }
  SUBCASE("parallel reduction matches serial") {
    const auto inst = load_instance(testsupport::data_path("qatar_beef.json"));
    const auto g = gfa::run_gfa(inst, gfa::GfaConfig{});
    EstimateOptions par;
    par.jobs = 3;
    const auto a = estimate_objectives(inst, g.design, 1e-4, 6, 42);
    const auto b = estimate_objectives(inst, g.design, 1e-4, 6, 42, par);
    CHECK(a.z1 == b.z1);
    CHECK(a.z2 == b.z2);
    CHECK(a.z2_se == b.z2_se);
  }
  CHECK_THROWS_AS(estimate_objectives(m.inst, m.design, 1e-3, 0, 1), ConfigError);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto [mean, se] = mean_and_se(v);
  CHECK(mean == 2.5);
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const std::vector<double> one{7};
  CHECK(mean_and_se(one).second == 0.0);
}

TEST_CASE("qatar_beef estimates have the expected magnitude and direction") {
  const auto inst = load_instance(testsupport::data_path("qatar_beef.json"));
  const auto g = gfa::run_gfa(inst, gfa::GfaConfig{});
  const std::vector<double> grid{3e-5, 3e-4, 3e-3};
  std::vector<EstimateResult> est;
  for (double e : grid) est.push_back(estimate_objectives(inst, g.design, e, 10, 42));
  // Z1 sums the index over five periods; the reference single-number magnitude
  // is about 4.3, so allow a factor of ten either way.
  CHECK(est[0].z1 > 0.43);
  CHECK(est[0].z1 < 43.0);
  for (std::size_t k = 1; k < est.size(); ++k) {
    CHECK(est[k].z2 <= est[k - 1].z2 + 2 * std::hypot(est[k].z2_se, est[k - 1].z2_se));
  }
}
