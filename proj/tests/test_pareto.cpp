#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "chainforge/error.hpp"
#include "chainforge/pareto.hpp"

using namespace chainforge;
using namespace chainforge::pareto;

namespace {

// Independent O(n^2) check: maximize z1, minimize z2.
bool dominated(const std::vector<ObjectivePoint>& pts, std::size_t i) {
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == i) continue;
    const bool no_worse = pts[j].z1 >= pts[i].z1 && pts[j].z2 <= pts[i].z2;
    const bool better = pts[j].z1 > pts[i].z1 || pts[j].z2 < pts[i].z2;
    if (no_worse && better) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("epsilon grid parsing") {
  const auto log = parse_grid("1e-4:1e-2:3");
  REQUIRE(log.size() == 3);
  CHECK(log[0] == 1e-4);
  CHECK(log[1] == doctest::Approx(1e-3));
  CHECK(log[2] == 1e-2);
  const auto lin = parse_grid("0:1:5", Spacing::Linear);
  REQUIRE(lin.size() == 5);
  CHECK(lin[2] == doctest::Approx(0.5));
  CHECK(parse_grid("0.5:0.5:1") == std::vector<double>{0.5});
  CHECK(parse_grid("3e-5:3e-2:8").size() == 8);
  for (const char* bad : {"", "1:2", "1:2:x", "2:1:3", "1:2:0", "-1:2:3", "1:2:3:4"}) {
    CHECK_THROWS_AS(parse_grid(bad), ConfigError);
  }
  CHECK_THROWS_AS(parse_grid("0:1:3", Spacing::Log), ConfigError);
}

TEST_CASE("front of a small example") {
  const std::vector<ObjectivePoint> pts{{5, 10, 0}, {4, 8, 1}, {3, 9, 2}};
  // (3, 9) is dominated by (4, 8); the other two trade off.
  CHECK(extract_front(pts) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("equal points collapse to the lowest epsilon") {
  const std::vector<ObjectivePoint> pts{{2, 2, 0.3}, {2, 2, 0.1}, {1, 1, 0.2}};
  CHECK(extract_front(pts) == std::vector<std::size_t>{2, 1});
  const std::vector<ObjectivePoint> same{{2, 2, 0.1}, {2, 2, 0.1}};
  CHECK(extract_front(same) == std::vector<std::size_t>{0});
}

TEST_CASE("singleton and empty inputs") {
  const std::vector<ObjectivePoint> one{{1, 1, 0}};
  CHECK(extract_front(one) == std::vector<std::size_t>{0});
  CHECK(extract_front(std::vector<ObjectivePoint>{}).empty());
}

TEST_CASE("front matches the quadratic oracle on random sets") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial == 0 ? 1000 : 50;
    std::uniform_int_distribution<int> coarse(0, 20);  // forces ties
    std::uniform_real_distribution<double> fine(0.0, 1.0);
    std::vector<ObjectivePoint> pts;
    for (int i = 0; i < n; ++i) {
      const bool tie = trial % 2 == 1;
      pts.push_back({tie ? coarse(rng) : fine(rng), tie ? coarse(rng) : fine(rng), fine(rng)});
    }
    const auto front = extract_front(pts);
    for (std::size_t k = 1; k < front.size(); ++k) {
      CHECK(pts[front[k]].z2 > pts[front[k - 1]].z2);
      CHECK(pts[front[k]].z1 > pts[front[k - 1]].z1);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const bool in = std::find(front.begin(), front.end(), i) != front.end();
      if (dominated(pts, i)) {
        CHECK_FALSE(in);
      } else {
        // Non-dominated: on the front itself or an exact duplicate of a member.
        const bool represented = std::any_of(front.begin(), front.end(), [&](std::size_t j) {
          return pts[j].z1 == pts[i].z1 && pts[j].z2 == pts[i].z2;
        });
        CHECK(represented);
      }
    }
  }
}

TEST_CASE("mark_front skips failed solutions") {
  SolutionPool pool;
  pool.solutions.resize(3);
  pool.solutions[0].z1 = 1;
  pool.solutions[0].z2 = 1;
  pool.solutions[1].z1 = 5;
  pool.solutions[1].z2 = 0;
  pool.solutions[1].error = "infeasible";
  pool.solutions[2].z1 = 2;
  pool.solutions[2].z2 = 3;
  mark_front(pool);
  CHECK(pool.solutions[0].on_front);
  CHECK_FALSE(pool.solutions[1].on_front);
  CHECK(pool.solutions[2].on_front);
  CHECK(pool.front() == std::vector<std::size_t>{0, 2});
}
