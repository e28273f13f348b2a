// Copyright 2026 The wtan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/instances.hpp"
#include "wtan/error.hpp"
#include "wtan/path_ensemble.hpp"

namespace wtan {
namespace {

using testing::Rng;

// Position law of Y at every grid time, for comparing translated curves.
bool same_curve(const PathEnsemble& e, const std::vector<std::vector<double>>& atoms_per_time,
                const std::vector<Rational>& weights) {
  for (std::size_t j = 0; j < e.grid().size(); ++j) {
    auto expected = DiscreteMeasure::create_exact(1, atoms_per_time[j], weights);
    if (!same_measure(e.marginal_at_index(j), expected, 0.0, 1e-12)) return false;
  }
  return true;
}

TEST_CASE("marginals of simple ensembles") {
  const auto grid = uniform_grid(10);
  auto still = from_velocity_field(testing::half_half(-1, 2), [](double, std::span<const double>) { return Point{0.0}; }, grid);
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    CHECK(same_measure(still.marginal_at(t), testing::half_half(-1, 2), 0.0, 0.0));
  }
  auto split = testing::split_from_origin(grid);
  CHECK(same_measure(split.marginal_at(0.5), testing::half_half(0.5, -0.5), 0.0, 1e-15));
  CHECK(same_measure(split.marginal_at(0.55), testing::half_half(0.55, -0.55), 0.0, 1e-15));
  CHECK(same_measure(split.marginal_at(1.0), split.endpoint_coupling().right(), 0.0, 0.0));
  CHECK_THROWS_AS(split.marginal_at(1.5), Error);
}

TEST_CASE("ensembles from velocity fields") {
  const auto grid = uniform_grid(16);
  auto eta = from_velocity_field(
      testing::half_half(-4, 4),
      [](double, std::span<const double> x) { return Point{x[0] < 0 ? 3.0 : -3.0}; }, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid[j];
    CHECK(same_measure(eta.marginal_at_index(j), testing::half_half(-4 + 3 * t, 4 - 3 * t), 0.0, 0.0));
  }
  CHECK(eta.velocity_defect() == 0.0);
  CHECK(eta.kinetic_energy() == 9.0);
  CHECK_THROWS_AS(from_velocity_field(testing::half_half(0, 1),
                                      [](double, std::span<const double>) { return Point{NAN}; }, grid),
                  Error);
}

TEST_CASE("velocity track must match positions") {
  const auto grid = uniform_grid(4);
  auto tr = testing::line_path(Rational(1), 0.0, 1.0, grid, 0);
  tr.x[2] += 1e-6;
  CHECK_THROWS_AS(PathEnsemble::create(1, grid, {tr}), Error);
  CHECK_NOTHROW(PathEnsemble::create(1, grid, {tr}, 1e-5));
}

TEST_CASE("eulerian field averages coincident velocities") {
  const auto grid = uniform_grid(8);
  auto split = testing::split_from_origin(grid);
  auto f = eulerian_field(split);
  CHECK((*f.value(0, std::vector<double>{0.0}))[0] == 0.0);
  CHECK((*f.value(4, std::vector<double>{0.5}))[0] == 1.0);
  CHECK((*f.value(4, std::vector<double>{-0.5}))[0] == -1.0);
  CHECK(!f.value(4, std::vector<double>{0.1}).has_value());

  auto no_z = PathEnsemble::create(1, grid, {Trajectory{1.0, std::nullopt, std::vector<double>(9, 0.0), {}, {}}});
  CHECK_THROWS_AS(eulerian_field(no_z), Error);
}

TEST_CASE("eulerian field recovers the generating field") {
  Rng rng(3);
  const auto grid = uniform_grid(20);
  auto field = [](double t, std::span<const double> x) { return Point{std::sin(x[0]) + t, -x[1] * t}; };
  auto m0 = testing::random_measure(rng, 12, 2);
  auto eta = from_velocity_field(m0, field, grid);
  auto f = eulerian_field(eta);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t k = 0; k < eta.size(); ++k) {
      auto x = eta.position(k, j);
      auto got = f.value(j, x);
      REQUIRE(got.has_value());
      CHECK((*got)[0] == field(grid[j], x)[0]);
      CHECK((*got)[1] == field(grid[j], x)[1]);
    }
  }
}

TEST_CASE("translation along the identity returns the ensemble") {
  Rng rng(5);
  auto eta = testing::random_ensemble(rng, 7, 12, 2);
  auto t = translate(eta, Coupling::identity(eta.marginal_at_index(0)));
  CHECK(same_law(t.translated, eta, 1e-15, 0.0));
}

TEST_CASE("translated distance on the converging pair") {
  for (std::size_t steps : {16u, 48u}) {
    const auto grid = uniform_grid(steps);
    auto eta = testing::converging_pair(grid);
    auto gamma0 = Coupling::from_pairs_exact(1, 1, {-4, -1, 4, 1}, {Rational(1, 2), Rational(1, 2)});
    auto t = translate(eta, gamma0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double s = grid[j];
      const double expected = s <= 1.0 / 3.0 ? 9.0 : (5 - 6 * s) * (5 - 6 * s);
      const double w2 = solve_ot(eta.marginal_at_index(j), t.translated.marginal_at_index(j), 2).objective;
      CHECK(std::abs(w2 - expected) <= 1e-12);
      if (steps == 16) CHECK(w2 == expected);
    }
  }
}

TEST_CASE("translation keeps differences constant") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 1 + rng.integer(0, 2);
    auto eta = testing::random_ensemble(rng, 1 + rng.integer(0, 20), 1 + rng.integer(0, 60), dim);
    auto nu = testing::random_measure(rng, 1 + rng.integer(0, 10), dim);
    auto ot = solve_ot(eta.marginal_at_index(0), nu, 2);
    auto t = translate(eta, ot.coupling);
    CHECK(max_difference_drift(t.coupling_curve) <= 1e-12);
    CHECK(t.translated.kinetic_energy() == doctest::Approx(eta.kinetic_energy()).epsilon(1e-14));
    for (std::size_t j = 0; j < eta.grid().size(); ++j) {
      CHECK(wasserstein(eta.marginal_at_index(j), t.translated.marginal_at_index(j), 2) <= ot.distance + 1e-10);
    }
  }
}

TEST_CASE("dirac translation") {
  const auto grid = uniform_grid(10);
  auto eta = from_velocity_field(DiscreteMeasure::dirac({1.0, 2.0}),
                                 [](double t, std::span<const double> x) { return Point{x[1], -x[0] + t}; }, grid);
  auto gamma0 = Coupling::from_pairs(2, 2, {1.0, 2.0, -3.0, 0.5}, {1.0});
  auto t = translate(eta, gamma0);
  REQUIRE(t.translated.size() == 1);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto x = eta.position(0, j);
    auto y = t.translated.position(0, j);
    CHECK(std::abs((y[0] - x[0]) - (-4.0)) <= 1e-12);
    CHECK(std::abs((y[1] - x[1]) - (-1.5)) <= 1e-12);
  }
}

TEST_CASE("translation rejects mismatched couplings") {
  const auto grid = uniform_grid(4);
  auto eta = testing::split_from_origin(grid);
  CHECK_THROWS_AS(translate(eta, Coupling::identity(testing::half_half(0, 1))), Error);
}

TEST_CASE("three translations of the split branches") {
  const auto grid = uniform_grid(10);
  auto eta = testing::split_from_origin(grid);
  auto gamma0 = Coupling::product(DiscreteMeasure::dirac({0.0}), testing::half_half(-2, 2));
  auto all = enumerate_translations(eta, gamma0);
  REQUIRE(all.size() == 3);
  std::vector<std::vector<double>> eta1, eta2, eta3;
  for (double t : grid) {
    eta1.push_back({-2 - t, 2 + t});
    eta2.push_back({-2 + t, 2 - t});
    eta3.push_back({-2 - t, -2 + t, 2 - t, 2 + t});
  }
  const std::vector<Rational> halves{Rational(1, 2), Rational(1, 2)};
  const std::vector<Rational> quarters(4, Rational(1, 4));
  int hits1 = 0, hits2 = 0, hits3 = 0;
  for (const auto& t : all) {
    hits1 += same_curve(t.translated, eta1, halves);
    hits2 += same_curve(t.translated, eta2, halves);
    hits3 += same_curve(t.translated, eta3, quarters);
    CHECK(max_difference_drift(t.coupling_curve) <= 1e-12);
  }
  CHECK(hits1 == 1);
  CHECK(hits2 == 1);
  CHECK(hits3 == 1);
  // The canonical product comes first.
  CHECK(same_curve(all[0].translated, eta3, quarters));
}

TEST_CASE("deterministic ensembles translate uniquely") {
  const auto grid = uniform_grid(10);
  auto m0 = DiscreteMeasure::create_exact(1, {-1.0, 0.0, 2.0}, {Rational(1, 4), Rational(1, 4), Rational(1, 2)});
  auto eta = from_velocity_field(m0, [](double, std::span<const double> x) { return Point{0.5 * x[0]}; }, grid);
  auto nu = DiscreteMeasure::create_exact(1, {5.0, 6.0}, {Rational(1, 2), Rational(1, 2)});
  CHECK(enumerate_translations(eta, Coupling::product(m0, nu)).size() == 1);
  CHECK(enumerate_translations(eta, Coupling::identity(m0)).size() == 1);
}

TEST_CASE("merging and splitting atoms: same curve, different translations") {
  for (std::size_t steps : {4u, 8u, 12u, 40u}) {
    const auto inst = merge_split_instance(steps);
    REQUIRE(inst.gamma0.is_graph());
    for (std::size_t j = 0; j <= steps; ++j) {
      CHECK(same_measure(inst.bounce.marginal_at_index(j), inst.cross.marginal_at_index(j), 0.0, 1e-12));
    }
    CHECK(inst.bounce.marginal_at_index(steps / 2).size() == 1);
    CHECK(!same_law(inst.bounce, inst.cross, 0.0));
    const auto a = translate(inst.bounce, inst.gamma0).translated.marginal_at_index(steps);
    const auto b = translate(inst.cross, inst.gamma0).translated.marginal_at_index(steps);
    CHECK(same_measure(a, testing::half_half(-1, 1), 0.0, 1e-12));
    CHECK(same_measure(b, DiscreteMeasure::dirac({0.0}), 0.0, 1e-12));
    // Each lift alone translates uniquely along the deterministic coupling.
    CHECK(enumerate_translations(inst.bounce, inst.gamma0).size() == 1);
  }
  CHECK_THROWS_AS(merge_split_instance(6), Error);
}

}  // namespace
}  // namespace wtan
