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
#include "support/exact_oracles.hpp"
#include "support/generators.hpp"
#include "wtan/error.hpp"
#include "wtan/transport.hpp"

namespace wtan {
namespace {

using testing::Rng;

DiscreteMeasure two_atoms(double a, double b) { return DiscreteMeasure::create(1, {a, b}, {0.5, 0.5}); }

TEST_CASE("cost examples") {
  Rng rng(3);
  auto m = testing::random_measure(rng, 7, 2);
  CHECK(cost(Coupling::identity(m), 2) == 0.0);
  CHECK(cost(Coupling::from_pairs(1, 1, {0.0, 3.0}, {1.0}), 2) == 3.0);
  auto g = Coupling::from_pairs(1, 1, {-4.0, -1.0, 4.0, 1.0}, {0.5, 0.5});
  CHECK(cost(g, 2) == 3.0);
}

TEST_CASE("coupling rejects wrong marginals") {
  auto a = two_atoms(0.0, 1.0);
  CHECK_THROWS_AS(Coupling::create(a, a, {{0, 0, 0.5}, {1, 0, 0.5}}), Error);
  CHECK_THROWS_AS(Coupling::create(a, a, {{0, 2, 0.5}, {1, 1, 0.5}}), Error);
}

TEST_CASE("solve_ot on identical measures") {
  Rng rng(9);
  auto m = testing::random_measure(rng, 12, 2);
  auto r = solve_ot(m, m, 2);
  CHECK(r.objective == 0.0);
  CHECK(r.coupling.entries().size() == m.size());
  for (const auto& e : r.coupling.entries()) CHECK(e.i == e.j);
}

TEST_CASE("solve_ot on the translated pair") {
  auto pair_at = [](double t) {
    return std::pair{two_atoms(-4 + 3 * t, 4 - 3 * t), two_atoms(-1 + 3 * t, 1 - 3 * t)};
  };
  auto [m0, n0] = pair_at(0.0);
  CHECK(solve_ot(m0, n0, 2).objective == 9.0);
  auto [m1, n1] = pair_at(2.0 / 3.0);
  CHECK(solve_ot(m1, n1, 2).objective == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve_ot rejects dimension mismatch") {
  CHECK_THROWS_AS(solve_ot(DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({0.0, 1.0}), 2),
                  Error);
}

TEST_CASE("solve_ot duals are feasible and tight") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto mu = testing::random_measure(rng, 1 + rng.integer(0, 30), 2);
    auto nu = testing::random_measure(rng, 1 + rng.integer(0, 30), 2);
    auto r = solve_ot(mu, nu, 2);
    auto c = cost_matrix(mu, nu, 2);
    double dual = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      dual += mu.weight(i) * r.u[i];
      for (std::size_t j = 0; j < nu.size(); ++j) CHECK(r.u[i] + r.v[j] <= c[i * nu.size() + j] + 1e-12);
    }
    for (std::size_t j = 0; j < nu.size(); ++j) dual += nu.weight(j) * r.v[j];
    CHECK(std::abs(dual - r.objective) <= 1e-9 * (1 + r.objective));
  }
}

TEST_CASE("solve_ot matches the Hungarian oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.integer(0, 7);
    const std::size_t dim = 1 + rng.integer(0, 2);
    auto xs = testing::random_coords(rng, n, dim, 3.0);
    auto ys = testing::random_coords(rng, n, dim, 3.0);
    auto mu = DiscreteMeasure::empirical(dim, xs);
    auto nu = DiscreteMeasure::empirical(dim, ys);
    auto c = cost_matrix(mu, nu, 2);
    CHECK(solve_ot(mu, nu, 2).objective ==
          doctest::Approx(testing::hungarian_min_cost(c, n) / n).epsilon(1e-10));
  }
}

TEST_CASE("vertex enumeration counts") {
  CHECK(enumerate_vertex_couplings(DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({0.0})).size() == 1);
  auto a = DiscreteMeasure::create_exact(1, {0.0, 1.0}, {Rational(1, 2), Rational(1, 2)});
  auto b = DiscreteMeasure::create_exact(1, {2.0, 3.0}, {Rational(1, 2), Rational(1, 2)});
  CHECK(enumerate_vertex_couplings(a, b).size() == 2);
  auto s = DiscreteMeasure::create_exact(1, {1.0, -1.0}, {Rational(1, 2), Rational(1, 2)});
  auto v = enumerate_vertex_couplings(DiscreteMeasure::dirac({0.0}), s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].entries().size() == 2);
}

TEST_CASE("vertex enumeration limits") {
  Rng rng(1);
  std::vector<double> c5(5), c6(6);
  for (int i = 0; i < 5; ++i) c5[i] = i;
  for (int i = 0; i < 6; ++i) c6[i] = i;
  CHECK_THROWS_AS(enumerate_vertex_couplings(DiscreteMeasure::empirical(1, c5),
                                             DiscreteMeasure::empirical(1, c5)),
                  Error);
  auto thirds = DiscreteMeasure::create(1, {0.0, 1.0, 2.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  auto halves = DiscreteMeasure::create(1, {0.0, 1.0}, {0.5, 0.5});
  try {
    enumerate_vertex_couplings(thirds, halves);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonRationalWeights);
  }
}

TEST_CASE("vertex enumeration agrees with a brute-force basis search") {
  Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    auto mu = testing::random_exact_measure(rng, 1 + rng.integer(0, 3), 1);
    auto nu = testing::random_exact_measure(rng, 1 + rng.integer(0, 3), 1);
    auto vertices = enumerate_vertex_couplings(mu, nu);
    auto oracle = testing::brute_force_vertices(mu.exact_weights(), nu.exact_weights());
    std::set<std::vector<Rational>> ours;
    for (const auto& v : vertices) {
      std::vector<Rational> dense(mu.size() * nu.size(), 0);
      for (std::size_t k = 0; k < v.entries().size(); ++k) {
        dense[v.entries()[k].i * nu.size() + v.entries()[k].j] = v.exact_masses()[k];
      }
      ours.insert(dense);
    }
    CHECK(ours == std::set<std::vector<Rational>>(oracle.begin(), oracle.end()));
  }
}

TEST_CASE("solve_ot equals the vertex minimum") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto mu = testing::random_exact_measure(rng, 1 + rng.integer(0, 3), 1 + rng.integer(0, 1));
    auto nu = testing::random_exact_measure(rng, 1 + rng.integer(0, 3), mu.dim());
    const Rational best = testing::vertex_ot_cost(mu, nu);
    CHECK(std::abs(solve_ot(mu, nu, 2).objective - to_double(best)) <= 1e-10);
  }
}

TEST_CASE("wasserstein metric axioms") {
  Rng rng(88);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 1 + rng.integer(0, 2);
    auto a = testing::random_measure(rng, 1 + rng.integer(0, 15), dim);
    auto b = testing::random_measure(rng, 1 + rng.integer(0, 15), dim);
    auto c = testing::random_measure(rng, 1 + rng.integer(0, 15), dim);
    for (double p : {1.0, 2.0, 3.0}) {
      const double ab = wasserstein(a, b, p), ba = wasserstein(b, a, p);
      CHECK(std::abs(ab - ba) <= 1e-12 * (1 + ab));
      CHECK(wasserstein(a, c, p) <= ab + wasserstein(b, c, p) + 1e-8);
    }
  }
}

TEST_CASE("gluing of the branching instance") {
  auto base = DiscreteMeasure::dirac({0.0});
  auto xy = Coupling::product(base, DiscreteMeasure::create_exact(1, {1.0, -1.0}, {Rational(1, 2), Rational(1, 2)}));
  auto xz = Coupling::product(base, DiscreteMeasure::create_exact(1, {0.0, 2.0}, {Rational(1, 2), Rational(1, 2)}));
  auto g = glue(xy, xz);
  REQUIRE(g.cells.size() == 4);
  for (const auto& m : g.exact_masses) CHECK(m == Rational(1, 4));
}

TEST_CASE("gluing with a deterministic second coupling") {
  Rng rng(6);
  auto mu = testing::random_measure(rng, 5, 1);
  auto nu = testing::random_measure(rng, 4, 1);
  auto xy = solve_ot(mu, nu, 2).coupling;
  std::vector<CouplingEntry> graph;
  std::vector<double> zc;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    graph.push_back({i, i, mu.weight(i)});
    zc.push_back(10.0 + i);
  }
  auto xz = Coupling::create(mu, DiscreteMeasure::unmerged(1, zc, mu.weights()), graph);
  auto g = glue(xy, xz);
  REQUIRE(g.cells.size() == xy.entries().size());
  for (std::size_t t = 0; t < g.cells.size(); ++t) {
    CHECK(g.cells[t].k == g.cells[t].i);
    CHECK(g.cells[t].mass == doctest::Approx(xy.entries()[t].mass).epsilon(1e-15));
  }
}

TEST_CASE("gluing with the identity relabels the second coupling") {
  Rng rng(16);
  auto mu = testing::random_measure(rng, 4, 1);
  auto nu = testing::random_measure(rng, 3, 1);
  auto xz = Coupling::product(mu, nu);
  auto g = glue(Coupling::identity(mu), xz);
  REQUIRE(g.cells.size() == xz.entries().size());
  for (std::size_t t = 0; t < g.cells.size(); ++t) {
    CHECK(g.cells[t].i == g.cells[t].j);
    CHECK(g.cells[t].k == xz.entries()[t].j);
  }
}

TEST_CASE("gluing conserves both marginals") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto mu = testing::random_measure(rng, 1 + rng.integer(0, 6), 2);
    auto nu = testing::random_measure(rng, 1 + rng.integer(0, 6), 2);
    auto zeta = testing::random_measure(rng, 1 + rng.integer(0, 6), 2);
    auto xy = solve_ot(mu, nu, 2).coupling;
    auto xz = Coupling::product(mu, zeta);
    auto g = glue(xy, xz);
    auto first = g.project_first();
    auto second = g.project_second();
    REQUIRE(first.entries().size() == xy.entries().size());
    for (std::size_t k = 0; k < xy.entries().size(); ++k) {
      CHECK(std::abs(first.entries()[k].mass - xy.entries()[k].mass) <= 1e-12);
    }
    REQUIRE(second.entries().size() == xz.entries().size());
    for (std::size_t k = 0; k < xz.entries().size(); ++k) {
      CHECK(std::abs(second.entries()[k].mass - xz.entries()[k].mass) <= 1e-12);
    }
  }
}

TEST_CASE("gluing rejects different bases") {
  auto a = two_atoms(0.0, 1.0);
  auto b = two_atoms(0.0, 2.0);
  CHECK_THROWS_AS(glue(Coupling::identity(a), Coupling::identity(b)), Error);
}

TEST_CASE("lower order costs are dominated") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = Coupling::product(testing::random_measure(rng, 4, 2), testing::random_measure(rng, 3, 2));
    for (double alpha : {0.25, 0.5, 0.75}) {
      CHECK(std::pow(cost(g, 2 * alpha < 1 ? 1.0 : 2 * alpha), alpha) >= 0.0);
      // Jensen in the power-mean form, computed directly for exponents below 1.
      double low = 0.0;
      for (const auto& e : g.entries()) {
        low += e.mass * std::pow(distance(g.left().atom(e.i), g.right().atom(e.j)), 2 * alpha);
      }
      CHECK(low <= std::pow(cost(g, 2), 2 * alpha) * (1 + 1e-12));
    }
  }
}

TEST_CASE("sinkhorn approaches the exact cost") {
  auto mu = two_atoms(0.0, 1.0);
  auto nu = two_atoms(0.5, 3.0);
  const double exact = solve_ot(mu, nu, 2).objective;
  for (double eps : {0.5, 0.1, 0.02}) {
    auto s = sinkhorn(mu, nu, 2, eps);
    CHECK(std::pow(cost(s, 2), 2) - exact <= eps * std::log(4.0) + 1e-6);
    auto again = sinkhorn(mu, nu, 2, eps);
    REQUIRE(again.entries().size() == s.entries().size());
    for (std::size_t k = 0; k < s.entries().size(); ++k) CHECK(again.entries()[k].mass == s.entries()[k].mass);
  }
  auto m = testing::grid_measure(10);
  for (double eps : {1e-2, 1e-3}) {
    CHECK(std::pow(cost(sinkhorn(m, m, 2, eps), 2), 2) <= 10 * eps * std::log(10.0));
  }
}

}  // namespace
}  // namespace wtan
