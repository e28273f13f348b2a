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

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/instances.hpp"
#include "wtan/error.hpp"
#include "wtan/parallel.hpp"
#include "wtan/parallel_transport.hpp"

namespace wtan {
namespace {

using testing::Rng;

struct Leg {
  double y;
  double z;
  Rational w;
};

// (end position, velocity, weight) of every trajectory of a 1-d transport.
std::vector<Leg> legs(const TransportResult& r) {
  std::vector<Leg> out;
  const auto& e = r.ensemble;
  for (std::size_t k = 0; k < e.size(); ++k) {
    auto end = e.position(k, e.steps());
    out.push_back({end[0], end[1], *e.trajectory(k).exact_weight});
  }
  std::sort(out.begin(), out.end(), [](const Leg& a, const Leg& b) {
    return a.y != b.y ? a.y < b.y : a.z < b.z;
  });
  return out;
}

bool same_legs(const std::vector<Leg>& a, const std::vector<Leg>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].y != b[k].y || a[k].z != b[k].z || a[k].w != b[k].w) return false;
  }
  return true;
}

TEST_CASE("the three transports of the branching example") {
  const auto inst = testing::wml_instance();
  CHECK(classify_uniqueness(inst.psi, inst.gamma) == Uniqueness::kPossiblyNonUnique);
  const auto all = enumerate_transports(inst.psi, inst.gamma);
  REQUIRE(all.size() == 3);
  const Rational q(1, 4), h(1, 2);
  const std::vector<Leg> l{{-1, 0, q}, {-1, 2, q}, {1, 0, q}, {1, 2, q}};
  const std::vector<Leg> w{{-1, 2, h}, {1, 0, h}};
  const std::vector<Leg> m{{-1, 0, h}, {1, 2, h}};
  CHECK(same_legs(legs(all[0]), l));
  const bool wm = same_legs(legs(all[1]), w) && same_legs(legs(all[2]), m);
  const bool mw = same_legs(legs(all[1]), m) && same_legs(legs(all[2]), w);
  CHECK((wm || mw));
  for (const auto& r : all) {
    // Positions are +-t on the default grid.
    const auto& e = r.ensemble;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double end = e.position(k, e.steps())[0];
      for (std::size_t j = 0; j <= e.steps(); ++j) CHECK(e.position(k, j)[0] == doctest::Approx(end * e.grid()[j]).epsilon(1e-15));
    }
    CHECK(check_transport(r).ok());
  }
  // The canonical transport is the product one.
  CHECK(same_law(transport_along_coupling(inst.psi, inst.gamma).ensemble, all[0].ensemble, 0.0));
}

TEST_CASE("uniqueness classification") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto mu = testing::random_exact_measure(rng, 1 + rng.integer(0, 3), 1);
    auto nu = testing::random_exact_measure(rng, 1 + rng.integer(0, 3), 1);
    auto det = TangentElement::deterministic(mu, testing::random_coords(rng, mu.size(), 1, 2.0));
    auto gamma = Coupling::product(mu, nu);
    CHECK(classify_uniqueness(det, gamma) == Uniqueness::kUniqueDeterministicTangent);
    CHECK(enumerate_transports(det, gamma).size() == 1);

    auto psi = testing::random_exact_tangent(rng, mu, 3);
    auto graph = Coupling::identity(mu);
    if (!psi.is_deterministic()) {
      CHECK(classify_uniqueness(psi, graph) == Uniqueness::kUniqueDeterministicFlow);
    }
    CHECK(enumerate_transports(psi, graph).size() == 1);
  }
  CHECK(std::string(to_string(Uniqueness::kUniqueDeterministicFlow)) == "UniqueDeterministicFlow");
}

TEST_CASE("identity coupling leaves the element in place") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto mu = testing::random_measure(rng, 1 + rng.integer(0, 5), 2);
    auto psi = testing::random_tangent(rng, mu, 3);
    auto r = transport_along_coupling(psi, Coupling::identity(mu));
    CHECK(std::pow(tangent_distance(r.arrival, psi), 2) <= 1e-15);
    CHECK(check_transport(r).ok());
    CHECK(same_law(reverse(r).ensemble, r.ensemble, 1e-15));
  }
}

TEST_CASE("collapsing a normal sample onto a point") {
  const boost::math::normal normal;
  const std::size_t n = 200;
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(quantile(normal, (i + 0.5) / n));
  const auto mu = DiscreteMeasure::empirical(1, x);
  const auto psi = TangentElement::deterministic(mu, x);
  const auto gamma = Coupling::product(mu, DiscreteMeasure::dirac({0.0}));
  CHECK(classify_uniqueness(psi, gamma) == Uniqueness::kUniqueDeterministicTangent);
  const auto r = transport_along_coupling(psi, gamma);
  REQUIRE(r.arrival.base().size() == 1);
  CHECK(r.arrival.base().atom(0)[0] == 0.0);
  CHECK(!r.arrival.is_deterministic());
  CHECK(same_measure(r.arrival.fiber(0), mu, 0.0, 0.0));
  CHECK(check_transport(r).ok());
}

TEST_CASE("transport invariants on random instances") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.integer(0, 1);
    auto mu = testing::random_measure(rng, 1 + rng.integer(0, 5), d);
    auto nu = testing::random_measure(rng, 1 + rng.integer(0, 5), d);
    auto psi = testing::random_tangent(rng, mu, 3);
    auto gamma = testing::random_coupling(rng, mu, nu);
    auto r = transport_along_coupling(psi, gamma);
    auto c = check_transport(r);
    CHECK(c.ok());
    CHECK(c.initial_moment == doctest::Approx(c.source_moment).epsilon(1e-12));
    CHECK(same_measure(r.arrival.base(), gamma.right(), 1e-12));
    // Velocities never change, so going there and back keeps their law.
    auto back = transport_along_coupling(r.arrival, gamma.transposed());
    CHECK(same_measure(back.arrival.as_joint().right(), psi.as_joint().right(), 1e-12));
    auto rev = reverse(r);
    CHECK(check_transport(rev).ok());
    CHECK(same_law(reverse(rev).ensemble, r.ensemble, 0.0, 0.0));
  }
}

TEST_CASE("reversal of the branching transports") {
  const auto inst = testing::wml_instance();
  for (const auto& r : enumerate_transports(inst.psi, inst.gamma)) {
    auto rev = reverse(r);
    CHECK(check_transport(rev).ok());
    CHECK(tangent_distance(rev.source, r.arrival) == 0.0);
    CHECK(same_law(reverse(rev).ensemble, r.ensemble, 0.0, 0.0));
  }
}

TEST_CASE("transport along path ensembles") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto eta = testing::random_ensemble(rng, 1 + rng.integer(0, 5), 6, 2);
    auto psi = testing::random_tangent(rng, eta.marginal_at_index(0), 3);
    auto r = transport_along_paths(psi, eta);
    CHECK(check_transport(r).ok());
    CHECK(check_transport(reverse(r)).ok());
  }
  auto eta = testing::split_from_origin(uniform_grid(10));
  auto wrong = TangentElement::zero(testing::half_half(0, 1));
  CHECK_THROWS_AS(transport_along_paths(wrong, eta), Error);
}

TEST_CASE("path dependence") {
  const std::size_t n = 401;
  const auto grid = uniform_grid(10);
  const auto mu = testing::grid_measure(n);
  std::vector<Trajectory> still, swap;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = mu.atom(i)[0];
    Trajectory a, b;
    a.exact_weight = b.exact_weight = mu.exact_weights()[i];
    for (double t : grid) {
      a.x.push_back(u);
      b.x.push_back(t * u + (1 - t) * (1 - u));
    }
    still.push_back(std::move(a));
    swap.push_back(std::move(b));
  }
  const auto eta1 = PathEnsemble::create(1, grid, still);
  const auto eta2 = PathEnsemble::create(1, grid, swap);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(mu.atom(i)[0]);
  const auto psi = TangentElement::deterministic(mu, v);
  // Both ensembles start and end uniform; in between eta2 passes through
  // delta_1/2 at t = 1/2.
  CHECK(same_measure(eta1.marginal_at_index(0), eta2.marginal_at_index(0), 1e-12));
  CHECK(same_measure(eta1.marginal_at_index(10), eta2.marginal_at_index(10), 1e-12));
  CHECK(eta2.marginal_at_index(5).size() == 1);
  CHECK(path_dependence_check(psi, eta1, eta2));
  CHECK(!path_dependence_check(psi, eta1, eta1));

  // Same endpoints, different speed profile.
  const auto split = testing::split_from_origin(grid);
  std::vector<Trajectory> slow;
  for (double s : {1.0, -1.0}) {
    Trajectory tr;
    tr.exact_weight = Rational(1, 2);
    for (double t : grid) tr.x.push_back(s * t * t);
    slow.push_back(std::move(tr));
  }
  const auto psi0 = TangentElement::create(DiscreteMeasure::dirac({0.0}), {testing::half_half(0, 2)});
  CHECK(!path_dependence_check(psi0, split, PathEnsemble::create(1, grid, slow)));
  CHECK_THROWS_AS(path_dependence_check(psi, eta1, split), Error);
}

TEST_CASE("transport errors") {
  const auto inst = testing::wml_instance();
  const auto other = TangentElement::zero(testing::half_half(0, 1));
  try {
    transport_along_coupling(other, inst.gamma);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMarginalMismatch);
  }
  // A 5 x 5 fiber polytope is over the cell limit.
  std::vector<double> pairs;
  std::vector<Rational> w;
  for (int j = 0; j < 5; ++j) {
    pairs.insert(pairs.end(), {0.0, static_cast<double>(j)});
    w.push_back(Rational(1, 5));
  }
  const auto wide = Coupling::from_pairs_exact(1, 1, pairs, w);
  const auto fiber = DiscreteMeasure::create_exact(1, {0, 1, 2, 3, 4}, w);
  const auto psi = TangentElement::create(DiscreteMeasure::dirac({0.0}), {fiber});
  try {
    enumerate_transports(psi, wide);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
}

TEST_CASE("enumeration does not depend on the thread count") {
  Rng rng(12);
  auto mu = testing::random_exact_measure(rng, 4, 1);
  auto nu = testing::random_exact_measure(rng, 2, 1);
  auto psi = testing::random_exact_tangent(rng, mu, 2);
  auto gamma = Coupling::product(mu, nu);
  set_thread_count(1);
  auto a = enumerate_transports(psi, gamma);
  set_thread_count(4);
  auto b = enumerate_transports(psi, gamma);
  set_thread_count(0);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(same_law(a[k].ensemble, b[k].ensemble, 0.0, 0.0));
}

}  // namespace
}  // namespace wtan
