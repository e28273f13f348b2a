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
#include "wtan/error.hpp"
#include "wtan/measure.hpp"

namespace wtan {
namespace {

using testing::Rng;

TEST_CASE("merge collapses duplicate atoms") {
  auto m = DiscreteMeasure::create(1, {0.0, 0.0}, {0.5, 0.5});
  REQUIRE(m.size() == 1);
  CHECK(m.weight(0) == 1.0);
}

TEST_CASE("merge keeps separated atoms") {
  auto m = DiscreteMeasure::create(1, {0.0, 1.0}, {0.5, 0.5});
  REQUIRE(m.size() == 2);
  CHECK(m.atom(0)[0] == 0.0);
  CHECK(m.atom(1)[0] == 1.0);
}

TEST_CASE("merge of a near pair keeps the lowest index position") {
  auto m = DiscreteMeasure::create(1, {0.0, 5e-10, 1.0}, {0.25, 0.25, 0.5});
  REQUIRE(m.size() == 2);
  CHECK(m.atom(0)[0] == 0.0);
  CHECK(m.weight(0) == 0.5);
  CHECK(m.atom(1)[0] == 1.0);
  CHECK(m.weight(1) == 0.5);
}

TEST_CASE("merge chains through union-find") {
  // 0 ~ 0.8e-9 ~ 1.6e-9 although 0 and 1.6e-9 are farther than tau.
  auto m = DiscreteMeasure::create(1, {1.6e-9, 0.0, 0.8e-9}, {0.25, 0.25, 0.5});
  REQUIRE(m.size() == 1);
  CHECK(m.atom(0)[0] == 1.6e-9);
}

TEST_CASE("merge preserves exact mass") {
  auto m = DiscreteMeasure::create_exact(1, {0.0, 0.0, 1.0},
                                         {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  REQUIRE(m.size() == 2);
  CHECK(m.exact_weights()[0] == Rational(2, 3));
  CHECK(sum(m.exact_weights()) == 1);
}

TEST_CASE("merge is idempotent") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.integer(0, 20);
    std::vector<double> c(n);
    for (double& v : c) v = rng.integer(0, 5) * 1e-9 * 0.7;
    auto once = DiscreteMeasure::create(1, c, testing::random_weights(rng, n));
    auto twice = merge_atoms(once, kDefaultMergeTolerance);
    CHECK(once.coords() == twice.coords());
    CHECK(once.weights() == twice.weights());
  }
}

TEST_CASE("construction rejects invalid input") {
  CHECK_THROWS_AS(DiscreteMeasure::create(1, {0.0}, {0.9}), Error);
  CHECK_THROWS_AS(DiscreteMeasure::create(1, {NAN}, {1.0}), Error);
  CHECK_THROWS_AS(DiscreteMeasure::create(1, {0.0, 1.0}, {1.5, -0.5}), Error);
  CHECK_THROWS_AS(DiscreteMeasure::create(2, {0.0}, {1.0}), Error);
}

TEST_CASE("zero weight atoms are dropped") {
  auto m = DiscreteMeasure::create(1, {0.0, 3.0}, {1.0, 0.0});
  CHECK(m.size() == 1);
}

TEST_CASE("moment examples") {
  CHECK(moment(DiscreteMeasure::dirac({0.0}), 2) == 0.0);
  CHECK(moment(DiscreteMeasure::create(1, {-1.0, 1.0}, {0.5, 0.5}), 2) == 1.0);
  // Riemann sum of x^2 on [0,1].
  const std::size_t n = 401;
  double oracle = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    oracle += x * x / n;
  }
  const double value = moment(testing::grid_measure(n), 2);
  CHECK(std::abs(value - 1.0 / 3.0) <= 1e-4 + std::abs(oracle - 1.0 / 3.0));
  CHECK(value == doctest::Approx(oracle).epsilon(1e-14));
  CHECK_THROWS_AS(moment(DiscreteMeasure::dirac({1.0}), 0.5), Error);
}

TEST_CASE("moment scales with the dilation factor") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = testing::random_measure(rng, 1 + rng.integer(0, 10), 1 + rng.integer(0, 2));
    const double s = rng.uniform(-3.0, 3.0);
    const double p = rng.uniform(1.0, 4.0);
    CHECK(moment(m.scaled(s), p) ==
          doctest::Approx(std::pow(std::abs(s), p) * moment(m, p)).epsilon(1e-12));
  }
}

TEST_CASE("exact conversion of doubles") {
  CHECK(exact_rational(0.5) == Rational(1, 2));
  CHECK(exact_rational(-3.0) == Rational(-3));
  CHECK(to_double(exact_rational(0.1)) == 0.1);
  CHECK(parse_rational("3/12") == Rational(1, 4));
  CHECK(format_rational(Rational(-2, 6)) == "-1/3");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
}

}  // namespace
}  // namespace wtan
