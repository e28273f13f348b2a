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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/instances.hpp"
#include "wtan/control.hpp"
#include "wtan/error.hpp"
#include "wtan/parallel.hpp"

namespace wtan {
namespace {

using testing::Rng;

ControlProblem lq_problem(std::size_t steps) {
  ControlProblem p;
  p.steps = steps;
  p.kinetic = 1.0;
  p.terminal = TerminalKind::kSecondMoment;
  return p;
}

// Backward dynamic programming on a position lattice for one particle with
// L = |z|^2 and G = |x|^2; returns the value at x0.
double lattice_value(double x0, std::size_t steps, double lo, double hi, double h) {
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / h)) + 1;
  const double dt = 1.0 / static_cast<double>(steps);
  std::vector<double> v(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + h * static_cast<double>(i);
    v[i] = x * x;
  }
  for (std::size_t j = 0; j < steps; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const double dz = h * (static_cast<double>(k) - static_cast<double>(i)) / dt;
        best = std::min(best, dt * dz * dz + v[k]);
      }
      next[i] = best;
    }
    v.swap(next);
  }
  return v[static_cast<std::size_t>(std::llround((x0 - lo) / h))];
}

PathEnsemble constant_control(const DiscreteMeasure& m0, double speed, std::size_t steps) {
  return from_velocity_field(
      m0, [speed](double, std::span<const double> x) { return Point(x.size(), speed); }, uniform_grid(steps));
}

SweepPair shifted_pair(const DiscreteMeasure& m, double delta) {
  std::vector<double> pairs;
  for (std::size_t i = 0; i < m.size(); ++i) {
    pairs.push_back(m.atom(i)[0]);
    pairs.push_back(m.atom(i)[0] + delta);
  }
  Coupling g = Coupling::from_pairs_exact(1, 1, pairs, m.rational_weights());
  return {m, g.right(), g};
}

TEST_CASE("evaluate_cost of the zero control is the terminal cost of the start") {
  const ControlProblem p = lq_problem(10);
  const DiscreteMeasure m0 = testing::half_half(-1.0, 3.0);
  CHECK(evaluate_cost(p, constant_control(m0, 0.0, 10)) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("evaluate_cost of a single particle moving at constant speed") {
  // x(t) = 1 - t/2: kinetic 1/4, terminal 1/4.
  const ControlProblem p = lq_problem(10);
  const double c = evaluate_cost(p, constant_control(DiscreteMeasure::dirac({1.0}), -0.5, 10));
  CHECK(std::abs(c - 0.5) <= 1e-14);
}

TEST_CASE("the split ensemble reaches the two-point target for one unit of kinetic cost") {
  ControlProblem p = split_target_instance();
  p.kinetic = 1.0;
  const PathEnsemble split = testing::split_from_origin(p.grid());
  CHECK(std::abs(evaluate_cost(p, split) - 1.0) <= 1e-12);
  CHECK_FALSE(is_tied(split));
  CHECK(is_tied(constant_control(testing::half_half(0.0, 1.0), 0.3, 5)));
}

TEST_CASE("evaluate_cost rejects ensembles on another grid or without velocities") {
  const ControlProblem p = lq_problem(10);
  try {
    evaluate_cost(p, constant_control(DiscreteMeasure::dirac({0.0}), 0.0, 12));
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGridMismatch);
  }
}

TEST_CASE("linear-quadratic value matches the closed form and a lattice oracle") {
  const double oracle = lattice_value(1.0, 10, -1.0, 2.0, 0.01);
  CHECK(std::abs(oracle - 0.5) <= 1e-3);
  for (ControlMode mode : {ControlMode::kDeterministic, ControlMode::kRandomized}) {
    SolveOptions o;
    o.mode = mode;
    o.budget = 3;
    const ValueResult r = solve_value(lq_problem(10), DiscreteMeasure::dirac({1.0}), o);
    CHECK(std::abs(r.value - 0.5) <= 1e-8);
    CHECK(r.value <= oracle + 1e-12);
    CHECK(r.value == evaluate_cost(lq_problem(10), r.ensemble));
    CHECK(r.ensemble.paths.velocity_defect() == 0.0);
  }
}

TEST_CASE("the zero problem has value zero") {
  ControlProblem p;
  p.kinetic = 0.0;
  p.steps = 5;
  Rng rng(3);
  const ValueResult r = solve_value(p, testing::random_measure(rng, 4, 2), {});
  CHECK(r.value == 0.0);
}

TEST_CASE("randomized controls beat deterministic ones on the split target") {
  const ControlProblem p = split_target_instance();
  const DiscreteMeasure m0 = DiscreteMeasure::dirac({0.0});
  SolveOptions o;
  o.branches = 16;
  o.budget = 50;
  o.mode = ControlMode::kRandomized;
  const ValueResult u = solve_value(p, m0, o);
  o.mode = ControlMode::kDeterministic;
  const ValueResult v = solve_value(p, m0, o);
  CHECK(u.value <= 0.1);
  CHECK(v.value >= 0.9);
  CHECK(u.value <= v.value);
  CHECK(is_tied(v.ensemble.paths));
}

TEST_CASE("randomized value never exceeds the deterministic value") {
  Rng rng(11);
  const ControlProblem p = lipschitz_instance();
  for (int trial = 0; trial < 4; ++trial) {
    const DiscreteMeasure m0 = testing::random_measure(rng, static_cast<std::size_t>(rng.integer(1, 3)), 1);
    SolveOptions o;
    o.budget = 2;
    o.branches = 2;
    o.seed = static_cast<std::uint64_t>(trial);
    o.mode = ControlMode::kRandomized;
    const double u = solve_value(p, m0, o).value;
    o.mode = ControlMode::kDeterministic;
    const double v = solve_value(p, m0, o).value;
    CHECK(u <= v);
  }
}

TEST_CASE("a larger budget never raises the value") {
  const ControlProblem p = split_target_instance();
  SolveOptions o;
  o.mode = ControlMode::kDeterministic;
  o.seed = 5;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t budget : {1, 2, 4, 8}) {
    o.budget = budget;
    const double v = solve_value(p, testing::half_half(-0.3, 0.4), o).value;
    CHECK(v <= last);
    last = v;
  }
}

TEST_CASE("translation of a solution is admissible with the same kinetic energy") {
  const ControlProblem p = lipschitz_instance();
  const DiscreteMeasure m = testing::half_half(-0.5, 0.5);
  SolveOptions o;
  o.budget = 2;
  o.branches = 2;
  const ValueResult r = solve_value(p, m, o);
  const SweepPair pair = shifted_pair(m, 0.25);
  const PathEnsemble moved = translate(r.ensemble.paths, pair.gamma0).translated;
  CHECK(moved.velocity_defect() == 0.0);
  CHECK(same_measure(moved.marginal_at_index(0), pair.m_prime, 1e-12));
  CHECK(std::abs(kinetic_integral(moved) - r.kinetic) <= 1e-12);
  // Coercivity: I <= C (C T + U).
  CHECK(r.kinetic <= p.constant * (p.constant * p.horizon + r.value) + kQuadratureTolerance);
}

TEST_CASE("the Lipschitz instance satisfies its declared hypotheses") {
  const ControlProblem p = lipschitz_instance();
  const HypothesisCheck h = check_hypotheses(p, 1, 300, 7);
  CHECK(h.ok(p.constant));
  CHECK(h.terminal_lipschitz > 0.0);
  CHECK(h.running_lipschitz > 0.0);
  ControlProblem bad = p;
  bad.potential_weight = 10.0;
  CHECK_FALSE(check_hypotheses(bad, 1, 300, 7).ok(p.constant));
}

TEST_CASE("Lipschitz sweep: identical measures give ratio zero and certificates hold") {
  const ControlProblem p = lipschitz_instance();
  const DiscreteMeasure m = testing::half_half(-0.5, 0.5);
  SolveOptions o;
  o.budget = 2;
  o.branches = 2;
  const SweepReport rep =
      lipschitz_sweep(p, {shifted_pair(m, 0.0), shifted_pair(m, 0.5), shifted_pair(m, 0.1)}, o);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].ratio == 0.0);
  CHECK(std::abs(rep.rows[0].u_m - rep.rows[0].u_mprime) <= 1e-12);
  for (const auto& row : rep.rows) {
    CHECK(row.translated_ok);
    CHECK(row.coercive);
    CHECK(row.u_mprime <= row.translated_cost);
    CHECK(row.ratio <= row.certificate_rhs / std::max(row.w2, 1e-300) + kQuadratureTolerance);
  }
  CHECK(rep.max_ratio <= rep.max_certificate + kQuadratureTolerance);
  CHECK(std::abs(rep.rows[1].w2 - 0.5) <= 1e-15);
}

TEST_CASE("barycentric and finite-difference gradients reach the same value") {
  ControlProblem p = split_target_instance();
  p.steps = 10;
  SolveOptions o;
  o.mode = ControlMode::kDeterministic;
  o.budget = 3;
  const DiscreteMeasure m0 = testing::half_half(-0.2, 0.6);
  const double fd = solve_value(p, m0, o).value;
  p.ot_gradient = OtGradient::kBarycentric;
  const double bary = solve_value(p, m0, o).value;
  CHECK(std::abs(fd - bary) <= 1e-6);
}

TEST_CASE("solver output does not depend on the thread count") {
  const ControlProblem p = lipschitz_instance();
  SolveOptions o;
  o.budget = 4;
  o.branches = 2;
  o.seed = 9;
  set_thread_count(1);
  const ValueResult a = solve_value(p, testing::half_half(-0.4, 0.7), o);
  set_thread_count(4);
  const ValueResult b = solve_value(p, testing::half_half(-0.4, 0.7), o);
  set_thread_count(1);
  CHECK(a.value == b.value);
  CHECK(a.start_values == b.start_values);
  CHECK(same_law(a.ensemble.paths, b.ensemble.paths, 0.0));
}

TEST_CASE("solver input errors") {
  const ControlProblem p = lq_problem(4);
  std::vector<double> coords(201);
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<double>(i);
  try {
    solve_value(p, DiscreteMeasure::empirical(1, coords), {});
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
  SolveOptions o;
  o.warm_starts = {constant_control(DiscreteMeasure::dirac({2.0}), 0.0, 4)};
  try {
    solve_value(p, DiscreteMeasure::dirac({0.0}), o);
    FAIL("expected MarginalMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMarginalMismatch);
  }
}

}  // namespace
}  // namespace wtan
