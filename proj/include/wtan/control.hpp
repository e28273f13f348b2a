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

#ifndef WTAN_CONTROL_HPP_
#define WTAN_CONTROL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wtan/measure.hpp"
#include "wtan/path_ensemble.hpp"
#include "wtan/transport.hpp"

namespace wtan {

// V(x): none, a |x|^2 / 2, or a sum_c (1 - cos x_c) / (2d).
enum class PotentialKind { kNone, kQuadratic, kCosine };
// F(m): none, int f dm with f(x) = 1 + sum_c sin(x_c) / d, or W_2(m, ref).
enum class MeanFieldKind { kNone, kIntegralSine, kW2ToReference };
// G(m): zero, int |x|^2 dm, min(cap, W_2(m, ref)), or min(cap, W_2^2(m, ref)).
enum class TerminalKind { kZero, kSecondMoment, kW2Capped, kSquaredW2Capped };

// How gradients of W_2 terms are obtained.
enum class OtGradient { kFiniteDifference, kBarycentric };

// Running cost L(s, x, z, m) = c_k |z|^2 + V(x) + c_m F(m); terminal cost
// c_G G(m_T). Time runs over a uniform grid on [0, T].
struct ControlProblem {
  double horizon = 1.0;
  std::size_t steps = 40;
  double kinetic = 1.0;
  PotentialKind potential = PotentialKind::kNone;
  double potential_weight = 0.0;
  MeanFieldKind mean_field = MeanFieldKind::kNone;
  double mean_field_weight = 0.0;
  DiscreteMeasure mean_field_reference;
  TerminalKind terminal = TerminalKind::kZero;
  double terminal_weight = 1.0;
  double terminal_cap = 1.0;
  DiscreteMeasure terminal_reference;
  double constant = 1.0;    // declared C of the Lipschitz theorem
  double max_speed = 10.0;  // box for projected gradient steps
  OtGradient ot_gradient = OtGradient::kFiniteDifference;

  std::vector<double> grid() const { return uniform_grid(steps, horizon); }
  void validate(std::size_t dim) const;

  double potential_value(std::span<const double> x) const;
  double mean_field_value(const DiscreteMeasure& m) const;
  double terminal_value(const DiscreteMeasure& m) const;
  // L at one particle; the mean-field value is passed in.
  double running(std::span<const double> x, std::span<const double> z, double mean_field) const;
};

enum class ControlMode { kDeterministic, kRandomized };
const char* to_string(ControlMode mode);

struct ControlledEnsemble {
  PathEnsemble paths;  // with velocity tracks and labels
  ControlMode mode = ControlMode::kDeterministic;
};

// Trajectories starting at the same atom carry identical velocity tracks.
bool is_tied(const PathEnsemble& e);

// Left-endpoint quadrature of the running cost plus the terminal cost.
double evaluate_cost(const ControlProblem& problem, const PathEnsemble& e);
inline double evaluate_cost(const ControlProblem& problem, const ControlledEnsemble& e) {
  return evaluate_cost(problem, e.paths);
}

// sum_k w_k sum_{j < M} |z_k(t_j)|^2 (t_{j+1} - t_j).
double kinetic_integral(const PathEnsemble& e);

struct SolveOptions {
  ControlMode mode = ControlMode::kRandomized;
  std::size_t budget = 8;        // multi-starts, including the zero control
  std::size_t branches = 4;      // per atom, randomized mode
  std::size_t max_iterations = 400;
  double tolerance = 1e-10;      // stop when a step changes the cost by less
  double start_speed = 1.0;      // random starts draw z in [-s, s]^d
  std::uint64_t seed = 0;
  std::vector<PathEnsemble> warm_starts;  // evaluated and refined first
};

struct ValueResult {
  double value = 0.0;  // an upper bound on the infimum
  ControlledEnsemble ensemble;
  std::vector<double> start_values;  // per start, in start order
  std::size_t best_start = 0;
  bool budget_exhausted = false;  // some start hit max_iterations
  double kinetic = 0.0;           // kinetic_integral of the returned ensemble
};

inline constexpr std::size_t kMaxControlAtoms = 200;

// Multi-start projected gradient descent with Armijo backtracking over
// per-trajectory velocity sequences. Deterministic mode ties all particles
// at a starting atom; randomized mode splits each atom into `branches`
// labeled branches, and also evaluates the deterministic solution.
ValueResult solve_value(const ControlProblem& problem, const DiscreteMeasure& m0, const SolveOptions& options);

struct SweepPair {
  DiscreteMeasure m;
  DiscreteMeasure m_prime;
  Coupling gamma0;  // W_2-optimal
};

struct SweepRow {
  std::size_t pair_id = 0;
  double w2 = 0.0;
  double u_m = 0.0;
  double u_mprime = 0.0;
  double translated_cost = 0.0;  // cost of the m-solution translated along gamma0
  double ratio = 0.0;            // |u_m - u_mprime| / w2 (0 when w2 = 0)
  double kinetic = 0.0;          // larger I of the two solutions
  double certificate_rhs = 0.0;  // C (1 + sqrt I)(W_2 + T W_2)
  double proof_rhs = 0.0;        // C W_2 (1 + 2T + 2 sqrt(T I))
  bool translated_ok = false;    // translated_cost - u_m <= certificate_rhs + tol
  bool coercive = false;         // I <= C (C T + u_m)
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double max_ratio = 0.0;
  double max_certificate = 0.0;  // max over rows of certificate_rhs / w2
};

inline constexpr double kQuadratureTolerance = 1e-9;

// Solves both sides, translating each solution along the coupling (and
// back) as a warm start for the other side until neither improves.
SweepReport lipschitz_sweep(const ControlProblem& problem, const std::vector<SweepPair>& pairs,
                            const SolveOptions& options);

// Library instances.
// Satisfies the Lipschitz theorem with C = 1: L = |z|^2 + (1 - cos x)/2 +
// (1 + sin x)/2 and G = min(1, W_2(m, (delta_-1 + delta_1)/2)).
ControlProblem lipschitz_instance();
// L = 0.05 |z|^2, G = min(1, W_2^2(m, (delta_-1 + delta_1)/2)), 40 steps.
ControlProblem split_target_instance();

struct HypothesisCheck {
  double terminal_sup = 0.0;           // max |G| over samples
  double terminal_lipschitz = 0.0;     // max |G(m) - G(m')| / W_2
  double coercivity_violation = 0.0;   // max of (C^-1 |z|^2 - C) - L, clipped at 0
  double running_lipschitz = 0.0;      // max |L(x,z,m) - L(y,z,m')| / ((1 + |z|)(|x - y| + W_2))
  bool ok(double c) const {
    return terminal_sup <= c && terminal_lipschitz <= c + 1e-9 && coercivity_violation == 0.0 &&
           running_lipschitz <= c + 1e-9;
  }
};

// Probes the declared constant on `samples` random measures and points.
HypothesisCheck check_hypotheses(const ControlProblem& problem, std::size_t dim, std::size_t samples,
                                 std::uint64_t seed);

}  // namespace wtan

#endif  // WTAN_CONTROL_HPP_
