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

#include "wtan/control.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "stream_rng.hpp"
#include "wtan/error.hpp"
#include "wtan/parallel.hpp"

namespace wtan {

void ControlProblem::validate(std::size_t dim) const {
  if (!(horizon > 0.0) || steps == 0) fail(ErrorCode::kInvalidArgument, "control horizon and steps must be positive");
  if (!(kinetic >= 0.0) || !(constant > 0.0) || !(max_speed > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "kinetic weight, constant and speed bound must be positive");
  }
  if (mean_field == MeanFieldKind::kW2ToReference && mean_field_reference.dim() != dim) {
    fail(ErrorCode::kDimensionMismatch, "mean-field reference has the wrong dimension");
  }
  if ((terminal == TerminalKind::kW2Capped || terminal == TerminalKind::kSquaredW2Capped) &&
      terminal_reference.dim() != dim) {
    fail(ErrorCode::kDimensionMismatch, "terminal reference has the wrong dimension");
  }
}

double ControlProblem::potential_value(std::span<const double> x) const {
  double s = 0.0;
  switch (potential) {
    case PotentialKind::kNone:
      return 0.0;
    case PotentialKind::kQuadratic:
      for (double v : x) s += v * v;
      return potential_weight * 0.5 * s;
    case PotentialKind::kCosine:
      for (double v : x) s += 1.0 - std::cos(v);
      return potential_weight * s / (2.0 * static_cast<double>(x.size()));
  }
  return 0.0;
}

double ControlProblem::mean_field_value(const DiscreteMeasure& m) const {
  switch (mean_field) {
    case MeanFieldKind::kNone:
      return 0.0;
    case MeanFieldKind::kIntegralSine: {
      double s = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        double f = 0.0;
        for (double v : m.atom(i)) f += std::sin(v);
        s += m.weight(i) * (1.0 + f / static_cast<double>(m.dim()));
      }
      return s;
    }
    case MeanFieldKind::kW2ToReference:
      return wasserstein(m, mean_field_reference, 2);
  }
  return 0.0;
}

double ControlProblem::terminal_value(const DiscreteMeasure& m) const {
  switch (terminal) {
    case TerminalKind::kZero:
      return 0.0;
    case TerminalKind::kSecondMoment:
      return terminal_weight * moment(m, 2);
    case TerminalKind::kW2Capped:
      return terminal_weight * std::min(terminal_cap, wasserstein(m, terminal_reference, 2));
    case TerminalKind::kSquaredW2Capped:
      return terminal_weight * std::min(terminal_cap, solve_ot(m, terminal_reference, 2).objective);
  }
  return 0.0;
}

double ControlProblem::running(std::span<const double> x, std::span<const double> z, double mean_field_term) const {
  double z2 = 0.0;
  for (double v : z) z2 += v * v;
  return kinetic * z2 + potential_value(x) + mean_field_weight * mean_field_term;
}

const char* to_string(ControlMode mode) {
  return mode == ControlMode::kDeterministic ? "deterministic" : "randomized";
}

namespace {

// Particles and their controls in flat arrays: x is P x (M + 1) x d, z is
// P x M x d.
struct Particles {
  std::size_t dim = 0;
  std::vector<double> grid;
  std::vector<double> weights;
  std::vector<std::optional<Rational>> exact;
  std::vector<std::int64_t> labels;
  std::vector<std::size_t> atoms;  // starting atom, for tying
  std::vector<double> starts;      // P x d

  std::size_t size() const { return weights.size(); }
  std::size_t steps() const { return grid.size() - 1; }
};

std::vector<double> integrate(const Particles& p, const std::vector<double>& z) {
  const std::size_t d = p.dim, m = p.steps();
  std::vector<double> x(p.size() * (m + 1) * d);
  for (std::size_t k = 0; k < p.size(); ++k) {
    double* xk = x.data() + k * (m + 1) * d;
    const double* zk = z.data() + k * m * d;
    std::copy(p.starts.begin() + k * d, p.starts.begin() + (k + 1) * d, xk);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t c = 0; c < d; ++c) {
        // Same expression as the path ensemble's left-endpoint rule.
        xk[(j + 1) * d + c] = xk[j * d + c] + zk[j * d + c] * (p.grid[j + 1] - p.grid[j]);
      }
    }
  }
  return x;
}

DiscreteMeasure snapshot(const Particles& p, const std::vector<double>& x, std::size_t j) {
  const std::size_t d = p.dim, m = p.steps();
  std::vector<double> coords;
  coords.reserve(p.size() * d);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double* xk = x.data() + (k * (m + 1) + j) * d;
    coords.insert(coords.end(), xk, xk + d);
  }
  return DiscreteMeasure::unmerged(d, std::move(coords), p.weights);
}

double total_cost(const ControlProblem& prob, const Particles& p, const std::vector<double>& x,
                  const std::vector<double>& z) {
  const std::size_t d = p.dim, m = p.steps();
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double mf = prob.mean_field == MeanFieldKind::kNone ? 0.0 : prob.mean_field_value(snapshot(p, x, j));
    double step = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      std::span<const double> xk(x.data() + (k * (m + 1) + j) * d, d);
      std::span<const double> zk(z.data() + (k * m + j) * d, d);
      step += p.weights[k] * prob.running(xk, zk, mf);
    }
    total += (p.grid[j + 1] - p.grid[j]) * step;
  }
  return total + prob.terminal_value(snapshot(p, x, m));
}

// Gradient of a measure functional with respect to every particle position.
std::vector<double> measure_gradient(const Particles& p, const std::vector<double>& x, std::size_t j,
                                     const std::function<double(const DiscreteMeasure&)>& f, OtGradient mode,
                                     const DiscreteMeasure* reference, bool squared, double cap) {
  const std::size_t d = p.dim;
  std::vector<double> g(p.size() * d, 0.0);
  DiscreteMeasure m = snapshot(p, x, j);
  if (mode == OtGradient::kBarycentric && reference != nullptr) {
    const OtResult ot = solve_ot(m, *reference, 2);
    if ((squared ? ot.objective : ot.distance) >= cap) return g;
    // d W_2^2 / d x_k = 2 w_k (x_k - b(x_k)).
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto xk = m.atom(k);
      for (std::size_t c = 0; c < d; ++c) g[k * d + c] = 2.0 * p.weights[k] * xk[c];
    }
    for (const auto& e : ot.coupling.entries()) {
      auto y = reference->atom(e.j);
      for (std::size_t c = 0; c < d; ++c) g[e.i * d + c] -= 2.0 * e.mass * y[c];
    }
    if (!squared) {
      const double scale = ot.distance > 0.0 ? 0.5 / ot.distance : 0.0;
      for (double& v : g) v *= scale;
    }
    return g;
  }
  double scale = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (double v : m.atom(k)) scale = std::max(scale, std::abs(v));
  }
  const double h = 1e-5 * scale;
  const std::size_t m_steps = p.steps();
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<double> xp = x;
      double& v = xp[(k * (m_steps + 1) + j) * d + c];
      const double base = v;
      v = base + h;
      const double up = f(snapshot(p, xp, j));
      v = base - h;
      const double down = f(snapshot(p, xp, j));
      g[k * d + c] = (up - down) / (2.0 * h);
    }
  }
  return g;
}

std::vector<double> cost_gradient(const ControlProblem& prob, const Particles& p, const std::vector<double>& x,
                                  const std::vector<double>& z) {
  const std::size_t d = p.dim, m = p.steps(), n = p.size();
  // gx: partial derivatives with respect to positions at grid indices 1..M.
  std::vector<double> gx(n * (m + 1) * d, 0.0);
  auto at = [&](std::size_t k, std::size_t j) { return (k * (m + 1) + j) * d; };
  for (std::size_t j = 1; j < m; ++j) {
    const double dt = p.grid[j + 1] - p.grid[j];
    for (std::size_t k = 0; k < n; ++k) {
      const double* xk = x.data() + at(k, j);
      for (std::size_t c = 0; c < d; ++c) {
        double dv = 0.0;
        if (prob.potential == PotentialKind::kQuadratic) dv = prob.potential_weight * xk[c];
        if (prob.potential == PotentialKind::kCosine) dv = prob.potential_weight * std::sin(xk[c]) / (2.0 * d);
        gx[at(k, j) + c] += dt * p.weights[k] * dv;
        if (prob.mean_field == MeanFieldKind::kIntegralSine) {
          gx[at(k, j) + c] += dt * prob.mean_field_weight * p.weights[k] * std::cos(xk[c]) / d;
        }
      }
    }
    if (prob.mean_field == MeanFieldKind::kW2ToReference) {
      const auto g = measure_gradient(
          p, x, j, [&](const DiscreteMeasure& mm) { return prob.mean_field_value(mm); }, prob.ot_gradient,
          &prob.mean_field_reference, false, std::numeric_limits<double>::infinity());
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < d; ++c) gx[at(k, j) + c] += dt * prob.mean_field_weight * g[k * d + c];
      }
    }
  }
  switch (prob.terminal) {
    case TerminalKind::kZero:
      break;
    case TerminalKind::kSecondMoment:
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < d; ++c) gx[at(k, m) + c] += prob.terminal_weight * 2.0 * p.weights[k] * x[at(k, m) + c];
      }
      break;
    case TerminalKind::kW2Capped:
    case TerminalKind::kSquaredW2Capped: {
      const bool squared = prob.terminal == TerminalKind::kSquaredW2Capped;
      const auto g = measure_gradient(
          p, x, m, [&](const DiscreteMeasure& mm) { return prob.terminal_value(mm); }, prob.ot_gradient,
          &prob.terminal_reference, squared, prob.terminal_cap);
      // The finite-difference path differentiates terminal_value, which
      // already carries the weight.
      const double w = prob.ot_gradient == OtGradient::kBarycentric ? prob.terminal_weight : 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < d; ++c) gx[at(k, m) + c] += w * g[k * d + c];
      }
      break;
    }
  }
  // Chain rule through x_{j+1} = x_j + z_j dt_j: suffix sums of gx.
  std::vector<double> gz(n * m * d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      double tail = 0.0;
      for (std::size_t j = m; j-- > 0;) {
        tail += gx[at(k, j + 1) + c];
        const double dt = p.grid[j + 1] - p.grid[j];
        gz[(k * m + j) * d + c] = dt * (2.0 * prob.kinetic * p.weights[k] * z[(k * m + j) * d + c] + tail);
      }
    }
  }
  return gz;
}

struct StartResult {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> z;
  bool exhausted = false;
};

StartResult descend(const ControlProblem& prob, const Particles& p, std::vector<double> z,
                    const SolveOptions& options) {
  const std::size_t d = p.dim, m = p.steps();
  for (double& v : z) v = std::clamp(v, -prob.max_speed, prob.max_speed);
  double value = total_cost(prob, p, integrate(p, z), z);
  // Diagonal preconditioner: the kinetic Hessian 2 c_k w_k dt_j.
  std::vector<double> precond(z.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dt = p.grid[j + 1] - p.grid[j];
      const double h = p.weights[k] * dt * (prob.kinetic > 0.0 ? 2.0 * prob.kinetic : 1.0);
      for (std::size_t c = 0; c < d; ++c) precond[(k * m + j) * d + c] = 1.0 / h;
    }
  }
  double step = 1.0;
  StartResult out;
  out.exhausted = true;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const auto g = cost_gradient(prob, p, integrate(p, z), z);
    bool moved = false;
    double next_value = value;
    std::vector<double> next(z.size());
    while (step > 1e-14) {
      double slope = 0.0;
      for (std::size_t s = 0; s < z.size(); ++s) {
        next[s] = std::clamp(z[s] - step * precond[s] * g[s], -prob.max_speed, prob.max_speed);
        slope += g[s] * (next[s] - z[s]);
      }
      if (slope >= 0.0) break;
      next_value = total_cost(prob, p, integrate(p, next), next);
      if (next_value <= value + 1e-4 * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      out.exhausted = false;
      break;
    }
    const double gain = value - next_value;
    z.swap(next);
    value = next_value;
    step = std::min(step * 2.0, 1e6);
    if (gain <= options.tolerance * (1.0 + std::abs(value))) {
      out.exhausted = false;
      break;
    }
  }
  out.value = value;
  out.z = std::move(z);
  return out;
}

Particles particles_from_measure(const DiscreteMeasure& m0, const std::vector<double>& grid, std::size_t branches) {
  Particles p;
  p.dim = m0.dim();
  p.grid = grid;
  for (std::size_t i = 0; i < m0.size(); ++i) {
    for (std::size_t b = 0; b < branches; ++b) {
      if (m0.has_exact_weights()) {
        const Rational w = m0.exact_weights()[i] / static_cast<long long>(branches);
        p.exact.emplace_back(w);
        p.weights.push_back(to_double(w));
      } else {
        p.exact.emplace_back(std::nullopt);
        p.weights.push_back(m0.weight(i) / static_cast<double>(branches));
      }
      p.labels.push_back(static_cast<std::int64_t>(i * branches + b));
      p.atoms.push_back(i);
      auto x = m0.atom(i);
      p.starts.insert(p.starts.end(), x.begin(), x.end());
    }
  }
  return p;
}

void check_grid(const ControlProblem& prob, const PathEnsemble& e) {
  if (e.grid() != prob.grid()) fail(ErrorCode::kGridMismatch, "ensemble grid differs from the problem grid");
  if (!e.has_velocities()) fail(ErrorCode::kMissingVelocities, "controlled ensembles need velocity tracks");
}

// The ensemble's trajectories as particles with their recorded controls.
std::pair<Particles, std::vector<double>> particles_from_ensemble(const PathEnsemble& e) {
  Particles p;
  p.dim = e.dim();
  p.grid = e.grid();
  const std::size_t d = e.dim(), m = e.steps();
  std::vector<double> z;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto& tr = e.trajectory(k);
    p.weights.push_back(tr.weight);
    p.exact.push_back(tr.exact_weight);
    p.labels.push_back(tr.label.value_or(static_cast<std::int64_t>(k)));
    p.atoms.push_back(k);
    auto x0 = e.position(k, 0);
    p.starts.insert(p.starts.end(), x0.begin(), x0.end());
    z.insert(z.end(), tr.z.begin(), tr.z.begin() + m * d);
  }
  return {std::move(p), std::move(z)};
}

PathEnsemble to_ensemble(const Particles& p, const std::vector<double>& z) {
  const std::size_t d = p.dim, m = p.steps();
  const auto x = integrate(p, z);
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < p.size(); ++k) {
    Trajectory tr;
    tr.weight = p.weights[k];
    tr.exact_weight = p.exact[k];
    tr.label = p.labels[k];
    tr.x.assign(x.begin() + k * (m + 1) * d, x.begin() + (k + 1) * (m + 1) * d);
    tr.z.assign(z.begin() + k * m * d, z.begin() + (k + 1) * m * d);
    // The last sample repeats the final control.
    tr.z.insert(tr.z.end(), z.begin() + (k * m + m - 1) * d, z.begin() + (k * m + m) * d);
    trajs.push_back(std::move(tr));
  }
  return PathEnsemble::create(d, p.grid, std::move(trajs));
}

struct Candidate {
  Particles particles;
  std::vector<double> z;
  bool random = false;  // draw z at solve time
};

ValueResult solve_mode(const ControlProblem& prob, const DiscreteMeasure& m0, const SolveOptions& options,
                       ControlMode mode) {
  const auto grid = prob.grid();
  const std::size_t d = m0.dim(), m = grid.size() - 1;
  const std::size_t branches = mode == ControlMode::kRandomized ? std::max<std::size_t>(1, options.branches) : 1;
  const Particles base = particles_from_measure(m0, grid, branches);

  // Start order: zero control, warm starts, then seeded random starts.
  std::vector<Candidate> starts;
  starts.push_back({base, std::vector<double>(base.size() * m * d, 0.0), false});
  for (const auto& w : options.warm_starts) {
    check_grid(prob, w);
    if (w.dim() != d) fail(ErrorCode::kDimensionMismatch, "warm start has the wrong dimension");
    if (!same_measure(w.marginal_at_index(0), m0, kMarginalTolerance)) {
      fail(ErrorCode::kMarginalMismatch, "warm start does not start from the initial measure");
    }
    if (mode == ControlMode::kDeterministic && !is_tied(w)) continue;
    auto [p, z] = particles_from_ensemble(w);
    starts.push_back({std::move(p), std::move(z), false});
  }
  for (std::size_t s = 1; s < options.budget; ++s) starts.push_back({base, {}, true});

  std::vector<StartResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    auto& cand = starts[s];
    if (cand.random) {
      detail::StreamRng rng(options.seed, s);
      cand.z.assign(base.size() * m * d, 0.0);
      // A constant random velocity per particle.
      for (std::size_t k = 0; k < base.size(); ++k) {
        for (std::size_t c = 0; c < d; ++c) {
          const double v = rng.uniform(-options.start_speed, options.start_speed);
          for (std::size_t j = 0; j < m; ++j) cand.z[(k * m + j) * d + c] = v;
        }
      }
    }
    results[s] = descend(prob, cand.particles, cand.z, options);
  });

  ValueResult out;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < results.size(); ++s) {
    out.start_values.push_back(results[s].value);
    out.budget_exhausted = out.budget_exhausted || results[s].exhausted;
    if (results[s].value < out.value) {
      out.value = results[s].value;
      out.best_start = s;
    }
  }
  out.ensemble = {to_ensemble(starts[out.best_start].particles, results[out.best_start].z), mode};
  // Report the cost of the returned ensemble exactly as evaluate_cost sees it.
  out.value = evaluate_cost(prob, out.ensemble.paths);
  out.kinetic = kinetic_integral(out.ensemble.paths);
  return out;
}

}  // namespace

bool is_tied(const PathEnsemble& e) {
  const std::size_t d = e.dim();
  for (std::size_t a = 0; a < e.size(); ++a) {
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      auto xa = e.position(a, 0);
      auto xb = e.position(b, 0);
      if (std::equal(xa.begin(), xa.end(), xb.begin(), xb.begin() + d) && e.trajectory(a).z != e.trajectory(b).z) {
        return false;
      }
    }
  }
  return true;
}

double evaluate_cost(const ControlProblem& problem, const PathEnsemble& e) {
  check_grid(problem, e);
  problem.validate(e.dim());
  auto [p, z] = particles_from_ensemble(e);
  std::vector<double> x;
  x.reserve(p.size() * (p.steps() + 1) * p.dim);
  for (const auto& tr : e.trajectories()) x.insert(x.end(), tr.x.begin(), tr.x.end());
  return total_cost(problem, p, x, z);
}

double kinetic_integral(const PathEnsemble& e) {
  if (!e.has_velocities()) fail(ErrorCode::kMissingVelocities, "kinetic integral needs velocity tracks");
  return e.kinetic_energy();
}

ValueResult solve_value(const ControlProblem& problem, const DiscreteMeasure& m0, const SolveOptions& options) {
  problem.validate(m0.dim());
  if (m0.size() > kMaxControlAtoms) {
    fail(ErrorCode::kTooLarge, "initial measure has more than " + std::to_string(kMaxControlAtoms) + " atoms");
  }
  if (options.budget == 0) fail(ErrorCode::kInvalidArgument, "solver budget must be at least 1");
  if (options.mode == ControlMode::kDeterministic) return solve_mode(problem, m0, options, ControlMode::kDeterministic);
  // Deterministic-constrained controls are randomized ones too: the
  // constrained optimum is always in the candidate set.
  SolveOptions det_options = options;
  det_options.warm_starts.clear();
  for (const auto& w : options.warm_starts) {
    if (is_tied(w)) det_options.warm_starts.push_back(w);
  }
  ValueResult det = solve_mode(problem, m0, det_options, ControlMode::kDeterministic);
  ValueResult rnd = solve_mode(problem, m0, options, ControlMode::kRandomized);
  rnd.budget_exhausted = rnd.budget_exhausted || det.budget_exhausted;
  if (det.value < rnd.value) {
    rnd.value = det.value;
    rnd.ensemble = {det.ensemble.paths, ControlMode::kRandomized};
    rnd.kinetic = det.kinetic;
    rnd.best_start = rnd.start_values.size();
  }
  rnd.start_values.insert(rnd.start_values.end(), det.start_values.begin(), det.start_values.end());
  return rnd;
}

SweepReport lipschitz_sweep(const ControlProblem& problem, const std::vector<SweepPair>& pairs,
                            const SolveOptions& options) {
  SweepReport report;
  const double c = problem.constant;
  const double t = problem.horizon;
  for (std::size_t id = 0; id < pairs.size(); ++id) {
    const auto& pair = pairs[id];
    const Coupling back_coupling = pair.gamma0.transposed();
    SolveOptions opts = options;
    opts.warm_starts.clear();
    ValueResult sm = solve_value(problem, pair.m, opts);
    PathEnsemble forward = translate(sm.ensemble.paths, pair.gamma0).translated;
    opts.warm_starts = {forward};
    ValueResult sp = solve_value(problem, pair.m_prime, opts);
    // Alternate translated warm starts until neither side improves.
    for (int round = 0; round < 4; ++round) {
      const PathEnsemble back = translate(sp.ensemble.paths, back_coupling).translated;
      if (!(evaluate_cost(problem, back) < sm.value)) break;
      opts.warm_starts = {back};
      sm = solve_value(problem, pair.m, opts);
      forward = translate(sm.ensemble.paths, pair.gamma0).translated;
      opts.warm_starts = {forward};
      sp = solve_value(problem, pair.m_prime, opts);
    }
    SweepRow row;
    row.pair_id = id;
    row.w2 = cost(pair.gamma0, 2);
    row.u_m = sm.value;
    row.u_mprime = sp.value;
    row.translated_cost = evaluate_cost(problem, forward);
    row.ratio = row.w2 > 0.0 ? std::abs(row.u_m - row.u_mprime) / row.w2 : 0.0;
    row.kinetic = std::max(sm.kinetic, sp.kinetic);
    row.certificate_rhs = c * (1.0 + std::sqrt(row.kinetic)) * (row.w2 + t * row.w2);
    row.proof_rhs = c * row.w2 * (1.0 + 2.0 * t + 2.0 * std::sqrt(t * row.kinetic));
    row.translated_ok = row.translated_cost - row.u_m <= row.certificate_rhs + kQuadratureTolerance;
    row.coercive = sm.kinetic <= c * (c * t + row.u_m) + kQuadratureTolerance;
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    if (row.w2 > 0.0) report.max_certificate = std::max(report.max_certificate, row.certificate_rhs / row.w2);
    report.rows.push_back(row);
  }
  return report;
}

namespace {

DiscreteMeasure plus_minus_one() {
  return DiscreteMeasure::create_exact(1, {-1.0, 1.0}, {Rational(1, 2), Rational(1, 2)});
}

}  // namespace

ControlProblem lipschitz_instance() {
  ControlProblem p;
  p.horizon = 1.0;
  p.steps = 20;
  p.kinetic = 1.0;
  p.potential = PotentialKind::kCosine;
  p.potential_weight = 1.0;
  p.mean_field = MeanFieldKind::kIntegralSine;
  p.mean_field_weight = 0.5;
  p.terminal = TerminalKind::kW2Capped;
  p.terminal_cap = 1.0;
  p.terminal_reference = plus_minus_one();
  p.constant = 1.0;
  return p;
}

ControlProblem split_target_instance() {
  ControlProblem p;
  p.horizon = 1.0;
  p.steps = 40;
  p.kinetic = 0.05;
  p.terminal = TerminalKind::kSquaredW2Capped;
  p.terminal_cap = 1.0;
  p.terminal_reference = plus_minus_one();
  p.constant = 20.0;
  return p;
}

HypothesisCheck check_hypotheses(const ControlProblem& problem, std::size_t dim, std::size_t samples,
                                 std::uint64_t seed) {
  problem.validate(dim);
  HypothesisCheck out;
  const double c = problem.constant;
  auto random_measure = [&](detail::StreamRng& rng) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 5));
    std::vector<double> coords(n * dim);
    for (double& v : coords) v = rng.uniform(-3.0, 3.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (double& v : w) total += (v = rng.uniform(0.1, 1.0));
    for (double& v : w) v /= total;
    return DiscreteMeasure::create(dim, std::move(coords), std::move(w));
  };
  std::vector<HypothesisCheck> per(samples);
  parallel_for(samples, [&](std::size_t s) {
    detail::StreamRng rng(seed, s);
    const DiscreteMeasure m = random_measure(rng);
    const DiscreteMeasure mp = random_measure(rng);
    Point x(dim), y(dim), z(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = rng.uniform(-3.0, 3.0);
      y[k] = rng.uniform(-3.0, 3.0);
      z[k] = rng.uniform(-5.0, 5.0);
    }
    auto& h = per[s];
    const double gm = problem.terminal_value(m), gmp = problem.terminal_value(mp);
    const double w2 = wasserstein(m, mp, 2);
    h.terminal_sup = std::max(std::abs(gm), std::abs(gmp));
    if (w2 > 0.0) h.terminal_lipschitz = std::abs(gm - gmp) / w2;
    const double l = problem.running(x, z, problem.mean_field_value(m));
    const double lp = problem.running(y, z, problem.mean_field_value(mp));
    const double z2 = squared_distance(z, Point(dim, 0.0));
    h.coercivity_violation = std::max(0.0, (z2 / c - c) - l);
    h.running_lipschitz = std::abs(l - lp) / ((1.0 + std::sqrt(z2)) * (distance(x, y) + w2));
  });
  for (const auto& h : per) {
    out.terminal_sup = std::max(out.terminal_sup, h.terminal_sup);
    out.terminal_lipschitz = std::max(out.terminal_lipschitz, h.terminal_lipschitz);
    out.coercivity_violation = std::max(out.coercivity_violation, h.coercivity_violation);
    out.running_lipschitz = std::max(out.running_lipschitz, h.running_lipschitz);
  }
  return out;
}

}  // namespace wtan
