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

#include "wtan/path_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "atom_index.hpp"
#include "wtan/error.hpp"

namespace wtan {

namespace {

double neumaier_sum(const std::vector<double>& values) {
  double total = 0.0, carry = 0.0;
  for (double w : values) {
    const double t = total + w;
    carry += std::abs(total) >= std::abs(w) ? (total - t) + w : (w - t) + total;
    total = t;
  }
  return total + carry;
}

// The one integration rule used everywhere: x + z (t1 - t0).
inline double euler_step(double x, double z, double t0, double t1) { return x + z * (t1 - t0); }

}  // namespace

std::vector<double> uniform_grid(std::size_t steps, double horizon) {
  if (steps == 0) fail(ErrorCode::kInvalidArgument, "time grid needs at least one step");
  std::vector<double> g(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    g[j] = horizon * static_cast<double>(j) / static_cast<double>(steps);
  }
  g[steps] = horizon;
  return g;
}

PathEnsemble PathEnsemble::create(std::size_t dim, std::vector<double> grid,
                                  std::vector<Trajectory> trajectories, double velocity_tolerance) {
  if (dim == 0) fail(ErrorCode::kInvalidArgument, "ensemble dimension must be positive");
  if (grid.size() < 2) fail(ErrorCode::kInvalidArgument, "time grid needs at least two times");
  if (grid[0] != 0.0) fail(ErrorCode::kInvalidArgument, "time grid must start at 0");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1]) || !std::isfinite(grid[j])) {
      fail(ErrorCode::kInvalidArgument, "time grid must be finite and strictly increasing");
    }
  }
  if (trajectories.empty()) fail(ErrorCode::kInvalidArgument, "ensemble has no trajectories");
  const std::size_t len = grid.size() * dim;
  const bool with_z = !trajectories[0].z.empty();
  const bool exact = trajectories[0].exact_weight.has_value();
  std::vector<double> weights;
  Rational exact_total = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    auto& tr = trajectories[k];
    const std::string where = "trajectory " + std::to_string(k);
    if (tr.x.size() != len) fail(ErrorCode::kInvalidArgument, where + " has the wrong number of positions");
    if (with_z != !tr.z.empty()) fail(ErrorCode::kInvalidArgument, "velocities must be given for all trajectories or none");
    if (with_z && tr.z.size() != len) fail(ErrorCode::kInvalidArgument, where + " has the wrong number of velocities");
    if (exact != tr.exact_weight.has_value()) fail(ErrorCode::kInvalidArgument, "exact weights must be given for all trajectories or none");
    for (double v : tr.x) {
      if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, where + " has a non-finite position");
    }
    for (double v : tr.z) {
      if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, where + " has a non-finite velocity");
    }
    if (exact) {
      if (*tr.exact_weight < 0) fail(ErrorCode::kInvalidArgument, where + " has a negative weight");
      tr.weight = to_double(*tr.exact_weight);
      exact_total += *tr.exact_weight;
    }
    if (!(tr.weight >= 0.0) || !std::isfinite(tr.weight)) {
      fail(ErrorCode::kInvalidArgument, where + " has a negative or non-finite weight");
    }
    weights.push_back(tr.weight);
  }
  if (exact && exact_total != 1) fail(ErrorCode::kInvalidArgument, "exact trajectory weights do not sum to 1");
  if (std::abs(neumaier_sum(weights) - 1.0) > kWeightSumTolerance) {
    fail(ErrorCode::kInvalidArgument, "trajectory weights do not sum to 1");
  }
  PathEnsemble e;
  e.dim_ = dim;
  e.grid_ = std::move(grid);
  e.paths_ = std::move(trajectories);
  if (with_z) {
    const double defect = e.velocity_defect();
    if (defect > velocity_tolerance) {
      fail(ErrorCode::kInvalidArgument, "positions do not follow the velocity track (defect " +
                                            std::to_string(defect) + ")");
    }
  }
  return e;
}

bool PathEnsemble::has_velocities() const { return !paths_.empty() && !paths_[0].z.empty(); }

bool PathEnsemble::has_exact_weights() const {
  return !paths_.empty() && paths_[0].exact_weight.has_value();
}

double PathEnsemble::velocity_defect() const {
  if (!has_velocities()) return 0.0;
  double worst = 0.0;
  for (const auto& tr : paths_) {
    for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
      for (std::size_t c = 0; c < dim_; ++c) {
        const double next = euler_step(tr.x[j * dim_ + c], tr.z[j * dim_ + c], grid_[j], grid_[j + 1]);
        worst = std::max(worst, std::abs(tr.x[(j + 1) * dim_ + c] - next));
      }
    }
  }
  return worst;
}

namespace {

DiscreteMeasure law_of_points(std::size_t dim, std::vector<double> coords, const PathEnsemble& e) {
  if (e.has_exact_weights()) {
    std::vector<Rational> w;
    for (const auto& tr : e.trajectories()) w.push_back(*tr.exact_weight);
    return DiscreteMeasure::create_exact(dim, std::move(coords), std::move(w));
  }
  std::vector<double> w;
  for (const auto& tr : e.trajectories()) w.push_back(tr.weight);
  return DiscreteMeasure::create(dim, std::move(coords), std::move(w));
}

Coupling law_of_pairs(std::size_t dx, std::size_t dy, const std::vector<double>& pairs,
                      const PathEnsemble& e) {
  if (e.has_exact_weights()) {
    std::vector<Rational> w;
    for (const auto& tr : e.trajectories()) w.push_back(*tr.exact_weight);
    return Coupling::from_pairs_exact(dx, dy, pairs, w);
  }
  std::vector<double> w;
  for (const auto& tr : e.trajectories()) w.push_back(tr.weight);
  return Coupling::from_pairs(dx, dy, pairs, w);
}

}  // namespace

DiscreteMeasure PathEnsemble::marginal_at_index(std::size_t j) const {
  if (j >= grid_.size()) fail(ErrorCode::kInvalidArgument, "grid index out of range");
  std::vector<double> coords;
  coords.reserve(paths_.size() * dim_);
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    auto p = position(k, j);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return law_of_points(dim_, std::move(coords), *this);
}

DiscreteMeasure PathEnsemble::marginal_at(double t) const {
  if (!(t >= 0.0) || t > grid_.back()) fail(ErrorCode::kInvalidArgument, "time outside the grid");
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - grid_.begin()) - 1;
  if (grid_[j] == t) return marginal_at_index(j);
  const double s = (t - grid_[j]) / (grid_[j + 1] - grid_[j]);
  std::vector<double> coords;
  coords.reserve(paths_.size() * dim_);
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    auto a = position(k, j);
    auto b = position(k, j + 1);
    for (std::size_t c = 0; c < dim_; ++c) coords.push_back((1.0 - s) * a[c] + s * b[c]);
  }
  return law_of_points(dim_, std::move(coords), *this);
}

Coupling PathEnsemble::endpoint_coupling() const {
  std::vector<double> pairs;
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    auto a = position(k, 0);
    auto b = position(k, steps());
    pairs.insert(pairs.end(), a.begin(), a.end());
    pairs.insert(pairs.end(), b.begin(), b.end());
  }
  return law_of_pairs(dim_, dim_, pairs, *this);
}

Coupling PathEnsemble::phase_law_at_index(std::size_t j) const {
  if (!has_velocities()) fail(ErrorCode::kMissingVelocities, "ensemble has no velocity track");
  std::vector<double> pairs;
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    auto a = position(k, j);
    auto b = velocity(k, j);
    pairs.insert(pairs.end(), a.begin(), a.end());
    pairs.insert(pairs.end(), b.begin(), b.end());
  }
  return law_of_pairs(dim_, dim_, pairs, *this);
}

double PathEnsemble::kinetic_energy() const {
  if (!has_velocities()) fail(ErrorCode::kMissingVelocities, "ensemble has no velocity track");
  double total = 0.0;
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    double path = 0.0;
    for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
      auto z = velocity(k, j);
      double z2 = 0.0;
      for (double v : z) z2 += v * v;
      path += z2 * (grid_[j + 1] - grid_[j]);
    }
    total += paths_[k].weight * path;
  }
  return total;
}

PathEnsemble from_velocity_field(const DiscreteMeasure& m0, const VelocityField& field,
                                 const std::vector<double>& grid) {
  const std::size_t d = m0.dim();
  std::vector<Trajectory> paths;
  paths.reserve(m0.size());
  for (std::size_t i = 0; i < m0.size(); ++i) {
    Trajectory tr;
    tr.weight = m0.weight(i);
    if (m0.has_exact_weights()) tr.exact_weight = m0.exact_weights()[i];
    tr.x.resize(grid.size() * d);
    tr.z.resize(grid.size() * d);
    auto a = m0.atom(i);
    std::copy(a.begin(), a.end(), tr.x.begin());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      std::span<const double> xj(tr.x.data() + j * d, d);
      const Point z = field(grid[j], xj);
      if (z.size() != d) fail(ErrorCode::kDimensionMismatch, "velocity field returned the wrong dimension");
      for (std::size_t c = 0; c < d; ++c) {
        if (!std::isfinite(z[c])) {
          fail(ErrorCode::kNonFiniteField, "velocity field is not finite at t = " + std::to_string(grid[j]));
        }
        tr.z[j * d + c] = z[c];
        if (j + 1 < grid.size()) tr.x[(j + 1) * d + c] = euler_step(tr.x[j * d + c], z[c], grid[j], grid[j + 1]);
      }
    }
    paths.push_back(std::move(tr));
  }
  return PathEnsemble::create(d, grid, std::move(paths));
}

std::optional<Point> EulerianField::value(std::size_t j, std::span<const double> x) const {
  if (j >= slices.size()) return std::nullopt;
  const auto& s = slices[j];
  auto i = s.positions.find_atom(x);
  if (!i) return std::nullopt;
  const std::size_t d = s.positions.dim();
  return Point(s.velocity.begin() + *i * d, s.velocity.begin() + (*i + 1) * d);
}

EulerianField eulerian_field(const PathEnsemble& eta) {
  if (!eta.has_velocities()) fail(ErrorCode::kMissingVelocities, "ensemble has no velocity track");
  const std::size_t d = eta.dim();
  EulerianField f;
  f.grid = eta.grid();
  for (std::size_t j = 0; j < eta.grid().size(); ++j) {
    detail::AtomIndex atoms(d, kDefaultMergeTolerance);
    std::vector<double> mass;
    std::vector<double> momentum;
    std::vector<double> first;   // velocity of the first visitor
    std::vector<char> uniform;  // every visitor had that same velocity
    for (std::size_t k = 0; k < eta.size(); ++k) {
      const std::size_t i = atoms.find_or_add(eta.position(k, j));
      auto z = eta.velocity(k, j);
      if (i == mass.size()) {
        mass.push_back(0.0);
        momentum.resize(momentum.size() + d, 0.0);
        first.insert(first.end(), z.begin(), z.end());
        uniform.push_back(1);
      }
      const double w = eta.trajectory(k).weight;
      mass[i] += w;
      for (std::size_t c = 0; c < d; ++c) {
        momentum[i * d + c] += w * z[c];
        if (z[c] != first[i * d + c]) uniform[i] = 0;
      }
    }
    FieldSlice slice;
    slice.velocity.resize(momentum.size());
    for (std::size_t i = 0; i < mass.size(); ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        // Keep shared velocities bit for bit instead of re-averaging them.
        if (uniform[i]) {
          slice.velocity[i * d + c] = first[i * d + c];
        } else {
          slice.velocity[i * d + c] = mass[i] > 0.0 ? momentum[i * d + c] / mass[i] : 0.0;
        }
      }
    }
    slice.positions = DiscreteMeasure::unmerged(d, atoms.coords(), mass);
    f.slices.push_back(std::move(slice));
  }
  return f;
}

namespace {

struct GluedPair {
  std::size_t j;  // atom of gamma0.right()
  std::size_t k;  // trajectory
  Rational exact;
  double mass;
};

struct Fibers {
  std::vector<std::vector<std::size_t>> trajectories;  // per gamma0.left() atom
  std::vector<std::vector<std::size_t>> entries;       // gamma0 entries per left atom
  std::vector<Rational> row;                           // gamma0 row sums
  std::vector<Rational> traj_row;                      // trajectory mass per left atom
};

Fibers split_fibers(const PathEnsemble& eta, const Coupling& gamma0) {
  if (!eta.has_velocities()) fail(ErrorCode::kMissingVelocities, "translation needs velocity tracks");
  const auto& base = gamma0.left();
  if (base.dim() != eta.dim() || gamma0.right().dim() != eta.dim()) {
    fail(ErrorCode::kDimensionMismatch, "coupling and ensemble dimensions differ");
  }
  const DiscreteMeasure m0 = eta.marginal_at_index(0);
  if (m0.size() != base.size()) {
    fail(ErrorCode::kMarginalMismatch, "coupling's first marginal is not the ensemble's initial law");
  }
  Fibers f;
  f.trajectories.resize(base.size());
  f.entries.resize(base.size());
  f.row.assign(base.size(), 0);
  f.traj_row.assign(base.size(), 0);
  std::vector<double> traj_mass(base.size(), 0.0);
  for (std::size_t k = 0; k < eta.size(); ++k) {
    auto i = base.find_atom(eta.position(k, 0));
    if (!i) fail(ErrorCode::kMarginalMismatch, "trajectory " + std::to_string(k) + " starts off the coupling's support");
    f.trajectories[*i].push_back(k);
    const auto& tr = eta.trajectory(k);
    f.traj_row[*i] += tr.exact_weight ? *tr.exact_weight : exact_rational(tr.weight);
    traj_mass[*i] += tr.weight;
  }
  const auto masses = gamma0.rational_masses();
  for (std::size_t t = 0; t < gamma0.entries().size(); ++t) {
    f.entries[gamma0.entries()[t].i].push_back(t);
    f.row[gamma0.entries()[t].i] += masses[t];
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (std::abs(traj_mass[i] - base.weight(i)) > kMarginalTolerance) {
      fail(ErrorCode::kMarginalMismatch, "coupling's first marginal is not the ensemble's initial law");
    }
  }
  return f;
}

Translation build_translation(const PathEnsemble& eta, const Coupling& gamma0,
                              const std::vector<GluedPair>& pairs, bool exact) {
  const std::size_t d = eta.dim();
  const auto& grid = eta.grid();
  const double tolerance = eta.velocity_defect();
  std::vector<Trajectory> both, ys;
  both.reserve(pairs.size());
  ys.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto& src = eta.trajectory(p.k);
    Trajectory y;
    y.weight = p.mass;
    if (exact) y.exact_weight = p.exact;
    y.label = src.label ? src.label : std::optional<std::int64_t>(static_cast<std::int64_t>(p.k));
    y.z = src.z;
    y.x.resize(src.x.size());
    auto y0 = gamma0.right().atom(p.j);
    std::copy(y0.begin(), y0.end(), y.x.begin());
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      for (std::size_t c = 0; c < d; ++c) {
        y.x[(j + 1) * d + c] = euler_step(y.x[j * d + c], src.z[j * d + c], grid[j], grid[j + 1]);
      }
    }
    Trajectory xy;
    xy.weight = y.weight;
    xy.exact_weight = y.exact_weight;
    xy.label = y.label;
    xy.x.reserve(2 * src.x.size());
    xy.z.reserve(2 * src.z.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      xy.x.insert(xy.x.end(), src.x.begin() + j * d, src.x.begin() + (j + 1) * d);
      xy.x.insert(xy.x.end(), y.x.begin() + j * d, y.x.begin() + (j + 1) * d);
      xy.z.insert(xy.z.end(), src.z.begin() + j * d, src.z.begin() + (j + 1) * d);
      xy.z.insert(xy.z.end(), src.z.begin() + j * d, src.z.begin() + (j + 1) * d);
    }
    both.push_back(std::move(xy));
    ys.push_back(std::move(y));
  }
  Translation out;
  out.coupling_curve = PathEnsemble::create(2 * d, grid, std::move(both), tolerance);
  out.translated = PathEnsemble::create(d, grid, std::move(ys));
  return out;
}

bool all_exact(const PathEnsemble& eta, const Coupling& gamma0) {
  return eta.has_exact_weights() && gamma0.has_exact_masses();
}

std::vector<GluedPair> product_pairs(const PathEnsemble& eta, const Coupling& gamma0, const Fibers& f) {
  const auto masses = gamma0.rational_masses();
  std::vector<GluedPair> pairs;
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    for (std::size_t t : f.entries[i]) {
      const auto& e = gamma0.entries()[t];
      for (std::size_t k : f.trajectories[i]) {
        const auto& tr = eta.trajectory(k);
        GluedPair p{e.j, k, 0, 0.0};
        const Rational wk = tr.exact_weight ? *tr.exact_weight : exact_rational(tr.weight);
        p.exact = masses[t] * wk / f.traj_row[i];
        p.mass = e.mass * (tr.weight / to_double(f.traj_row[i]));
        pairs.push_back(p);
      }
    }
  }
  return pairs;
}

}  // namespace

Translation translate(const PathEnsemble& eta, const Coupling& gamma0) {
  const Fibers f = split_fibers(eta, gamma0);
  const bool exact = all_exact(eta, gamma0);
  auto pairs = product_pairs(eta, gamma0, f);
  if (exact) {
    for (auto& p : pairs) p.mass = to_double(p.exact);
  }
  return build_translation(eta, gamma0, pairs, exact);
}

std::vector<Translation> enumerate_translations(const PathEnsemble& eta, const Coupling& gamma0,
                                                std::size_t limit) {
  const Fibers f = split_fibers(eta, gamma0);
  const bool exact = all_exact(eta, gamma0);
  const auto masses = gamma0.rational_masses();

  // Per base atom: vertices of the polytope of couplings between the
  // conditional target law and the conditional trajectory law.
  struct FiberVertex {
    std::vector<GluedPair> pairs;
  };
  std::vector<std::vector<FiberVertex>> options(f.entries.size());
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    std::vector<double> ycoords, kcoords;
    std::vector<Rational> yw, kw;
    for (std::size_t s = 0; s < f.entries[i].size(); ++s) {
      ycoords.push_back(static_cast<double>(s));
      yw.push_back(masses[f.entries[i][s]] / f.row[i]);
    }
    for (std::size_t s = 0; s < f.trajectories[i].size(); ++s) {
      const auto& tr = eta.trajectory(f.trajectories[i][s]);
      kcoords.push_back(static_cast<double>(s));
      kw.push_back((tr.exact_weight ? *tr.exact_weight : exact_rational(tr.weight)) / f.traj_row[i]);
    }
    auto ym = DiscreteMeasure::create_exact(1, ycoords, yw, 0.0);
    auto km = DiscreteMeasure::create_exact(1, kcoords, kw, 0.0);
    for (const auto& v : enumerate_vertex_couplings(ym, km, limit)) {
      FiberVertex fv;
      for (std::size_t t = 0; t < v.entries().size(); ++t) {
        const auto& e = v.entries()[t];
        const std::size_t entry = f.entries[i][e.i];
        GluedPair p{gamma0.entries()[entry].j, f.trajectories[i][e.j], v.exact_masses()[t] * f.row[i], 0.0};
        p.mass = to_double(p.exact);
        fv.pairs.push_back(std::move(p));
      }
      options[i].push_back(std::move(fv));
    }
  }

  std::vector<Translation> out;
  auto add = [&](const std::vector<GluedPair>& pairs) {
    Translation t = build_translation(eta, gamma0, pairs, exact);
    for (const auto& seen : out) {
      if (same_law(seen.coupling_curve, t.coupling_curve, exact ? 0.0 : 1e-12)) return;
    }
    out.push_back(std::move(t));
  };

  auto canonical = product_pairs(eta, gamma0, f);
  if (exact) {
    for (auto& p : canonical) p.mass = to_double(p.exact);
  }
  add(canonical);

  std::vector<std::size_t> choice(options.size(), 0);
  for (;;) {
    if (out.size() >= limit) break;
    std::vector<GluedPair> pairs;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const auto& fv = options[i][choice[i]].pairs;
      pairs.insert(pairs.end(), fv.begin(), fv.end());
    }
    add(pairs);
    std::size_t i = 0;
    while (i < options.size() && ++choice[i] == options[i].size()) choice[i++] = 0;
    if (i == options.size()) break;
  }
  return out;
}

double max_difference_drift(const PathEnsemble& coupling_curve) {
  const std::size_t d = coupling_curve.dim() / 2;
  double worst = 0.0;
  for (std::size_t k = 0; k < coupling_curve.size(); ++k) {
    auto p0 = coupling_curve.position(k, 0);
    for (std::size_t j = 1; j < coupling_curve.grid().size(); ++j) {
      auto pj = coupling_curve.position(k, j);
      for (std::size_t c = 0; c < d; ++c) {
        worst = std::max(worst, std::abs((pj[c] - pj[d + c]) - (p0[c] - p0[d + c])));
      }
    }
  }
  return worst;
}

namespace {

struct LawAtom {
  std::vector<double> path;  // positions then velocities
  double weight;
  Rational exact;
};

std::vector<LawAtom> canonical_law(const PathEnsemble& e, double tolerance) {
  std::vector<LawAtom> atoms;
  for (const auto& tr : e.trajectories()) {
    LawAtom a{tr.x, tr.weight, tr.exact_weight ? *tr.exact_weight : exact_rational(tr.weight)};
    a.path.insert(a.path.end(), tr.z.begin(), tr.z.end());
    atoms.push_back(std::move(a));
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const LawAtom& a, const LawAtom& b) { return a.path < b.path; });
  std::vector<LawAtom> merged;
  for (auto& a : atoms) {
    if (!merged.empty()) {
      auto& last = merged.back();
      bool same = last.path.size() == a.path.size();
      for (std::size_t c = 0; same && c < a.path.size(); ++c) same = std::abs(last.path[c] - a.path[c]) <= tolerance;
      if (same) {
        last.weight += a.weight;
        last.exact += a.exact;
        continue;
      }
    }
    merged.push_back(std::move(a));
  }
  // Zero-mass trajectories do not change the law.
  std::erase_if(merged, [](const LawAtom& a) { return a.exact == 0; });
  return merged;
}

}  // namespace

bool same_law(const PathEnsemble& a, const PathEnsemble& b, double weight_tolerance,
              double position_tolerance) {
  if (a.dim() != b.dim() || a.grid() != b.grid() || a.has_velocities() != b.has_velocities()) return false;
  const auto la = canonical_law(a, position_tolerance);
  const auto lb = canonical_law(b, position_tolerance);
  if (la.size() != lb.size()) return false;
  const bool exact = weight_tolerance == 0.0 && a.has_exact_weights() && b.has_exact_weights();
  for (std::size_t s = 0; s < la.size(); ++s) {
    for (std::size_t c = 0; c < la[s].path.size(); ++c) {
      if (std::abs(la[s].path[c] - lb[s].path[c]) > position_tolerance) return false;
    }
    if (exact ? la[s].exact != lb[s].exact : std::abs(la[s].weight - lb[s].weight) > weight_tolerance) {
      return false;
    }
  }
  return true;
}

MergeSplitInstance merge_split_instance(std::size_t steps) {
  if (steps == 0 || steps % 4 != 0) fail(ErrorCode::kInvalidArgument, "steps must be a positive multiple of 4");
  const auto grid = uniform_grid(steps, 2.0);
  auto lift = [&](bool crossing) {
    std::vector<Trajectory> paths;
    for (int side : {-1, 1}) {
      Trajectory tr;
      tr.exact_weight = Rational(1, 2);
      tr.weight = 0.5;
      tr.label = side < 0 ? 0 : 1;
      tr.x.resize(grid.size());
      tr.z.resize(grid.size());
      tr.x[0] = 0.5 * side;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        // Index of the interval [t_j, t_j+1), the last point repeats the last one.
        const std::size_t k = std::min(j, steps - 1);
        double z = 0.0;
        if (k < steps / 4) {
          z = -side;
        } else if (k >= 3 * steps / 4) {
          z = crossing ? -side : side;
        }
        tr.z[j] = z;
        if (j + 1 < grid.size()) tr.x[j + 1] = euler_step(tr.x[j], z, grid[j], grid[j + 1]);
      }
      paths.push_back(std::move(tr));
    }
    return PathEnsemble::create(1, grid, std::move(paths));
  };
  return {lift(false), lift(true),
          Coupling::from_pairs_exact(1, 1, {-0.5, -1.0, 0.5, 1.0}, {Rational(1, 2), Rational(1, 2)})};
}

}  // namespace wtan
