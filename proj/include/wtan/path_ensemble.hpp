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

#ifndef WTAN_PATH_ENSEMBLE_HPP_
#define WTAN_PATH_ENSEMBLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wtan/measure.hpp"
#include "wtan/transport.hpp"

namespace wtan {

struct Trajectory {
  double weight = 0.0;
  std::optional<Rational> exact_weight;
  std::vector<double> x;  // (M + 1) x d positions, row-major
  std::vector<double> z;  // empty, or (M + 1) x d velocities
  std::optional<std::int64_t> label;
};

// Weighted, time-sampled trajectories. When velocities are present the
// positions obey the left-endpoint rule x[j+1] = x[j] + z[j] (t[j+1] - t[j])
// bit for bit; ensembles built by this library satisfy it by construction.
class PathEnsemble {
 public:
  PathEnsemble() = default;

  // Grid starts at 0 and increases strictly. `velocity_tolerance` relaxes the
  // left-endpoint check for ensembles read from files (0 means bitwise).
  static PathEnsemble create(std::size_t dim, std::vector<double> grid,
                             std::vector<Trajectory> trajectories,
                             double velocity_tolerance = 0.0);

  std::size_t dim() const { return dim_; }
  const std::vector<double>& grid() const { return grid_; }
  std::size_t steps() const { return grid_.size() - 1; }
  std::size_t size() const { return paths_.size(); }
  const Trajectory& trajectory(std::size_t k) const { return paths_[k]; }
  const std::vector<Trajectory>& trajectories() const { return paths_; }
  bool has_velocities() const;
  bool has_exact_weights() const;

  std::span<const double> position(std::size_t k, std::size_t j) const {
    return {paths_[k].x.data() + j * dim_, dim_};
  }
  std::span<const double> velocity(std::size_t k, std::size_t j) const {
    return {paths_[k].z.data() + j * dim_, dim_};
  }

  // Position law at grid index j.
  DiscreteMeasure marginal_at_index(std::size_t j) const;
  // Position law at time t, interpolating linearly inside a grid cell.
  DiscreteMeasure marginal_at(double t) const;
  // Law of (x(t_0), x(t_M)).
  Coupling endpoint_coupling() const;
  // Law of (x(t_j), z(t_j)).
  Coupling phase_law_at_index(std::size_t j) const;
  // sum_k w_k sum_{j < M} |z_k(t_j)|^2 (t_{j+1} - t_j).
  double kinetic_energy() const;

  // Largest violation of the left-endpoint rule (0 when bitwise exact).
  double velocity_defect() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> grid_;
  std::vector<Trajectory> paths_;
};

// t_j = j / M.
std::vector<double> uniform_grid(std::size_t steps, double horizon = 1.0);

using VelocityField = std::function<Point(double t, std::span<const double> x)>;

// One trajectory per atom of m0 integrated with left-endpoint Euler; z is
// stored at every grid time, including the last.
PathEnsemble from_velocity_field(const DiscreteMeasure& m0, const VelocityField& field,
                                 const std::vector<double>& grid);

// Weight-averaged velocity over merged position atoms at one grid time.
struct FieldSlice {
  DiscreteMeasure positions;
  std::vector<double> velocity;  // row-major, one row per atom of `positions`
};

struct EulerianField {
  std::vector<double> grid;
  std::vector<FieldSlice> slices;
  // Field value at grid index j and position x, if x is an atom there.
  std::optional<Point> value(std::size_t j, std::span<const double> x) const;
};

EulerianField eulerian_field(const PathEnsemble& eta);

struct Translation {
  PathEnsemble coupling_curve;  // (X, Y) on R^(2d)
  PathEnsemble translated;      // Y alone
};

// Canonical translation: gamma0 glued with the trajectory law over each
// starting point as a product, and every Y driven by its partner's velocity
// samples on the same grid.
Translation translate(const PathEnsemble& eta, const Coupling& gamma0);

// Translations whose starting gluings are, fiber by fiber, vertices of the
// gluing polytope, together with the canonical product; deduplicated by the
// law of the (X, Y) pair. Needs exact weights.
std::vector<Translation> enumerate_translations(const PathEnsemble& eta, const Coupling& gamma0,
                                                std::size_t limit = 10000);

// Two lifts of m_s = (delta_f(s) + delta_-f(s)) / 2 on s in [0, 2] with
// f(s) = max(1/2 - s, 0, s - 3/2): the atoms at -1/2 and 1/2 meet at
// s = 1/2, move together, and separate at s = 3/2. In `bounce` each particle
// returns to its own side, in `cross` it passes to the other. Both lifts have
// the same marginals, yet translating them along the deterministic coupling
// x -> 2x gives different curves: a deterministic initial coupling does not
// make the translation unique when the velocity field is not smooth.
struct MergeSplitInstance {
  PathEnsemble bounce;
  PathEnsemble cross;
  Coupling gamma0;
};
// `steps` is a positive multiple of 4.
MergeSplitInstance merge_split_instance(std::size_t steps = 8);

// Checks used by tests and reports.
// max_j |(X_j - Y_j) - (X_0 - Y_0)| over all pairs of a coupling curve.
double max_difference_drift(const PathEnsemble& coupling_curve);

// Two ensembles have the same law: same grid, and the multisets of
// (label-free) trajectories agree with weights within `weight_tolerance`.
bool same_law(const PathEnsemble& a, const PathEnsemble& b, double weight_tolerance,
              double position_tolerance = 1e-12);

}  // namespace wtan

#endif  // WTAN_PATH_ENSEMBLE_HPP_
