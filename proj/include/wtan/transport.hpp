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

#ifndef WTAN_TRANSPORT_HPP_
#define WTAN_TRANSPORT_HPP_

#include <cstddef>
#include <vector>

#include "wtan/measure.hpp"
#include "wtan/rational.hpp"

namespace wtan {

inline constexpr double kMarginalTolerance = 1e-10;

struct CouplingEntry {
  std::size_t i = 0;  // index into left()
  std::size_t j = 0;  // index into right()
  double mass = 0.0;
};

// Finitely supported measure on R^dx x R^dy with tracked marginals, stored as
// a sparse list of positive cells. Exact masses ride along when the coupling
// comes from an exact construction (vertex enumeration, exact gluing).
class Coupling {
 public:
  Coupling() = default;

  // Validates marginals within kMarginalTolerance; merges duplicate cells.
  static Coupling create(DiscreteMeasure left, DiscreteMeasure right,
                         std::vector<CouplingEntry> entries);
  static Coupling create_exact(DiscreteMeasure left, DiscreteMeasure right,
                               std::vector<CouplingEntry> entries,
                               std::vector<Rational> exact_masses);

  // Builds the coupling of raw (x, y, mass) triples; marginals are derived
  // and merged with `merge_tolerance`. `pairs` holds x (dx values) followed
  // by y (dy values) per triple.
  static Coupling from_pairs(std::size_t dx, std::size_t dy, const std::vector<double>& pairs,
                             const std::vector<double>& masses,
                             double merge_tolerance = kDefaultMergeTolerance);
  static Coupling from_pairs_exact(std::size_t dx, std::size_t dy,
                                   const std::vector<double>& pairs,
                                   const std::vector<Rational>& masses,
                                   double merge_tolerance = kDefaultMergeTolerance);

  static Coupling identity(const DiscreteMeasure& m);
  static Coupling product(const DiscreteMeasure& a, const DiscreteMeasure& b);

  const DiscreteMeasure& left() const { return left_; }
  const DiscreteMeasure& right() const { return right_; }
  const std::vector<CouplingEntry>& entries() const { return entries_; }
  bool has_exact_masses() const { return !exact_.empty(); }
  const std::vector<Rational>& exact_masses() const { return exact_; }
  // Exact masses when present, otherwise the exact value of each double.
  std::vector<Rational> rational_masses() const;

  Coupling transposed() const;
  // The coupling as a measure on R^(dx+dy).
  DiscreteMeasure as_measure() const;
  // Conditional law of y given the i-th left atom.
  DiscreteMeasure conditional(std::size_t i) const;
  // True when every left atom has exactly one successor.
  bool is_graph() const;

 private:
  DiscreteMeasure left_;
  DiscreteMeasure right_;
  std::vector<CouplingEntry> entries_;
  std::vector<Rational> exact_;
};

// (sum_ij pi_ij |x_i - y_j|^p)^(1/p).
double cost(const Coupling& gamma, double p);

struct OtResult {
  Coupling coupling;
  double distance = 0.0;   // W_p
  double objective = 0.0;  // W_p^p
  // Feasible dual potentials: u_i + v_j <= |x_i - y_j|^p.
  std::vector<double> u;
  std::vector<double> v;
  double duality_gap = 0.0;
};

inline constexpr std::size_t kMaxOtSupport = 2000;

// Exact discrete OT by network simplex, certified by LP duality
// (gap <= 1e-9 (1 + objective), else SolverFailure).
OtResult solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

struct GluedCell {
  std::size_t i = 0;  // shared base atom
  std::size_t j = 0;  // atom of the first coupling's right marginal
  std::size_t k = 0;  // atom of the second coupling's right marginal
  double mass = 0.0;
};

// Measure on triples (x, y, z) whose (x, y) and (x, z) marginals are given.
struct Gluing {
  DiscreteMeasure base;
  DiscreteMeasure first;
  DiscreteMeasure second;
  std::vector<GluedCell> cells;
  std::vector<Rational> exact_masses;  // empty unless both inputs were exact

  Coupling project_first() const;
  Coupling project_second() const;
};

// Conditional-product gluing: mass(i, j, k) = xy(i, j) xz(i, k) / w_i.
Gluing glue(const Coupling& xy, const Coupling& xz);

inline constexpr std::size_t kMaxVertexCells = 20;

// All extreme points of the transportation polytope Pi(mu, nu) in exact
// arithmetic (their supports are spanning forests). At most `limit` are
// returned; deterministic order (lexicographic over chosen tree cells).
std::vector<Coupling> enumerate_vertex_couplings(const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu,
                                                 std::size_t limit = 100000);

struct SinkhornOptions {
  std::size_t max_iterations = 100000;  // total over all epsilon stages
  double tolerance = 1e-8;               // L1 marginal error before rounding
};

// Log-domain entropic OT followed by rounding onto Pi(mu, nu).
Coupling sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, double epsilon,
                  const SinkhornOptions& options = {});

// Pairwise cost matrix |x_i - y_j|^p, row-major.
std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

}  // namespace wtan

#endif  // WTAN_TRANSPORT_HPP_
