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

#ifndef WTAN_MEASURE_HPP_
#define WTAN_MEASURE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wtan/rational.hpp"

namespace wtan {

using Point = std::vector<double>;

inline constexpr double kDefaultMergeTolerance = 1e-9;
inline constexpr double kWeightSumTolerance = 1e-12;

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

// Finitely supported probability measure on R^d. Atoms are stored row-major
// in a flat coordinate array. Instances built through `create` have their
// atoms merged (no two atoms within the merge tolerance); `unmerged` keeps
// the input support as is and is mostly useful to feed `merge_atoms`.
//
// Zero-weight atoms are dropped on construction. When exact weights are
// present they are authoritative and the double weights are their rounding.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  static DiscreteMeasure create(std::size_t dim, std::vector<double> coords,
                                std::vector<double> weights,
                                double merge_tolerance = kDefaultMergeTolerance);
  static DiscreteMeasure create_exact(std::size_t dim, std::vector<double> coords,
                                      std::vector<Rational> weights,
                                      double merge_tolerance = kDefaultMergeTolerance);
  static DiscreteMeasure unmerged(std::size_t dim, std::vector<double> coords,
                                  std::vector<double> weights);
  // Weight 1/N on each of the N points of a raw cloud.
  static DiscreteMeasure empirical(std::size_t dim, std::vector<double> coords,
                                   double merge_tolerance = kDefaultMergeTolerance);
  static DiscreteMeasure dirac(const Point& x);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  std::span<const double> atom(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  Point atom_point(std::size_t i) const {
    auto a = atom(i);
    return {a.begin(), a.end()};
  }
  double weight(std::size_t i) const { return weights_[i]; }

  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& weights() const { return weights_; }

  bool has_exact_weights() const { return !exact_.empty(); }
  const std::vector<Rational>& exact_weights() const { return exact_; }
  // Exact weights when present, otherwise the exact value of each double.
  std::vector<Rational> rational_weights() const;

  // Index of the first atom within `tolerance` of x.
  std::optional<std::size_t> find_atom(std::span<const double> x,
                                       double tolerance = kDefaultMergeTolerance) const;

  // Dilation x -> s x of every atom (weights untouched).
  DiscreteMeasure scaled(double s) const;

  // Atoms sorted lexicographically; stable canonical form for comparisons.
  DiscreteMeasure sorted() const;

 private:
  static void validate(std::size_t dim, const std::vector<double>& coords,
                       const std::vector<double>& weights);

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<Rational> exact_;

  friend DiscreteMeasure merge_atoms(const DiscreteMeasure& m, double tolerance);
};

// Greedy union-find merge in atom-index order: every pair within `tolerance`
// ends up in one class whose position is that of its lowest-index atom.
DiscreteMeasure merge_atoms(const DiscreteMeasure& m, double tolerance);

// Sum_i w_i |x_i|^p.
double moment(const DiscreteMeasure& m, double p);

// Total-variation style discrepancy: atoms matched within `atom_tolerance`,
// returns the largest weight mismatch (unmatched atoms count in full).
double max_weight_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b,
                              double atom_tolerance = kDefaultMergeTolerance);

bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b,
                  double weight_tolerance,
                  double atom_tolerance = kDefaultMergeTolerance);

// Concatenates two points.
Point concat(std::span<const double> a, std::span<const double> b);

}  // namespace wtan

#endif  // WTAN_MEASURE_HPP_
