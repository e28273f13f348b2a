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

#ifndef WTAN_TANGENT_HPP_
#define WTAN_TANGENT_HPP_

#include <cstddef>
#include <vector>

#include "wtan/measure.hpp"
#include "wtan/transport.hpp"

namespace wtan {

// A velocity distribution psi_x over every atom x of a base measure mu.
// Equivalently the joint law mu(dx) psi_x(dz) on base x velocity.
class TangentElement {
 public:
  TangentElement() = default;

  // One fiber per base atom, in base order. p > 1 is the exponent of the
  // ambient space; velocities are integrated with p' = p / (p - 1).
  static TangentElement create(DiscreteMeasure base, std::vector<DiscreteMeasure> fibers,
                               double p = 2.0);
  // x_i -> delta_{v_i}; `velocities` is row-major, one row per base atom.
  static TangentElement deterministic(DiscreteMeasure base, const std::vector<double>& velocities,
                                      double p = 2.0);
  // x -> delta_0.
  static TangentElement zero(DiscreteMeasure base, double p = 2.0);
  static TangentElement from_joint(const Coupling& joint, double p = 2.0);

  const DiscreteMeasure& base() const { return base_; }
  const std::vector<DiscreteMeasure>& fibers() const { return fibers_; }
  const DiscreteMeasure& fiber(std::size_t i) const { return fibers_[i]; }
  double p() const { return p_; }
  double dual_exponent() const { return p_ / (p_ - 1.0); }
  std::size_t dim() const { return base_.dim(); }

  bool is_deterministic() const;
  // sum_i w_i int |z|^p' psi_i(dz).
  double velocity_moment() const;
  Coupling as_joint() const;

 private:
  DiscreteMeasure base_;
  std::vector<DiscreteMeasure> fibers_;
  double p_ = 2.0;
};

// Index map from b's atoms to a's atoms; BaseMismatch unless the merged
// measures agree (atoms within the merge tolerance, weights within 1e-10).
std::vector<std::size_t> match_bases(const DiscreteMeasure& a, const DiscreteMeasure& b);

// d_mu: fiberwise W_2, (sum_i w_i W_2^2(psi_i, psi'_i))^(1/2).
double tangent_distance(const TangentElement& a, const TangentElement& b);

// d^2(a, 0) + d^2(0, b) - d^2(a, b). No 1/2 factor.
double inner_product(const TangentElement& a, const TangentElement& b);

// W_2 between the joint laws on R^(2d).
double sheaf_distance(const TangentElement& phi, const TangentElement& psi);

struct ComparisonResult {
  double value = 0.0;        // the optimal sum of gamma |z - z'|^2
  double w2_squared = 0.0;   // W_2^2 of the two bases
  std::size_t variables = 0; // size of the restricted program
};

inline constexpr std::size_t kMaxComparisonVariables = 1000000;

// Infimum of sum gamma(x, y, z, z') |z - z'|^2 over laws whose (x, z) and
// (y, z') marginals are the two joint laws and whose (x, y) marginal is an
// optimal coupling of the bases. Optimal couplings are exactly the couplings
// carried by the zero set of the reduced cost c - u - v of any optimal dual
// pair, so the program is a sparse transport problem on that set.
ComparisonResult compare_by_transport(const TangentElement& phi, const TangentElement& psi);
// Same program, maximized.
ComparisonResult compare_by_transport_sup(const TangentElement& phi, const TangentElement& psi);

}  // namespace wtan

#endif  // WTAN_TANGENT_HPP_
