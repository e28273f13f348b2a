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

#ifndef WTAN_TESTS_SUPPORT_EXACT_ORACLES_HPP_
#define WTAN_TESTS_SUPPORT_EXACT_ORACLES_HPP_

#include "support/oracles.hpp"
#include "wtan/tangent.hpp"
#include "wtan/transport.hpp"

namespace wtan::testing {

// Minimum of sum gamma_ij |x_i - y_j|^2 over brute-force vertices, in exact
// arithmetic. Both measures need exact weights.
inline Rational vertex_ot_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  Rational best = -1;
  for (const auto& v : brute_force_vertices(mu.exact_weights(), nu.exact_weights())) {
    Rational total = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t j = 0; j < nu.size(); ++j) {
        total += v[i * nu.size() + j] * exact_rational(squared_distance(mu.atom(i), nu.atom(j)));
      }
    }
    if (best < 0 || total < best) best = total;
  }
  return best;
}

// Exact value of the comparison program. The feasible set is the face of
// Pi(joint phi, joint psi) on which the base cost equals W_2^2, so the
// minimum is attained at a vertex of the full polytope lying on that face.
inline Rational exact_comparison(const TangentElement& phi, const TangentElement& psi) {
  const Rational w2 = vertex_ot_cost(phi.base(), psi.base());
  auto ja = phi.as_joint(), jb = psi.as_joint();
  std::vector<Rational> a = ja.exact_masses(), b = jb.exact_masses();
  Rational best = -1;
  for (const auto& v : brute_force_vertices(a, b)) {
    Rational base_cost = 0, vel_cost = 0;
    for (std::size_t s = 0; s < a.size(); ++s) {
      for (std::size_t t = 0; t < b.size(); ++t) {
        const Rational& g = v[s * b.size() + t];
        if (g == 0) continue;
        const auto& ea = ja.entries()[s];
        const auto& eb = jb.entries()[t];
        base_cost += g * exact_rational(squared_distance(ja.left().atom(ea.i), jb.left().atom(eb.i)));
        vel_cost += g * exact_rational(squared_distance(ja.right().atom(ea.j), jb.right().atom(eb.j)));
      }
    }
    if (base_cost == w2 && (best < 0 || vel_cost < best)) best = vel_cost;
  }
  return best;
}

}  // namespace wtan::testing

#endif  // WTAN_TESTS_SUPPORT_EXACT_ORACLES_HPP_
