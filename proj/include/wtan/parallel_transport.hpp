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

#ifndef WTAN_PARALLEL_TRANSPORT_HPP_
#define WTAN_PARALLEL_TRANSPORT_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "wtan/path_ensemble.hpp"
#include "wtan/tangent.hpp"
#include "wtan/transport.hpp"

namespace wtan {

inline constexpr std::size_t kDefaultTransportSteps = 10;

// A flat parallel transport: trajectories of (position, velocity) on R^(2d)
// whose velocity half never changes.
struct TransportResult {
  TangentElement source;
  Coupling route;                         // law of (start, end)
  std::optional<PathEnsemble> route_paths; // set when transported along paths
  PathEnsemble ensemble;                  // positions on R^(2d), no velocity track
  TangentElement arrival;
};

// Canonical transport: glue(gamma, joint of psi), then t -> ((1-t) x + t y, z).
TransportResult transport_along_coupling(const TangentElement& psi, const Coupling& gamma,
                                         const std::vector<double>& grid = uniform_grid(kDefaultTransportSteps));

// Canonical transport along the trajectories of eta (product gluing of the
// trajectory law and psi over each starting point).
TransportResult transport_along_paths(const TangentElement& psi, const PathEnsemble& eta);

// Transports whose per-fiber gluings are vertices, plus the canonical one
// (first); deduplicated by law. The continuum of interior gluings is not
// enumerated.
std::vector<TransportResult> enumerate_transports(const TangentElement& psi, const Coupling& gamma,
                                                  std::size_t limit = 10000,
                                                  const std::vector<double>& grid = uniform_grid(kDefaultTransportSteps));

enum class Uniqueness { kUniqueDeterministicTangent, kUniqueDeterministicFlow, kPossiblyNonUnique };
const char* to_string(Uniqueness u);

Uniqueness classify_uniqueness(const TangentElement& psi, const Coupling& gamma);

// Time reversal: source and arrival swap, the route is transposed.
TransportResult reverse(const TransportResult& transport);

// True iff the canonical transports along the endpoint couplings of the two
// ensembles differ in law.
bool path_dependence_check(const TangentElement& psi, const PathEnsemble& eta1, const PathEnsemble& eta2);

struct TransportCheck {
  double time0_error = 0.0;      // joint law at t_0 vs the source's joint law
  bool velocity_constant = true; // bitwise, per trajectory
  double route_error = 0.0;      // position marginals vs the route's marginals
  double arrival_error = 0.0;    // joint law at the last time vs the arrival
  double source_moment = 0.0;    // velocity moment of the source
  double initial_moment = 0.0;   // same moment computed on the ensemble at t_0
  double final_moment = 0.0;     // ... and at the last time

  bool ok(double time0_tol = 1e-12, double route_tol = 1e-10) const {
    return time0_error <= time0_tol && velocity_constant && route_error <= route_tol &&
           arrival_error <= route_tol && initial_moment == final_moment;
  }
};

TransportCheck check_transport(const TransportResult& transport);

}  // namespace wtan

#endif  // WTAN_PARALLEL_TRANSPORT_HPP_
