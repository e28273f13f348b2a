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

#include "wtan/parallel_transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "wtan/error.hpp"
#include "wtan/parallel.hpp"

namespace wtan {

namespace {

// One trajectory of a transport before it becomes a PathEnsemble row.
struct Branch {
  std::vector<double> path;  // (M + 1) x d positions
  Point z;
  double mass = 0.0;
  Rational exact = 0;
};

std::vector<double> interpolate(std::span<const double> x, std::span<const double> y,
                                const std::vector<double>& grid) {
  std::vector<double> path;
  path.reserve(grid.size() * x.size());
  for (double t : grid) {
    for (std::size_t c = 0; c < x.size(); ++c) path.push_back((1.0 - t) * x[c] + t * y[c]);
  }
  return path;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0) {
    fail(ErrorCode::kGridMismatch, "transport grids run from 0 to 1 with at least two samples");
  }
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) fail(ErrorCode::kGridMismatch, "transport grid must increase");
  }
}

TransportResult assemble(const TangentElement& psi, Coupling route, std::optional<PathEnsemble> route_paths,
                         const std::vector<double>& grid, const std::vector<Branch>& branches, bool exact) {
  const std::size_t d = psi.dim();
  const std::size_t last = grid.size() - 1;
  std::vector<Trajectory> trajs;
  std::vector<double> arrival_pairs;
  std::vector<double> arrival_masses;
  std::vector<Rational> arrival_exact;
  for (const auto& b : branches) {
    if (exact ? b.exact == 0 : b.mass == 0.0) continue;
    Trajectory tr;
    tr.weight = b.mass;
    if (exact) tr.exact_weight = b.exact;
    tr.x.reserve(grid.size() * 2 * d);
    for (std::size_t j = 0; j <= last; ++j) {
      tr.x.insert(tr.x.end(), b.path.begin() + j * d, b.path.begin() + (j + 1) * d);
      tr.x.insert(tr.x.end(), b.z.begin(), b.z.end());
    }
    arrival_pairs.insert(arrival_pairs.end(), b.path.begin() + last * d, b.path.end());
    arrival_pairs.insert(arrival_pairs.end(), b.z.begin(), b.z.end());
    arrival_masses.push_back(b.mass);
    if (exact) arrival_exact.push_back(b.exact);
    trajs.push_back(std::move(tr));
  }
  const Coupling arrival_joint = exact ? Coupling::from_pairs_exact(d, d, arrival_pairs, arrival_exact)
                                       : Coupling::from_pairs(d, d, arrival_pairs, arrival_masses);
  return TransportResult{psi, std::move(route), std::move(route_paths),
                         PathEnsemble::create(2 * d, grid, std::move(trajs)),
                         TangentElement::from_joint(arrival_joint, psi.p())};
}

Branch coupling_branch(const Coupling& gamma, std::size_t i, std::size_t j, std::span<const double> z,
                       const std::vector<double>& grid) {
  Branch b;
  b.path = interpolate(gamma.left().atom(i), gamma.right().atom(j), grid);
  b.z.assign(z.begin(), z.end());
  return b;
}

bool exact_tangent(const TangentElement& psi) {
  if (!psi.base().has_exact_weights()) return false;
  return std::all_of(psi.fibers().begin(), psi.fibers().end(),
                     [](const DiscreteMeasure& f) { return f.has_exact_weights(); });
}

bool is_uniform(const std::vector<double>& grid) {
  const double horizon = grid.back();
  return grid == uniform_grid(grid.size() - 1, horizon);
}

std::vector<double> reversed_grid(const std::vector<double>& grid) {
  if (is_uniform(grid)) return grid;
  const double horizon = grid.back();
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = horizon - grid[grid.size() - 1 - j];
  out.front() = 0.0;
  out.back() = horizon;
  return out;
}

// Same trajectories run backwards; velocity tracks are dropped since the
// left-endpoint rule does not survive reversal bit for bit.
PathEnsemble reversed(const PathEnsemble& e) {
  const std::size_t d = e.dim();
  const std::size_t rows = e.grid().size();
  std::vector<Trajectory> trajs;
  trajs.reserve(e.size());
  for (const auto& tr : e.trajectories()) {
    Trajectory r;
    r.weight = tr.weight;
    r.exact_weight = tr.exact_weight;
    r.label = tr.label;
    r.x.reserve(tr.x.size());
    for (std::size_t j = rows; j-- > 0;) r.x.insert(r.x.end(), tr.x.begin() + j * d, tr.x.begin() + (j + 1) * d);
    trajs.push_back(std::move(r));
  }
  return PathEnsemble::create(d, reversed_grid(e.grid()), std::move(trajs));
}

DiscreteMeasure first_half(const PathEnsemble& e, std::size_t j) {
  const std::size_t d = e.dim() / 2;
  std::vector<double> coords;
  std::vector<double> w;
  for (std::size_t k = 0; k < e.size(); ++k) {
    auto p = e.position(k, j);
    coords.insert(coords.end(), p.begin(), p.begin() + d);
    w.push_back(e.trajectory(k).weight);
  }
  return DiscreteMeasure::create(d, std::move(coords), std::move(w));
}

DiscreteMeasure interpolated_route(const Coupling& route, double t) {
  std::vector<double> coords;
  std::vector<double> w;
  for (const auto& e : route.entries()) {
    const auto p = interpolate(route.left().atom(e.i), route.right().atom(e.j), {t});
    coords.insert(coords.end(), p.begin(), p.end());
    w.push_back(e.mass);
  }
  return DiscreteMeasure::create(route.left().dim(), std::move(coords), std::move(w));
}

double law_error(const DiscreteMeasure& a, const DiscreteMeasure& b, double atom_tolerance) {
  return std::max(max_weight_discrepancy(a, b, atom_tolerance), max_weight_discrepancy(b, a, atom_tolerance));
}

double ensemble_moment(const PathEnsemble& e, std::size_t j, double q) {
  const std::size_t d = e.dim() / 2;
  double total = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    auto p = e.position(k, j);
    double r2 = 0.0;
    for (std::size_t c = d; c < 2 * d; ++c) r2 += p[c] * p[c];
    total += e.trajectory(k).weight * (q == 2.0 ? r2 : std::pow(std::sqrt(r2), q));
  }
  return total;
}

}  // namespace

TransportResult transport_along_coupling(const TangentElement& psi, const Coupling& gamma,
                                         const std::vector<double>& grid) {
  check_grid(grid);
  const Coupling joint = psi.as_joint();
  const Gluing g = glue(gamma, joint);
  const bool exact = !g.exact_masses.empty();
  std::vector<Branch> branches;
  branches.reserve(g.cells.size());
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const auto& cell = g.cells[c];
    Branch b = coupling_branch(gamma, cell.i, cell.j, g.second.atom(cell.k), grid);
    b.mass = cell.mass;
    if (exact) b.exact = g.exact_masses[c];
    branches.push_back(std::move(b));
  }
  return assemble(psi, gamma, std::nullopt, grid, branches, exact);
}

TransportResult transport_along_paths(const TangentElement& psi, const PathEnsemble& eta) {
  if (eta.dim() != psi.dim()) fail(ErrorCode::kDimensionMismatch, "ensemble and tangent dimensions differ");
  const auto& base = psi.base();
  // Trajectories grouped by the base atom they start from.
  std::vector<std::vector<std::size_t>> starts(base.size());
  std::vector<double> row(base.size(), 0.0);
  for (std::size_t k = 0; k < eta.size(); ++k) {
    auto found = base.find_atom(eta.position(k, 0));
    if (!found) fail(ErrorCode::kMarginalMismatch, "trajectory " + std::to_string(k) + " starts off the base");
    starts[*found].push_back(k);
    row[*found] += eta.trajectory(k).weight;
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (std::abs(row[i] - base.weight(i)) > kMarginalTolerance) {
      fail(ErrorCode::kMarginalMismatch, "time-0 marginal differs from the base at atom " + std::to_string(i));
    }
  }
  const bool exact = exact_tangent(psi) && eta.has_exact_weights();
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto& fiber = psi.fiber(i);
    for (std::size_t k : starts[i]) {
      const auto& tr = eta.trajectory(k);
      for (std::size_t s = 0; s < fiber.size(); ++s) {
        Branch b;
        b.path = tr.x;
        auto z = fiber.atom(s);
        b.z.assign(z.begin(), z.end());
        if (exact) {
          b.exact = *tr.exact_weight * fiber.exact_weights()[s];
          b.mass = to_double(b.exact);
        } else {
          b.mass = tr.weight * fiber.weight(s);
        }
        branches.push_back(std::move(b));
      }
    }
  }
  return assemble(psi, eta.endpoint_coupling(), eta, eta.grid(), branches, exact);
}

std::vector<TransportResult> enumerate_transports(const TangentElement& psi, const Coupling& gamma,
                                                  std::size_t limit, const std::vector<double>& grid) {
  check_grid(grid);
  if (limit == 0) return {};
  const Coupling joint = psi.as_joint();
  // glue validates the shared base and provides the canonical transport.
  TransportResult canonical = transport_along_coupling(psi, gamma, grid);
  const auto& base = gamma.left();
  std::vector<std::size_t> map(joint.left().size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = *base.find_atom(joint.left().atom(i));

  std::vector<std::vector<std::size_t>> ys(base.size()), zs(base.size());
  for (std::size_t t = 0; t < gamma.entries().size(); ++t) ys[gamma.entries()[t].i].push_back(t);
  for (std::size_t t = 0; t < joint.entries().size(); ++t) zs[map[joint.entries()[t].i]].push_back(t);
  const auto gm = gamma.rational_masses();
  const auto jm = joint.rational_masses();
  const bool exact = gamma.has_exact_masses() && joint.has_exact_masses();

  // Per fiber: vertices of the couplings between the conditional successor
  // law and the velocity fiber, on index coordinates.
  std::vector<std::vector<std::vector<Branch>>> options(base.size());
  parallel_for(base.size(), [&](std::size_t i) {
    Rational row = 0, zrow = 0;
    for (std::size_t t : ys[i]) row += gm[t];
    for (std::size_t t : zs[i]) zrow += jm[t];
    std::vector<double> yc, zc;
    std::vector<Rational> yw, zw;
    for (std::size_t s = 0; s < ys[i].size(); ++s) {
      yc.push_back(static_cast<double>(s));
      yw.push_back(gm[ys[i][s]] / row);
    }
    for (std::size_t s = 0; s < zs[i].size(); ++s) {
      zc.push_back(static_cast<double>(s));
      zw.push_back(jm[zs[i][s]] / zrow);
    }
    const auto ym = DiscreteMeasure::create_exact(1, yc, yw, 0.0);
    const auto zm = DiscreteMeasure::create_exact(1, zc, zw, 0.0);
    for (const auto& v : enumerate_vertex_couplings(ym, zm, limit)) {
      std::vector<Branch> fiber;
      for (std::size_t t = 0; t < v.entries().size(); ++t) {
        const auto& e = v.entries()[t];
        const auto& ge = gamma.entries()[ys[i][e.i]];
        Branch b = coupling_branch(gamma, i, ge.j, joint.right().atom(joint.entries()[zs[i][e.j]].j), grid);
        b.exact = v.exact_masses()[t] * row;
        b.mass = to_double(b.exact);
        fiber.push_back(std::move(b));
      }
      options[i].push_back(std::move(fiber));
    }
  });

  std::vector<TransportResult> out;
  out.push_back(std::move(canonical));
  const double weight_tol = exact ? 0.0 : 1e-12;
  std::vector<std::size_t> choice(options.size(), 0);
  while (out.size() < limit) {
    std::vector<Branch> branches;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const auto& f = options[i][choice[i]];
      branches.insert(branches.end(), f.begin(), f.end());
    }
    TransportResult r = assemble(psi, gamma, std::nullopt, grid, branches, exact);
    const bool seen = std::any_of(out.begin(), out.end(), [&](const TransportResult& o) {
      return same_law(o.ensemble, r.ensemble, weight_tol);
    });
    if (!seen) out.push_back(std::move(r));
    std::size_t i = 0;
    while (i < options.size() && ++choice[i] == options[i].size()) choice[i++] = 0;
    if (i == options.size()) break;
  }
  return out;
}

const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::kUniqueDeterministicTangent:
      return "UniqueDeterministicTangent";
    case Uniqueness::kUniqueDeterministicFlow:
      return "UniqueDeterministicFlow";
    case Uniqueness::kPossiblyNonUnique:
      return "PossiblyNonUnique";
  }
  return "PossiblyNonUnique";
}

Uniqueness classify_uniqueness(const TangentElement& psi, const Coupling& gamma) {
  if (psi.is_deterministic()) return Uniqueness::kUniqueDeterministicTangent;
  if (gamma.is_graph()) return Uniqueness::kUniqueDeterministicFlow;
  return Uniqueness::kPossiblyNonUnique;
}

TransportResult reverse(const TransportResult& transport) {
  std::optional<PathEnsemble> paths;
  if (transport.route_paths) paths = reversed(*transport.route_paths);
  return TransportResult{transport.arrival, transport.route.transposed(), std::move(paths),
                         reversed(transport.ensemble), transport.source};
}

bool path_dependence_check(const TangentElement& psi, const PathEnsemble& eta1, const PathEnsemble& eta2) {
  for (const PathEnsemble* eta : {&eta1, &eta2}) {
    if (eta->dim() != psi.dim() || !same_measure(eta->marginal_at_index(0), psi.base(), kMarginalTolerance)) {
      fail(ErrorCode::kMarginalMismatch, "ensembles must start from the base of the tangent element");
    }
  }
  const auto a = transport_along_coupling(psi, eta1.endpoint_coupling());
  const auto b = transport_along_coupling(psi, eta2.endpoint_coupling());
  const bool exact = a.ensemble.has_exact_weights() && b.ensemble.has_exact_weights();
  return !same_law(a.ensemble, b.ensemble, exact ? 0.0 : 1e-12);
}

TransportCheck check_transport(const TransportResult& transport) {
  const PathEnsemble& e = transport.ensemble;
  const std::size_t d = e.dim() / 2;
  const std::size_t last = e.steps();
  TransportCheck out;
  out.time0_error = law_error(e.marginal_at_index(0), transport.source.as_joint().as_measure(), 1e-12);
  out.arrival_error = law_error(e.marginal_at_index(last), transport.arrival.as_joint().as_measure(), 1e-9);
  for (std::size_t k = 0; k < e.size() && out.velocity_constant; ++k) {
    auto z0 = e.position(k, 0).subspan(d);
    for (std::size_t j = 1; j <= last; ++j) {
      auto zj = e.position(k, j).subspan(d);
      if (!std::equal(z0.begin(), z0.end(), zj.begin())) {
        out.velocity_constant = false;
        break;
      }
    }
  }
  for (std::size_t j = 0; j <= last; ++j) {
    const DiscreteMeasure expected = transport.route_paths
                                         ? transport.route_paths->marginal_at(e.grid()[j])
                                         : interpolated_route(transport.route, e.grid()[j]);
    out.route_error = std::max(out.route_error, law_error(first_half(e, j), expected, 1e-9));
  }
  const double q = transport.source.dual_exponent();
  out.source_moment = transport.source.velocity_moment();
  out.initial_moment = ensemble_moment(e, 0, q);
  out.final_moment = ensemble_moment(e, last, q);
  return out;
}

}  // namespace wtan
