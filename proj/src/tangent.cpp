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

#include "wtan/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "network_simplex.hpp"
#include "wtan/error.hpp"
#include "wtan/parallel.hpp"

namespace wtan {

TangentElement TangentElement::create(DiscreteMeasure base, std::vector<DiscreteMeasure> fibers,
                                      double p) {
  if (base.empty()) fail(ErrorCode::kInvalidArgument, "tangent element needs a base measure");
  if (!(p > 1.0)) fail(ErrorCode::kInvalidArgument, "tangent exponent p must exceed 1");
  if (fibers.size() != base.size()) {
    fail(ErrorCode::kInvalidArgument, "expected " + std::to_string(base.size()) +
                                          " fibers, got " + std::to_string(fibers.size()));
  }
  for (const auto& f : fibers) {
    if (f.dim() != base.dim()) {
      fail(ErrorCode::kDimensionMismatch, "fiber dimension differs from the base dimension");
    }
  }
  TangentElement t;
  t.base_ = std::move(base);
  t.fibers_ = std::move(fibers);
  t.p_ = p;
  return t;
}

TangentElement TangentElement::deterministic(DiscreteMeasure base,
                                             const std::vector<double>& velocities, double p) {
  const std::size_t d = base.dim();
  if (velocities.size() != base.size() * d) {
    fail(ErrorCode::kInvalidArgument, "one velocity per base atom is required");
  }
  std::vector<DiscreteMeasure> fibers;
  fibers.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    fibers.push_back(DiscreteMeasure::dirac(Point(velocities.begin() + i * d, velocities.begin() + (i + 1) * d)));
  }
  return create(std::move(base), std::move(fibers), p);
}

TangentElement TangentElement::zero(DiscreteMeasure base, double p) {
  const std::vector<double> v(base.size() * base.dim(), 0.0);
  return deterministic(std::move(base), v, p);
}

TangentElement TangentElement::from_joint(const Coupling& joint, double p) {
  std::vector<DiscreteMeasure> fibers;
  fibers.reserve(joint.left().size());
  for (std::size_t i = 0; i < joint.left().size(); ++i) fibers.push_back(joint.conditional(i));
  return create(joint.left(), std::move(fibers), p);
}

bool TangentElement::is_deterministic() const {
  return std::all_of(fibers_.begin(), fibers_.end(), [](const DiscreteMeasure& f) { return f.size() == 1; });
}

double TangentElement::velocity_moment() const {
  const double q = dual_exponent();
  double total = 0.0;
  for (std::size_t i = 0; i < fibers_.size(); ++i) total += base_.weight(i) * moment(fibers_[i], q);
  return total;
}

Coupling TangentElement::as_joint() const {
  const std::size_t d = dim();
  bool exact = base_.has_exact_weights();
  for (const auto& f : fibers_) exact = exact && f.has_exact_weights();
  std::vector<double> pairs;
  std::vector<double> masses;
  std::vector<Rational> exact_masses;
  for (std::size_t i = 0; i < fibers_.size(); ++i) {
    const auto& f = fibers_[i];
    for (std::size_t k = 0; k < f.size(); ++k) {
      auto x = base_.atom(i);
      auto z = f.atom(k);
      pairs.insert(pairs.end(), x.begin(), x.end());
      pairs.insert(pairs.end(), z.begin(), z.end());
      if (exact) {
        exact_masses.push_back(base_.exact_weights()[i] * f.exact_weights()[k]);
      } else {
        masses.push_back(base_.weight(i) * f.weight(k));
      }
    }
  }
  if (exact) return Coupling::from_pairs_exact(d, d, pairs, exact_masses);
  return Coupling::from_pairs(d, d, pairs, masses);
}

std::vector<std::size_t> match_bases(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) {
    fail(ErrorCode::kBaseMismatch, "tangent elements live over different base measures");
  }
  std::vector<std::size_t> map(b.size());
  std::vector<char> hit(a.size(), 0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    auto i = a.find_atom(b.atom(j));
    if (!i || hit[*i] || std::abs(a.weight(*i) - b.weight(j)) > kMarginalTolerance) {
      fail(ErrorCode::kBaseMismatch, "base atom " + std::to_string(j) + " has no partner");
    }
    hit[*i] = 1;
    map[j] = *i;
  }
  return map;
}

double tangent_distance(const TangentElement& a, const TangentElement& b) {
  const auto map = match_bases(a.base(), b.base());
  std::vector<double> terms(b.base().size());
  parallel_for(terms.size(), [&](std::size_t j) {
    terms[j] = a.base().weight(map[j]) * solve_ot(a.fiber(map[j]), b.fiber(j), 2).objective;
  });
  // Summed in a's atom order whatever the thread count.
  std::vector<double> ordered(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) ordered[map[j]] = terms[j];
  double total = 0.0;
  for (double t : ordered) total += t;
  return std::sqrt(total);
}

double inner_product(const TangentElement& a, const TangentElement& b) {
  const auto za = TangentElement::zero(a.base(), a.p());
  const double da = tangent_distance(a, za);
  const double db = tangent_distance(za, b);
  const double dab = tangent_distance(a, b);
  return da * da + db * db - dab * dab;
}

double sheaf_distance(const TangentElement& phi, const TangentElement& psi) {
  if (phi.dim() != psi.dim()) {
    fail(ErrorCode::kDimensionMismatch, "tangent elements have different dimensions");
  }
  return wasserstein(phi.as_joint().as_measure(), psi.as_joint().as_measure(), 2);
}

namespace {

ComparisonResult solve_comparison(const TangentElement& phi, const TangentElement& psi, bool maximize) {
  if (phi.dim() != psi.dim()) {
    fail(ErrorCode::kDimensionMismatch, "tangent elements have different dimensions");
  }
  const Coupling jphi = phi.as_joint();
  const Coupling jpsi = psi.as_joint();
  const DiscreteMeasure& mu = jphi.left();
  const DiscreteMeasure& nu = jpsi.left();
  const OtResult ot = solve_ot(mu, nu, 2);
  const auto c = cost_matrix(mu, nu, 2);
  const std::size_t n = mu.size(), m = nu.size();
  double max_c = 0.0;
  for (double v : c) max_c = std::max(max_c, v);
  const double tol = 1e-10 * (1.0 + max_c);

  std::vector<std::vector<std::size_t>> phi_cells(n), psi_cells(m);
  for (std::size_t a = 0; a < jphi.entries().size(); ++a) phi_cells[jphi.entries()[a].i].push_back(a);
  for (std::size_t b = 0; b < jpsi.entries().size(); ++b) psi_cells[jpsi.entries()[b].i].push_back(b);

  std::vector<double> supply, demand;
  for (const auto& e : jphi.entries()) supply.push_back(e.mass);
  for (const auto& e : jpsi.entries()) demand.push_back(e.mass);
  detail::TransportSimplex simplex(supply, demand);

  struct Arc {
    std::int32_t a, b;
    double cost;
  };
  std::vector<Arc> arcs;
  double max_arc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (c[i * m + j] - ot.u[i] - ot.v[j] > tol) continue;
      if (arcs.size() + phi_cells[i].size() * psi_cells[j].size() > kMaxComparisonVariables) {
        fail(ErrorCode::kTooLarge, "comparison program exceeds " +
                                       std::to_string(kMaxComparisonVariables) + " variables");
      }
      for (std::size_t a : phi_cells[i]) {
        for (std::size_t b : psi_cells[j]) {
          const double w = squared_distance(jphi.right().atom(jphi.entries()[a].j),
                                            jpsi.right().atom(jpsi.entries()[b].j));
          arcs.push_back({static_cast<std::int32_t>(a), static_cast<std::int32_t>(b), w});
          max_arc = std::max(max_arc, w);
        }
      }
    }
  }
  simplex.reserve(arcs.size());
  // The simplex wants nonnegative costs; maximize by flipping against the
  // largest cost (total mass is 1).
  for (const auto& arc : arcs) simplex.add_arc(arc.a, arc.b, maximize ? max_arc - arc.cost : arc.cost);
  if (simplex.run() != detail::TransportSimplex::Status::kOptimal) {
    fail(ErrorCode::kSolverFailure, "comparison program has no feasible optimal-coupling plan");
  }
  ComparisonResult out;
  out.w2_squared = ot.objective;
  out.variables = arcs.size();
  out.value = std::max(0.0, maximize ? max_arc - simplex.objective() : simplex.objective());
  return out;
}

}  // namespace

ComparisonResult compare_by_transport(const TangentElement& phi, const TangentElement& psi) {
  return solve_comparison(phi, psi, false);
}

ComparisonResult compare_by_transport_sup(const TangentElement& phi, const TangentElement& psi) {
  return solve_comparison(phi, psi, true);
}

}  // namespace wtan
