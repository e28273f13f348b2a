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

#include "wtan/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "atom_index.hpp"
#include "network_simplex.hpp"
#include "wtan/error.hpp"

namespace wtan {

namespace {

void sort_and_merge(std::vector<CouplingEntry>& entries, std::vector<Rational>* exact) {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(entries[a].i, entries[a].j) < std::tie(entries[b].i, entries[b].j);
  });
  std::vector<CouplingEntry> merged;
  std::vector<Rational> merged_exact;
  for (std::size_t k : order) {
    const auto& e = entries[k];
    const bool zero = exact ? ((*exact)[k] == 0) : (e.mass == 0.0);
    if (zero) continue;
    if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j) {
      if (exact) {
        merged_exact.back() += (*exact)[k];
        merged.back().mass = to_double(merged_exact.back());
      } else {
        merged.back().mass += e.mass;
      }
    } else {
      merged.push_back(e);
      if (exact) merged_exact.push_back((*exact)[k]);
    }
  }
  entries = std::move(merged);
  if (exact) *exact = std::move(merged_exact);
}

void check_marginals(const DiscreteMeasure& left, const DiscreteMeasure& right,
                     const std::vector<CouplingEntry>& entries) {
  std::vector<double> rows(left.size(), 0.0);
  std::vector<double> cols(right.size(), 0.0);
  for (const auto& e : entries) {
    if (e.i >= left.size() || e.j >= right.size()) {
      fail(ErrorCode::kInvalidArgument, "coupling cell index out of range");
    }
    if (!(e.mass >= 0.0) || !std::isfinite(e.mass)) {
      fail(ErrorCode::kInvalidArgument, "coupling mass must be finite and nonnegative");
    }
    rows[e.i] += e.mass;
    cols[e.j] += e.mass;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i] - left.weight(i)) > kMarginalTolerance) {
      fail(ErrorCode::kMarginalMismatch, "coupling row " + std::to_string(i) + " sums to " +
                                             std::to_string(rows[i]) + " instead of " +
                                             std::to_string(left.weight(i)));
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (std::abs(cols[j] - right.weight(j)) > kMarginalTolerance) {
      fail(ErrorCode::kMarginalMismatch, "coupling column " + std::to_string(j) + " sums to " +
                                             std::to_string(cols[j]) + " instead of " +
                                             std::to_string(right.weight(j)));
    }
  }
}

double pow_distance(std::span<const double> a, std::span<const double> b, double p) {
  const double d2 = squared_distance(a, b);
  if (p == 2.0) return d2;
  if (p == 1.0) return std::sqrt(d2);
  return std::pow(std::sqrt(d2), p);
}

}  // namespace

Coupling Coupling::create(DiscreteMeasure left, DiscreteMeasure right,
                          std::vector<CouplingEntry> entries) {
  sort_and_merge(entries, nullptr);
  check_marginals(left, right, entries);
  Coupling c;
  c.left_ = std::move(left);
  c.right_ = std::move(right);
  c.entries_ = std::move(entries);
  return c;
}

Coupling Coupling::create_exact(DiscreteMeasure left, DiscreteMeasure right,
                                std::vector<CouplingEntry> entries,
                                std::vector<Rational> exact_masses) {
  if (exact_masses.size() != entries.size()) {
    fail(ErrorCode::kInvalidArgument, "exact mass list does not match coupling cells");
  }
  for (std::size_t k = 0; k < entries.size(); ++k) entries[k].mass = to_double(exact_masses[k]);
  sort_and_merge(entries, &exact_masses);
  check_marginals(left, right, entries);
  Coupling c;
  c.left_ = std::move(left);
  c.right_ = std::move(right);
  c.entries_ = std::move(entries);
  c.exact_ = std::move(exact_masses);
  return c;
}

namespace {

template <typename Mass>
Coupling build_from_pairs(std::size_t dx, std::size_t dy, const std::vector<double>& pairs,
                          const std::vector<Mass>& masses, double merge_tolerance) {
  const std::size_t stride = dx + dy;
  if (dx == 0 || dy == 0 || pairs.size() != stride * masses.size()) {
    fail(ErrorCode::kInvalidArgument, "pair coordinates do not match the mass list");
  }
  detail::AtomIndex xs(dx, merge_tolerance);
  detail::AtomIndex ys(dy, merge_tolerance);
  std::vector<Mass> wx, wy;
  std::vector<CouplingEntry> entries;
  std::vector<Mass> cell_mass;
  for (std::size_t t = 0; t < masses.size(); ++t) {
    if (masses[t] == 0) continue;
    std::span<const double> x(pairs.data() + t * stride, dx);
    std::span<const double> y(pairs.data() + t * stride + dx, dy);
    const std::size_t i = xs.find_or_add(x);
    const std::size_t j = ys.find_or_add(y);
    if (i == wx.size()) wx.push_back(Mass(0));
    if (j == wy.size()) wy.push_back(Mass(0));
    wx[i] += masses[t];
    wy[j] += masses[t];
    entries.push_back({i, j, 0.0});
    cell_mass.push_back(masses[t]);
  }
  if constexpr (std::is_same_v<Mass, Rational>) {
    auto left = DiscreteMeasure::create_exact(dx, xs.coords(), wx, 0.0);
    auto right = DiscreteMeasure::create_exact(dy, ys.coords(), wy, 0.0);
    return Coupling::create_exact(std::move(left), std::move(right), std::move(entries),
                                  std::move(cell_mass));
  } else {
    for (std::size_t k = 0; k < entries.size(); ++k) entries[k].mass = cell_mass[k];
    auto left = DiscreteMeasure::unmerged(dx, xs.coords(), wx);
    auto right = DiscreteMeasure::unmerged(dy, ys.coords(), wy);
    return Coupling::create(std::move(left), std::move(right), std::move(entries));
  }
}

}  // namespace

Coupling Coupling::from_pairs(std::size_t dx, std::size_t dy, const std::vector<double>& pairs,
                              const std::vector<double>& masses, double merge_tolerance) {
  return build_from_pairs(dx, dy, pairs, masses, merge_tolerance);
}

Coupling Coupling::from_pairs_exact(std::size_t dx, std::size_t dy,
                                    const std::vector<double>& pairs,
                                    const std::vector<Rational>& masses, double merge_tolerance) {
  return build_from_pairs(dx, dy, pairs, masses, merge_tolerance);
}

Coupling Coupling::identity(const DiscreteMeasure& m) {
  std::vector<CouplingEntry> entries;
  for (std::size_t i = 0; i < m.size(); ++i) entries.push_back({i, i, m.weight(i)});
  if (m.has_exact_weights()) return create_exact(m, m, std::move(entries), m.exact_weights());
  return create(m, m, std::move(entries));
}

Coupling Coupling::product(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<CouplingEntry> entries;
  std::vector<Rational> exact;
  const bool is_exact = a.has_exact_weights() && b.has_exact_weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      entries.push_back({i, j, a.weight(i) * b.weight(j)});
      if (is_exact) exact.push_back(a.exact_weights()[i] * b.exact_weights()[j]);
    }
  }
  if (is_exact) return create_exact(a, b, std::move(entries), std::move(exact));
  return create(a, b, std::move(entries));
}

std::vector<Rational> Coupling::rational_masses() const {
  if (has_exact_masses()) return exact_;
  std::vector<Rational> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(exact_rational(e.mass));
  return out;
}

Coupling Coupling::transposed() const {
  std::vector<CouplingEntry> entries;
  entries.reserve(entries_.size());
  for (const auto& e : entries_) entries.push_back({e.j, e.i, e.mass});
  if (has_exact_masses()) return create_exact(right_, left_, std::move(entries), exact_);
  return create(right_, left_, std::move(entries));
}

DiscreteMeasure Coupling::as_measure() const {
  std::vector<double> coords;
  std::vector<double> weights;
  coords.reserve(entries_.size() * (left_.dim() + right_.dim()));
  for (const auto& e : entries_) {
    auto x = left_.atom(e.i);
    auto y = right_.atom(e.j);
    coords.insert(coords.end(), x.begin(), x.end());
    coords.insert(coords.end(), y.begin(), y.end());
    weights.push_back(e.mass);
  }
  // Cells of distinct merged marginals are already distinct points.
  if (has_exact_masses()) {
    return DiscreteMeasure::create_exact(left_.dim() + right_.dim(), std::move(coords), exact_, 0.0);
  }
  return DiscreteMeasure::unmerged(left_.dim() + right_.dim(), std::move(coords), std::move(weights));
}

DiscreteMeasure Coupling::conditional(std::size_t i) const {
  std::vector<double> coords;
  std::vector<double> masses;
  std::vector<Rational> exact;
  double row = 0.0;
  Rational exact_row = 0;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.i != i) continue;
    auto y = right_.atom(e.j);
    coords.insert(coords.end(), y.begin(), y.end());
    masses.push_back(e.mass);
    row += e.mass;
    if (has_exact_masses()) {
      exact.push_back(exact_[k]);
      exact_row += exact_[k];
    }
  }
  if (masses.empty()) fail(ErrorCode::kInvalidArgument, "left atom carries no mass");
  if (has_exact_masses()) {
    for (auto& w : exact) w /= exact_row;
    return DiscreteMeasure::create_exact(right_.dim(), std::move(coords), std::move(exact), 0.0);
  }
  for (double& w : masses) w /= row;
  return DiscreteMeasure::unmerged(right_.dim(), std::move(coords), std::move(masses));
}

bool Coupling::is_graph() const {
  std::vector<int> successors(left_.size(), 0);
  for (const auto& e : entries_) ++successors[e.i];
  return std::all_of(successors.begin(), successors.end(), [](int s) { return s == 1; });
}

double cost(const Coupling& gamma, double p) {
  if (p < 1.0) fail(ErrorCode::kInvalidArgument, "cost exponent must be >= 1");
  double total = 0.0;
  for (const auto& e : gamma.entries()) {
    total += e.mass * pow_distance(gamma.left().atom(e.i), gamma.right().atom(e.j), p);
  }
  return p == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / p);
}

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  std::vector<double> c(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      c[i * nu.size() + j] = pow_distance(mu.atom(i), nu.atom(j), p);
    }
  }
  return c;
}

OtResult solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  if (mu.dim() != nu.dim()) {
    fail(ErrorCode::kDimensionMismatch, "solve_ot: dimensions " + std::to_string(mu.dim()) +
                                            " and " + std::to_string(nu.dim()) + " differ");
  }
  if (p < 1.0) fail(ErrorCode::kInvalidArgument, "solve_ot: p must be >= 1");
  if (mu.size() > kMaxOtSupport || nu.size() > kMaxOtSupport) {
    fail(ErrorCode::kTooLarge, "solve_ot: supports above " + std::to_string(kMaxOtSupport) + " atoms");
  }
  const auto costs = cost_matrix(mu, nu, p);
  detail::TransportSimplex simplex(mu.weights(), nu.weights());
  simplex.add_dense(costs);
  const auto status = simplex.run();
  if (status != detail::TransportSimplex::Status::kOptimal) {
    fail(ErrorCode::kSolverFailure, "solve_ot: network simplex did not reach an optimal basis");
  }

  std::vector<CouplingEntry> entries;
  for (std::size_t a = 0; a < simplex.arc_count(); ++a) {
    const double f = simplex.flow(a);
    if (f > 0.0) {
      entries.push_back({static_cast<std::size_t>(simplex.arc_source(a)),
                         static_cast<std::size_t>(simplex.arc_target(a)), f});
    }
  }

  OtResult out;
  out.coupling = Coupling::create(mu, nu, std::move(entries));
  out.objective = std::max(0.0, simplex.objective());
  out.distance = p == 2.0 ? std::sqrt(out.objective) : std::pow(out.objective, 1.0 / p);

  // Certificate: tighten the column duals so the pair is exactly feasible.
  out.u = simplex.row_potentials();
  out.v.assign(nu.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      out.v[j] = std::min(out.v[j], costs[i * nu.size() + j] - out.u[i]);
    }
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) dual += mu.weight(i) * out.u[i];
  for (std::size_t j = 0; j < nu.size(); ++j) dual += nu.weight(j) * out.v[j];
  out.duality_gap = std::abs(out.objective - dual);
  if (out.duality_gap > 1e-9 * (1.0 + out.objective)) {
    fail(ErrorCode::kSolverFailure,
         "solve_ot: duality gap " + std::to_string(out.duality_gap) + " exceeds tolerance");
  }
  return out;
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return solve_ot(mu, nu, p).distance;
}

Coupling Gluing::project_first() const {
  std::vector<CouplingEntry> entries;
  for (const auto& c : cells) entries.push_back({c.i, c.j, c.mass});
  if (!exact_masses.empty()) return Coupling::create_exact(base, first, std::move(entries), exact_masses);
  return Coupling::create(base, first, std::move(entries));
}

Coupling Gluing::project_second() const {
  std::vector<CouplingEntry> entries;
  for (const auto& c : cells) entries.push_back({c.i, c.k, c.mass});
  if (!exact_masses.empty()) return Coupling::create_exact(base, second, std::move(entries), exact_masses);
  return Coupling::create(base, second, std::move(entries));
}

Gluing glue(const Coupling& xy, const Coupling& xz) {
  const auto& base = xy.left();
  const auto& other = xz.left();
  if (base.dim() != other.dim() || base.size() != other.size()) {
    fail(ErrorCode::kMarginalMismatch, "glue: the two couplings have different base measures");
  }
  std::vector<std::size_t> map(other.size());
  for (std::size_t i = 0; i < other.size(); ++i) {
    auto found = base.find_atom(other.atom(i));
    if (!found || std::abs(base.weight(*found) - other.weight(i)) > kMarginalTolerance) {
      fail(ErrorCode::kMarginalMismatch, "glue: base atom " + std::to_string(i) + " does not match");
    }
    map[i] = *found;
  }

  const bool exact = xy.has_exact_masses() && xz.has_exact_masses();
  std::vector<Rational> exact_rows(base.size(), 0);
  std::vector<Rational> exact_rows_z(base.size(), 0);
  std::vector<double> rows(base.size(), 0.0);
  std::vector<std::vector<std::size_t>> by_base(base.size());
  for (std::size_t t = 0; t < xy.entries().size(); ++t) {
    rows[xy.entries()[t].i] += xy.entries()[t].mass;
    if (exact) exact_rows[xy.entries()[t].i] += xy.exact_masses()[t];
  }
  for (std::size_t t = 0; t < xz.entries().size(); ++t) {
    by_base[map[xz.entries()[t].i]].push_back(t);
    if (exact) exact_rows_z[map[xz.entries()[t].i]] += xz.exact_masses()[t];
  }
  const bool keep_exact = exact && exact_rows == exact_rows_z;

  Gluing g;
  g.base = base;
  g.first = xy.right();
  g.second = xz.right();
  for (std::size_t t = 0; t < xy.entries().size(); ++t) {
    const auto& e = xy.entries()[t];
    for (std::size_t s : by_base[e.i]) {
      const auto& f = xz.entries()[s];
      // Normalize by the base weight seen through the first coupling so its
      // (x, y) marginal is reproduced.
      g.cells.push_back({e.i, e.j, f.j, e.mass * (f.mass / rows[e.i])});
      if (keep_exact) {
        g.exact_masses.push_back(xy.exact_masses()[t] * xz.exact_masses()[s] / exact_rows[e.i]);
        g.cells.back().mass = to_double(g.exact_masses.back());
      }
    }
  }
  return g;
}

namespace {

// Union-find with undo for the spanning-forest search.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t i) const {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void undo() {
    const std::size_t b = history_.back();
    history_.pop_back();
    size_[parent_[b]] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
};

struct VertexSearch {
  std::size_t n, m;
  std::vector<Rational> a, b;
  std::size_t limit;
  std::vector<std::size_t> chosen;
  RollbackUnionFind uf;
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::pair<std::vector<std::size_t>, std::vector<Rational>>> found;

  VertexSearch(std::size_t n_, std::size_t m_, std::vector<Rational> a_, std::vector<Rational> b_,
               std::size_t limit_)
      : n(n_), m(m_), a(std::move(a_)), b(std::move(b_)), limit(limit_), uf(n_ + m_) {}

  void evaluate_tree() {
    // Leaf elimination on the spanning tree gives the unique basic solution.
    const std::size_t nodes = n + m;
    std::vector<Rational> remaining(nodes);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = a[i];
    for (std::size_t j = 0; j < m; ++j) remaining[n + j] = b[j];
    std::vector<int> degree(nodes, 0);
    for (std::size_t c : chosen) {
      ++degree[c / m];
      ++degree[n + c % m];
    }
    std::vector<char> used(chosen.size(), 0);
    std::vector<Rational> flow(chosen.size());
    for (std::size_t step = 0; step < chosen.size(); ++step) {
      std::size_t leaf = nodes;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (degree[v] == 1) {
          leaf = v;
          break;
        }
      }
      if (leaf == nodes) return;
      std::size_t cell = chosen.size();
      for (std::size_t t = 0; t < chosen.size(); ++t) {
        if (used[t]) continue;
        const std::size_t r = chosen[t] / m;
        const std::size_t c = n + chosen[t] % m;
        if (r == leaf || c == leaf) {
          cell = t;
          break;
        }
      }
      const std::size_t r = chosen[cell] / m;
      const std::size_t c = n + chosen[cell] % m;
      const std::size_t other = (r == leaf) ? c : r;
      flow[cell] = remaining[leaf];
      if (flow[cell] < 0) return;
      remaining[other] -= flow[cell];
      remaining[leaf] = 0;
      used[cell] = 1;
      --degree[r];
      --degree[c];
    }
    std::vector<std::size_t> support;
    std::vector<Rational> masses;
    for (std::size_t t = 0; t < chosen.size(); ++t) {
      if (flow[t] > 0) {
        support.push_back(chosen[t]);
        masses.push_back(flow[t]);
      }
    }
    if (seen.insert(support).second) found.emplace_back(std::move(support), std::move(masses));
  }

  void search(std::size_t next_cell) {
    if (found.size() >= limit) return;
    const std::size_t need = n + m - 1;
    if (chosen.size() == need) {
      evaluate_tree();
      return;
    }
    const std::size_t cells = n * m;
    for (std::size_t c = next_cell; c + (need - chosen.size()) <= cells; ++c) {
      if (!uf.unite(c / m, n + c % m)) continue;
      chosen.push_back(c);
      search(c + 1);
      chosen.pop_back();
      uf.undo();
      if (found.size() >= limit) return;
    }
  }
};

}  // namespace

std::vector<Coupling> enumerate_vertex_couplings(const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu, std::size_t limit) {
  if (mu.size() * nu.size() > kMaxVertexCells) {
    fail(ErrorCode::kTooLarge, "enumerate_vertex_couplings: " + std::to_string(mu.size()) + "x" +
                                   std::to_string(nu.size()) + " exceeds " +
                                   std::to_string(kMaxVertexCells) + " cells");
  }
  auto a = mu.rational_weights();
  auto b = nu.rational_weights();
  if (sum(a) != sum(b)) {
    fail(ErrorCode::kNonRationalWeights,
         "enumerate_vertex_couplings: marginals are not exactly balanced; supply exact weights");
  }
  VertexSearch search(mu.size(), nu.size(), std::move(a), std::move(b), limit);
  search.search(0);

  DiscreteMeasure left = mu;
  DiscreteMeasure right = nu;
  if (!left.has_exact_weights()) left = DiscreteMeasure::create_exact(mu.dim(), mu.coords(), search.a, 0.0);
  if (!right.has_exact_weights()) right = DiscreteMeasure::create_exact(nu.dim(), nu.coords(), search.b, 0.0);

  std::vector<Coupling> out;
  out.reserve(search.found.size());
  for (auto& [support, masses] : search.found) {
    std::vector<CouplingEntry> entries;
    for (std::size_t c : support) entries.push_back({c / nu.size(), c % nu.size(), 0.0});
    out.push_back(Coupling::create_exact(left, right, std::move(entries), std::move(masses)));
  }
  return out;
}

namespace {

double log_sum_exp(const std::vector<double>& values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : values) s += std::exp(v - hi);
  return hi + std::log(s);
}

}  // namespace

Coupling sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, double epsilon,
                  const SinkhornOptions& options) {
  if (mu.dim() != nu.dim()) fail(ErrorCode::kDimensionMismatch, "sinkhorn: dimension mismatch");
  if (!(epsilon > 0.0)) fail(ErrorCode::kInvalidArgument, "sinkhorn: epsilon must be positive");
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const auto c = cost_matrix(mu, nu, p);
  std::vector<double> log_a(n), log_b(m);
  for (std::size_t i = 0; i < n; ++i) log_a[i] = std::log(mu.weight(i));
  for (std::size_t j = 0; j < m; ++j) log_b[j] = std::log(nu.weight(j));

  std::vector<double> f(n, 0.0), g(m, 0.0), scratch;
  double max_cost = 0.0;
  for (double v : c) max_cost = std::max(max_cost, v);
  // Epsilon scaling: halve from the cost range down to the target, warm
  // starting the potentials. Without it small epsilon stalls for ages.
  double eps = std::max(max_cost, epsilon);
  auto plan = [&](std::size_t i, std::size_t j) {
    return std::exp((f[i] + g[j] - c[i * m + j]) / eps);
  };
  bool converged = false;
  std::size_t it = 0;
  for (;;) {
    bool stage_done = false;
    for (; it < options.max_iterations; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        scratch.assign(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) scratch[j] = (g[j] - c[i * m + j]) / eps;
        f[i] = eps * (log_a[i] - log_sum_exp(scratch));
      }
      for (std::size_t j = 0; j < m; ++j) {
        scratch.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) scratch[i] = (f[i] - c[i * m + j]) / eps;
        g[j] = eps * (log_b[j] - log_sum_exp(scratch));
      }
      // Columns are exact after the g-update; check the rows.
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) row += plan(i, j);
        err += std::abs(row - mu.weight(i));
      }
      // Intermediate stages only need to land near the next fixed point.
      if (err <= (eps == epsilon ? options.tolerance : std::max(options.tolerance, 1e-6))) {
        stage_done = true;
        ++it;
        break;
      }
    }
    if (!stage_done) break;
    if (eps == epsilon) {
      converged = true;
      break;
    }
    eps = std::max(eps / 2, epsilon);
  }
  if (!converged) fail(ErrorCode::kNonConvergence, "sinkhorn: marginals did not converge");

  // Rounding onto Pi(mu, nu): shrink rows, shrink columns, redistribute.
  std::vector<double> plan_mat(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) plan_mat[i * m + j] = plan(i, j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += plan_mat[i * m + j];
    const double s = row > mu.weight(i) ? mu.weight(i) / row : 1.0;
    for (std::size_t j = 0; j < m; ++j) plan_mat[i * m + j] *= s;
  }
  for (std::size_t j = 0; j < m; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += plan_mat[i * m + j];
    const double s = col > nu.weight(j) ? nu.weight(j) / col : 1.0;
    for (std::size_t i = 0; i < n; ++i) plan_mat[i * m + j] *= s;
  }
  std::vector<double> err_r(n), err_c(m);
  double total_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) row += plan_mat[i * m + j];
    err_r[i] = std::max(0.0, mu.weight(i) - row);
    total_err += err_r[i];
  }
  for (std::size_t j = 0; j < m; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += plan_mat[i * m + j];
    err_c[j] = std::max(0.0, nu.weight(j) - col);
  }
  std::vector<CouplingEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double v = plan_mat[i * m + j];
      if (total_err > 0.0) v += err_r[i] * err_c[j] / total_err;
      if (v > 0.0) entries.push_back({i, j, v});
    }
  }
  return Coupling::create(mu, nu, std::move(entries));
}

}  // namespace wtan
