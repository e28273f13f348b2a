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

#include "wtan/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wtan/error.hpp"

namespace wtan {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

Point concat(std::span<const double> a, std::span<const double> b) {
  Point out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void DiscreteMeasure::validate(std::size_t dim, const std::vector<double>& coords,
                               const std::vector<double>& weights) {
  if (dim == 0) fail(ErrorCode::kInvalidArgument, "measure dimension must be positive");
  if (coords.size() != dim * weights.size()) {
    fail(ErrorCode::kInvalidArgument,
         "measure has " + std::to_string(weights.size()) + " weights but " +
             std::to_string(coords.size()) + " coordinates for dim " + std::to_string(dim));
  }
  if (weights.empty()) fail(ErrorCode::kInvalidArgument, "measure has no atoms");
  for (double c : coords) {
    if (!std::isfinite(c)) fail(ErrorCode::kInvalidArgument, "non-finite atom coordinate");
  }
  // Neumaier summation keeps long weight lists from drifting.
  double total = 0.0;
  double carry = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::kInvalidArgument, "negative or non-finite weight");
    const double t = total + w;
    carry += std::abs(total) >= std::abs(w) ? (total - t) + w : (w - t) + total;
    total = t;
  }
  total += carry;
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    fail(ErrorCode::kInvalidArgument, "weights sum to " + std::to_string(total) + ", not 1");
  }
}

DiscreteMeasure DiscreteMeasure::unmerged(std::size_t dim, std::vector<double> coords,
                                          std::vector<double> weights) {
  validate(dim, coords, weights);
  DiscreteMeasure m;
  m.dim_ = dim;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    m.coords_.insert(m.coords_.end(), coords.begin() + i * dim, coords.begin() + (i + 1) * dim);
    m.weights_.push_back(weights[i]);
  }
  return m;
}

DiscreteMeasure DiscreteMeasure::create(std::size_t dim, std::vector<double> coords,
                                        std::vector<double> weights, double merge_tolerance) {
  return merge_atoms(unmerged(dim, std::move(coords), std::move(weights)), merge_tolerance);
}

DiscreteMeasure DiscreteMeasure::create_exact(std::size_t dim, std::vector<double> coords,
                                              std::vector<Rational> weights,
                                              double merge_tolerance) {
  if (sum(weights) != 1) fail(ErrorCode::kInvalidArgument, "exact weights do not sum to 1");
  std::vector<double> approx;
  approx.reserve(weights.size());
  for (const auto& w : weights) {
    if (w < 0) fail(ErrorCode::kInvalidArgument, "negative exact weight");
    approx.push_back(to_double(w));
  }
  validate(dim, coords, approx);
  DiscreteMeasure m;
  m.dim_ = dim;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0) continue;
    m.coords_.insert(m.coords_.end(), coords.begin() + i * dim, coords.begin() + (i + 1) * dim);
    m.weights_.push_back(approx[i]);
    m.exact_.push_back(weights[i]);
  }
  return merge_atoms(m, merge_tolerance);
}

DiscreteMeasure DiscreteMeasure::empirical(std::size_t dim, std::vector<double> coords,
                                           double merge_tolerance) {
  if (dim == 0 || coords.empty() || coords.size() % dim != 0) {
    fail(ErrorCode::kInvalidArgument, "point cloud shape does not match dimension");
  }
  const std::size_t n = coords.size() / dim;
  std::vector<Rational> w(n, Rational(1, static_cast<long long>(n)));
  return create_exact(dim, std::move(coords), std::move(w), merge_tolerance);
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& x) {
  return create_exact(x.size(), x, {Rational(1)});
}

std::vector<Rational> DiscreteMeasure::rational_weights() const {
  if (has_exact_weights()) return exact_;
  std::vector<Rational> out;
  out.reserve(weights_.size());
  for (double w : weights_) out.push_back(exact_rational(w));
  return out;
}

std::optional<std::size_t> DiscreteMeasure::find_atom(std::span<const double> x,
                                                      double tolerance) const {
  const double tol2 = tolerance * tolerance;
  for (std::size_t i = 0; i < size(); ++i) {
    if (squared_distance(atom(i), x) <= tol2) return i;
  }
  return std::nullopt;
}

DiscreteMeasure DiscreteMeasure::scaled(double s) const {
  DiscreteMeasure out = *this;
  for (double& c : out.coords_) c *= s;
  return out;
}

DiscreteMeasure DiscreteMeasure::sorted() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    auto pa = atom(a);
    auto pb = atom(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  DiscreteMeasure out;
  out.dim_ = dim_;
  for (std::size_t i : order) {
    auto a = atom(i);
    out.coords_.insert(out.coords_.end(), a.begin(), a.end());
    out.weights_.push_back(weights_[i]);
    if (has_exact_weights()) out.exact_.push_back(exact_[i]);
  }
  return out;
}

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  // The smaller index always becomes the root.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

DiscreteMeasure merge_atoms(const DiscreteMeasure& m, double tolerance) {
  if (tolerance < 0.0) fail(ErrorCode::kInvalidArgument, "merge tolerance must be nonnegative");
  const std::size_t n = m.size();
  UnionFind uf(n);
  const double tol2 = tolerance * tolerance;
  // Only pairs whose first coordinates are within tolerance can merge.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&m](std::size_t a, std::size_t b) { return m.atom(a)[0] < m.atom(b)[0]; });
  for (std::size_t s = 0; s < n; ++s) {
    const double x0 = m.atom(order[s])[0];
    for (std::size_t t = s + 1; t < n && m.atom(order[t])[0] - x0 <= tolerance; ++t) {
      if (squared_distance(m.atom(order[s]), m.atom(order[t])) <= tol2) uf.unite(order[s], order[t]);
    }
  }
  DiscreteMeasure out;
  out.dim_ = m.dim_;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == n) {
      slot[root] = out.weights_.size();
      auto a = m.atom(root);
      out.coords_.insert(out.coords_.end(), a.begin(), a.end());
      out.weights_.push_back(0.0);
      if (m.has_exact_weights()) out.exact_.push_back(0);
    }
    if (m.has_exact_weights()) {
      out.exact_[slot[root]] += m.exact_[i];
    } else {
      out.weights_[slot[root]] += m.weights_[i];
    }
  }
  if (m.has_exact_weights()) {
    for (std::size_t k = 0; k < out.exact_.size(); ++k) out.weights_[k] = to_double(out.exact_[k]);
  }
  return out;
}

double moment(const DiscreteMeasure& m, double p) {
  if (p < 1.0) fail(ErrorCode::kInvalidArgument, "moment order must be >= 1");
  double total = 0.0;
  const std::vector<double> origin(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double r2 = squared_distance(m.atom(i), origin);
    total += m.weight(i) * (p == 2.0 ? r2 : std::pow(std::sqrt(r2), p));
  }
  return total;
}

double max_weight_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b,
                              double atom_tolerance) {
  if (a.dim() != b.dim()) return 1.0;
  double worst = 0.0;
  std::vector<char> used(b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double matched = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (squared_distance(a.atom(i), b.atom(j)) <= atom_tolerance * atom_tolerance) {
        matched += b.weight(j);
        used[j] = 1;
      }
    }
    worst = std::max(worst, std::abs(a.weight(i) - matched));
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!used[j]) worst = std::max(worst, b.weight(j));
  }
  return worst;
}

bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b, double weight_tolerance,
                  double atom_tolerance) {
  return a.dim() == b.dim() && max_weight_discrepancy(a, b, atom_tolerance) <= weight_tolerance &&
         max_weight_discrepancy(b, a, atom_tolerance) <= weight_tolerance;
}

}  // namespace wtan
