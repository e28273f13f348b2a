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

#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wtan/error.hpp"

namespace wtan::detail {

TransportSimplex::TransportSimplex(std::span<const double> supply, std::span<const double> demand)
    : n_(supply.size()), m_(demand.size()) {
  node_count_ = n_ + m_ + 1;
  root_ = static_cast<std::int32_t>(n_ + m_);
  balance_.assign(node_count_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) balance_[i] = supply[i];
  for (std::size_t j = 0; j < m_; ++j) balance_[n_ + j] = -demand[j];
}

void TransportSimplex::reserve(std::size_t arcs) {
  src_.reserve(arcs + node_count_);
  dst_.reserve(arcs + node_count_);
  cost_.reserve(arcs + node_count_);
}

void TransportSimplex::add_arc(std::int32_t i, std::int32_t j, double cost) {
  src_.push_back(i);
  dst_.push_back(static_cast<std::int32_t>(n_) + j);
  cost_.push_back(cost);
}

void TransportSimplex::add_dense(std::span<const double> costs) {
  reserve(n_ * m_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) {
      add_arc(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j), costs[i * m_ + j]);
    }
  }
}

double TransportSimplex::reduced_cost(std::int64_t a) const {
  return cost_[a] + pi_[src_[a]] - pi_[dst_[a]];
}

void TransportSimplex::init_tree() {
  real_arcs_ = src_.size();
  double max_cost = 0.0;
  for (std::size_t a = 0; a < real_arcs_; ++a) {
    if (!(cost_[a] >= 0.0) || !std::isfinite(cost_[a])) {
      fail(ErrorCode::kInvalidArgument, "transport costs must be finite and nonnegative");
    }
    max_cost = std::max(max_cost, cost_[a]);
  }
  scale_ = max_cost > 0.0 ? max_cost : 1.0;
  for (std::size_t a = 0; a < real_arcs_; ++a) cost_[a] /= scale_;

  // Any cycle through two artificial arcs costs more than any real path.
  const double artificial_cost = static_cast<double>(node_count_);
  parent_.assign(node_count_, -1);
  pred_.assign(node_count_, -1);
  depth_.assign(node_count_, 0);
  pi_.assign(node_count_, 0.0);
  tree_adj_.assign(node_count_, {});
  flow_.assign(real_arcs_, 0.0);
  basic_.assign(real_arcs_, 0);

  for (std::int32_t v = 0; v < root_; ++v) {
    const auto a = static_cast<std::int64_t>(src_.size());
    if (balance_[v] >= 0.0) {
      src_.push_back(v);
      dst_.push_back(root_);
      flow_.push_back(balance_[v]);
      pi_[v] = -artificial_cost;
    } else {
      src_.push_back(root_);
      dst_.push_back(v);
      flow_.push_back(-balance_[v]);
      pi_[v] = artificial_cost;
    }
    cost_.push_back(artificial_cost);
    basic_.push_back(1);
    parent_[v] = root_;
    pred_[v] = a;
    depth_[v] = 1;
    tree_adj_[v].push_back(a);
    tree_adj_[root_].push_back(a);
  }

  const std::size_t total = src_.size();
  block_size_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(total))));
  next_arc_ = 0;
}

std::int64_t TransportSimplex::find_entering() {
  const std::size_t total = src_.size();
  std::int64_t best = -1;
  double best_rc = -eps_;
  std::size_t scanned_in_block = 0;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t a = next_arc_;
    next_arc_ = (next_arc_ + 1 == total) ? 0 : next_arc_ + 1;
    if (!basic_[a]) {
      const double rc = reduced_cost(static_cast<std::int64_t>(a));
      if (rc < best_rc) {
        best_rc = rc;
        best = static_cast<std::int64_t>(a);
      }
    }
    if (++scanned_in_block == block_size_) {
      if (best >= 0) return best;
      scanned_in_block = 0;
    }
  }
  return best;
}

void TransportSimplex::remove_tree_arc(std::int32_t node, std::int64_t arc) {
  auto& adj = tree_adj_[node];
  auto it = std::find(adj.begin(), adj.end(), arc);
  *it = adj.back();
  adj.pop_back();
}

void TransportSimplex::pivot(std::int64_t entering) {
  const std::int32_t u = src_[entering];
  const std::int32_t v = dst_[entering];

  std::int32_t a = u;
  std::int32_t b = v;
  while (a != b) {
    if (depth_[a] > depth_[b]) {
      a = parent_[a];
    } else if (depth_[b] > depth_[a]) {
      b = parent_[b];
    } else {
      a = parent_[a];
      b = parent_[b];
    }
  }
  const std::int32_t join = a;

  // Cycle orientation: join -> ... -> u -> v -> ... -> join. Ties go to the
  // last blocking arc in that order (strongly feasible tree rule).
  double delta = std::numeric_limits<double>::infinity();
  std::int64_t leaving = -1;
  std::int32_t leaving_child = -1;
  bool on_u_side = false;
  for (std::int32_t w = u; w != join; w = parent_[w]) {
    const std::int64_t arc = pred_[w];
    if (src_[arc] == w && flow_[arc] < delta) {
      delta = flow_[arc];
      leaving = arc;
      leaving_child = w;
      on_u_side = true;
    }
  }
  for (std::int32_t w = v; w != join; w = parent_[w]) {
    const std::int64_t arc = pred_[w];
    if (dst_[arc] == w && flow_[arc] <= delta) {
      delta = flow_[arc];
      leaving = arc;
      leaving_child = w;
      on_u_side = false;
    }
  }
  if (leaving < 0) fail(ErrorCode::kSolverFailure, "transport LP is unbounded");

  if (delta > 0.0) {
    flow_[entering] += delta;
    for (std::int32_t w = u; w != join; w = parent_[w]) {
      const std::int64_t arc = pred_[w];
      flow_[arc] += (src_[arc] == w) ? -delta : delta;
    }
    for (std::int32_t w = v; w != join; w = parent_[w]) {
      const std::int64_t arc = pred_[w];
      flow_[arc] += (src_[arc] == w) ? delta : -delta;
    }
  }
  flow_[leaving] = 0.0;

  remove_tree_arc(leaving_child, leaving);
  remove_tree_arc(parent_[leaving_child], leaving);
  basic_[leaving] = 0;
  basic_[entering] = 1;
  tree_adj_[u].push_back(entering);
  tree_adj_[v].push_back(entering);

  // Re-hang the detached subtree below the entering arc.
  const std::int32_t inner = on_u_side ? u : v;
  const std::int32_t outer = on_u_side ? v : u;
  parent_[inner] = outer;
  pred_[inner] = entering;
  depth_[inner] = depth_[outer] + 1;
  pi_[inner] = (src_[entering] == outer) ? pi_[outer] + cost_[entering] : pi_[outer] - cost_[entering];
  std::vector<std::int32_t> stack{inner};
  while (!stack.empty()) {
    const std::int32_t w = stack.back();
    stack.pop_back();
    for (std::int64_t arc : tree_adj_[w]) {
      if (arc == pred_[w]) continue;
      const std::int32_t c = (src_[arc] == w) ? dst_[arc] : src_[arc];
      parent_[c] = w;
      pred_[c] = arc;
      depth_[c] = depth_[w] + 1;
      pi_[c] = (src_[arc] == w) ? pi_[w] + cost_[arc] : pi_[w] - cost_[arc];
      stack.push_back(c);
    }
  }
  ++pivots_;
}

void TransportSimplex::recompute_potentials() {
  pi_[root_] = 0.0;
  depth_[root_] = 0;
  std::vector<std::int32_t> stack{root_};
  while (!stack.empty()) {
    const std::int32_t w = stack.back();
    stack.pop_back();
    for (std::int64_t arc : tree_adj_[w]) {
      if (w != root_ && arc == pred_[w]) continue;
      const std::int32_t c = (src_[arc] == w) ? dst_[arc] : src_[arc];
      pi_[c] = (src_[arc] == w) ? pi_[w] + cost_[arc] : pi_[w] - cost_[arc];
      depth_[c] = depth_[w] + 1;
      stack.push_back(c);
    }
  }
}

TransportSimplex::Status TransportSimplex::run(std::int64_t max_pivots) {
  init_tree();
  Status status = Status::kOptimal;
  for (;;) {
    if (max_pivots >= 0 && pivots_ >= max_pivots) {
      status = Status::kIterationLimit;
      break;
    }
    std::int64_t e = find_entering();
    if (e < 0) {
      // Confirm with drift-free potentials before declaring optimality.
      recompute_potentials();
      e = find_entering();
      if (e < 0) break;
    }
    pivot(e);
  }
  recompute_potentials();

  artificial_flow_ = 0.0;
  for (std::size_t a = real_arcs_; a < src_.size(); ++a) artificial_flow_ += flow_[a];

  u_.assign(n_, 0.0);
  v_.assign(m_, 0.0);
  const double shift = n_ > 0 ? -pi_[0] : 0.0;
  for (std::size_t i = 0; i < n_; ++i) u_[i] = (-pi_[i] - shift) * scale_;
  for (std::size_t j = 0; j < m_; ++j) v_[j] = (pi_[n_ + j] + shift) * scale_;

  if (status == Status::kOptimal && artificial_flow_ > 1e-9) status = Status::kInfeasible;
  return status;
}

double TransportSimplex::objective() const {
  double total = 0.0;
  for (std::size_t a = 0; a < real_arcs_; ++a) {
    if (flow_[a] != 0.0) total += flow_[a] * cost_[a];
  }
  return total * scale_;
}

}  // namespace wtan::detail
