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

#ifndef WTAN_SRC_NETWORK_SIMPLEX_HPP_
#define WTAN_SRC_NETWORK_SIMPLEX_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace wtan::detail {

// Primal network simplex for the uncapacitated transportation problem
//
//   min sum_a c_a f_a  s.t.  out(i) = supply_i,  in(j) = demand_j,  f >= 0
//
// on an arbitrary (possibly sparse) set of arcs i -> j. An artificial root
// joined to every node by big-M arcs provides the initial strongly feasible
// tree; leaving arcs follow the last-blocking-arc rule, which keeps every
// tree strongly feasible and rules out cycling under degeneracy.
//
// Costs are rescaled to [0, 1] internally so potentials stay O(node count).
class TransportSimplex {
 public:
  enum class Status { kOptimal, kInfeasible, kIterationLimit };

  TransportSimplex(std::span<const double> supply, std::span<const double> demand);

  void reserve(std::size_t arcs);
  void add_arc(std::int32_t i, std::int32_t j, double cost);
  // Adds all n*m arcs; cost(i, j) = costs[i * m + j].
  void add_dense(std::span<const double> costs);

  Status run(std::int64_t max_pivots = -1);

  // Caller arcs only; the artificial arcs added by run() are not counted.
  std::size_t arc_count() const { return real_arcs_ > 0 ? real_arcs_ : src_.size(); }
  std::int32_t arc_source(std::size_t a) const { return src_[a]; }
  std::int32_t arc_target(std::size_t a) const { return dst_[a] - static_cast<std::int32_t>(n_); }
  double arc_cost(std::size_t a) const { return cost_[a] * scale_; }
  double flow(std::size_t a) const { return flow_[a]; }

  double objective() const;
  // Duals with u_i + v_j <= c_ij on every arc (up to round-off) and
  // complementary slackness on the optimal tree.
  const std::vector<double>& row_potentials() const { return u_; }
  const std::vector<double>& column_potentials() const { return v_; }
  std::int64_t pivots() const { return pivots_; }
  // Mass left on artificial arcs (0 for a feasible instance).
  double artificial_flow() const { return artificial_flow_; }

 private:
  void init_tree();
  std::int64_t find_entering();
  void pivot(std::int64_t entering);
  void recompute_potentials();
  void remove_tree_arc(std::int32_t node, std::int64_t arc);
  double reduced_cost(std::int64_t a) const;

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t node_count_ = 0;
  std::int32_t root_ = 0;
  std::vector<double> balance_;

  // Real arcs first, then one artificial arc per non-root node.
  std::vector<std::int32_t> src_;
  std::vector<std::int32_t> dst_;
  std::vector<double> cost_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::size_t real_arcs_ = 0;
  double scale_ = 1.0;

  std::vector<std::int32_t> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<std::int32_t> depth_;
  std::vector<double> pi_;
  std::vector<std::vector<std::int64_t>> tree_adj_;

  std::size_t block_size_ = 0;
  std::size_t next_arc_ = 0;
  double eps_ = 1e-13;

  std::vector<double> u_;
  std::vector<double> v_;
  std::int64_t pivots_ = 0;
  double artificial_flow_ = 0.0;
};

}  // namespace wtan::detail

#endif  // WTAN_SRC_NETWORK_SIMPLEX_HPP_
