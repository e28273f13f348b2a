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

#ifndef WTAN_TESTS_SUPPORT_ORACLES_HPP_
#define WTAN_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <set>
#include <vector>

#include "wtan/rational.hpp"

namespace wtan::testing {

// O(n^3) Hungarian method (potentials + augmenting paths) on a square
// cost matrix; returns the minimum assignment cost.
inline double hungarian_min_cost(const std::vector<double>& cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += cost[(p[j] - 1) * n + (j - 1)];
  return total;
}

// Basic feasible solutions of {x >= 0 : row sums a, column sums b} found by
// brute force: every set of n+m-1 cells is tried as a basis and the square
// system is solved by rational Gauss-Jordan elimination. Independent of the
// spanning-tree enumeration used by the library. Each vertex is a dense
// row-major n x m matrix.
inline std::vector<std::vector<Rational>> brute_force_vertices(const std::vector<Rational>& a,
                                                               const std::vector<Rational>& b) {
  const std::size_t n = a.size(), m = b.size(), cells = n * m, k = n + m - 1;
  std::set<std::vector<Rational>> found;
  std::vector<std::size_t> pick(k);
  for (std::size_t t = 0; t < k; ++t) pick[t] = t;
  // One redundant equation (the last column) is dropped.
  auto solve = [&]() {
    std::vector<std::vector<Rational>> mat(k, std::vector<Rational>(k + 1, 0));
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t i = pick[c] / m, j = pick[c] % m;
      mat[i][c] = 1;
      if (j + 1 < m) mat[n + j][c] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) mat[i][k] = a[i];
    for (std::size_t j = 0; j + 1 < m; ++j) mat[n + j][k] = b[j];
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = col;
      while (piv < k && mat[piv][col] == 0) ++piv;
      if (piv == k) return;  // singular: not a basis
      std::swap(mat[piv], mat[col]);
      const Rational d = mat[col][col];
      for (auto& e : mat[col]) e /= d;
      for (std::size_t r = 0; r < k; ++r) {
        if (r == col || mat[r][col] == 0) continue;
        const Rational f = mat[r][col];
        for (std::size_t c = col; c <= k; ++c) mat[r][c] -= f * mat[col][c];
      }
    }
    std::vector<Rational> x(cells, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (mat[c][k] < 0) return;
      x[pick[c]] = mat[c][k];
    }
    found.insert(x);
  };
  for (;;) {
    solve();
    std::size_t t = k;
    while (t > 0 && pick[t - 1] == cells - k + (t - 1)) --t;
    if (t == 0) break;
    ++pick[t - 1];
    for (std::size_t s = t; s < k; ++s) pick[s] = pick[s - 1] + 1;
  }
  return {found.begin(), found.end()};
}

}  // namespace wtan::testing

#endif  // WTAN_TESTS_SUPPORT_ORACLES_HPP_
