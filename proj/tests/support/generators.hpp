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

#ifndef WTAN_TESTS_SUPPORT_GENERATORS_HPP_
#define WTAN_TESTS_SUPPORT_GENERATORS_HPP_

#include <cstdint>
#include <vector>

#include "wtan/measure.hpp"
#include "wtan/rational.hpp"

namespace wtan::testing {

// SplitMix64; fixed output on every platform, unlike std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

inline std::vector<double> random_coords(Rng& rng, std::size_t n, std::size_t dim, double scale) {
  std::vector<double> c(n * dim);
  for (double& v : c) v = rng.uniform(-scale, scale);
  return c;
}

// Positive weights summing to 1 (up to rounding; the last one absorbs it).
inline std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) {
    v = 0.1 + rng.uniform();
    total += v;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] /= total;
    acc += w[i];
  }
  w[n - 1] = 1.0 - acc;
  return w;
}

inline DiscreteMeasure random_measure(Rng& rng, std::size_t n, std::size_t dim, double scale = 2.0) {
  return DiscreteMeasure::create(dim, random_coords(rng, n, dim, scale), random_weights(rng, n));
}

// Weights k_i / K with small positive integers k_i.
inline std::vector<Rational> random_rational_weights(Rng& rng, std::size_t n) {
  std::vector<long long> k(n);
  long long total = 0;
  for (auto& v : k) {
    v = rng.integer(1, 6);
    total += v;
  }
  std::vector<Rational> w;
  for (long long v : k) w.emplace_back(v, total);
  return w;
}

// Integer atoms make every squared cost an exact integer.
inline std::vector<double> random_integer_coords(Rng& rng, std::size_t n, std::size_t dim, int range) {
  std::vector<double> c(n * dim);
  for (double& v : c) v = rng.integer(-range, range);
  return c;
}

inline DiscreteMeasure random_exact_measure(Rng& rng, std::size_t n, std::size_t dim, int range = 5) {
  return DiscreteMeasure::create_exact(dim, random_integer_coords(rng, n, dim, range),
                                       random_rational_weights(rng, n));
}

// Equispaced atoms i/(n-1), i = 0..n-1, with exact weight 1/n.
inline DiscreteMeasure grid_measure(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return DiscreteMeasure::empirical(1, c);
}

}  // namespace wtan::testing

#endif  // WTAN_TESTS_SUPPORT_GENERATORS_HPP_
