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

#ifndef WTAN_SRC_ATOM_INDEX_HPP_
#define WTAN_SRC_ATOM_INDEX_HPP_

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wtan/measure.hpp"

namespace wtan::detail {

// Assigns stable indices to points in first-seen order. Bitwise repeats hit
// a hash table; anything else falls back to a tolerance scan.
class AtomIndex {
 public:
  AtomIndex(std::size_t dim, double tolerance) : dim_(dim), tol2_(tolerance * tolerance) {}

  std::size_t find_or_add(std::span<const double> x) {
    std::string key(reinterpret_cast<const char*>(x.data()), x.size() * sizeof(double));
    if (auto it = exact_.find(key); it != exact_.end()) return it->second;
    const std::size_t n = coords_.size() / dim_;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const double> a(coords_.data() + i * dim_, dim_);
      if (squared_distance(a, x) <= tol2_) {
        exact_.emplace(std::move(key), i);
        return i;
      }
    }
    coords_.insert(coords_.end(), x.begin(), x.end());
    exact_.emplace(std::move(key), n);
    return n;
  }

  std::size_t size() const { return coords_.size() / dim_; }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_;
  double tol2_;
  std::vector<double> coords_;
  std::unordered_map<std::string, std::size_t> exact_;
};

}  // namespace wtan::detail

#endif  // WTAN_SRC_ATOM_INDEX_HPP_
