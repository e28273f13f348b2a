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

#ifndef WTAN_PARALLEL_HPP_
#define WTAN_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace wtan {

// Worker count for library loops. 0 restores the default, which is the
// WTAN_THREADS environment variable when set and 1 otherwise.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Runs body(k) for k in [0, n) on up to thread_count() threads. Callers write
// into per-index slots and reduce afterwards in index order, so results never
// depend on the thread count. The first exception thrown (lowest index) is
// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wtan

#endif  // WTAN_PARALLEL_HPP_
