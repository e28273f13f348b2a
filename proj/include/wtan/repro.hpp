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

#ifndef WTAN_REPRO_HPP_
#define WTAN_REPRO_HPP_

#include <string>
#include <vector>

namespace wtan {

enum class Relation { kEqual, kAtMost, kAtLeast, kGreater };

// value RELATION expected, with slack `tolerance`.
struct ReproCheck {
  std::string name;
  double value = 0.0;
  Relation relation = Relation::kEqual;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Artifact {
  std::string name;  // file name, e.g. "curve.csv"
  std::string content;
};

struct ReproReport {
  std::string example;
  std::vector<ReproCheck> checks;
  std::vector<Artifact> artifacts;  // report.json first

  bool passed() const;
  // Names of failing checks, comma separated.
  std::string failures() const;
};

// The reproducible worked examples, in a fixed order.
const std::vector<std::string>& repro_ids();

// Recomputes one example and compares it with its stored expected values.
// Unknown ids throw ErrorCode::kUnknownExample. Reports never contain
// timings or thread counts, so they are byte-identical across runs.
ReproReport run_repro(const std::string& id);

}  // namespace wtan

#endif  // WTAN_REPRO_HPP_
