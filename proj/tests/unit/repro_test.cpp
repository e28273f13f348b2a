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

#include "doctest.h"
#include "wtan/error.hpp"
#include "wtan/parallel.hpp"
#include "wtan/repro.hpp"

namespace wtan {
namespace {

TEST_CASE("every worked example reproduces") {
  REQUIRE(repro_ids().size() == 8);
  for (const auto& id : repro_ids()) {
    const ReproReport r = run_repro(id);
    INFO(id << ": " << r.failures());
    CHECK(r.passed());
    CHECK(r.example == id);
    REQUIRE(!r.artifacts.empty());
    CHECK(r.artifacts[0].name == "report.json");
  }
}

TEST_CASE("reports are identical across thread counts") {
  for (const char* id : {"lipschitz-sweep", "nonuniq-transport"}) {
    set_thread_count(1);
    const ReproReport a = run_repro(id);
    set_thread_count(3);
    const ReproReport b = run_repro(id);
    set_thread_count(1);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t k = 0; k < a.artifacts.size(); ++k) CHECK(a.artifacts[k].content == b.artifacts[k].content);
  }
}

TEST_CASE("unknown example ids are rejected") {
  try {
    run_repro("no-such-example");
    FAIL("expected UnknownExample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownExample);
  }
}

}  // namespace
}  // namespace wtan
