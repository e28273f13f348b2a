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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support/generators.hpp"
#include "support/instances.hpp"
#include "wtan/error.hpp"
#include "wtan/io.hpp"

namespace wtan {
namespace {

using testing::Rng;

ErrorCode code_of(void (*f)(const std::string&), const std::string& text, std::string* message = nullptr) {
  try {
    f(text);
  } catch (const Error& e) {
    if (message != nullptr) *message = e.what();
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST_CASE("measure JSON round trip is bitwise") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_measure(rng, 1 + rng.integer(0, 6), 1 + rng.integer(0, 2));
    const auto back = measure_from_json(measure_to_json(m));
    CHECK(same_measure(m, back, 0.0, 0.0));
    CHECK(back.weights() == m.weights());
  }
}

TEST_CASE("exact weights survive the round trip") {
  const auto m = DiscreteMeasure::create_exact(1, {0.0, 1.0, 2.0}, {Rational(1, 3), Rational(1, 6), Rational(1, 2)});
  const auto back = measure_from_json(measure_to_json(m));
  REQUIRE(back.has_exact_weights());
  CHECK(back.exact_weights() == m.exact_weights());
  const auto strings = measure_from_json(R"({"atoms": [0, 2], "weights": ["1/4", "3/4"]})");
  CHECK(strings.exact_weights()[1] == Rational(3, 4));
}

TEST_CASE("coupling, tangent and ensemble round trips") {
  const auto inst = testing::wml_instance();
  const auto g = coupling_from_json(coupling_to_json(inst.gamma));
  CHECK(g.has_exact_masses());
  CHECK(g.exact_masses() == inst.gamma.exact_masses());
  const auto t = tangent_from_json(tangent_to_json(inst.psi));
  CHECK(tangent_distance(t, inst.psi) == 0.0);
  Rng rng(3);
  const auto e = testing::random_ensemble(rng, 5, 7, 2);
  const auto back = ensemble_from_json(ensemble_to_json(e));
  CHECK(same_law(e, back, 0.0));
  CHECK(back.velocity_defect() == 0.0);
  const auto split = testing::split_from_origin(uniform_grid(4));
  CHECK(ensemble_from_json(ensemble_to_json(split)).trajectory(1).label == split.trajectory(1).label);
}

TEST_CASE("ensembles read from files tolerate printing error in positions") {
  const std::string text = R"({"grid": [0, 0.5, 1], "trajectories": [
      {"w": 1, "x": [0, 0.1, 0.2000000000001], "z": [0.2, 0.2, 0.2]}]})";
  CHECK(ensemble_from_json(text).size() == 1);
  const std::string bad = R"({"grid": [0, 0.5, 1], "trajectories": [
      {"w": 1, "x": [0, 0.1, 0.3], "z": [0.2, 0.2, 0.2]}]})";
  CHECK(code_of([](const std::string& s) { ensemble_from_json(s); }, bad) != ErrorCode::kInternal);
}

TEST_CASE("parse errors name the line or the field") {
  std::string msg;
  CHECK(code_of([](const std::string& s) { measure_from_json(s); }, "{\n  \"atoms\": [1,\n  ]\n}", &msg) ==
        ErrorCode::kParse);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(code_of([](const std::string& s) { measure_from_json(s); }, R"({"atoms": [[0], [1]], "weights": [1]})",
                &msg) == ErrorCode::kParse);
  CHECK(msg.find("weights") != std::string::npos);
  CHECK(code_of([](const std::string& s) { tangent_from_json(s); },
                R"({"base": {"atoms": [0], "weights": [1]}, "fibers": [{"atoms": [[0, "a"]], "weights": [1]}]})",
                &msg) == ErrorCode::kParse);
  CHECK(msg.find("fibers[0].atoms[0][1]") != std::string::npos);
  CHECK(code_of([](const std::string& s) { measure_from_json(s); }, R"({"atoms": [0, 1], "weights": [0.5, 0.6]})",
                &msg) == ErrorCode::kInvalidArgument);
}

TEST_CASE("control problem JSON") {
  const ControlProblem lib = lipschitz_instance();
  const ControlProblem back = control_problem_from_json(control_problem_to_json(lib));
  CHECK(back.steps == lib.steps);
  CHECK(back.terminal == lib.terminal);
  CHECK(back.mean_field_weight == lib.mean_field_weight);
  CHECK(same_measure(back.terminal_reference, lib.terminal_reference, 0.0, 0.0));
  const ControlProblem tuned = control_problem_from_json(R"({"library": "split-target", "steps": 8,
      "terminal": {"cap": 2}})");
  CHECK(tuned.steps == 8);
  CHECK(tuned.kinetic == 0.05);
  CHECK(tuned.terminal_cap == 2.0);
  std::string msg;
  CHECK(code_of([](const std::string& s) { control_problem_from_json(s); }, R"({"terminal": {"kind": "huge"}})",
                &msg) == ErrorCode::kParse);
  CHECK(msg.find("terminal.kind") != std::string::npos);
}

TEST_CASE("CSV and number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(measure_to_csv(testing::half_half(0, 2)) == "x_1,w\n0,0.5\n2,0.5\n");
}

TEST_CASE("SVG chart is a standalone document") {
  const std::string svg = svg_line_chart("t vs W2", "t", "W2", {0, 0.5, 1}, {{"a", {1, 2, 3}}, {"b<", {0, 0, 0}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("b&lt;") != std::string::npos);
  std::size_t lines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("atomic writes leave nothing behind on failure") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "wtan_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_files_atomic({{(dir / "a.txt").string(), "alpha"}, {(dir / "b.txt").string(), "beta"}});
  std::ifstream in(dir / "b.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "beta");
  CHECK_THROWS_AS(write_files_atomic({{(dir / "c.txt").string(), "c"}, {(dir / "missing" / "d.txt").string(), "d"}}),
                  Error);
  CHECK(!fs::exists(dir / "c.txt"));
  CHECK(!fs::exists(dir / "c.txt.tmp"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace wtan
