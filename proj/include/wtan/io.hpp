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

#ifndef WTAN_IO_HPP_
#define WTAN_IO_HPP_

#include <string>
#include <utility>
#include <vector>

#include "wtan/control.hpp"
#include "wtan/measure.hpp"
#include "wtan/path_ensemble.hpp"
#include "wtan/tangent.hpp"
#include "wtan/transport.hpp"

namespace wtan {

// Position samples read from files may miss the left-endpoint rule by
// printing error; this much slack is accepted on input.
inline constexpr double kInputVelocityTolerance = 1e-9;

// JSON text in and out. Exact weights travel as "p/q" strings next to the
// floating ones; readers accept either form. Parse failures throw
// ErrorCode::kParse naming the offending field.
std::string measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const std::string& text, double merge_tolerance = kDefaultMergeTolerance);
std::string coupling_to_json(const Coupling& gamma);
Coupling coupling_from_json(const std::string& text, double merge_tolerance = kDefaultMergeTolerance);
std::string tangent_to_json(const TangentElement& t);
TangentElement tangent_from_json(const std::string& text, double merge_tolerance = kDefaultMergeTolerance);
std::string ensemble_to_json(const PathEnsemble& e);
PathEnsemble ensemble_from_json(const std::string& text,
                                double velocity_tolerance = kInputVelocityTolerance);

// Control problem: {"library": "lipschitz" | "split-target"} seeds the
// fields, which may then be overridden: horizon, steps, kinetic, constant,
// max_speed, ot_gradient ("finite-difference" | "barycentric"),
// potential {kind: none | quadratic | cosine, weight},
// mean_field {kind: none | integral-sine | w2-to-reference, weight, reference},
// terminal {kind: zero | second-moment | w2-capped | squared-w2-capped,
//           weight, cap, reference}.
ControlProblem control_problem_from_json(const std::string& text);
std::string control_problem_to_json(const ControlProblem& problem);

// One row per atom: x_1..x_d, w.
std::string measure_to_csv(const DiscreteMeasure& m);
// One row per trajectory and grid time: trajectory, t, x_1..x_d, w.
std::string ensemble_to_csv(const PathEnsemble& e);

// 17 significant digits.
std::string format_double(double v);

struct Series {
  std::string name;
  std::vector<double> y;
};

// Standalone SVG line chart with axes; every series shares `x`.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<double>& x, const std::vector<Series>& series);

// Writes every (path, content) pair to a temporary sibling first and renames
// only after all writes succeeded; nothing is left behind on failure.
void write_files_atomic(const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace wtan

#endif  // WTAN_IO_HPP_
