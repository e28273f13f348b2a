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

#include "wtan/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json_io.hpp"
#include "wtan/error.hpp"

namespace wtan {
namespace detail {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  fail(ErrorCode::kParse, (where.empty() ? std::string("document") : where) + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string sub(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(where, "non-finite number");
  return v;
}

std::size_t as_index(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) parse_fail(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

// A row of d numbers; a bare number counts as a one-element row.
void append_row(const Json& j, std::size_t& dim, std::vector<double>& out, const std::string& where) {
  if (j.is_number()) {
    if (dim == 0) dim = 1;
    if (dim != 1) parse_fail(where, "expected " + std::to_string(dim) + " coordinates");
    out.push_back(as_number(j, where));
    return;
  }
  if (!j.is_array() || j.empty()) parse_fail(where, "expected an array of coordinates");
  if (dim == 0) dim = j.size();
  if (j.size() != dim) parse_fail(where, "expected " + std::to_string(dim) + " coordinates");
  for (std::size_t c = 0; c < j.size(); ++c) out.push_back(as_number(j[c], at(where, c)));
}

Rational as_rational(const Json& j, const std::string& where) {
  if (!j.is_string()) parse_fail(where, "expected a rational string such as \"1/4\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error&) {
    parse_fail(where, "malformed rational \"" + j.get<std::string>() + "\"");
  }
}

// Numbers, or "p/q" strings, or both lists side by side.
struct Weights {
  std::vector<double> values;
  std::vector<Rational> exact;
};

Weights weights_from(const Json& j, const char* key, const char* exact_key, const std::string& where) {
  Weights w;
  const Json& list = field(j, key, where);
  const std::string wk = sub(where, key);
  if (!list.is_array()) parse_fail(wk, "expected an array");
  bool strings = !list.empty() && list[0].is_string();
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (strings) {
      w.exact.push_back(as_rational(list[i], at(wk, i)));
    } else {
      w.values.push_back(as_number(list[i], at(wk, i)));
    }
  }
  if (!strings && j.contains(exact_key)) {
    const Json& ex = j[exact_key];
    const std::string ek = sub(where, exact_key);
    if (!ex.is_array() || ex.size() != list.size()) parse_fail(ek, "must match the weight list");
    for (std::size_t i = 0; i < ex.size(); ++i) {
      Rational r = as_rational(ex[i], at(ek, i));
      if (std::abs(to_double(r) - w.values[i]) > 1e-12) parse_fail(at(ek, i), "disagrees with the floating weight");
      w.exact.push_back(std::move(r));
    }
  }
  return w;
}

Json rational_list(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(format_rational(r));
  return out;
}

template <typename F>
auto rethrow_at(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(e.code(), (where.empty() ? std::string("document") : where) + ": " + e.what());
  }
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::kParse, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                ": malformed JSON");
  }
}

double number_at(const Json& j, const char* key, const std::string& where) {
  return as_number(field(j, key, where), sub(where, key));
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  return j.contains(key) ? as_number(j[key], sub(where, key)) : fallback;
}

Json to_json(const DiscreteMeasure& m) {
  Json j;
  j["dim"] = m.dim();
  Json atoms = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto a = m.atom(i);
    atoms.push_back(std::vector<double>(a.begin(), a.end()));
  }
  j["atoms"] = std::move(atoms);
  j["weights"] = m.weights();
  if (m.has_exact_weights()) j["exact_weights"] = rational_list(m.exact_weights());
  return j;
}

DiscreteMeasure measure_from(const Json& j, const std::string& where, double merge) {
  std::size_t dim = 0;
  if (j.is_object() && j.contains("dim")) dim = as_index(j["dim"], sub(where, "dim"));
  const Json& atoms = field(j, "atoms", where);
  if (!atoms.is_array()) parse_fail(sub(where, "atoms"), "expected an array");
  std::vector<double> coords;
  for (std::size_t i = 0; i < atoms.size(); ++i) append_row(atoms[i], dim, coords, at(sub(where, "atoms"), i));
  Weights w = weights_from(j, "weights", "exact_weights", where);
  const std::size_t n = w.exact.empty() ? w.values.size() : w.exact.size();
  if (n != atoms.size()) parse_fail(sub(where, "weights"), "expected one weight per atom");
  return rethrow_at(where, [&] {
    if (!w.exact.empty()) return DiscreteMeasure::create_exact(dim, std::move(coords), std::move(w.exact), merge);
    return DiscreteMeasure::create(dim, std::move(coords), std::move(w.values), merge);
  });
}

Json to_json(const Coupling& gamma) {
  Json j;
  j["left"] = to_json(gamma.left());
  j["right"] = to_json(gamma.right());
  Json mass = Json::array();
  for (const auto& e : gamma.entries()) mass.push_back(Json::array({e.i, e.j, e.mass}));
  j["mass"] = std::move(mass);
  if (gamma.has_exact_masses()) j["exact_mass"] = rational_list(gamma.exact_masses());
  return j;
}

namespace {

std::pair<std::size_t, std::vector<double>> raw_atoms(const Json& m, const std::string& where) {
  std::size_t dim = 0;
  if (m.is_object() && m.contains("dim")) dim = as_index(m["dim"], sub(where, "dim"));
  const Json& atoms = field(m, "atoms", where);
  if (!atoms.is_array()) parse_fail(sub(where, "atoms"), "expected an array");
  std::vector<double> coords;
  for (std::size_t i = 0; i < atoms.size(); ++i) append_row(atoms[i], dim, coords, at(sub(where, "atoms"), i));
  return {dim, std::move(coords)};
}

}  // namespace

// Cells index the atoms as written, so the coupling is rebuilt from its
// (x, y, mass) triples and then checked against the declared marginals.
Coupling coupling_from(const Json& j, const std::string& where, double merge) {
  const DiscreteMeasure left = measure_from(field(j, "left", where), sub(where, "left"), merge);
  const DiscreteMeasure right = measure_from(field(j, "right", where), sub(where, "right"), merge);
  const auto [dx, xs] = raw_atoms(j["left"], sub(where, "left"));
  const auto [dy, ys] = raw_atoms(j["right"], sub(where, "right"));
  const Json& mass = field(j, "mass", where);
  const std::string mk = sub(where, "mass");
  if (!mass.is_array()) parse_fail(mk, "expected an array of [i, j, mass] triples");
  std::vector<double> pairs, masses;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const Json& t = mass[k];
    if (!t.is_array() || t.size() != 3) parse_fail(at(mk, k), "expected [i, j, mass]");
    const std::size_t i = as_index(t[0], at(mk, k)), jj = as_index(t[1], at(mk, k));
    if (i >= xs.size() / dx || jj >= ys.size() / dy) parse_fail(at(mk, k), "atom index out of range");
    pairs.insert(pairs.end(), xs.begin() + i * dx, xs.begin() + (i + 1) * dx);
    pairs.insert(pairs.end(), ys.begin() + jj * dy, ys.begin() + (jj + 1) * dy);
    masses.push_back(as_number(t[2], at(mk, k)));
  }
  return rethrow_at(where, [&] {
    Coupling gamma;
    if (j.contains("exact_mass")) {
      const Json& ex = j["exact_mass"];
      if (!ex.is_array() || ex.size() != mass.size()) parse_fail(sub(where, "exact_mass"), "must match the mass list");
      std::vector<Rational> exact;
      for (std::size_t k = 0; k < ex.size(); ++k) exact.push_back(as_rational(ex[k], at(sub(where, "exact_mass"), k)));
      gamma = Coupling::from_pairs_exact(dx, dy, pairs, exact, merge);
    } else {
      gamma = Coupling::from_pairs(dx, dy, pairs, masses, merge);
    }
    if (!same_measure(gamma.left(), left, kMarginalTolerance, std::max(merge, 1e-300)) ||
        !same_measure(gamma.right(), right, kMarginalTolerance, std::max(merge, 1e-300))) {
      fail(ErrorCode::kMarginalMismatch, "cell masses do not reproduce the declared marginals");
    }
    return gamma;
  });
}

Json to_json(const TangentElement& t) {
  Json j;
  j["base"] = to_json(t.base());
  Json fibers = Json::array();
  for (const auto& f : t.fibers()) fibers.push_back(to_json(f));
  j["fibers"] = std::move(fibers);
  j["p"] = t.p();
  return j;
}

TangentElement tangent_from(const Json& j, const std::string& where, double merge) {
  DiscreteMeasure base = measure_from(field(j, "base", where), sub(where, "base"), merge);
  const Json& fibers = field(j, "fibers", where);
  if (!fibers.is_array()) parse_fail(sub(where, "fibers"), "expected an array");
  std::vector<DiscreteMeasure> fs;
  for (std::size_t i = 0; i < fibers.size(); ++i) fs.push_back(measure_from(fibers[i], at(sub(where, "fibers"), i), merge));
  const double p = number_or(j, "p", 2.0, where);
  return rethrow_at(where, [&] { return TangentElement::create(std::move(base), std::move(fs), p); });
}

Json to_json(const PathEnsemble& e) {
  Json j;
  j["dim"] = e.dim();
  j["grid"] = e.grid();
  Json trajs = Json::array();
  for (std::size_t k = 0; k < e.size(); ++k) {
    const auto& tr = e.trajectory(k);
    Json t;
    t["w"] = tr.weight;
    if (tr.exact_weight) t["w_exact"] = format_rational(*tr.exact_weight);
    Json x = Json::array(), z = Json::array();
    for (std::size_t s = 0; s <= e.steps(); ++s) {
      auto p = e.position(k, s);
      x.push_back(std::vector<double>(p.begin(), p.end()));
      if (!tr.z.empty()) {
        auto v = e.velocity(k, s);
        z.push_back(std::vector<double>(v.begin(), v.end()));
      }
    }
    t["x"] = std::move(x);
    if (!tr.z.empty()) t["z"] = std::move(z);
    if (tr.label) t["k"] = *tr.label;
    trajs.push_back(std::move(t));
  }
  j["trajectories"] = std::move(trajs);
  return j;
}

PathEnsemble ensemble_from(const Json& j, const std::string& where, double velocity_tolerance) {
  std::size_t dim = 0;
  if (j.is_object() && j.contains("dim")) dim = as_index(j["dim"], sub(where, "dim"));
  const Json& grid_json = field(j, "grid", where);
  if (!grid_json.is_array()) parse_fail(sub(where, "grid"), "expected an array");
  std::vector<double> grid;
  for (std::size_t s = 0; s < grid_json.size(); ++s) grid.push_back(as_number(grid_json[s], at(sub(where, "grid"), s)));
  const Json& list = field(j, "trajectories", where);
  const std::string lk = sub(where, "trajectories");
  if (!list.is_array()) parse_fail(lk, "expected an array");
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string tk = at(lk, k);
    const Json& t = list[k];
    Trajectory tr;
    const Json& w = field(t, "w", tk);
    if (w.is_string()) {
      tr.exact_weight = as_rational(w, sub(tk, "w"));
      tr.weight = to_double(*tr.exact_weight);
    } else {
      tr.weight = as_number(w, sub(tk, "w"));
      if (t.contains("w_exact")) tr.exact_weight = as_rational(t["w_exact"], sub(tk, "w_exact"));
    }
    const Json& x = field(t, "x", tk);
    if (!x.is_array() || x.size() != grid.size()) parse_fail(sub(tk, "x"), "expected one position per grid time");
    for (std::size_t s = 0; s < x.size(); ++s) append_row(x[s], dim, tr.x, at(sub(tk, "x"), s));
    if (t.contains("z")) {
      const Json& z = t["z"];
      if (!z.is_array() || z.size() != grid.size()) parse_fail(sub(tk, "z"), "expected one velocity per grid time");
      for (std::size_t s = 0; s < z.size(); ++s) append_row(z[s], dim, tr.z, at(sub(tk, "z"), s));
    }
    if (t.contains("k")) {
      if (!t["k"].is_number_integer()) parse_fail(sub(tk, "k"), "expected an integer label");
      tr.label = t["k"].get<std::int64_t>();
    }
    trajs.push_back(std::move(tr));
  }
  if (dim == 0) parse_fail(lk, "no trajectories");
  return rethrow_at(where, [&] {
    return PathEnsemble::create(dim, std::move(grid), std::move(trajs), velocity_tolerance);
  });
}

}  // namespace detail

std::string measure_to_json(const DiscreteMeasure& m) { return detail::to_json(m).dump(2); }
DiscreteMeasure measure_from_json(const std::string& text, double merge_tolerance) {
  return detail::measure_from(detail::parse_json(text), "", merge_tolerance);
}
std::string coupling_to_json(const Coupling& gamma) { return detail::to_json(gamma).dump(2); }
Coupling coupling_from_json(const std::string& text, double merge_tolerance) {
  return detail::coupling_from(detail::parse_json(text), "", merge_tolerance);
}
std::string tangent_to_json(const TangentElement& t) { return detail::to_json(t).dump(2); }
TangentElement tangent_from_json(const std::string& text, double merge_tolerance) {
  return detail::tangent_from(detail::parse_json(text), "", merge_tolerance);
}
std::string ensemble_to_json(const PathEnsemble& e) { return detail::to_json(e).dump(2); }
PathEnsemble ensemble_from_json(const std::string& text, double velocity_tolerance) {
  return detail::ensemble_from(detail::parse_json(text), "", velocity_tolerance);
}

namespace {

template <typename E>
E kind_from(const detail::Json& j, const std::string& where, const std::vector<std::pair<const char*, E>>& names) {
  if (!j.is_string()) fail(ErrorCode::kParse, where + ": expected a string");
  for (const auto& [name, value] : names) {
    if (j.get<std::string>() == name) return value;
  }
  std::string options;
  for (const auto& [name, value] : names) options += std::string(options.empty() ? "" : ", ") + name;
  fail(ErrorCode::kParse, where + ": unknown kind \"" + j.get<std::string>() + "\" (expected " + options + ")");
}

template <typename E>
const char* kind_name(E value, const std::vector<std::pair<const char*, E>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

const std::vector<std::pair<const char*, PotentialKind>> kPotentials{
    {"none", PotentialKind::kNone}, {"quadratic", PotentialKind::kQuadratic}, {"cosine", PotentialKind::kCosine}};
const std::vector<std::pair<const char*, MeanFieldKind>> kMeanFields{{"none", MeanFieldKind::kNone},
                                                                     {"integral-sine", MeanFieldKind::kIntegralSine},
                                                                     {"w2-to-reference", MeanFieldKind::kW2ToReference}};
const std::vector<std::pair<const char*, TerminalKind>> kTerminals{{"zero", TerminalKind::kZero},
                                                                   {"second-moment", TerminalKind::kSecondMoment},
                                                                   {"w2-capped", TerminalKind::kW2Capped},
                                                                   {"squared-w2-capped", TerminalKind::kSquaredW2Capped}};
const std::vector<std::pair<const char*, OtGradient>> kGradients{{"finite-difference", OtGradient::kFiniteDifference},
                                                                 {"barycentric", OtGradient::kBarycentric}};

}  // namespace

ControlProblem control_problem_from_json(const std::string& text) {
  using detail::Json;
  const Json j = detail::parse_json(text);
  if (!j.is_object()) fail(ErrorCode::kParse, "document: expected an object");
  ControlProblem p;
  if (j.contains("library")) {
    const std::string lib = j["library"].is_string() ? j["library"].get<std::string>() : "";
    if (lib == "lipschitz") {
      p = lipschitz_instance();
    } else if (lib == "split-target") {
      p = split_target_instance();
    } else {
      fail(ErrorCode::kParse, "library: expected \"lipschitz\" or \"split-target\"");
    }
  }
  p.horizon = detail::number_or(j, "horizon", p.horizon, "");
  if (j.contains("steps")) {
    if (!j["steps"].is_number_integer() || j["steps"].get<long long>() <= 0) {
      fail(ErrorCode::kParse, "steps: expected a positive integer");
    }
    p.steps = j["steps"].get<std::size_t>();
  }
  p.kinetic = detail::number_or(j, "kinetic", p.kinetic, "");
  p.constant = detail::number_or(j, "constant", p.constant, "");
  p.max_speed = detail::number_or(j, "max_speed", p.max_speed, "");
  if (j.contains("ot_gradient")) p.ot_gradient = kind_from(j["ot_gradient"], "ot_gradient", kGradients);
  if (j.contains("potential")) {
    const Json& v = j["potential"];
    if (v.contains("kind")) p.potential = kind_from(v["kind"], "potential.kind", kPotentials);
    p.potential_weight = detail::number_or(v, "weight", p.potential_weight, "potential");
  }
  if (j.contains("mean_field")) {
    const Json& v = j["mean_field"];
    if (v.contains("kind")) p.mean_field = kind_from(v["kind"], "mean_field.kind", kMeanFields);
    p.mean_field_weight = detail::number_or(v, "weight", p.mean_field_weight, "mean_field");
    if (v.contains("reference")) p.mean_field_reference = detail::measure_from(v["reference"], "mean_field.reference");
  }
  if (j.contains("terminal")) {
    const Json& v = j["terminal"];
    if (v.contains("kind")) p.terminal = kind_from(v["kind"], "terminal.kind", kTerminals);
    p.terminal_weight = detail::number_or(v, "weight", p.terminal_weight, "terminal");
    p.terminal_cap = detail::number_or(v, "cap", p.terminal_cap, "terminal");
    if (v.contains("reference")) p.terminal_reference = detail::measure_from(v["reference"], "terminal.reference");
  }
  return p;
}

std::string control_problem_to_json(const ControlProblem& p) {
  detail::Json j;
  j["horizon"] = p.horizon;
  j["steps"] = p.steps;
  j["kinetic"] = p.kinetic;
  j["constant"] = p.constant;
  j["max_speed"] = p.max_speed;
  j["ot_gradient"] = kind_name(p.ot_gradient, kGradients);
  j["potential"] = {{"kind", kind_name(p.potential, kPotentials)}, {"weight", p.potential_weight}};
  detail::Json mf = {{"kind", kind_name(p.mean_field, kMeanFields)}, {"weight", p.mean_field_weight}};
  if (p.mean_field_reference.size() > 0) mf["reference"] = detail::to_json(p.mean_field_reference);
  j["mean_field"] = std::move(mf);
  detail::Json term = {{"kind", kind_name(p.terminal, kTerminals)}, {"weight", p.terminal_weight}, {"cap", p.terminal_cap}};
  if (p.terminal_reference.size() > 0) term["reference"] = detail::to_json(p.terminal_reference);
  j["terminal"] = std::move(term);
  return j.dump(2);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string measure_to_csv(const DiscreteMeasure& m) {
  std::string out;
  for (std::size_t c = 0; c < m.dim(); ++c) out += "x_" + std::to_string(c + 1) + ",";
  out += "w\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double v : m.atom(i)) out += format_double(v) + ",";
    out += format_double(m.weight(i)) + "\n";
  }
  return out;
}

std::string ensemble_to_csv(const PathEnsemble& e) {
  std::string out = "trajectory,t,";
  for (std::size_t c = 0; c < e.dim(); ++c) out += "x_" + std::to_string(c + 1) + ",";
  out += "w\n";
  for (std::size_t k = 0; k < e.size(); ++k) {
    for (std::size_t s = 0; s <= e.steps(); ++s) {
      out += std::to_string(k) + "," + format_double(e.grid()[s]) + ",";
      for (double v : e.position(k, s)) out += format_double(v) + ",";
      out += format_double(e.trajectory(k).weight) + "\n";
    }
  }
  return out;
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<double>& x, const std::vector<Series>& series) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (double v : x) {
    x0 = std::min(x0, v);
    x1 = std::max(x1, v);
  }
  for (const auto& s : series) {
    if (s.y.size() != x.size()) fail(ErrorCode::kInvalidArgument, "chart series length differs from x");
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double v) { return height - bottom - (v - y0) / (y1 - y0) * (height - top - bottom); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
    << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
    << height - bottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << left << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">" << short_number(x0)
    << "</text>\n";
  o << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
    << short_number(x1) << "</text>\n";
  o << "<text x=\"" << left - 6 << "\" y=\"" << height - bottom << "\" text-anchor=\"end\">" << short_number(y0)
    << "</text>\n";
  o << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << short_number(y1)
    << "</text>\n";
  o << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
    << escape_xml(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (top + height - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (top + height - bottom) / 2 << ")\">" << escape_xml(y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof *kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      o << short_number(px(x[i])) << "," << short_number(py(series[s].y[i])) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 14 * (s + 1) << "\" text-anchor=\"end\" fill=\""
      << color << "\">" << escape_xml(series[s].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_files_atomic(const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [path, content] : files) {
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      cleanup();
      fail(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files[i].first, ec);
    if (ec) {
      cleanup();
      fail(ErrorCode::kInvalidArgument, "cannot rename onto " + files[i].first + ": " + ec.message());
    }
  }
}

}  // namespace wtan
