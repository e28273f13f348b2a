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

#include "wtan/wtan.h"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "json_io.hpp"
#include "wtan/control.hpp"
#include "wtan/error.hpp"
#include "wtan/io.hpp"
#include "wtan/parallel.hpp"
#include "wtan/parallel_transport.hpp"
#include "wtan/regularity.hpp"
#include "wtan/repro.hpp"
#include "wtan/tangent.hpp"

struct wtan_measure {
  wtan::DiscreteMeasure value;
};
struct wtan_coupling {
  wtan::Coupling value;
};
struct wtan_tangent {
  wtan::TangentElement value;
};
struct wtan_ensemble {
  wtan::PathEnsemble value;
};
struct wtan_result {
  bool passed = true;
  std::string summary;
  std::vector<wtan::Artifact> artifacts;
};

namespace {

using wtan::ErrorCode;
using wtan::detail::Json;

thread_local std::string g_last_error;
std::atomic<double> g_merge_tolerance{wtan::kDefaultMergeTolerance};
std::atomic<double> g_velocity_tolerance{wtan::kInputVelocityTolerance};

template <typename F>
wtan_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return WTAN_OK;
  } catch (const wtan::Error& e) {
    g_last_error = e.what();
    return static_cast<wtan_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return WTAN_INTERNAL;
}

template <typename... P>
void require(const P*... ptrs) {
  if (((ptrs == nullptr) || ...)) wtan::fail(ErrorCode::kInvalidArgument, "null argument");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::copy(s.begin(), s.end(), out);
  out[s.size()] = '\0';
  return out;
}

std::string fmt(double v) { return wtan::format_double(v); }

wtan::Functional functional_by_name(const std::string& name, std::size_t dim) {
  auto cos_sum = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::cos(v);
    return s;
  };
  auto cos_grad = [](std::span<const double> x) {
    wtan::Point g;
    for (double v : x) g.push_back(-std::sin(v));
    return g;
  };
  if (name == "linear-quadratic") return wtan::Functional::linear_quadratic();
  if (name == "interaction-quadratic") return wtan::Functional::interaction_quadratic();
  if (name == "linear-cosine") return wtan::Functional::linear(cos_sum, cos_grad, 1.0, "linear-cosine");
  if (name == "interaction-cosine") return wtan::Functional::interaction(cos_sum, cos_grad, 1.0, "interaction-cosine");
  if (name == "half-w2") return wtan::Functional::half_squared_w2(wtan::DiscreteMeasure::dirac(wtan::Point(dim, 0.0)));
  wtan::fail(ErrorCode::kInvalidArgument,
             "unknown functional \"" + name +
                 "\" (expected linear-quadratic, linear-cosine, interaction-quadratic, interaction-cosine, half-w2)");
}

Json transport_json(const wtan::TransportResult& r) {
  Json j;
  j["source"] = wtan::detail::to_json(r.source);
  j["route"] = wtan::detail::to_json(r.route);
  if (r.route_paths) j["route_paths"] = wtan::detail::to_json(*r.route_paths);
  j["ensemble"] = wtan::detail::to_json(r.ensemble);
  j["arrival"] = wtan::detail::to_json(r.arrival);
  const wtan::TransportCheck c = wtan::check_transport(r);
  j["checks"] = {{"time0_error", c.time0_error},         {"velocity_constant", c.velocity_constant},
                 {"route_error", c.route_error},         {"arrival_error", c.arrival_error},
                 {"source_moment", c.source_moment},     {"final_moment", c.final_moment},
                 {"ok", c.ok()}};
  return j;
}

}  // namespace

extern "C" {

const char* wtan_version(void) { return "1.0.0"; }

const char* wtan_status_name(wtan_status status) {
  if (status == WTAN_OK) return "Ok";
  return wtan::to_string(static_cast<ErrorCode>(status));
}

const char* wtan_last_error(void) { return g_last_error.c_str(); }

wtan_status wtan_set_threads(size_t threads) {
  return guard([&] { wtan::set_thread_count(threads); });
}

wtan_status wtan_set_input_tolerances(double merge, double velocity) {
  return guard([&] {
    if (std::isnan(merge) || std::isnan(velocity)) wtan::fail(ErrorCode::kInvalidArgument, "tolerance is NaN");
    g_merge_tolerance = merge < 0.0 ? wtan::kDefaultMergeTolerance : merge;
    g_velocity_tolerance = velocity < 0.0 ? wtan::kInputVelocityTolerance : velocity;
  });
}

void wtan_string_free(char* text) { delete[] text; }

wtan_status wtan_measure_create(size_t dim, size_t atoms, const double* coords, const double* weights,
                                wtan_measure** out) {
  return guard([&] {
    require(coords, weights, out);
    *out = nullptr;
    auto m = wtan::DiscreteMeasure::create(dim, std::vector<double>(coords, coords + dim * atoms),
                                           std::vector<double>(weights, weights + atoms), g_merge_tolerance);
    *out = new wtan_measure{std::move(m)};
  });
}

wtan_status wtan_measure_from_json(const char* json, wtan_measure** out) {
  return guard([&] {
    require(json, out);
    *out = nullptr;
    *out = new wtan_measure{wtan::measure_from_json(json, g_merge_tolerance)};
  });
}

wtan_status wtan_measure_to_json(const wtan_measure* m, char** json) {
  return guard([&] {
    require(m, json);
    *json = copy_string(wtan::measure_to_json(m->value));
  });
}

size_t wtan_measure_dim(const wtan_measure* m) { return m ? m->value.dim() : 0; }
size_t wtan_measure_size(const wtan_measure* m) { return m ? m->value.size() : 0; }

wtan_status wtan_measure_atom(const wtan_measure* m, size_t i, double* coords, double* weight) {
  return guard([&] {
    require(m, coords, weight);
    if (i >= m->value.size()) wtan::fail(ErrorCode::kInvalidArgument, "atom index out of range");
    auto a = m->value.atom(i);
    std::copy(a.begin(), a.end(), coords);
    *weight = m->value.weight(i);
  });
}

void wtan_measure_free(wtan_measure* m) { delete m; }

wtan_status wtan_coupling_from_json(const char* json, wtan_coupling** out) {
  return guard([&] {
    require(json, out);
    *out = nullptr;
    *out = new wtan_coupling{wtan::coupling_from_json(json, g_merge_tolerance)};
  });
}

wtan_status wtan_coupling_to_json(const wtan_coupling* c, char** json) {
  return guard([&] {
    require(c, json);
    *json = copy_string(wtan::coupling_to_json(c->value));
  });
}

wtan_status wtan_coupling_cost(const wtan_coupling* c, double p, double* cost) {
  return guard([&] {
    require(c, cost);
    if (!(p >= 1.0)) wtan::fail(ErrorCode::kInvalidArgument, "cost exponent must be at least 1");
    *cost = wtan::cost(c->value, p);
  });
}

void wtan_coupling_free(wtan_coupling* c) { delete c; }

wtan_status wtan_tangent_from_json(const char* json, wtan_tangent** out) {
  return guard([&] {
    require(json, out);
    *out = nullptr;
    *out = new wtan_tangent{wtan::tangent_from_json(json, g_merge_tolerance)};
  });
}

wtan_status wtan_tangent_to_json(const wtan_tangent* t, char** json) {
  return guard([&] {
    require(t, json);
    *json = copy_string(wtan::tangent_to_json(t->value));
  });
}

void wtan_tangent_free(wtan_tangent* t) { delete t; }

wtan_status wtan_ensemble_from_json(const char* json, wtan_ensemble** out) {
  return guard([&] {
    require(json, out);
    *out = nullptr;
    *out = new wtan_ensemble{wtan::ensemble_from_json(json, g_velocity_tolerance)};
  });
}

wtan_status wtan_ensemble_to_json(const wtan_ensemble* e, char** json) {
  return guard([&] {
    require(e, json);
    *json = copy_string(wtan::ensemble_to_json(e->value));
  });
}

void wtan_ensemble_free(wtan_ensemble* e) { delete e; }

wtan_status wtan_solve_ot(const wtan_measure* mu, const wtan_measure* nu, double p, double* distance,
                          wtan_coupling** coupling) {
  return guard([&] {
    require(mu, nu, distance);
    if (!(p >= 1.0)) wtan::fail(ErrorCode::kInvalidArgument, "transport exponent must be at least 1");
    wtan::OtResult r = wtan::solve_ot(mu->value, nu->value, p);
    *distance = r.distance;
    if (coupling != nullptr) *coupling = new wtan_coupling{std::move(r.coupling)};
  });
}

wtan_status wtan_tangent_distance(const wtan_tangent* a, const wtan_tangent* b, double* distance) {
  return guard([&] {
    require(a, b, distance);
    *distance = wtan::tangent_distance(a->value, b->value);
  });
}

wtan_status wtan_sheaf_distance(const wtan_tangent* a, const wtan_tangent* b, double* distance) {
  return guard([&] {
    require(a, b, distance);
    *distance = wtan::sheaf_distance(a->value, b->value);
  });
}

wtan_status wtan_compare_by_transport(const wtan_tangent* a, const wtan_tangent* b, double* value,
                                      double* w2_squared) {
  return guard([&] {
    require(a, b, value);
    const wtan::ComparisonResult r = wtan::compare_by_transport(a->value, b->value);
    *value = r.value;
    if (w2_squared != nullptr) *w2_squared = r.w2_squared;
  });
}

wtan_status wtan_parallel_transport(const wtan_tangent* psi, const wtan_coupling* gamma, size_t steps,
                                    size_t enumerate_limit, wtan_result** out) {
  return guard([&] {
    require(psi, gamma, out);
    *out = nullptr;
    if (steps == 0) wtan::fail(ErrorCode::kInvalidArgument, "steps must be positive");
    const auto grid = wtan::uniform_grid(steps);
    std::vector<wtan::TransportResult> all;
    if (enumerate_limit > 0) {
      all = wtan::enumerate_transports(psi->value, gamma->value, enumerate_limit, grid);
    } else {
      all.push_back(wtan::transport_along_coupling(psi->value, gamma->value, grid));
    }
    const wtan::Uniqueness u = wtan::classify_uniqueness(psi->value, gamma->value);
    Json j;
    j["uniqueness"] = wtan::to_string(u);
    j["count"] = all.size();
    Json list = Json::array();
    bool ok = true;
    for (const auto& r : all) {
      list.push_back(transport_json(r));
      ok = ok && wtan::check_transport(r).ok();
    }
    j["transports"] = std::move(list);
    auto res = std::make_unique<wtan_result>();
    res->passed = ok;
    res->summary = std::to_string(all.size()) + " transport(s), " + wtan::to_string(u) +
                   (ok ? ", all definition checks pass" : ", definition checks FAIL");
    res->artifacts.push_back({"transport.json", j.dump(2) + "\n"});
    *out = res.release();
  });
}

wtan_status wtan_translate(const wtan_ensemble* eta, const wtan_coupling* gamma0, size_t enumerate_limit,
                           wtan_result** out) {
  return guard([&] {
    require(eta, gamma0, out);
    *out = nullptr;
    const wtan::Translation t = wtan::translate(eta->value, gamma0->value);
    const auto& grid = eta->value.grid();
    std::string csv = "t,w2_squared,w2\n";
    std::vector<double> w2s;
    double worst = 0.0;
    const double c2 = wtan::cost(gamma0->value, 2);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto r = wtan::solve_ot(eta->value.marginal_at_index(j), t.translated.marginal_at_index(j), 2);
      csv += fmt(grid[j]) + "," + fmt(r.objective) + "," + fmt(r.distance) + "\n";
      w2s.push_back(r.distance);
      worst = std::max(worst, r.distance);
    }
    auto res = std::make_unique<wtan_result>();
    res->summary = "max W_2(m_t, translated m_t) = " + fmt(worst) + ", C_2(gamma0) = " + fmt(c2) +
                   ", difference drift = " + fmt(wtan::max_difference_drift(t.coupling_curve));
    res->artifacts.push_back({"translated.json", wtan::ensemble_to_json(t.translated) + "\n"});
    res->artifacts.push_back({"distance.csv", csv});
    res->artifacts.push_back(
        {"distance.svg", wtan::svg_line_chart("distance to the translated curve", "t", "W_2", grid, {{"W_2", w2s}})});
    if (enumerate_limit > 0) {
      Json list = Json::array();
      for (const auto& tr : wtan::enumerate_translations(eta->value, gamma0->value, enumerate_limit)) {
        list.push_back(wtan::detail::to_json(tr.translated));
      }
      res->summary += ", " + std::to_string(list.size()) + " translation law(s)";
      res->artifacts.push_back({"translations.json", list.dump(2) + "\n"});
    }
    *out = res.release();
  });
}

wtan_status wtan_holder(const char* functional, size_t dim, const double* alphas, size_t alpha_count,
                        size_t samples, uint64_t seed, wtan_result** out) {
  return guard([&] {
    require(functional, alphas, out);
    *out = nullptr;
    if (alpha_count == 0 || samples == 0 || dim == 0) {
      wtan::fail(ErrorCode::kInvalidArgument, "need at least one alpha, one sample and dim >= 1");
    }
    const wtan::Functional u = functional_by_name(functional, dim);
    wtan::SamplerOptions so;
    so.dim = dim;
    so.seed = seed;
    const wtan::CouplingSampler sampler(so);
    Json reports = Json::array();
    std::vector<double> xs, is, js;
    std::string summary;
    for (size_t a = 0; a < alpha_count; ++a) {
      const double alpha = alphas[a];
      if (!(alpha > 0.0 && alpha <= 1.0)) wtan::fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
      const wtan::HolderEstimate h = wtan::estimate_holder(u, sampler, alpha, samples);
      Json j;
      j["functional"] = functional;
      j["alpha"] = alpha;
      j["I_est"] = h.i_estimate;
      j["J_est"] = h.j_estimate;
      j["argmax_coupling"] = wtan::detail::to_json(sampler.sample(h.i_argmax).gamma);
      j["argmax_family"] = wtan::to_string(sampler.sample(h.i_argmax).family);
      j["samples"] = h.samples;
      j["seed"] = h.seed;
      j["heuristic_derivative"] = u.derivative_is_heuristic(sampler.sample(h.i_argmax).mu);
      reports.push_back(std::move(j));
      xs.push_back(alpha);
      is.push_back(h.i_estimate);
      js.push_back(h.j_estimate);
      summary += (summary.empty() ? "" : "; ") + std::string("alpha ") + fmt(alpha) + ": I >= " + fmt(h.i_estimate) +
                 ", J >= " + fmt(h.j_estimate);
    }
    auto res = std::make_unique<wtan_result>();
    res->summary = summary;
    res->artifacts.push_back({"holder.json", (alpha_count == 1 ? reports[0] : reports).dump(2) + "\n"});
    res->artifacts.push_back({"holder.svg", wtan::svg_line_chart(std::string("Hoelder estimates, ") + functional,
                                                                 "alpha", "estimate", xs,
                                                                 {{"I_alpha", is}, {"J_alpha", js}})});
    *out = res.release();
  });
}

void wtan_control_options_default(wtan_control_options* options) {
  if (options == nullptr) return;
  const wtan::SolveOptions d;
  options->randomized = 1;
  options->budget = d.budget;
  options->branches = d.branches;
  options->max_iterations = d.max_iterations;
  options->seed = d.seed;
  options->sweep_shifts = nullptr;
  options->sweep_count = 0;
}

wtan_status wtan_control(const char* problem_json, const wtan_measure* m0, const wtan_control_options* options,
                         wtan_result** out) {
  return guard([&] {
    require(problem_json, m0, out);
    *out = nullptr;
    wtan_control_options opts;
    wtan_control_options_default(&opts);
    if (options != nullptr) opts = *options;
    const wtan::ControlProblem p = wtan::control_problem_from_json(problem_json);
    p.validate(m0->value.dim());
    wtan::SolveOptions so;
    so.mode = opts.randomized ? wtan::ControlMode::kRandomized : wtan::ControlMode::kDeterministic;
    so.budget = opts.budget;
    so.branches = opts.branches;
    so.max_iterations = opts.max_iterations;
    so.seed = opts.seed;
    const wtan::ValueResult v = wtan::solve_value(p, m0->value, so);
    Json j;
    j["mode"] = wtan::to_string(so.mode);
    j["value"] = v.value;
    j["value_is_upper_bound"] = true;
    j["kinetic"] = v.kinetic;
    j["budget_exhausted"] = v.budget_exhausted;
    j["best_start"] = v.best_start;
    j["start_values"] = v.start_values;
    j["problem"] = Json::parse(wtan::control_problem_to_json(p));
    auto res = std::make_unique<wtan_result>();
    res->summary = std::string(wtan::to_string(so.mode)) + " value <= " + fmt(v.value) +
                   (v.budget_exhausted ? " (budget exhausted on some start)" : "");
    if (opts.sweep_count > 0) {
      require(opts.sweep_shifts);
      const auto& m = m0->value;
      std::vector<wtan::SweepPair> pairs;
      for (size_t k = 0; k < opts.sweep_count; ++k) {
        std::vector<double> xy;
        for (std::size_t i = 0; i < m.size(); ++i) {
          auto x = m.atom(i);
          xy.insert(xy.end(), x.begin(), x.end());
          for (double c : x) xy.push_back(c + opts.sweep_shifts[k]);
        }
        wtan::Coupling g = m.has_exact_weights()
                               ? wtan::Coupling::from_pairs_exact(m.dim(), m.dim(), xy, m.exact_weights())
                               : wtan::Coupling::from_pairs(m.dim(), m.dim(), xy, m.weights());
        pairs.push_back({m, g.right(), g});
      }
      const wtan::SweepReport rep = wtan::lipschitz_sweep(p, pairs, so);
      std::string csv = "pair_id,W2,U_m,U_mprime,translated_cost,ratio,certificate_rhs\n";
      std::vector<double> shifts, ratios;
      bool ok = rep.max_ratio <= rep.max_certificate + wtan::kQuadratureTolerance;
      for (const auto& row : rep.rows) {
        csv += std::to_string(row.pair_id) + "," + fmt(row.w2) + "," + fmt(row.u_m) + "," + fmt(row.u_mprime) + "," +
               fmt(row.translated_cost) + "," + fmt(row.ratio) + "," + fmt(row.certificate_rhs) + "\n";
        shifts.push_back(opts.sweep_shifts[row.pair_id]);
        ratios.push_back(row.ratio);
        ok = ok && row.translated_ok && row.coercive;
      }
      j["sweep"] = {{"max_ratio", rep.max_ratio}, {"max_certificate", rep.max_certificate}, {"certificates_hold", ok}};
      res->passed = ok;
      res->summary += ", sweep max ratio " + fmt(rep.max_ratio) + " vs certificate " + fmt(rep.max_certificate);
      res->artifacts.push_back({"sweep.csv", csv});
      res->artifacts.push_back({"sweep.svg", wtan::svg_line_chart("Lipschitz sweep", "shift", "ratio", shifts,
                                                                  {{"ratio", ratios}})});
    }
    res->artifacts.insert(res->artifacts.begin(), {"paths.json", wtan::ensemble_to_json(v.ensemble.paths) + "\n"});
    res->artifacts.insert(res->artifacts.begin(), {"value.json", j.dump(2) + "\n"});
    *out = res.release();
  });
}

size_t wtan_repro_count(void) { return wtan::repro_ids().size(); }

const char* wtan_repro_id(size_t i) {
  const auto& ids = wtan::repro_ids();
  return i < ids.size() ? ids[i].c_str() : nullptr;
}

wtan_status wtan_repro(const char* id, wtan_result** out) {
  return guard([&] {
    require(id, out);
    *out = nullptr;
    wtan::ReproReport r = wtan::run_repro(id);
    auto res = std::make_unique<wtan_result>();
    res->passed = r.passed();
    res->summary = r.example + (r.passed() ? ": all checks pass" : ": failing checks: " + r.failures());
    res->artifacts = std::move(r.artifacts);
    *out = res.release();
  });
}

wtan_status wtan_result_create(wtan_result** out) {
  return guard([&] {
    require(out);
    *out = new wtan_result;
  });
}

wtan_status wtan_result_add(wtan_result* r, const char* name, const char* content) {
  return guard([&] {
    require(r, name, content);
    const std::string n(name);
    if (n.empty() || n.find('/') != std::string::npos || n == "." || n == "..") {
      wtan::fail(ErrorCode::kInvalidArgument, "artifact names are plain file names");
    }
    r->artifacts.push_back({n, content});
  });
}

int wtan_result_passed(const wtan_result* r) { return r != nullptr && r->passed ? 1 : 0; }
const char* wtan_result_summary(const wtan_result* r) { return r ? r->summary.c_str() : ""; }
size_t wtan_result_count(const wtan_result* r) { return r ? r->artifacts.size() : 0; }

const char* wtan_result_name(const wtan_result* r, size_t i) {
  return r != nullptr && i < r->artifacts.size() ? r->artifacts[i].name.c_str() : nullptr;
}

const char* wtan_result_content(const wtan_result* r, size_t i) {
  return r != nullptr && i < r->artifacts.size() ? r->artifacts[i].content.c_str() : nullptr;
}

wtan_status wtan_result_write(const wtan_result* r, const char* dir, int include_svg) {
  return guard([&] {
    require(r, dir);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) wtan::fail(ErrorCode::kInvalidArgument, std::string("cannot create ") + dir + ": " + ec.message());
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& a : r->artifacts) {
      const bool svg = a.name.size() >= 4 && a.name.compare(a.name.size() - 4, 4, ".svg") == 0;
      if (svg && !include_svg) continue;
      files.emplace_back((fs::path(dir) / a.name).string(), a.content);
    }
    wtan::write_files_atomic(files);
  });
}

void wtan_result_free(wtan_result* r) { delete r; }

}  // extern "C"
