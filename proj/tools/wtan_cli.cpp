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

// Command-line front end. Links only the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wtan/wtan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

// Carries a status out of a subcommand body.
struct Failure {
  wtan_status status;
  std::string message;
};

int exit_code(wtan_status s) {
  switch (s) {
    case WTAN_OK:
      return kExitOk;
    case WTAN_PARSE:
    case WTAN_INVALID_ARGUMENT:
    case WTAN_DIMENSION_MISMATCH:
    case WTAN_MARGINAL_MISMATCH:
    case WTAN_BASE_MISMATCH:
    case WTAN_NON_RATIONAL_WEIGHTS:
    case WTAN_GRID_MISMATCH:
    case WTAN_MISSING_VELOCITIES:
      return kExitInput;
    case WTAN_UNKNOWN_EXAMPLE:
      return kExitUsage;
    default:
      return kExitSolver;
  }
}

void check(wtan_status s, const std::string& what) {
  if (s != WTAN_OK) throw Failure{s, what + ": " + wtan_status_name(s) + ": " + wtan_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{WTAN_INVALID_ARGUMENT, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Measure = std::unique_ptr<wtan_measure, Deleter<wtan_measure, wtan_measure_free>>;
using Coupling = std::unique_ptr<wtan_coupling, Deleter<wtan_coupling, wtan_coupling_free>>;
using Tangent = std::unique_ptr<wtan_tangent, Deleter<wtan_tangent, wtan_tangent_free>>;
using Ensemble = std::unique_ptr<wtan_ensemble, Deleter<wtan_ensemble, wtan_ensemble_free>>;
using Result = std::unique_ptr<wtan_result, Deleter<wtan_result, wtan_result_free>>;

Measure load_measure(const std::string& path) {
  wtan_measure* m = nullptr;
  check(wtan_measure_from_json(read_file(path).c_str(), &m), path);
  return Measure(m);
}
Coupling load_coupling(const std::string& path) {
  wtan_coupling* c = nullptr;
  check(wtan_coupling_from_json(read_file(path).c_str(), &c), path);
  return Coupling(c);
}
Tangent load_tangent(const std::string& path) {
  wtan_tangent* t = nullptr;
  check(wtan_tangent_from_json(read_file(path).c_str(), &t), path);
  return Tangent(t);
}
Ensemble load_ensemble(const std::string& path) {
  wtan_ensemble* e = nullptr;
  check(wtan_ensemble_from_json(read_file(path).c_str(), &e), path);
  return Ensemble(e);
}

Result new_result() {
  wtan_result* r = nullptr;
  check(wtan_result_create(&r), "result");
  return Result(r);
}

std::string take_string(char* s) {
  std::string out(s);
  wtan_string_free(s);
  return out;
}

struct Globals {
  uint64_t seed = 0;
  std::string out = ".";
  bool svg = false;
  size_t threads = 0;
  double tol_merge = -1.0;
  double tol_velocity = -1.0;
};

void finish(const Result& r, const Globals& g) {
  check(wtan_result_write(r.get(), g.out.c_str(), g.svg ? 1 : 0), "writing " + g.out);
  std::cout << wtan_result_summary(r.get()) << "\n";
}

std::string json_value(const std::string& key, double v) { return "{\n  \"" + key + "\": " + fmt(v) + "\n}\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtan: tangent structure of Wasserstein space"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("--svg", g.svg, "Also write SVG line charts");
  app.add_option("--threads", g.threads, "Worker threads (default: WTAN_THREADS, else 1)");
  app.add_option("--tol-merge", g.tol_merge, "Atom merge tolerance for inputs");
  app.add_option("--tol-velocity", g.tol_velocity, "Left-endpoint rule tolerance for ensemble inputs");

  std::string a_path, b_path;
  double p = 2.0;
  auto* ot = app.add_subcommand("ot", "W_p between two measures; writes the optimal coupling");
  ot->add_option("a", a_path, "Measure JSON")->required();
  ot->add_option("b", b_path, "Measure JSON")->required();
  ot->add_option("--p", p, "Cost exponent")->capture_default_str();

  auto* tdist = app.add_subcommand("tangent-dist", "Tangent-cone distance between two tangent elements");
  auto* calc_e = app.add_subcommand("calc-E", "Comparison by transport between two tangent elements");
  auto* calc_d = app.add_subcommand("calc-D", "Sheaf distance between two tangent elements");
  for (auto* sub : {tdist, calc_e, calc_d}) {
    sub->add_option("a", a_path, "Tangent JSON")->required();
    sub->add_option("b", b_path, "Tangent JSON")->required();
  }

  size_t steps = 10, enumerate = 0;
  auto* pt = app.add_subcommand("ptransport", "Parallel transport of a tangent element along a coupling");
  pt->add_option("psi", a_path, "Tangent JSON")->required();
  pt->add_option("gamma", b_path, "Coupling JSON")->required();
  pt->add_option("--steps", steps, "Grid intervals on [0,1]")->capture_default_str();
  pt->add_option("--enumerate", enumerate, "Enumerate up to this many distinct laws (0: one transport)");

  auto* tr = app.add_subcommand("translate", "Translate a curve of measures by a coupling");
  tr->add_option("eta", a_path, "Path ensemble JSON")->required();
  tr->add_option("gamma0", b_path, "Coupling JSON")->required();
  tr->add_option("--enumerate", enumerate, "Also enumerate up to this many translation laws");

  std::string functional = "linear-quadratic";
  std::vector<double> alphas{1.0};
  size_t dim = 1, budget = 1000;
  auto* holder = app.add_subcommand("holder", "Seeded lower estimates of the Hoelder constants I and J");
  holder->add_option("--functional", functional,
                     "linear-quadratic, linear-cosine, interaction-quadratic, interaction-cosine, half-w2")
      ->capture_default_str();
  holder->add_option("--alpha", alphas, "Exponent(s) in (0,1]")->delimiter(',');
  holder->add_option("--dim", dim, "Dimension")->capture_default_str();
  holder->add_option("--budget", budget, "Sampled couplings")->capture_default_str();

  wtan_control_options copts;
  wtan_control_options_default(&copts);
  bool deterministic = false;
  std::vector<double> shifts;
  auto* control = app.add_subcommand("control", "Mean-field control value by particle multi-start descent");
  control->add_option("problem", a_path, "Control problem JSON")->required();
  control->add_option("m0", b_path, "Initial measure JSON")->required();
  control->add_flag("--deterministic", deterministic, "Position-tied controls only");
  control->add_option("--budget", copts.budget, "Multi-starts")->capture_default_str();
  control->add_option("--branches", copts.branches, "Branches per atom (randomized)")->capture_default_str();
  control->add_option("--max-iterations", copts.max_iterations, "Descent iterations per start")
      ->capture_default_str();
  control->add_option("--sweep", shifts, "Lipschitz sweep over m0 shifted by each value")->delimiter(',');

  std::string example;
  bool list = false;
  auto* repro = app.add_subcommand("repro", "Reproduce a worked example (or \"all\")");
  repro->add_option("id", example, "Example id");
  repro->add_flag("--list", list, "List example ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.count("--threads") > 0) check(wtan_set_threads(g.threads), "--threads");
    check(wtan_set_input_tolerances(g.tol_merge, g.tol_velocity), "--tol-*");

    if (*ot) {
      Measure a = load_measure(a_path), b = load_measure(b_path);
      double d = 0.0;
      wtan_coupling* c = nullptr;
      check(wtan_solve_ot(a.get(), b.get(), p, &d, &c), "ot");
      Coupling coupling(c);
      char* text = nullptr;
      check(wtan_coupling_to_json(coupling.get(), &text), "ot");
      Result r = new_result();
      check(wtan_result_add(r.get(), "coupling.json", (take_string(text) + "\n").c_str()), "ot");
      check(wtan_result_add(r.get(), "ot.json",
                            ("{\n  \"p\": " + fmt(p) + ",\n  \"distance\": " + fmt(d) + "\n}\n").c_str()),
            "ot");
      check(wtan_result_write(r.get(), g.out.c_str(), 0), "writing " + g.out);
      std::cout << "W_" << fmt(p) << " = " << fmt(d) << "\n";
      return kExitOk;
    }
    if (*tdist || *calc_e || *calc_d) {
      Tangent a = load_tangent(a_path), b = load_tangent(b_path);
      Result r = new_result();
      std::string line;
      if (*tdist) {
        double d = 0.0;
        check(wtan_tangent_distance(a.get(), b.get(), &d), "tangent-dist");
        check(wtan_result_add(r.get(), "tangent_distance.json", json_value("distance", d).c_str()), "tangent-dist");
        line = "W_mu = " + fmt(d);
      } else if (*calc_e) {
        double e = 0.0, w2 = 0.0;
        check(wtan_compare_by_transport(a.get(), b.get(), &e, &w2), "calc-E");
        const std::string body = "{\n  \"E\": " + fmt(e) + ",\n  \"W2_squared\": " + fmt(w2) + "\n}\n";
        check(wtan_result_add(r.get(), "E.json", body.c_str()), "calc-E");
        line = "E = " + fmt(e);
      } else {
        double d = 0.0;
        check(wtan_sheaf_distance(a.get(), b.get(), &d), "calc-D");
        check(wtan_result_add(r.get(), "D.json", json_value("D", d).c_str()), "calc-D");
        line = "D = " + fmt(d);
      }
      check(wtan_result_write(r.get(), g.out.c_str(), 0), "writing " + g.out);
      std::cout << line << "\n";
      return kExitOk;
    }
    if (*pt) {
      Tangent psi = load_tangent(a_path);
      Coupling gamma = load_coupling(b_path);
      wtan_result* r = nullptr;
      check(wtan_parallel_transport(psi.get(), gamma.get(), steps, enumerate, &r), "ptransport");
      Result res(r);
      finish(res, g);
      return wtan_result_passed(res.get()) ? kExitOk : kExitSolver;
    }
    if (*tr) {
      Ensemble eta = load_ensemble(a_path);
      Coupling gamma = load_coupling(b_path);
      wtan_result* r = nullptr;
      check(wtan_translate(eta.get(), gamma.get(), enumerate, &r), "translate");
      Result res(r);
      finish(res, g);
      return kExitOk;
    }
    if (*holder) {
      wtan_result* r = nullptr;
      check(wtan_holder(functional.c_str(), dim, alphas.data(), alphas.size(), budget, g.seed, &r), "holder");
      Result res(r);
      finish(res, g);
      return kExitOk;
    }
    if (*control) {
      const std::string problem = read_file(a_path);
      Measure m0 = load_measure(b_path);
      copts.randomized = deterministic ? 0 : 1;
      copts.seed = g.seed;
      copts.sweep_shifts = shifts.empty() ? nullptr : shifts.data();
      copts.sweep_count = shifts.size();
      wtan_result* r = nullptr;
      check(wtan_control(problem.c_str(), m0.get(), &copts, &r), "control");
      Result res(r);
      finish(res, g);
      return wtan_result_passed(res.get()) ? kExitOk : kExitSolver;
    }
    if (*repro) {
      std::vector<std::string> ids;
      for (size_t i = 0; i < wtan_repro_count(); ++i) ids.emplace_back(wtan_repro_id(i));
      if (list) {
        for (const auto& id : ids) std::cout << id << "\n";
        return kExitOk;
      }
      const bool all = example == "all";
      if (!all && std::find(ids.begin(), ids.end(), example) == ids.end()) {
        std::cerr << "unknown example \"" << example << "\"\n\n" << repro->help() << "examples:";
        for (const auto& id : ids) std::cerr << " " << id;
        std::cerr << " all\n";
        return kExitUsage;
      }
      if (!all) ids = {example};
      bool passed = true;
      for (const auto& id : ids) {
        wtan_result* r = nullptr;
        check(wtan_repro(id.c_str(), &r), "repro " + id);
        Result res(r);
        const std::string dir = all ? g.out + "/" + id : g.out;
        check(wtan_result_write(res.get(), dir.c_str(), g.svg ? 1 : 0), "writing " + dir);
        std::cout << (wtan_result_passed(res.get()) ? "PASS " : "FAIL ") << wtan_result_summary(res.get()) << "\n";
        passed = passed && wtan_result_passed(res.get());
      }
      return passed ? kExitOk : kExitSolver;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return exit_code(f.status);
  }
  return kExitUsage;
}
