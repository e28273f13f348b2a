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

#include "wtan/repro.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <boost/math/distributions/normal.hpp>

#include "json_io.hpp"
#include "wtan/control.hpp"
#include "wtan/error.hpp"
#include "wtan/io.hpp"
#include "wtan/parallel_transport.hpp"
#include "wtan/path_ensemble.hpp"
#include "wtan/tangent.hpp"

namespace wtan {

bool ReproReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ReproCheck& c) { return c.pass; });
}

std::string ReproReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.pass) continue;
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

namespace {

using detail::Json;

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::kEqual: return "==";
    case Relation::kAtMost: return "<=";
    case Relation::kAtLeast: return ">=";
    case Relation::kGreater: return ">";
  }
  return "?";
}

class Builder {
 public:
  explicit Builder(std::string id) { report_.example = std::move(id); }

  void check(std::string name, double value, Relation r, double expected, double tol = 0.0) {
    bool pass = false;
    switch (r) {
      case Relation::kEqual: pass = std::abs(value - expected) <= tol; break;
      case Relation::kAtMost: pass = value <= expected + tol; break;
      case Relation::kAtLeast: pass = value >= expected - tol; break;
      case Relation::kGreater: pass = value > expected + tol; break;
    }
    report_.checks.push_back({std::move(name), value, r, expected, tol, pass});
  }
  void flag(std::string name, bool ok) { check(std::move(name), ok ? 1.0 : 0.0, Relation::kEqual, 1.0); }
  void data(const std::string& key, Json value) { data_[key] = std::move(value); }
  void artifact(std::string name, std::string content) {
    extra_.push_back({std::move(name), std::move(content)});
  }

  ReproReport finish() {
    Json j;
    j["example"] = report_.example;
    j["pass"] = report_.passed();
    Json checks = Json::array();
    for (const auto& c : report_.checks) {
      Json cj;
      cj["name"] = c.name;
      cj["value"] = c.value;
      cj["relation"] = relation_name(c.relation);
      cj["expected"] = c.expected;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    if (!data_.empty()) j["data"] = data_;
    report_.artifacts.push_back({"report.json", j.dump(2) + "\n"});
    for (auto& a : extra_) report_.artifacts.push_back(std::move(a));
    return std::move(report_);
  }

 private:
  ReproReport report_;
  Json data_ = Json::object();
  std::vector<Artifact> extra_;
};

DiscreteMeasure half_half(double a, double b) {
  return DiscreteMeasure::create_exact(1, {a, b}, {Rational(1, 2), Rational(1, 2)});
}

DiscreteMeasure uniform_grid_measure(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return DiscreteMeasure::empirical(1, c);
}

Trajectory line_path(Rational w, double x0, double speed, const std::vector<double>& grid, std::int64_t label) {
  Trajectory tr;
  tr.exact_weight = w;
  tr.label = label;
  tr.x.resize(grid.size());
  tr.z.assign(grid.size(), speed);
  tr.x[0] = x0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) tr.x[j + 1] = tr.x[j] + speed * (grid[j + 1] - grid[j]);
  return tr;
}

// A law on 1-d curves: sorted (positions, weight) pairs.
using CurveLaw = std::vector<std::pair<std::vector<double>, Rational>>;

PathEnsemble positions_only(const PathEnsemble& e) {
  std::vector<Trajectory> trajs = e.trajectories();
  for (auto& tr : trajs) tr.z.clear();
  return PathEnsemble::create(e.dim(), e.grid(), std::move(trajs));
}

CurveLaw expected_law(const std::vector<double>& grid, const std::vector<std::pair<std::function<double(double)>, Rational>>& curves) {
  std::map<std::vector<double>, Rational> merged;
  for (const auto& [f, w] : curves) {
    std::vector<double> xs;
    for (double t : grid) xs.push_back(f(t));
    merged[xs] += w;
  }
  return {merged.begin(), merged.end()};
}

// (end position, velocity, weight) legs of a 1-d transport.
std::vector<std::tuple<double, double, Rational>> legs(const TransportResult& r) {
  std::vector<std::tuple<double, double, Rational>> out;
  const auto& e = r.ensemble;
  for (std::size_t k = 0; k < e.size(); ++k) {
    auto end = e.position(k, e.steps());
    out.emplace_back(end[0], end[1], *e.trajectory(k).exact_weight);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ReproReport nonuniq_transport() {
  Builder b("nonuniq-transport");
  const auto psi = TangentElement::create(DiscreteMeasure::dirac({0.0}), {half_half(0.0, 2.0)});
  const auto gamma = Coupling::from_pairs_exact(1, 1, {0.0, 1.0, 0.0, -1.0}, {Rational(1, 2), Rational(1, 2)});
  const auto all = enumerate_transports(psi, gamma);
  b.check("transport_laws", static_cast<double>(all.size()), Relation::kEqual, 3.0);
  const Rational q(1, 4), h(1, 2);
  using Legs = std::vector<std::tuple<double, double, Rational>>;
  const std::map<std::string, Legs> expected{
      {"W", {{-1, 2, h}, {1, 0, h}}},
      {"M", {{-1, 0, h}, {1, 2, h}}},
      {"L", {{-1, 0, q}, {-1, 2, q}, {1, 0, q}, {1, 2, q}}},
  };
  std::string csv = "law,end_position,velocity,weight\n";
  for (const auto& [name, want] : expected) {
    int hits = 0;
    for (const auto& r : all) hits += legs(r) == want;
    b.check("law_" + name + "_found", hits, Relation::kEqual, 1.0);
    for (const auto& [y, z, w] : want) {
      csv += name + "," + format_double(y) + "," + format_double(z) + "," + format_rational(w) + "\n";
    }
  }
  bool bullets = true;
  for (const auto& r : all) bullets = bullets && check_transport(r).ok();
  b.flag("definition_checks", bullets);
  b.flag("classified_possibly_non_unique", classify_uniqueness(psi, gamma) == Uniqueness::kPossiblyNonUnique);
  b.artifact("laws.csv", csv);
  return b.finish();
}

TangentElement grid_field(const DiscreteMeasure& base, const std::function<double(double)>& f) {
  std::vector<double> v;
  for (std::size_t i = 0; i < base.size(); ++i) v.push_back(f(base.atom(i)[0]));
  return TangentElement::deterministic(base, v);
}

ReproReport lambda_e_d() {
  Builder b("lambda-E-D");
  const double lambda = 2.0;
  const auto mu = uniform_grid_measure(401);
  const auto phi = grid_field(mu, [&](double x) { return lambda * x; });
  const auto psi = grid_field(mu, [&](double x) { return lambda * (1.0 - x); });
  const double e = compare_by_transport(phi, psi).value;
  const double d2 = std::pow(sheaf_distance(phi, psi), 2);
  const double dmu2 = std::pow(tangent_distance(phi, psi), 2);
  b.check("E", e, Relation::kEqual, lambda * lambda / 3.0, 2e-2);
  b.check("D_squared", d2, Relation::kAtMost, 1.0 / 3.0, 2e-3);
  b.check("E_minus_D_squared", e - d2, Relation::kGreater, 0.0);
  // On the endpoint grid d_mu^2 is lambda^2 (n + 1) / (3 (n - 1)); the
  // midpoint grid (i + 1/2) / n reaches lambda^2 / 3 up to lambda^2 / (3 n^2).
  b.check("d_mu_squared_grid", dmu2, Relation::kEqual, lambda * lambda * 402.0 / 1200.0, 1e-12);
  std::vector<double> mid;
  for (int i = 0; i < 401; ++i) mid.push_back((i + 0.5) / 401.0);
  const auto mid_base = DiscreteMeasure::empirical(1, mid);
  const double dmid2 = std::pow(tangent_distance(grid_field(mid_base, [&](double x) { return lambda * x; }),
                                                 grid_field(mid_base, [&](double x) { return lambda * (1.0 - x); })),
                                2);
  b.check("d_mu_squared_midpoint", dmid2, Relation::kEqual, lambda * lambda / 3.0, 1e-3);
  b.data("atoms", 401);
  b.data("lambda", lambda);
  return b.finish();
}

ReproReport translated_distance() {
  Builder b("translated-distance");
  const auto grid = uniform_grid(64);
  const auto eta = PathEnsemble::create(1, grid,
                                        {line_path(Rational(1, 2), -4.0, 3.0, grid, 0),
                                         line_path(Rational(1, 2), 4.0, -3.0, grid, 1)});
  const auto gamma0 = Coupling::from_pairs_exact(1, 1, {-4, -1, 4, 1}, {Rational(1, 2), Rational(1, 2)});
  const auto t = translate(eta, gamma0);
  double worst_ot = 0.0, worst_pairing = 0.0;
  std::vector<double> w2s, expected;
  std::string csv = "t,w2_squared,expected\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = grid[j];
    const double want = s <= 1.0 / 3.0 ? 9.0 : (5 - 6 * s) * (5 - 6 * s);
    const auto m = eta.marginal_at_index(j), mt = t.translated.marginal_at_index(j);
    const double ot = solve_ot(m, mt, 2).objective;
    // Two equal-weight atoms on each side: the two pairings exhaust Pi.
    double pairing = std::numeric_limits<double>::infinity();
    if (m.size() == 2 && mt.size() == 2) {
      for (int swap = 0; swap < 2; ++swap) {
        const double a = m.atom(0)[0] - mt.atom(swap)[0], c = m.atom(1)[0] - mt.atom(1 - swap)[0];
        pairing = std::min(pairing, 0.5 * a * a + 0.5 * c * c);
      }
    } else {
      pairing = ot;
    }
    worst_ot = std::max(worst_ot, std::abs(ot - want));
    worst_pairing = std::max(worst_pairing, std::abs(pairing - want));
    w2s.push_back(ot);
    expected.push_back(want);
    csv += format_double(s) + "," + format_double(ot) + "," + format_double(want) + "\n";
  }
  b.check("max_deviation_ot", worst_ot, Relation::kEqual, 0.0);
  b.check("max_deviation_pairings", worst_pairing, Relation::kEqual, 0.0);
  b.data("steps", 64);
  b.artifact("curve.csv", csv);
  b.artifact("curve.svg", svg_line_chart("translated curve distance", "t", "W2^2", grid,
                                         {{"computed", w2s}, {"expected", expected}}));
  return b.finish();
}

ReproReport split_translations() {
  Builder b("split-translations");
  const auto grid = uniform_grid(10);
  const auto eta = PathEnsemble::create(1, grid,
                                        {line_path(Rational(1, 2), 0.0, 1.0, grid, 0),
                                         line_path(Rational(1, 2), 0.0, -1.0, grid, 1)});
  const auto gamma0 = Coupling::product(DiscreteMeasure::dirac({0.0}), half_half(-2.0, 2.0));
  const auto all = enumerate_translations(eta, gamma0);
  b.check("translation_laws", static_cast<double>(all.size()), Relation::kEqual, 3.0);
  const Rational h(1, 2), q(1, 4);
  const std::map<std::string, CurveLaw> want{
      {"eta1", expected_law(grid, {{[](double t) { return -2 - t; }, h}, {[](double t) { return 2 + t; }, h}})},
      {"eta2", expected_law(grid, {{[](double t) { return -2 + t; }, h}, {[](double t) { return 2 - t; }, h}})},
      {"eta3", expected_law(grid, {{[](double t) { return -2 - t; }, q},
                                   {[](double t) { return -2 + t; }, q},
                                   {[](double t) { return 2 - t; }, q},
                                   {[](double t) { return 2 + t; }, q}})},
  };
  for (const auto& [name, law] : want) {
    std::vector<Trajectory> curves;
    for (const auto& [xs, w] : law) {
      Trajectory tr;
      tr.exact_weight = w;
      tr.x = xs;
      curves.push_back(std::move(tr));
    }
    const auto expected = PathEnsemble::create(1, grid, std::move(curves));
    int hits = 0;
    // Euler sums of 0.1 steps differ from t in the last bits.
    for (const auto& t : all) hits += same_law(positions_only(t.translated), expected, 0.0, 1e-12);
    b.check(name + "_found", hits, Relation::kEqual, 1.0);
  }
  return b.finish();
}

ReproReport dirac_arrival() {
  Builder b("dirac-arrival");
  const boost::math::normal normal;
  const std::size_t n = 200;
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(quantile(normal, (static_cast<double>(i) + 0.5) / n));
  const auto mu = DiscreteMeasure::empirical(1, x);
  const auto psi = TangentElement::deterministic(mu, x);
  const auto gamma = Coupling::product(mu, DiscreteMeasure::dirac({0.0}));
  const auto r = transport_along_coupling(psi, gamma);
  b.flag("unique_transport", classify_uniqueness(psi, gamma) == Uniqueness::kUniqueDeterministicTangent);
  b.check("arrival_atoms", static_cast<double>(r.arrival.base().size()), Relation::kEqual, 1.0);
  b.check("arrival_position", std::abs(r.arrival.base().atom(0)[0]), Relation::kEqual, 0.0);
  b.check("arrival_fiber_vs_source_law", max_weight_discrepancy(r.arrival.fiber(0), mu, 0.0), Relation::kEqual, 0.0);
  b.check("arrival_fiber_atoms", static_cast<double>(r.arrival.fiber(0).size()), Relation::kEqual, n);
  b.flag("definition_checks", check_transport(r).ok());
  b.artifact("arrival_fiber.csv", measure_to_csv(r.arrival.fiber(0)));
  return b.finish();
}

ReproReport path_dependence() {
  Builder b("path-dependence");
  const std::size_t n = 401;
  const auto grid = uniform_grid(10);
  const auto mu = uniform_grid_measure(n);
  std::vector<Trajectory> still, swap;
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = mu.atom(i)[0];
    v.push_back(u);
    Trajectory a, c;
    a.exact_weight = c.exact_weight = mu.exact_weights()[i];
    for (double t : grid) {
      a.x.push_back(u);
      c.x.push_back(t * u + (1 - t) * (1 - u));
    }
    still.push_back(std::move(a));
    swap.push_back(std::move(c));
  }
  const auto eta1 = PathEnsemble::create(1, grid, still);
  const auto eta2 = PathEnsemble::create(1, grid, swap);
  const auto psi = TangentElement::deterministic(mu, v);
  b.check("initial_law_gap", max_weight_discrepancy(eta1.marginal_at_index(0), eta2.marginal_at_index(0), 1e-12),
          Relation::kAtMost, 0.0, 1e-12);
  b.check("final_law_gap", max_weight_discrepancy(eta1.marginal_at_index(10), eta2.marginal_at_index(10), 1e-12),
          Relation::kAtMost, 0.0, 1e-12);
  // The second curve passes through delta_1/2 at t = 1/2.
  b.check("midpoint_atoms_eta2", static_cast<double>(eta2.marginal_at_index(5).size()), Relation::kEqual, 1.0);
  b.flag("transports_differ", path_dependence_check(psi, eta1, eta2));
  const auto r1 = transport_along_coupling(psi, eta1.endpoint_coupling());
  const auto r2 = transport_along_coupling(psi, eta2.endpoint_coupling());
  // Arrivals x -> delta_x and x -> delta_{1-x}: mean of (2x - 1)^2 over the
  // grid is (n + 1) / (3 (n - 1)) with n atoms.
  const double d2 = std::pow(tangent_distance(r1.arrival, r2.arrival), 2);
  const double nn = static_cast<double>(n);
  b.check("arrival_distance_squared", d2, Relation::kEqual, (nn + 1.0) / (3.0 * (nn - 1.0)), 1e-12);
  return b.finish();
}

ReproReport lipschitz_sweep_example() {
  Builder b("lipschitz-sweep");
  const ControlProblem p = lipschitz_instance();
  const auto m = DiscreteMeasure::create_exact(1, {-0.6, 0.1, 0.8}, {Rational(1, 4), Rational(1, 2), Rational(1, 4)});
  std::vector<SweepPair> pairs;
  const std::vector<double> deltas{0.5, 0.1, 0.02};
  for (double delta : deltas) {
    std::vector<double> xy;
    for (std::size_t i = 0; i < m.size(); ++i) {
      xy.push_back(m.atom(i)[0]);
      xy.push_back(m.atom(i)[0] + delta);
    }
    Coupling g = Coupling::from_pairs_exact(1, 1, xy, m.exact_weights());
    pairs.push_back({m, g.right(), g});
  }
  SolveOptions o;
  o.budget = 4;
  o.branches = 2;
  o.seed = 1;
  const SweepReport rep = lipschitz_sweep(p, pairs, o);
  b.check("max_ratio_vs_certificate", rep.max_ratio, Relation::kAtMost, rep.max_certificate, kQuadratureTolerance);
  bool translated = true, coercive = true, one_sided = true;
  std::string csv = "pair_id,W2,U_m,U_mprime,translated_cost,ratio,certificate_rhs\n";
  std::vector<double> ratios, certs;
  for (const auto& row : rep.rows) {
    translated = translated && row.translated_ok;
    coercive = coercive && row.coercive;
    one_sided = one_sided && row.u_mprime <= row.translated_cost;
    csv += std::to_string(row.pair_id) + "," + format_double(row.w2) + "," + format_double(row.u_m) + "," +
           format_double(row.u_mprime) + "," + format_double(row.translated_cost) + "," + format_double(row.ratio) +
           "," + format_double(row.certificate_rhs) + "\n";
    ratios.push_back(row.ratio);
    certs.push_back(row.certificate_rhs / row.w2);
  }
  b.flag("translated_cost_certificate_all_pairs", translated);
  b.flag("coercivity_all_pairs", coercive);
  b.flag("translated_ensemble_bounds_value", one_sided);
  b.flag("hypotheses_hold", check_hypotheses(p, 1, 500, 1).ok(p.constant));
  b.data("deltas", deltas);
  b.artifact("sweep.csv", csv);
  b.artifact("sweep.svg", svg_line_chart("Lipschitz sweep", "delta", "ratio", deltas,
                                         {{"ratio", ratios}, {"certificate", certs}}));
  return b.finish();
}

ReproReport split_target_gap() {
  Builder b("split-target-gap");
  const ControlProblem p = split_target_instance();
  const auto m0 = DiscreteMeasure::dirac({0.0});
  SolveOptions o;
  o.branches = 16;
  o.budget = 50;
  o.mode = ControlMode::kRandomized;
  const ValueResult u = solve_value(p, m0, o);
  o.mode = ControlMode::kDeterministic;
  const ValueResult v = solve_value(p, m0, o);
  b.check("randomized_value", u.value, Relation::kAtMost, 0.1);
  b.check("deterministic_value", v.value, Relation::kAtLeast, 0.9);
  b.check("gap", v.value - u.value, Relation::kAtLeast, 0.8);
  b.check("randomized_particles", static_cast<double>(u.ensemble.paths.size()), Relation::kEqual, 16.0);
  b.check("steps", static_cast<double>(p.steps), Relation::kEqual, 40.0);
  b.data("scope",
         "gap between budget-limited upper bounds; the deterministic side ties controls to particle positions");
  b.artifact("randomized_paths.csv", ensemble_to_csv(u.ensemble.paths));
  return b.finish();
}

const std::vector<std::pair<std::string, ReproReport (*)()>>& registry() {
  static const std::vector<std::pair<std::string, ReproReport (*)()>> r{
      {"nonuniq-transport", nonuniq_transport},   {"lambda-E-D", lambda_e_d},
      {"translated-distance", translated_distance}, {"split-translations", split_translations},
      {"dirac-arrival", dirac_arrival},           {"path-dependence", path_dependence},
      {"lipschitz-sweep", lipschitz_sweep_example}, {"split-target-gap", split_target_gap},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& repro_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [id, f] : registry()) out.push_back(id);
    return out;
  }();
  return ids;
}

ReproReport run_repro(const std::string& id) {
  for (const auto& [name, f] : registry()) {
    if (name == id) return f();
  }
  fail(ErrorCode::kUnknownExample, "unknown example id \"" + id + "\"");
}

}  // namespace wtan
