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

#include "wtan/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "stream_rng.hpp"
#include "wtan/error.hpp"
#include "wtan/parallel.hpp"

namespace wtan {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

Point difference(std::span<const double> a, std::span<const double> b) {
  Point d(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) d[c] = a[c] - b[c];
  return d;
}

// Index of every left (right) atom of gamma in mu (nu).
struct CouplingMap {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

std::vector<std::size_t> map_atoms(const DiscreteMeasure& from, const DiscreteMeasure& to, const char* side) {
  if (from.dim() != to.dim() || !same_measure(from, to, kMarginalTolerance)) {
    fail(ErrorCode::kMarginalMismatch, std::string("coupling ") + side + " marginal differs from the measure");
  }
  std::vector<std::size_t> map(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) map[i] = *to.find_atom(from.atom(i));
  return map;
}

CouplingMap map_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Coupling& gamma) {
  return {map_atoms(gamma.left(), mu, "left"), map_atoms(gamma.right(), nu, "right")};
}

struct QuotientParts {
  double numerator2 = 0.0;  // sum gamma |phi - psi|^2
  double cost2 = 0.0;       // sum gamma |x - y|^2
  double cost2a = 0.0;      // sum gamma |x - y|^(2 alpha)
};

QuotientParts quotient_parts(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const Coupling& gamma, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  const auto map = map_coupling(mu, nu, gamma);
  const std::size_t d = mu.dim();
  const auto phi = u.gradient(mu);
  const auto psi = u.gradient(nu);
  QuotientParts q;
  for (const auto& e : gamma.entries()) {
    std::span<const double> a(phi.data() + map.left[e.i] * d, d);
    std::span<const double> b(psi.data() + map.right[e.j] * d, d);
    const double d2 = squared_distance(gamma.left().atom(e.i), gamma.right().atom(e.j));
    q.numerator2 += e.mass * squared_distance(a, b);
    q.cost2 += e.mass * d2;
    q.cost2a += e.mass * (alpha == 1.0 ? d2 : std::pow(d2, alpha));
  }
  if (q.cost2 == 0.0) fail(ErrorCode::kZeroCost, "coupling has zero transport cost");
  return q;
}

double i_denominator(const QuotientParts& q, double alpha) {
  return alpha == 1.0 ? std::sqrt(q.cost2) : std::pow(q.cost2, alpha / 2.0);
}

// C_{2 alpha}^alpha <= C_2^alpha by Jensen; the min only absorbs rounding.
double j_denominator(const QuotientParts& q, double alpha) {
  return std::min(std::sqrt(q.cost2a), i_denominator(q, alpha));
}

std::vector<double> apply_rows(const DiscreteMeasure& mu, const Functional::Vector& f) {
  std::vector<double> out;
  out.reserve(mu.size() * mu.dim());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Point g = f(mu.atom(i));
    if (g.size() != mu.dim()) fail(ErrorCode::kDimensionMismatch, "gradient has the wrong dimension");
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

}  // namespace

Functional Functional::linear(Scalar v, Vector grad_v, double hessian_bound, std::string name) {
  Functional f;
  f.kind_ = FunctionalKind::kLinear;
  f.name_ = std::move(name);
  f.curvature_ = hessian_bound;
  f.evaluate_ = [v](const DiscreteMeasure& mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * v(mu.atom(i));
    return s;
  };
  f.gradient_ = [grad_v](const DiscreteMeasure& mu) { return apply_rows(mu, grad_v); };
  return f;
}

Functional Functional::linear_quadratic() {
  return linear([](std::span<const double> x) { return 0.5 * dot(x, x); },
                [](std::span<const double> x) { return Point(x.begin(), x.end()); }, 1.0, "linear:quadratic");
}

Functional Functional::linear_affine(Point a, double b) {
  return linear([a, b](std::span<const double> x) { return dot(a, x) + b; },
                [a](std::span<const double>) { return a; }, 0.0, "linear:affine");
}

Functional Functional::interaction(Scalar w, Vector grad_w, double hessian_bound, std::string name) {
  Functional f;
  f.kind_ = FunctionalKind::kInteraction;
  f.name_ = std::move(name);
  f.curvature_ = hessian_bound;
  f.evaluate_ = [w](const DiscreteMeasure& mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t j = 0; j < mu.size(); ++j) {
        s += mu.weight(i) * mu.weight(j) * w(difference(mu.atom(i), mu.atom(j)));
      }
    }
    return 0.5 * s;
  };
  f.gradient_ = [grad_w](const DiscreteMeasure& mu) {
    const std::size_t d = mu.dim();
    std::vector<double> out(mu.size() * d, 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const Point g = grad_w(difference(mu.atom(i), mu.atom(j)));
        for (std::size_t c = 0; c < d; ++c) out[i * d + c] += mu.weight(j) * g[c];
      }
    }
    return out;
  };
  return f;
}

Functional Functional::interaction_quadratic() {
  return interaction([](std::span<const double> x) { return 0.5 * dot(x, x); },
                     [](std::span<const double> x) { return Point(x.begin(), x.end()); }, 1.0,
                     "interaction:quadratic");
}

Functional Functional::half_squared_w2(DiscreteMeasure reference) {
  Functional f;
  f.kind_ = FunctionalKind::kHalfSquaredW2ToRef;
  f.name_ = "half_squared_w2";
  f.reference_ = reference;
  f.evaluate_ = [reference](const DiscreteMeasure& mu) { return 0.5 * solve_ot(mu, reference, 2).objective; };
  f.gradient_ = [reference](const DiscreteMeasure& mu) {
    const std::size_t d = mu.dim();
    const OtResult ot = solve_ot(mu, reference, 2);
    std::vector<double> out(mu.size() * d);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      auto x = mu.atom(i);
      std::copy(x.begin(), x.end(), out.begin() + i * d);
    }
    // x - b(x), with b(x_i) = sum_j pi_ij y_j / w_i.
    for (const auto& e : ot.coupling.entries()) {
      auto y = reference.atom(e.j);
      const double share = e.mass / mu.weight(e.i);
      for (std::size_t c = 0; c < d; ++c) out[e.i * d + c] -= share * y[c];
    }
    return out;
  };
  return f;
}

Functional Functional::constant(double c) {
  return user(
      "constant", [c](const DiscreteMeasure&) { return c; },
      [](const DiscreteMeasure& mu) { return std::vector<double>(mu.size() * mu.dim(), 0.0); }, 0.0);
}

Functional Functional::user(std::string name, Evaluate evaluate, Gradient gradient, double curvature_bound) {
  Functional f;
  f.name_ = std::move(name);
  f.evaluate_ = std::move(evaluate);
  f.gradient_ = std::move(gradient);
  f.curvature_ = curvature_bound;
  return f;
}

TangentElement Functional::derivative(const DiscreteMeasure& mu) const {
  return TangentElement::deterministic(mu, gradient(mu));
}

bool Functional::derivative_is_heuristic(const DiscreteMeasure& mu) const {
  if (kind_ != FunctionalKind::kHalfSquaredW2ToRef) return false;
  const OtResult ot = solve_ot(mu, reference_, 2);
  const double slack = 1e-9 * (1.0 + ot.objective);
  if (mu.size() * reference_.size() <= kMaxVertexCells && mu.has_exact_weights() &&
      reference_.has_exact_weights()) {
    std::size_t optimal = 0;
    for (const auto& v : enumerate_vertex_couplings(mu, reference_)) {
      if (std::pow(cost(v, 2), 2) <= ot.objective + slack) ++optimal;
    }
    return optimal > 1;
  }
  // Larger instances: more tight cells than a spanning tree has edges means
  // the optimum may not be unique (conservative).
  const auto c = cost_matrix(mu, reference_, 2);
  const double max_c = *std::max_element(c.begin(), c.end());
  std::size_t tight = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < reference_.size(); ++j) {
      if (c[i * reference_.size() + j] - ot.u[i] - ot.v[j] <= 1e-10 * (1.0 + max_c)) ++tight;
    }
  }
  return tight > mu.size() + reference_.size() - 1;
}

Functional Functional::scaled(double c) const {
  Functional f = *this;
  f.name_ = std::to_string(c) + "*" + name_;
  f.curvature_ = std::abs(c) * curvature_;
  f.evaluate_ = [c, e = evaluate_](const DiscreteMeasure& mu) { return c * e(mu); };
  f.gradient_ = [c, g = gradient_](const DiscreteMeasure& mu) {
    auto out = g(mu);
    for (double& v : out) v *= c;
    return out;
  };
  return f;
}

Functional Functional::plus(const Functional& other) const {
  Functional f;
  f.name_ = name_ + "+" + other.name_;
  f.curvature_ = curvature_ + other.curvature_;
  f.evaluate_ = [a = evaluate_, b = other.evaluate_](const DiscreteMeasure& mu) { return a(mu) + b(mu); };
  f.gradient_ = [a = gradient_, b = other.gradient_](const DiscreteMeasure& mu) {
    auto out = a(mu);
    const auto more = b(mu);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += more[k];
    return out;
  };
  return f;
}

double taylor_remainder(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const Coupling& gamma) {
  const auto map = map_coupling(mu, nu, gamma);
  const std::size_t d = mu.dim();
  const auto phi = u.gradient(mu);
  double first_order = 0.0;
  for (const auto& e : gamma.entries()) {
    const Point step = difference(gamma.right().atom(e.j), gamma.left().atom(e.i));
    first_order += e.mass * dot(step, std::span<const double>(phi.data() + map.left[e.i] * d, d));
  }
  return std::abs(u.evaluate(nu) - u.evaluate(mu) - first_order);
}

double holder_quotient(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const Coupling& gamma, double alpha) {
  const auto q = quotient_parts(u, mu, nu, gamma, alpha);
  return std::sqrt(q.numerator2) / i_denominator(q, alpha);
}

double holder_quotient_j(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const Coupling& gamma, double alpha) {
  const auto q = quotient_parts(u, mu, nu, gamma, alpha);
  return std::sqrt(q.numerator2) / j_denominator(q, alpha);
}

const char* to_string(SampleFamily f) {
  switch (f) {
    case SampleFamily::kGraphPerturbation:
      return "graph_perturbation";
    case SampleFamily::kAtomSplit:
      return "atom_split";
    case SampleFamily::kOptimalJitter:
      return "optimal_jitter";
    case SampleFamily::kScaledProduct:
      return "scaled_product";
  }
  return "graph_perturbation";
}

CouplingSampler::CouplingSampler(SamplerOptions options) : options_(options) {
  if (options_.dim == 0 || options_.min_atoms == 0 || options_.max_atoms < options_.min_atoms) {
    fail(ErrorCode::kInvalidArgument, "sampler needs dim >= 1 and 1 <= min_atoms <= max_atoms");
  }
  if (!(options_.scale > 0.0)) fail(ErrorCode::kInvalidArgument, "sampler scale must be positive");
}

namespace {

DiscreteMeasure random_base(detail::StreamRng& rng, const SamplerOptions& o, std::size_t n) {
  std::vector<double> coords(n * o.dim);
  for (double& c : coords) c = rng.uniform(-o.scale, o.scale);
  std::vector<Rational> w(n);
  Rational total = 0;
  for (auto& v : w) {
    v = Rational(rng.integer(1, 6));
    total += v;
  }
  for (auto& v : w) v /= total;
  return DiscreteMeasure::create_exact(o.dim, std::move(coords), std::move(w));
}

// A smooth random field xi(x)_c = sum_k a_k sin(b_k . x + c_k).
struct SmoothField {
  std::vector<double> amp, freq, phase;  // per component and term
  std::size_t dim;
  static constexpr std::size_t kTerms = 3;

  SmoothField(detail::StreamRng& rng, std::size_t d) : dim(d) {
    for (std::size_t c = 0; c < d * kTerms; ++c) {
      amp.push_back(rng.uniform(-1.0, 1.0));
      phase.push_back(rng.uniform(0.0, 6.283185307179586));
      for (std::size_t e = 0; e < d; ++e) freq.push_back(rng.uniform(-2.0, 2.0));
    }
  }
  Point operator()(std::span<const double> x) const {
    Point out(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t k = 0; k < kTerms; ++k) {
        const std::size_t t = c * kTerms + k;
        double arg = phase[t];
        for (std::size_t e = 0; e < dim; ++e) arg += freq[t * dim + e] * x[e];
        out[c] += amp[t] * std::sin(arg);
      }
    }
    return out;
  }
};

struct Displacement {
  std::size_t i;
  Point step;
  Rational mass;
};

// Moves x_i by s * step with s chosen so C_2 equals `target`.
Coupling displaced(const DiscreteMeasure& mu, std::vector<Displacement> moves, double target) {
  double c2 = 0.0;
  for (const auto& m : moves) c2 += to_double(m.mass) * dot(m.step, m.step);
  c2 = std::sqrt(c2);
  if (c2 == 0.0) {
    // Degenerate field: shift everything along the first axis.
    for (auto& m : moves) m.step[0] = 1.0;
    c2 = 1.0;
  }
  const double s = target / c2;
  std::vector<double> pairs;
  std::vector<Rational> masses;
  for (const auto& m : moves) {
    auto x = mu.atom(m.i);
    pairs.insert(pairs.end(), x.begin(), x.end());
    for (std::size_t c = 0; c < x.size(); ++c) pairs.push_back(x[c] + s * m.step[c]);
    masses.push_back(m.mass);
  }
  return Coupling::from_pairs_exact(mu.dim(), mu.dim(), pairs, masses);
}

Coupling scaled_coupling(const Coupling& gamma, double s) {
  const std::size_t d = gamma.left().dim();
  std::vector<double> pairs;
  for (const auto& e : gamma.entries()) {
    for (double v : gamma.left().atom(e.i)) pairs.push_back(s * v);
    for (double v : gamma.right().atom(e.j)) pairs.push_back(s * v);
  }
  if (gamma.has_exact_masses()) return Coupling::from_pairs_exact(d, d, pairs, gamma.exact_masses());
  std::vector<double> masses;
  for (const auto& e : gamma.entries()) masses.push_back(e.mass);
  return Coupling::from_pairs(d, d, pairs, masses);
}

DiscreteMeasure jittered(detail::StreamRng& rng, const DiscreteMeasure& mu, double size) {
  std::vector<double> coords;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double v : mu.atom(i)) coords.push_back(v + rng.uniform(-size, size));
  }
  return DiscreteMeasure::create_exact(mu.dim(), std::move(coords), mu.exact_weights());
}

}  // namespace

CouplingSample CouplingSampler::sample(std::size_t index) const {
  detail::StreamRng rng(options_.seed, index);
  const auto n = static_cast<std::size_t>(
      rng.integer(static_cast<std::int64_t>(options_.min_atoms), static_cast<std::int64_t>(options_.max_atoms)));
  const DiscreteMeasure mu = random_base(rng, options_, n);
  // Target transport cost in (0.01, 1); kept off 1 so rounding cannot push
  // C_2 above it.
  const double target = 0.999999 - 0.989999 * rng.uniform();
  CouplingSample out;
  out.family = static_cast<SampleFamily>(index % 4);
  Coupling gamma;
  switch (out.family) {
    case SampleFamily::kGraphPerturbation: {
      const SmoothField xi(rng, options_.dim);
      std::vector<Displacement> moves;
      const auto w = mu.exact_weights();
      for (std::size_t i = 0; i < n; ++i) moves.push_back({i, xi(mu.atom(i)), w[i]});
      gamma = displaced(mu, std::move(moves), target);
      break;
    }
    case SampleFamily::kAtomSplit: {
      // A fraction eps of atom i jumps onto atom j; everything else stays.
      // Small eps probes the pointwise Lipschitz constant of the derivative.
      const auto w = mu.exact_weights();
      const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 1));
      Point dest(mu.atom(i).begin(), mu.atom(i).end());
      if (n > 1) {
        auto j = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(n) - 2));
        if (j >= i) ++j;
        dest.assign(mu.atom(j).begin(), mu.atom(j).end());
      } else {
        dest[0] += 1.0;
      }
      const double jump2 = squared_distance(mu.atom(i), dest);
      Rational eps(1, 1 << 20);
      if (rng.uniform() < 0.5) {
        eps = std::min(Rational(1, 2), exact_rational(target * target / (to_double(w[i]) * jump2)));
      }
      std::vector<double> pairs;
      std::vector<Rational> masses;
      for (std::size_t k = 0; k < n; ++k) {
        auto x = mu.atom(k);
        pairs.insert(pairs.end(), x.begin(), x.end());
        pairs.insert(pairs.end(), x.begin(), x.end());
        masses.push_back(k == i ? w[k] * (1 - eps) : w[k]);
      }
      auto x = mu.atom(i);
      pairs.insert(pairs.end(), x.begin(), x.end());
      pairs.insert(pairs.end(), dest.begin(), dest.end());
      masses.push_back(w[i] * eps);
      gamma = Coupling::from_pairs_exact(mu.dim(), mu.dim(), pairs, masses);
      break;
    }
    case SampleFamily::kOptimalJitter:
    case SampleFamily::kScaledProduct: {
      DiscreteMeasure nu = jittered(rng, mu, 0.5);
      if (out.family == SampleFamily::kScaledProduct) {
        const std::size_t m = rng.integer(static_cast<std::int64_t>(options_.min_atoms),
                                          static_cast<std::int64_t>(options_.max_atoms));
        nu = jittered(rng, random_base(rng, options_, m).scaled(0.25), 0.1);
        gamma = Coupling::product(mu, nu);
      } else {
        gamma = solve_ot(mu, nu, 2).coupling;
      }
      const double c2 = cost(gamma, 2);
      // Scaling both measures about the origin keeps the coupling optimal
      // (or a product) and sets C_2 to the target.
      gamma = scaled_coupling(gamma, c2 > 0.0 ? target / c2 : 1.0);
      if (cost(gamma, 2) == 0.0) {
        gamma = displaced(mu, {{0, Point(options_.dim, 1.0), Rational(1)}}, target);
      }
      break;
    }
  }
  out.mu = gamma.left();
  out.nu = gamma.right();
  out.gamma = std::move(gamma);
  return out;
}

HolderEstimate estimate_holder(const Functional& u, const CouplingSampler& sampler, double alpha,
                               std::size_t budget) {
  if (budget == 0) fail(ErrorCode::kInvalidArgument, "sampling budget must be at least 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1]");
  HolderEstimate out;
  out.alpha = alpha;
  out.samples = budget;
  out.seed = sampler.options().seed;
  out.i_quotients.assign(budget, 0.0);
  out.j_quotients.assign(budget, 0.0);
  parallel_for(budget, [&](std::size_t k) {
    const CouplingSample s = sampler.sample(k);
    const auto q = quotient_parts(u, s.mu, s.nu, s.gamma, alpha);
    out.i_quotients[k] = std::sqrt(q.numerator2) / i_denominator(q, alpha);
    out.j_quotients[k] = std::sqrt(q.numerator2) / j_denominator(q, alpha);
  });
  for (std::size_t k = 0; k < budget; ++k) {
    if (out.i_quotients[k] > out.i_estimate) {
      out.i_estimate = out.i_quotients[k];
      out.i_argmax = k;
    }
    if (out.j_quotients[k] > out.j_estimate) {
      out.j_estimate = out.j_quotients[k];
      out.j_argmax = k;
    }
  }
  return out;
}

Estimate estimate_I_alpha(const Functional& u, const CouplingSampler& sampler, double alpha, std::size_t budget) {
  const auto h = estimate_holder(u, sampler, alpha, budget);
  return {h.i_estimate, h.i_argmax, sampler.sample(h.i_argmax)};
}

Estimate estimate_J_alpha(const Functional& u, const CouplingSampler& sampler, double alpha, std::size_t budget) {
  const auto h = estimate_holder(u, sampler, alpha, budget);
  return {h.j_estimate, h.j_argmax, sampler.sample(h.j_argmax)};
}

double c1alpha_norm(const Functional& u, const CouplingSampler& sampler, double alpha, std::size_t budget) {
  const auto h = estimate_holder(u, sampler, alpha, budget);
  std::vector<double> sup_value(budget), sup_slope(budget);
  parallel_for(budget, [&](std::size_t k) {
    const CouplingSample s = sampler.sample(k);
    double value = 0.0, slope = 0.0;
    for (const DiscreteMeasure* m : {&s.mu, &s.nu}) {
      value = std::max(value, std::abs(u.evaluate(*m)));
      const auto g = u.gradient(*m);
      double norm2 = 0.0;
      for (std::size_t i = 0; i < m->size(); ++i) {
        norm2 += m->weight(i) * dot(std::span<const double>(g.data() + i * m->dim(), m->dim()),
                                    std::span<const double>(g.data() + i * m->dim(), m->dim()));
      }
      slope = std::max(slope, std::sqrt(norm2));
    }
    sup_value[k] = value;
    sup_slope[k] = slope;
  });
  return *std::max_element(sup_value.begin(), sup_value.end()) +
         *std::max_element(sup_slope.begin(), sup_slope.end()) + h.i_estimate;
}

}  // namespace wtan
