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

#ifndef WTAN_REGULARITY_HPP_
#define WTAN_REGULARITY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wtan/measure.hpp"
#include "wtan/tangent.hpp"
#include "wtan/transport.hpp"

namespace wtan {

enum class FunctionalKind { kLinear, kInteraction, kHalfSquaredW2ToRef, kUser };

// U: P_2(R^d) -> R with a deterministic derivative x -> phi_mu(x).
class Functional {
 public:
  using Scalar = std::function<double(std::span<const double>)>;
  using Vector = std::function<Point(std::span<const double>)>;
  using Evaluate = std::function<double(const DiscreteMeasure&)>;
  // phi at every atom of mu, row-major.
  using Gradient = std::function<std::vector<double>(const DiscreteMeasure&)>;

  // U(mu) = int V dmu, phi = grad V. `hessian_bound` bounds |D^2 V|.
  static Functional linear(Scalar v, Vector grad_v, double hessian_bound, std::string name);
  // V(x) = |x|^2 / 2.
  static Functional linear_quadratic();
  // V(x) = a . x + b.
  static Functional linear_affine(Point a, double b);
  // U(mu) = 1/2 int int W(x - y) dmu dmu for an even W, phi = grad W * mu.
  static Functional interaction(Scalar w, Vector grad_w, double hessian_bound, std::string name);
  // W(x) = |x|^2 / 2.
  static Functional interaction_quadratic();
  // U(mu) = W_2^2(mu, sigma) / 2 with phi(x) = x - b(x), b the barycentric
  // projection of the solver's optimal coupling.
  static Functional half_squared_w2(DiscreteMeasure reference);
  static Functional constant(double c);
  // Remainder bound K (taylor_remainder <= K C_2^2) is unknown for user
  // functionals.
  static Functional user(std::string name, Evaluate evaluate, Gradient gradient,
                         double curvature_bound = std::numeric_limits<double>::infinity());

  double evaluate(const DiscreteMeasure& mu) const { return evaluate_(mu); }
  std::vector<double> gradient(const DiscreteMeasure& mu) const { return gradient_(mu); }
  TangentElement derivative(const DiscreteMeasure& mu) const;
  // True when the derivative at mu depends on an arbitrary choice between
  // several optimal couplings (HalfSquaredW2ToRef only).
  bool derivative_is_heuristic(const DiscreteMeasure& mu) const;

  FunctionalKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double curvature_bound() const { return curvature_; }

  Functional scaled(double c) const;
  Functional plus(const Functional& other) const;

 private:
  FunctionalKind kind_ = FunctionalKind::kUser;
  std::string name_;
  Evaluate evaluate_;
  Gradient gradient_;
  double curvature_ = std::numeric_limits<double>::infinity();
  DiscreteMeasure reference_;  // HalfSquaredW2ToRef only
};

// |U(nu) - U(mu) - sum gamma (y - x) . phi_mu(x)|.
double taylor_remainder(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const Coupling& gamma);

// (sum gamma |phi_mu(x) - phi_nu(y)|^2)^(1/2) / C_2(gamma)^alpha.
double holder_quotient(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const Coupling& gamma, double alpha);
// Same numerator over C_{2 alpha}(gamma)^alpha.
double holder_quotient_j(const Functional& u, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const Coupling& gamma, double alpha);

enum class SampleFamily { kGraphPerturbation, kAtomSplit, kOptimalJitter, kScaledProduct };
const char* to_string(SampleFamily f);

struct CouplingSample {
  SampleFamily family = SampleFamily::kGraphPerturbation;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  Coupling gamma;  // in Pi(mu, nu), 0 < C_2 <= 1
};

struct SamplerOptions {
  std::size_t dim = 1;
  std::size_t min_atoms = 2;
  std::size_t max_atoms = 8;
  double scale = 2.0;  // base atoms are drawn from [-scale, scale]^d
  std::uint64_t seed = 0;
};

// Deterministic per index: sample(k) depends only on the options and k.
class CouplingSampler {
 public:
  explicit CouplingSampler(SamplerOptions options);
  CouplingSample sample(std::size_t index) const;
  const SamplerOptions& options() const { return options_; }

 private:
  SamplerOptions options_;
};

struct HolderEstimate {
  double alpha = 1.0;
  double i_estimate = 0.0;  // lower bound on I_alpha
  double j_estimate = 0.0;  // lower bound on J_alpha
  std::size_t i_argmax = 0;
  std::size_t j_argmax = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> i_quotients;  // per sample, in sample order
  std::vector<double> j_quotients;
};

// Both estimates over the same `budget` samples.
HolderEstimate estimate_holder(const Functional& u, const CouplingSampler& sampler, double alpha,
                               std::size_t budget);

struct Estimate {
  double value = 0.0;
  std::size_t argmax = 0;
  CouplingSample coupling;
};

Estimate estimate_I_alpha(const Functional& u, const CouplingSampler& sampler, double alpha, std::size_t budget);
Estimate estimate_J_alpha(const Functional& u, const CouplingSampler& sampler, double alpha, std::size_t budget);

// sup |U| + sup d_mu(DU(mu), 0) + I_alpha, each over the same samples.
double c1alpha_norm(const Functional& u, const CouplingSampler& sampler, double alpha, std::size_t budget);

}  // namespace wtan

#endif  // WTAN_REGULARITY_HPP_
