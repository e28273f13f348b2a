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

/* C interface to the wtan library. Objects are opaque handles owned by the
 * caller and released with the matching *_free function (NULL is accepted).
 * Every fallible call returns a wtan_status; on failure the message of the
 * calling thread's last error is available from wtan_last_error(). */

#ifndef WTAN_WTAN_H_
#define WTAN_WTAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WTAN_API __declspec(dllexport)
#else
#define WTAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wtan_status {
  WTAN_OK = 0,
  WTAN_INVALID_ARGUMENT = 1,
  WTAN_DIMENSION_MISMATCH = 2,
  WTAN_MARGINAL_MISMATCH = 3,
  WTAN_BASE_MISMATCH = 4,
  WTAN_SOLVER_FAILURE = 5,
  WTAN_TOO_LARGE = 6,
  WTAN_NON_RATIONAL_WEIGHTS = 7,
  WTAN_NON_CONVERGENCE = 8,
  WTAN_MISSING_VELOCITIES = 9,
  WTAN_ZERO_COST = 10,
  WTAN_GRID_MISMATCH = 11,
  WTAN_NON_FINITE_FIELD = 12,
  WTAN_PARSE = 13,
  WTAN_UNKNOWN_EXAMPLE = 14,
  WTAN_BUDGET_EXHAUSTED = 15,
  WTAN_INTERNAL = 16
} wtan_status;

typedef struct wtan_measure wtan_measure;
typedef struct wtan_coupling wtan_coupling;
typedef struct wtan_tangent wtan_tangent;
typedef struct wtan_ensemble wtan_ensemble;
/* Named text artifacts (JSON, CSV, SVG) plus a pass flag and a summary. */
typedef struct wtan_result wtan_result;

WTAN_API const char* wtan_version(void);
WTAN_API const char* wtan_status_name(wtan_status status);
/* Message of the last failing call on this thread; "" when none. */
WTAN_API const char* wtan_last_error(void);
/* 0 restores the default (WTAN_THREADS, else 1). Results never depend on
 * the thread count. */
WTAN_API wtan_status wtan_set_threads(size_t threads);
/* Tolerances used by the *_from_json readers: atom merging, and the
 * left-endpoint rule for ensembles. Negative values restore defaults. */
WTAN_API wtan_status wtan_set_input_tolerances(double merge, double velocity);
/* Releases strings returned by the library. */
WTAN_API void wtan_string_free(char* text);

/* Measures. */
WTAN_API wtan_status wtan_measure_create(size_t dim, size_t atoms, const double* coords, const double* weights,
                                         wtan_measure** out);
WTAN_API wtan_status wtan_measure_from_json(const char* json, wtan_measure** out);
WTAN_API wtan_status wtan_measure_to_json(const wtan_measure* m, char** json);
WTAN_API size_t wtan_measure_dim(const wtan_measure* m);
WTAN_API size_t wtan_measure_size(const wtan_measure* m);
/* Copies atom i into coords (dim values) and its weight into *weight. */
WTAN_API wtan_status wtan_measure_atom(const wtan_measure* m, size_t i, double* coords, double* weight);
WTAN_API void wtan_measure_free(wtan_measure* m);

/* Couplings. */
WTAN_API wtan_status wtan_coupling_from_json(const char* json, wtan_coupling** out);
WTAN_API wtan_status wtan_coupling_to_json(const wtan_coupling* c, char** json);
/* (sum pi |x - y|^p)^(1/p). */
WTAN_API wtan_status wtan_coupling_cost(const wtan_coupling* c, double p, double* cost);
WTAN_API void wtan_coupling_free(wtan_coupling* c);

/* Tangent elements and path ensembles. */
WTAN_API wtan_status wtan_tangent_from_json(const char* json, wtan_tangent** out);
WTAN_API wtan_status wtan_tangent_to_json(const wtan_tangent* t, char** json);
WTAN_API void wtan_tangent_free(wtan_tangent* t);
WTAN_API wtan_status wtan_ensemble_from_json(const char* json, wtan_ensemble** out);
WTAN_API wtan_status wtan_ensemble_to_json(const wtan_ensemble* e, char** json);
WTAN_API void wtan_ensemble_free(wtan_ensemble* e);

/* Exact discrete optimal transport. `coupling` may be NULL. */
WTAN_API wtan_status wtan_solve_ot(const wtan_measure* mu, const wtan_measure* nu, double p, double* distance,
                                   wtan_coupling** coupling);

/* Tangent metrics: d_mu (same base), the sheaf distance D, and the
 * transport comparison E with the squared base distance. */
WTAN_API wtan_status wtan_tangent_distance(const wtan_tangent* a, const wtan_tangent* b, double* distance);
WTAN_API wtan_status wtan_sheaf_distance(const wtan_tangent* a, const wtan_tangent* b, double* distance);
WTAN_API wtan_status wtan_compare_by_transport(const wtan_tangent* a, const wtan_tangent* b, double* value,
                                               double* w2_squared);

/* Parallel transport of psi along gamma on `steps` uniform steps. With
 * enumerate_limit > 0 all vertex transports up to that count are listed.
 * Artifacts: transport.json. */
WTAN_API wtan_status wtan_parallel_transport(const wtan_tangent* psi, const wtan_coupling* gamma, size_t steps,
                                             size_t enumerate_limit, wtan_result** out);

/* Translation of eta along gamma0. Artifacts: translated.json, distance.csv
 * (t, W_2^2 and W_2 between the two curves), distance.svg; with
 * enumerate_limit > 0 also translations.json. */
WTAN_API wtan_status wtan_translate(const wtan_ensemble* eta, const wtan_coupling* gamma0, size_t enumerate_limit,
                                    wtan_result** out);

/* Hoelder estimates of a library functional ("linear-quadratic",
 * "linear-cosine", "interaction-quadratic", "interaction-cosine",
 * "half-w2") for each alpha. Artifacts: holder.json, holder.svg. */
WTAN_API wtan_status wtan_holder(const char* functional, size_t dim, const double* alphas, size_t alpha_count,
                                 size_t samples, uint64_t seed, wtan_result** out);

typedef struct wtan_control_options {
  int randomized;        /* nonzero: randomized controls */
  size_t budget;         /* multi-starts */
  size_t branches;       /* per atom, randomized mode */
  size_t max_iterations;
  uint64_t seed;
  const double* sweep_shifts; /* optional: Lipschitz sweep over m + delta */
  size_t sweep_count;
} wtan_control_options;

WTAN_API void wtan_control_options_default(wtan_control_options* options);
/* Solves the control problem (JSON, see the README) from m0. Artifacts:
 * value.json, paths.json, and sweep.csv / sweep.svg when shifts are given. */
WTAN_API wtan_status wtan_control(const char* problem_json, const wtan_measure* m0,
                                  const wtan_control_options* options, wtan_result** out);

/* Worked examples. */
WTAN_API size_t wtan_repro_count(void);
WTAN_API const char* wtan_repro_id(size_t i);
WTAN_API wtan_status wtan_repro(const char* id, wtan_result** out);

/* Results. */
WTAN_API wtan_status wtan_result_create(wtan_result** out);
WTAN_API wtan_status wtan_result_add(wtan_result* r, const char* name, const char* content);
WTAN_API int wtan_result_passed(const wtan_result* r);
WTAN_API const char* wtan_result_summary(const wtan_result* r);
WTAN_API size_t wtan_result_count(const wtan_result* r);
WTAN_API const char* wtan_result_name(const wtan_result* r, size_t i);
WTAN_API const char* wtan_result_content(const wtan_result* r, size_t i);
/* Writes the artifacts into `dir` atomically (all or nothing). SVG
 * artifacts are skipped unless include_svg is nonzero. */
WTAN_API wtan_status wtan_result_write(const wtan_result* r, const char* dir, int include_svg);
WTAN_API void wtan_result_free(wtan_result* r);

#ifdef __cplusplus
}
#endif

#endif /* WTAN_WTAN_H_ */
