#ifndef QWSEARCH_H
#define QWSEARCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call. Values other than `Ok` match the CLI exit codes.
typedef enum QwsStatus {
  QWS_STATUS_OK = 0,
  QWS_STATUS_INVALID_ARGUMENT = 2,
  QWS_STATUS_SIZE_LIMIT = 3,
  QWS_STATUS_NO_MAXIMUM = 4,
  QWS_STATUS_ROOT_NOT_FOUND = 5,
  QWS_STATUS_IO = 6,
  // A required pointer argument was null.
  QWS_STATUS_NULL_POINTER = 7,
  // The library panicked.
  QWS_STATUS_INTERNAL = 99,
} QwsStatus;

typedef enum QwsRegime {
  QWS_REGIME_SMALL = 0,
  QWS_REGIME_MEDIUM = 1,
  QWS_REGIME_LARGE = 2,
  QWS_REGIME_XL = 3,
  QWS_REGIME_XXL = 4,
} QwsRegime;

// Opaque success-probability curve of one instance.
typedef struct QwsCurve QwsCurve;

// Opaque weighted graph.
typedef struct QwsGraph QwsGraph;

// Opaque sampled trace.
typedef struct QwsTrace QwsTrace;

// Analytic prediction for one instance. The final state is given in the
// `(a, b, c, d)` basis.
typedef struct QwsPrediction {
  enum QwsRegime regime;
  double k;
  double r;
  double gamma_c;
  double t_star;
  double p_star;
  double p_effective;
  double expected_runtime;
  double state_re[4];
  double state_im[4];
  // When set, the amplitude on `a` is only known up to a phase.
  bool phase_unspecified;
} QwsPrediction;

typedef struct QwsPeak {
  double t;
  double p;
} QwsPeak;

typedef struct QwsMediumEigensystem {
  double k;
  double lambdas[3];
  double alphas[3];
} QwsMediumEigensystem;

typedef struct QwsMediumRuntime {
  // First positive root of the runtime equation, before rescaling.
  double root;
  double t_star;
  double p_star;
} QwsMediumRuntime;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *qws_last_error(void);

// Library version as a static NUL-terminated string.
const char *qws_version(void);

// `(M + w) / (M (M + 2w))`.
double qws_critical_gamma(size_t m, double w);

// # Safety
// `out` must be null or valid for a write of `QwsRegime`.
enum QwsStatus qws_classify(size_t m, double w, enum QwsRegime *out);

// # Safety
// `out` must be null or valid for a write of `QwsPrediction`.
enum QwsStatus qws_predict(size_t m, double w, struct QwsPrediction *out);

// Highest point of the first peak of `p_a`, searched over the default
// window `[0, 3π√M]`.
//
// # Safety
// `out` must be null or valid for a write of `QwsPeak`.
enum QwsStatus qws_first_maximum(size_t m, double w, double gamma, struct QwsPeak *out);

// # Safety
// `out` must be null or valid for a write of `QwsMediumEigensystem`.
enum QwsStatus qws_medium_eigensystem(double k, struct QwsMediumEigensystem *out);

// Medium-weight runtime with `k = w/√M`.
//
// # Safety
// `out` must be null or valid for a write of `QwsMediumRuntime`.
enum QwsStatus qws_medium_runtime(size_t m, double w, struct QwsMediumRuntime *out);

// Largest `|p_a|` gap between the full `2M` space and the reduced system
// over `samples` evenly spaced times in `[0, t_max]`. The size cap is read
// from `QWSEARCH_MAX_FULLSPACE_M`.
//
// # Safety
// `out` must be null or valid for a write of `f64`.
enum QwsStatus qws_subspace_residual(size_t m,
                                     double w,
                                     double gamma,
                                     double t_max,
                                     size_t samples,
                                     double *out);

// # Safety
// `out` must be null or valid for a write of a pointer.
enum QwsStatus qws_graph_new(size_t m, double w, struct QwsGraph **out);

// Number of vertices, `2M`; 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle from [`qws_graph_new`].
size_t qws_graph_vertex_count(const struct QwsGraph *g);

// Weight of the edge `u ~ v`, 0 when absent.
//
// # Safety
// `g` must be null or a live handle; `out` must be null or valid for a
// write of `f64`.
enum QwsStatus qws_graph_weight(const struct QwsGraph *g, size_t u, size_t v, double *out);

// # Safety
// `g` must be null or a handle from [`qws_graph_new`] not yet freed.
void qws_graph_free(struct QwsGraph *g);

// Success-probability curve from the uniform superposition at rate `gamma`.
//
// # Safety
// `out` must be null or valid for a write of a pointer.
enum QwsStatus qws_curve_new(size_t m, double w, double gamma, struct QwsCurve **out);

// Probability of measuring the marked vertex at time `t`; NaN for a null
// handle.
//
// # Safety
// `c` must be null or a live handle from [`qws_curve_new`].
double qws_curve_p_a(const struct QwsCurve *c, double t);

// Probability of measuring the marked vertex or its partner at time `t`;
// NaN for a null handle.
//
// # Safety
// `c` must be null or a live handle from [`qws_curve_new`].
double qws_curve_p_inferred(const struct QwsCurve *c, double t);

// # Safety
// `c` must be null or a handle from [`qws_curve_new`] not yet freed.
void qws_curve_free(struct QwsCurve *c);

// Samples `p_a` and `p_a + p_c` on `{0, dt, ..., t_max}`.
//
// # Safety
// `out` must be null or valid for a write of a pointer.
enum QwsStatus qws_trace_new(size_t m,
                             double w,
                             double gamma,
                             double t_max,
                             double dt,
                             struct QwsTrace **out);

// Number of samples; 0 for a null handle.
//
// # Safety
// `tr` must be null or a live handle from [`qws_trace_new`].
size_t qws_trace_len(const struct QwsTrace *tr);

// Sample `i` of the trace.
//
// # Safety
// `tr` must be null or a live handle; each of `t`, `p_a` and `p_inferred`
// must be valid for a write of `f64`.
enum QwsStatus qws_trace_get(const struct QwsTrace *tr,
                             size_t i,
                             double *t,
                             double *p_a,
                             double *p_inferred);

// # Safety
// `tr` must be null or a handle from [`qws_trace_new`] not yet freed.
void qws_trace_free(struct QwsTrace *tr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QWSEARCH_H */
