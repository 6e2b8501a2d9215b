#ifndef NETMATCH_H
#define NETMATCH_H

#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum NmStatus {
  NM_STATUS_OK = 0,
  NM_STATUS_NULL_POINTER = 1,
  NM_STATUS_INVALID_ARGUMENT = 2,
  NM_STATUS_BUFFER_TOO_SMALL = 3,
  NM_STATUS_DOMAIN = 4,
  NM_STATUS_VALIDATION = 5,
  NM_STATUS_DEGENERATE_MATCHING = 6,
  NM_STATUS_SEPARATION = 7,
  NM_STATUS_NON_CONVERGENCE = 8,
  NM_STATUS_CONFIG = 9,
  NM_STATUS_PRECONDITION = 10,
  NM_STATUS_IO = 11,
  NM_STATUS_PARSE = 12,
  NM_STATUS_JSON = 13,
  NM_STATUS_PANIC = 14,
} NmStatus;

// Opaque estimation result handle.
typedef struct NmResult NmResult;

// Opaque sample handle.
typedef struct NmSample NmSample;

// Estimator settings. Non-positive `bandwidth` selects the default rule
// `n^(-1/9)/10`; non-positive `prob_clip` selects `1/(n+1)`.
typedef struct NmEstimatorConfig {
  double bandwidth;
  double prob_clip;
  uint32_t max_iterations;
  double gradient_tolerance;
} NmEstimatorConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *nm_version(void);

// Length in bytes of the last error message on this thread, excluding the
// terminating NUL; 0 when the last call succeeded.
size_t nm_last_error_length(void);

// Copies the last error message into `buf` (truncated and always
// NUL-terminated when `len > 0`). Returns the full message length
// excluding the NUL.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t nm_last_error_message(char *buf, size_t len);

// Default estimator settings.
struct NmEstimatorConfig nm_estimator_config_default(void);

// Simulates a sample of `n` agents with one standard normal covariate,
// `β = 1` and uniform social characteristics.
//
// `link` is `blockmodel`, `beta` or `homophily`. `lambda` is `reference`
// (`1.5w² + ln w`) or `zero`; null means `reference`.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be valid for
// one write.
enum NmStatus nm_sample_simulate(size_t n,
                                 const char *link,
                                 const char *lambda,
                                 uint64_t seed,
                                 struct NmSample **out);

// Builds a sample from caller data: `x` is `n×k` row-major, `y` holds `n`
// outcomes in {0,1}, and `adjacency` is the `n×n` row-major 0/1 matrix
// (symmetric, zero diagonal).
//
// # Safety
// Each pointer must be valid for the stated number of elements; `out`
// must be valid for one write.
enum NmStatus nm_sample_from_arrays(size_t n,
                                    size_t k,
                                    const double *x,
                                    const uint8_t *y,
                                    const uint8_t *adjacency,
                                    struct NmSample **out);

// Releases a sample. Null is ignored.
//
// # Safety
// `s` must be null or a handle from this library not yet freed.
void nm_sample_free(struct NmSample *s);

// Number of agents; 0 for a null handle.
//
// # Safety
// `s` must be null or a live sample handle.
size_t nm_sample_n(const struct NmSample *s);

// Number of covariates; 0 for a null handle.
//
// # Safety
// `s` must be null or a live sample handle.
size_t nm_sample_k(const struct NmSample *s);

// Copies the covariates (`n×k`, row-major) into `buf`.
//
// # Safety
// `s` must be a live sample handle and `buf` valid for `len` doubles.
enum NmStatus nm_sample_copy_x(const struct NmSample *s, double *buf, size_t len);

// Copies the `n` outcomes into `buf`.
//
// # Safety
// `s` must be a live sample handle and `buf` valid for `len` bytes.
enum NmStatus nm_sample_copy_y(const struct NmSample *s, uint8_t *buf, size_t len);

// Copies the `n×n` adjacency matrix (row-major) into `buf`.
//
// # Safety
// `s` must be a live sample handle and `buf` valid for `len` bytes.
enum NmStatus nm_sample_copy_adjacency(const struct NmSample *s, uint8_t *buf, size_t len);

// Writes the `n×n` codegree distance matrix (row-major) into `buf`.
//
// # Safety
// `s` must be a live sample handle and `buf` valid for `len` doubles.
enum NmStatus nm_codegree_distance(const struct NmSample *s, double *buf, size_t len);

// Runs the matched estimator and the social-influence recovery.
//
// A run that stops before meeting its tolerance still returns `Ok`; check
// [`nm_result_converged`]. `config` may be null for defaults.
//
// # Safety
// `s` must be a live sample handle, `config` null or valid, and `out`
// valid for one write.
enum NmStatus nm_estimate(const struct NmSample *s,
                          const struct NmEstimatorConfig *config,
                          struct NmResult **out);

// Releases a result. Null is ignored.
//
// # Safety
// `r` must be null or a handle from this library not yet freed.
void nm_result_free(struct NmResult *r);

// Number of slope coefficients; 0 for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
size_t nm_result_k(const struct NmResult *r);

// Number of agents with a social-influence entry; 0 for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
size_t nm_result_n(const struct NmResult *r);

// 1 if the optimiser met its tolerance, 0 otherwise or for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
int32_t nm_result_converged(const struct NmResult *r);

// Newton iterations used; 0 for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
size_t nm_result_iterations(const struct NmResult *r);

// Final gradient norm; NaN for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
double nm_result_gradient_norm(const struct NmResult *r);

// Total kernel weight over discordant pairs; NaN for a null handle.
//
// # Safety
// `r` must be null or a live result handle.
double nm_result_effective_pair_mass(const struct NmResult *r);

// Copies the slope estimate into `buf`.
//
// # Safety
// `r` must be a live result handle and `buf` valid for `len` doubles.
enum NmStatus nm_result_beta(const struct NmResult *r, double *buf, size_t len);

// Copies the per-agent social-influence estimates into `buf`; agents with
// no positive kernel weight get NaN.
//
// # Safety
// `r` must be a live result handle and `buf` valid for `len` doubles.
enum NmStatus nm_result_lambda(const struct NmResult *r, double *buf, size_t len);

// Epanechnikov weight `K(δ̂²/h)`; NaN when `h` is not positive.
double nm_kernel_weight(double delta_hat, double h);

// Default bandwidth `n^(-1/9)/10`; NaN for `n = 0`.
double nm_bandwidth(size_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETMATCH_H */
