#ifndef HARTOGS_H
#define HARTOGS_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HbBellDirection {
  HB_BELL_DIRECTION_HARTOGS_TO_BIDISC = 0,
  HB_BELL_DIRECTION_BIDISC_TO_HARTOGS = 1,
} HbBellDirection;

typedef enum HbDomain {
  HB_DOMAIN_DISC = 0,
  HB_DOMAIN_PUNCTURED_DISC = 1,
  HB_DOMAIN_BIDISC = 2,
  HB_DOMAIN_PUNCTURED_BIDISC = 3,
  HB_DOMAIN_HARTOGS_TRIANGLE = 4,
} HbDomain;

/**
 * Status codes returned by every fallible function.
 */
typedef enum HbStatus {
  HB_STATUS_OK = 0,
  HB_STATUS_NULL_POINTER = 1,
  HB_STATUS_INVALID_ARGUMENT = 2,
  HB_STATUS_PARSE = 3,
  HB_STATUS_CONFIG = 4,
  /**
   * Point outside the domain, a singular evaluation or a bad index.
   */
  HB_STATUS_DOMAIN = 5,
  HB_STATUS_DIVERGENT = 6,
  HB_STATUS_NUMERIC = 7,
  HB_STATUS_IO = 8,
  HB_STATUS_BUFFER_TOO_SMALL = 9,
  HB_STATUS_PANIC = 10,
} HbStatus;

typedef enum HbVerdict {
  HB_VERDICT_CONVERGED = 0,
  HB_VERDICT_DIVERGED = 1,
  HB_VERDICT_INCONCLUSIVE = 2,
} HbVerdict;

/**
 * Opaque series with exact rational complex coefficients.
 */
typedef struct HbSeries HbSeries;

/**
 * Result of [`hb_lp_norm`].
 */
typedef struct HbNorm {
  double value;
  double error_estimate;
  enum HbVerdict verdict;
  /**
   * Slope of the truncated integral against ln(1/eps); NaN unless diverged.
   */
  double log_slope;
  double growth_exponent;
} HbNorm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call into this library.
 */
const char *hb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hb_version(void);

/**
 * Creates an empty series on `domain`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HbStatus hb_series_new(enum HbDomain domain, struct HbSeries **out);

/**
 * Releases a series. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void hb_series_free(struct HbSeries *s);

/**
 * Adds `(re_num/re_den) + i (im_num/im_den)` to the coefficient of `z1^m z2^n`.
 *
 * # Safety
 * `s` must be a live series.
 */
enum HbStatus hb_series_add_term(struct HbSeries *s,
                                 int64_t m,
                                 int64_t n,
                                 int64_t re_num,
                                 int64_t re_den,
                                 int64_t im_num,
                                 int64_t im_den);

/**
 * Number of stored nonzero coefficients, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live series.
 */
size_t hb_series_len(const struct HbSeries *s);

/**
 * Parses the text form written by [`hb_series_to_text`].
 *
 * # Safety
 * `text` must be NUL-terminated and `out` valid.
 */
enum HbStatus hb_series_parse(const char *text, struct HbSeries **out);

/**
 * Writes the text form into `buf`.
 *
 * # Safety
 * `buf` must hold `len` bytes or be NULL; `needed` may be NULL.
 */
enum HbStatus hb_series_to_text(const struct HbSeries *s, char *buf, size_t len, size_t *needed);

/**
 * Evaluates at `(z1, z2)`; `z2` is ignored on one-variable domains.
 *
 * # Safety
 * `s` must be a live series and `re`, `im` valid.
 */
enum HbStatus hb_series_eval(const struct HbSeries *s,
                             double z1_re,
                             double z1_im,
                             double z2_re,
                             double z2_im,
                             double *re,
                             double *im);

/**
 * Bell transform between the Hartogs triangle and the punctured bidisc.
 *
 * # Safety
 * `s` must be a live series and `out` valid.
 */
enum HbStatus hb_series_bell_transform(const struct HbSeries *s,
                                       enum HbBellDirection direction,
                                       struct HbSeries **out);

/**
 * Keeps the terms with first-variable degree at most `n_max`.
 *
 * # Safety
 * `s` must be a live series and `out` valid.
 */
enum HbStatus hb_series_partial_sum(const struct HbSeries *s,
                                    uint64_t n_max,
                                    struct HbSeries **out);

/**
 * Multiplies the coefficient of `w1^mu w2^nu` by `1 + 1/(mu + 1)`.
 *
 * # Safety
 * `s` must be a live series and `out` valid.
 */
enum HbStatus hb_series_apply_t(const struct HbSeries *s, struct HbSeries **out);

/**
 * Exact squared L2 norm on the series' domain, as a double.
 *
 * # Safety
 * `s` must be a live series and `out` valid.
 */
enum HbStatus hb_series_l2_norm_sq(const struct HbSeries *s, double *out);

/**
 * Squared norm of `z1^m z2^n` as `num/den * pi^pi_power`. Fails with
 * `INVALID_ARGUMENT` when numerator or denominator exceed 64 bits.
 *
 * # Safety
 * The outputs must be valid.
 */
enum HbStatus hb_monomial_norm_sq(enum HbDomain domain,
                                  int64_t m,
                                  int64_t n,
                                  int64_t *num,
                                  int64_t *den,
                                  uint32_t *pi_power);

/**
 * `(int |f|^p |z1|^gamma dV)^(1/p)` with adaptive quadrature. A divergent
 * integral is reported through `out->verdict`, not the status.
 *
 * # Safety
 * `s` must be a live series and `out` valid.
 */
enum HbStatus hb_lp_norm(const struct HbSeries *s,
                         double p,
                         double gamma,
                         double tol,
                         struct HbNorm *out);

/**
 * Runs a verification scenario and writes its JSON report.
 * `params_json` is NULL or a JSON object of scenario parameters.
 * `*passed` is set to 0 for a failing verdict and 1 otherwise.
 *
 * # Safety
 * Strings must be NUL-terminated; `buf` must hold `len` bytes or be NULL;
 * `needed` and `passed` may be NULL.
 */
enum HbStatus hb_verify_run(const char *id,
                            const char *params_json,
                            char *buf,
                            size_t len,
                            size_t *needed,
                            int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARTOGS_H */
