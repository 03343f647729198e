#ifndef SOCIAL_ASSOC_H
#define SOCIAL_ASSOC_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Approach bits for the mask taken by [`sa_run_experiment`].
 */
#define SA_MASK_PROPOSED 1

#define SA_MASK_MAX_RSSI 2

#define SA_MASK_RANDOM 4

#define SA_MASK_ALL 7

/**
 * Status codes. Values match the command-line exit codes.
 */
typedef enum SaStatus {
  SA_STATUS_OK = 0,
  SA_STATUS_INVARIANT = 1,
  SA_STATUS_CONFIG = 2,
  SA_STATUS_TOO_LARGE = 3,
  SA_STATUS_IO = 4,
  SA_STATUS_NULL_POINTER = 5,
  SA_STATUS_INVALID_UTF8 = 6,
  SA_STATUS_PANIC = 7,
} SaStatus;

/**
 * Association schemes evaluated by a campaign.
 */
typedef enum SaApproach {
  SA_APPROACH_PROPOSED = 0,
  SA_APPROACH_MAX_RSSI = 1,
  SA_APPROACH_RANDOM = 2,
} SaApproach;

/**
 * Opaque scenario configuration.
 */
typedef struct SaConfig SaConfig;

/**
 * Opaque campaign result.
 */
typedef struct SaResult SaResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *sa_last_error(void);

/**
 * Library version as a static string.
 */
const char *sa_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sa_string_free(char *s);

/**
 * New configuration holding the built-in defaults.
 */
struct SaConfig *sa_config_default(void);

/**
 * Parses a `key = value` configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SaStatus sa_config_load(const char *path, struct SaConfig **out);

/**
 * Sets one configuration key from its textual value.
 *
 * # Safety
 * `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum SaStatus sa_config_set(struct SaConfig *cfg, const char *key, const char *value);

/**
 * Checks ranges and cross-field constraints.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum SaStatus sa_config_validate(const struct SaConfig *cfg);

/**
 * The configuration in file syntax. Free with [`sa_string_free`].
 *
 * # Safety
 * `cfg` must be a live handle.
 */
char *sa_config_to_text(const struct SaConfig *cfg);

/**
 * # Safety
 * `cfg` must come from this library and not be freed twice.
 */
void sa_config_free(struct SaConfig *cfg);

/**
 * Runs a Monte-Carlo campaign for the approaches selected in `mask`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
enum SaStatus sa_run_experiment(const struct SaConfig *cfg, uint32_t mask, struct SaResult **out);

/**
 * Average network sum rate of one approach, in bit/s.
 *
 * # Safety
 * `res` must be a live handle and `out` a valid pointer.
 */
enum SaStatus sa_result_avg_sum_rate(const struct SaResult *res,
                                     enum SaApproach approach,
                                     double *out);

/**
 * Per-UE rate percentile `q` in `[0, 1]` of one approach, in bit/s.
 *
 * # Safety
 * `res` must be a live handle and `out` a valid pointer.
 */
enum SaStatus sa_result_ue_rate_percentile(const struct SaResult *res,
                                           enum SaApproach approach,
                                           double q,
                                           double *out);

/**
 * Number of Monte-Carlo runs held by the result.
 *
 * # Safety
 * `res` must be a live handle or null.
 */
size_t sa_result_run_count(const struct SaResult *res);

/**
 * Summary JSON as written to `summary.json`. Free with [`sa_string_free`].
 *
 * # Safety
 * `res` must be a live handle.
 */
char *sa_result_summary_json(const struct SaResult *res);

/**
 * Writes every result file into `dir`.
 *
 * # Safety
 * `res` must be a live handle and `dir` a NUL-terminated string.
 */
enum SaStatus sa_result_export(const struct SaResult *res, const char *dir);

/**
 * # Safety
 * `res` must come from this library and not be freed twice.
 */
void sa_result_free(struct SaResult *res);

/**
 * Closed-form signalling-overhead bound of one cluster.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SaStatus sa_overhead_bound(size_t m_c, double phi_s, size_t phi_c, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOCIAL_ASSOC_H */
