#ifndef CBSFORGE_H
#define CBSFORGE_H

/* C interface to libcbsforge. Objects are opaque handles released with the
 * matching *_free call. Every fallible call returns a cbs_status; on failure
 * cbs_last_error() describes the most recent error on the calling thread.
 * Strings handed out by the library are released with cbs_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(CBSFORGE_BUILDING_LIBRARY)
#define CBSFORGE_API __attribute__((visibility("default")))
#else
#define CBSFORGE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbs_status {
  CBS_OK = 0,
  CBS_ERR_INDEX = 1,
  CBS_ERR_SHAPE_MISMATCH = 2,
  CBS_ERR_RESOURCE_EXCEEDED = 3,
  CBS_ERR_DOMAIN = 4,
  CBS_ERR_PRECONDITION = 5,
  CBS_ERR_NUMERICAL_INTEGRITY = 6,
  CBS_ERR_PARSE = 7,
  CBS_ERR_IO = 8,
  CBS_ERR_INVALID_ARGUMENT = 9,
  CBS_ERR_INTERNAL = 10
} cbs_status;

typedef struct cbs_input cbs_input;
typedef struct cbs_report cbs_report;

CBSFORGE_API const char* cbs_version(void);
CBSFORGE_API const char* cbs_status_name(cbs_status status);
CBSFORGE_API const char* cbs_last_error(void);
CBSFORGE_API void cbs_string_free(char* s);

/* Inputs (x^(1..n), u^(1..n)) in the JSON layout {"n", "xs", "us"}. */
CBSFORGE_API cbs_status cbs_input_from_json(const char* json, cbs_input** out);
/* Complex Gaussian blocks of shape dims[0..m-1], deterministic in seed. */
CBSFORGE_API cbs_status cbs_input_random(const size_t* dims, size_t m, size_t n, uint64_t seed,
                                         cbs_input** out);
CBSFORGE_API void cbs_input_free(cbs_input* input);
/* Writes m and n; dims may be NULL, otherwise it must hold m entries. */
CBSFORGE_API cbs_status cbs_input_shape(const cbs_input* input, size_t* m, size_t* dims,
                                        size_t* n);
CBSFORGE_API cbs_status cbs_input_to_json(const cbs_input* input, char** out);

/* Phi^(n) and its cancellation mass; budget <= 0 selects the default. */
CBSFORGE_API cbs_status cbs_phi(const cbs_input* input, double budget, double* total,
                                double* cancellation_mass);

/* Runs a verification command with a JSON configuration (NULL for defaults).
 * Commands: verify-lagrange, verify-invariance, eval-phi, oracle-check,
 * werner-check, search, integral, suite. */
CBSFORGE_API cbs_status cbs_run(const char* command, const char* config_json, cbs_report** out);
/* 1 iff every asserted trial passed. */
CBSFORGE_API int cbs_report_passed(const cbs_report* report);
/* indent < 0 gives compact output. */
CBSFORGE_API cbs_status cbs_report_json(const cbs_report* report, int indent, char** out);
CBSFORGE_API void cbs_report_free(cbs_report* report);

#ifdef __cplusplus
}
#endif

#endif
