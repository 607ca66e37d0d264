#ifndef FROGSIM_H
#define FROGSIM_H

/* C interface to the frog-model laboratory. Every function returns a status
 * code; on failure frogsim_last_error() describes the problem (per thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FROGSIM_BUILDING)
#    define FROGSIM_API __declspec(dllexport)
#  else
#    define FROGSIM_API __declspec(dllimport)
#  endif
#else
#  define FROGSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum frogsim_status {
    FROGSIM_OK = 0,
    FROGSIM_ERR_INVALID_ARGUMENT = 1,
    FROGSIM_ERR_PARSE = 2,
    FROGSIM_ERR_OVERFLOW = 3,
    FROGSIM_ERR_CAP_EXCEEDED = 4,
    FROGSIM_ERR_NON_CONVERGENCE = 5,
    FROGSIM_ERR_INCONSISTENT = 6,
    FROGSIM_ERR_INTERNAL = 7
} frogsim_status;

/* An experiment description: key/value fields (kind, graph, eta, p, ...). */
typedef struct frogsim_experiment frogsim_experiment;
/* Output of one experiment run. */
typedef struct frogsim_result frogsim_result;

typedef enum frogsim_sim_status {
    FROGSIM_DIED_OUT = 0,
    FROGSIM_ALIVE_AT_HORIZON = 1,
    FROGSIM_CAP_EXCEEDED = 2
} frogsim_sim_status;

typedef struct frogsim_outcome {
    frogsim_sim_status status;
    int has_extinction_time;
    uint64_t extinction_time;
    uint64_t root_visits;
    uint64_t activated_sites;
    uint64_t max_radius;
    uint64_t steps;
} frogsim_outcome;

FROGSIM_API const char* frogsim_version(void);
FROGSIM_API const char* frogsim_last_error(void);

FROGSIM_API frogsim_status frogsim_experiment_new(frogsim_experiment** out);
/* Parses the `key = value` text format. */
FROGSIM_API frogsim_status frogsim_experiment_parse(const char* text, frogsim_experiment** out);
FROGSIM_API void frogsim_experiment_free(frogsim_experiment* exp);
FROGSIM_API frogsim_status frogsim_experiment_set(frogsim_experiment* exp, const char* key, const char* value);
FROGSIM_API frogsim_status frogsim_experiment_unset(frogsim_experiment* exp, const char* key);
/* Value or default; *out must be released with frogsim_string_free. */
FROGSIM_API frogsim_status frogsim_experiment_get(const frogsim_experiment* exp, const char* key, char** out);
FROGSIM_API int frogsim_experiment_has(const frogsim_experiment* exp, const char* key);
/* Canonical text that frogsim_experiment_parse accepts. */
FROGSIM_API frogsim_status frogsim_experiment_dump(const frogsim_experiment* exp, char** out);

/* Runs the experiment. A result is produced even when its consistency check
 * fails; frogsim_result_consistent then returns 0. */
FROGSIM_API frogsim_status frogsim_run(const frogsim_experiment* exp, frogsim_result** out);
FROGSIM_API const char* frogsim_result_json(const frogsim_result* res);
FROGSIM_API const char* frogsim_result_csv(const frogsim_result* res);
FROGSIM_API int frogsim_result_consistent(const frogsim_result* res);
FROGSIM_API const char* frogsim_result_message(const frogsim_result* res);
FROGSIM_API void frogsim_result_free(frogsim_result* res);

/* One trial of the model described by the experiment's graph/eta/p/lifetime fields. */
FROGSIM_API frogsim_status frogsim_simulate(const frogsim_experiment* exp, uint64_t trial, frogsim_outcome* out);

FROGSIM_API void frogsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
