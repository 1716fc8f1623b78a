#ifndef HUFLOW_H
#define HUFLOW_H

/* C interface to the huflow simulator. Every function returning
 * huflow_status leaves a message for huflow_last_error() on failure. */

#include <stddef.h>

#if defined(HUFLOW_BUILDING_LIBRARY)
#define HUFLOW_API __attribute__((visibility("default")))
#else
#define HUFLOW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum huflow_status {
    HUFLOW_OK = 0,
    HUFLOW_ERROR_ARGUMENT = 1, /* null handle, unknown scheme or case name */
    HUFLOW_ERROR_CONFIG = 2,   /* config parse or validation failure */
    HUFLOW_ERROR_IO = 3,
    HUFLOW_ERROR_RUNTIME = 4
} huflow_status;

typedef struct huflow_case huflow_case;
typedef struct huflow_report huflow_report;

typedef struct huflow_step {
    int attempt;
    int requested;
    double time_days;
    double dt_days;
    int cut_depth;
    int iterations;
    int chops;
    int converged;
} huflow_step;

typedef void (*huflow_line_sink)(const char* line, void* user);

HUFLOW_API const char* huflow_version(void);
/* Thread-local; valid until the next failing call on the same thread. */
HUFLOW_API const char* huflow_last_error(void);

HUFLOW_API size_t huflow_scheme_count(void);
HUFLOW_API const char* huflow_scheme_label(size_t index);
HUFLOW_API size_t huflow_builtin_case_count(void);
HUFLOW_API const char* huflow_builtin_case_name(size_t index);

/* Cases */
HUFLOW_API huflow_status huflow_case_builtin(const char* name, huflow_case** out);
/* Builtin name or config path. */
HUFLOW_API huflow_status huflow_case_resolve(const char* name_or_path, huflow_case** out);
/* Applies a config file on top of the case. */
HUFLOW_API huflow_status huflow_case_apply_config(huflow_case* c, const char* path);
HUFLOW_API huflow_status huflow_case_set(huflow_case* c, const char* section, const char* key, const char* value);
HUFLOW_API huflow_status huflow_case_save(const huflow_case* c, const char* path);
HUFLOW_API const char* huflow_case_name(const huflow_case* c);
HUFLOW_API int huflow_case_is_one_cell(const huflow_case* c);
HUFLOW_API void huflow_case_free(huflow_case* c);

/* Runs. scheme may be NULL to use the case's own scheme. */
HUFLOW_API huflow_status huflow_run(const huflow_case* c, const char* scheme, huflow_report** out);
HUFLOW_API int huflow_report_total_iterations(const huflow_report* r);
HUFLOW_API int huflow_report_wasted_iterations(const huflow_report* r);
HUFLOW_API int huflow_report_cuts(const huflow_report* r);
HUFLOW_API int huflow_report_aborted(const huflow_report* r);
HUFLOW_API double huflow_report_end_time_days(const huflow_report* r);
HUFLOW_API double huflow_report_mass_error(const huflow_report* r);
HUFLOW_API size_t huflow_report_step_count(const huflow_report* r);
HUFLOW_API huflow_status huflow_report_step(const huflow_report* r, size_t index, huflow_step* out);
/* steps.csv, final_state.csv and summary.json under dir (created). */
HUFLOW_API huflow_status huflow_report_write(const huflow_report* r, const char* dir);
HUFLOW_API void huflow_report_free(huflow_report* r);

/* Every (case, scheme) pair; writes totals.txt, matrix.csv and cumulative.csv
 * under out_dir and sends the totals table to sink line by line. */
HUFLOW_API huflow_status huflow_compare(const char* const* cases, size_t case_count, const char* const* schemes,
                                        size_t scheme_count, int jobs, const char* out_dir, huflow_line_sink sink,
                                        void* user, int* aborted_runs);

/* One-cell study. surface is "velocity" or "residual"; writes
 * <surface>_field.csv, loci.csv, solution.json and, with paths != 0,
 * path_<k>.csv for the four corner starts. density is "per_term" or "total". */
HUFLOW_API huflow_status huflow_analyze_one_cell(const char* scheme, const char* surface, int resolution, int paths,
                                                 const char* density, const char* out_dir, huflow_line_sink sink,
                                                 void* user);

/* Invariant suite; one line per check to sink. */
HUFLOW_API huflow_status huflow_validate(unsigned seed, int samples, huflow_line_sink sink, void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif
