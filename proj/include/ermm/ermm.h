/*
 * ermm — emissions reporting maturity toolkit, C API.
 *
 * The library drives a deterministic batch pipeline over city disclosure
 * data: ingest, filter, preprocess (textual + binary encodings), cluster
 * with four engines, cross-validate the clusterings, run qualitative
 * sampling rounds, and score per-city maturity levels.
 *
 * All objects are opaque handles. Functions return ERMM_OK or an error
 * status; the per-handle message of the last failure is available through
 * the *_last_error accessors.
 */
#ifndef ERMM_H
#define ERMM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ermm_status {
    ERMM_OK = 0,
    ERMM_ERROR = 1,            /* internal failure */
    ERMM_ERROR_CONFIG = 2,     /* configuration / usage problem */
    ERMM_ERROR_DATA = 3,       /* unreadable or inconsistent data */
    ERMM_ERROR_NONCONVERGENCE = 4 /* iteration loop hit max_iterations */
} ermm_status;

const char* ermm_version(void);

/* ---- run configuration ------------------------------------------------- */

typedef struct ermm_config ermm_config;

/* Parses a key=value configuration file; returns NULL on failure and
 * writes the reason into errbuf (when given). Relative paths in the file
 * resolve against the file's directory. */
ermm_config* ermm_config_load(const char* path, char* errbuf, size_t errbuf_len);

ermm_config* ermm_config_create(void);

/* Overrides one key ("seed", "filter", "out", "max_iterations", ...);
 * relative paths resolve against the current working directory. */
ermm_status ermm_config_set(ermm_config* config, const char* key, const char* value);

void ermm_config_destroy(ermm_config* config);

const char* ermm_config_last_error(const ermm_config* config);

/* ---- pipeline runs ------------------------------------------------------ */

typedef struct ermm_run ermm_run;

/* Validates the configuration and opens (or resumes) the run directory.
 * Returns NULL on failure, writing the reason into errbuf. */
ermm_run* ermm_run_open(const ermm_config* config, char* errbuf, size_t errbuf_len);

void ermm_run_destroy(ermm_run* run);

/* Phases: "ingest", "filter", "preprocess", "cluster", "validate",
 * "qualitative", "maturity", "report". Iterating phases operate on the
 * run's current iteration. */
ermm_status ermm_run_phase(ermm_run* run, const char* phase);

/* Whole pipeline including the iteration loop. */
ermm_status ermm_run_all(ermm_run* run);

/* Recomputes the digest of every file listed in the manifest. */
ermm_status ermm_run_verify_manifest(ermm_run* run);

const char* ermm_run_last_error(const ermm_run* run);
const char* ermm_run_manifest_path(const ermm_run* run);
int ermm_run_iteration_count(const ermm_run* run);
/* "", "to-qualitative" or "new-config". */
const char* ermm_run_terminal_path(const ermm_run* run);

#ifdef __cplusplus
}
#endif

#endif /* ERMM_H */
