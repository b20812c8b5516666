/* kolmodamp C API
 *
 * C-callable surface of the damped Navier-Stokes periodic-box simulator.
 * Configurations are opaque handles; every call returns a kd_status and
 * leaves a human-readable message in kd_last_error() on failure. Status
 * values double as CLI exit codes.
 */
#ifndef KOLMODAMP_H
#define KOLMODAMP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kd_status {
    KD_OK = 0,
    KD_ERROR = 1,                    /* unexpected failure */
    KD_ERR_INSUFFICIENT_HORIZON = 2, /* run shorter than burn_in + 3 windows */
    KD_ERR_VERDICT_FAILED = 3,       /* run completed, inequality verdicts fail */
    KD_ERR_CONFIG = 4,               /* config parse/validation error */
    KD_ERR_SOLVER = 5,               /* CFL violation or non-finite state */
    KD_ERR_VERIFY_MISMATCH = 6,      /* digest or recomputation mismatch */
    KD_ERR_INSUFFICIENT_SWEEP = 7,   /* fewer than 4 usable sweep points */
    KD_ERR_IO = 8,
    KD_ERR_INVALID_ARGUMENT = 9
} kd_status;

typedef struct kd_config kd_config;

const char* kd_version(void);
const char* kd_status_name(kd_status s);

/* Message from the most recent failing call on this thread; empty string
 * when the last call succeeded. The pointer stays valid until the next
 * API call on the same thread. */
const char* kd_last_error(void);

/* Worker threads for field operations; n <= 0 restores the default. */
void kd_set_threads(int n);

kd_status kd_config_from_file(const char* path, kd_config** out);
kd_status kd_config_from_preset(const char* name, kd_config** out);
void kd_config_free(kd_config* cfg);

/* Canonical config text. Writes at most cap bytes (NUL-terminated);
 * *needed receives the full length including the NUL. */
kd_status kd_config_to_string(const kd_config* cfg, char* buf, size_t cap, size_t* needed);

/* SHA-256 of the canonical config text; buf needs >= 65 bytes. */
kd_status kd_config_hash(const kd_config* cfg, char* buf, size_t cap);

size_t kd_preset_count(void);
const char* kd_preset_name(size_t i);

/* Experiment verbs. Output directories must be empty or absent; findings
 * and reports are printed to stdout. */
kd_status kd_run(const kd_config* cfg, const char* out_dir);
kd_status kd_resume(const kd_config* cfg, const char* checkpoint_path, const char* out_dir);
kd_status kd_sweep(const kd_config* cfg, const char* out_dir);
kd_status kd_verify(const char* run_dir);
kd_status kd_report(const char* run_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KOLMODAMP_H */
