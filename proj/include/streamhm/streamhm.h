#ifndef STREAMHM_STREAMHM_H
#define STREAMHM_STREAMHM_H

/* C interface to the streaming process-discovery engine. All functions
 * return shm_status; outputs are passed through pointers. Strings returned
 * through char** are heap-allocated and must be released with
 * shm_string_free. On failure, shm_last_error() describes the problem for
 * the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SHM_API __declspec(dllexport)
#else
#define SHM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum shm_status {
  SHM_OK = 0,
  SHM_ERR_INVALID_ARGUMENT = 1,
  SHM_ERR_DECODE = 2,
  SHM_ERR_NOT_FOUND = 3,
  SHM_ERR_IO = 4,
  SHM_ERR_NETWORK = 5,
  SHM_ERR_RUNTIME = 6
} shm_status;

SHM_API const char* shm_version(void);

/* Message for the most recent failure on this thread; never NULL. */
SHM_API const char* shm_last_error(void);

SHM_API void shm_string_free(char* s);

/* --- event codecs -------------------------------------------------------- */

SHM_API shm_status shm_encode_line(uint64_t seq_no, const char* case_id,
                                   const char* activity, char** out_line);
SHM_API shm_status shm_decode_line(const char* line, uint64_t* out_seq_no,
                                   char** out_case_id, char** out_activity);
SHM_API shm_status shm_decode_xes_fragment(const char* fragment, char** out_case_id,
                                           char** out_activity);

/* --- miners ---------------------------------------------------------------
 * config_json accepts the same keys as the run configuration, e.g.
 * {"miner":"aging","capacity":100,"alpha":0.997,"trigger":50,
 *  "thresholds":{"dependency":0.9,"and":0.1}}                              */

typedef struct shm_miner shm_miner;

SHM_API shm_status shm_miner_create(const char* config_json, shm_miner** out_miner);
SHM_API void shm_miner_free(shm_miner* miner);

/* Feeds one event. When the mining cadence fires, *out_model_json receives
 * the fresh model (otherwise NULL). out_model_json may be NULL when the
 * caller does not need triggered models. */
SHM_API shm_status shm_miner_observe(shm_miner* miner, uint64_t seq_no,
                                     const char* case_id, const char* activity,
                                     char** out_model_json);

SHM_API shm_status shm_miner_model_json(const shm_miner* miner, char** out_json);
SHM_API shm_status shm_miner_model_dot(const shm_miner* miner, char** out_dot);
SHM_API shm_status shm_miner_entries(const shm_miner* miner, uint64_t* out_entries);
SHM_API shm_status shm_miner_alpha(const shm_miner* miner, double* out_alpha);
SHM_API shm_status shm_miner_adapt(shm_miner* miner, double fitness_now,
                                   double fitness_previous);

/* --- confidence bounds ----------------------------------------------------- */

SHM_API shm_status shm_epsilon_pair(double xi_ab, double xi_ba, double delta,
                                    uint64_t nc, double* out_epsilon);
SHM_API shm_status shm_epsilon_triple(double xi_ab, double xi_ac, double delta,
                                      uint64_t nc, double* out_epsilon);
SHM_API shm_status shm_dependency_bounds(double rho_ab, double rho_ba, double xi_ab,
                                         double xi_ba, double delta, uint64_t nc,
                                         double* out_lower, double* out_upper);
SHM_API shm_status shm_and_bounds(double rho_bc, double rho_cb, double rho_ab,
                                  double rho_ac, double xi_bc, double xi_cb,
                                  double xi_ab, double xi_ac, double delta,
                                  uint64_t nc, double* out_lower, double* out_upper);

/* --- synthetic streams and merging ---------------------------------------- */

/* Expands a stream plan (see docs for the JSON grammar) into a
 * line-protocol log file. */
SHM_API shm_status shm_generate(const char* plan_json, const char* out_path);

/* Merges line-protocol log files with per-boundary overlap fractions.
 * n_overlaps may be 0 (hard shifts), 1 (applied to every boundary) or
 * n_inputs - 1. */
SHM_API shm_status shm_merge(const char* const* input_paths, size_t n_inputs,
                             const double* overlaps, size_t n_overlaps,
                             const char* out_path);

/* --- network source -------------------------------------------------------- */

typedef struct shm_server shm_server;

/* options_json: {"host":"0.0.0.0","port":0,"codec":"line","delay_us":0,
 * "loop":false}; port 0 picks an ephemeral port. */
SHM_API shm_status shm_serve(const char* log_path, const char* options_json,
                             shm_server** out_server);
SHM_API shm_status shm_server_port(const shm_server* server, uint16_t* out_port);
SHM_API shm_status shm_server_stop(shm_server* server);
SHM_API void shm_server_free(shm_server* server);

/* --- whole runs ------------------------------------------------------------ */

/* Drives a full mining run from a run configuration; returns the summary
 * as JSON. With "out_dir" set, metrics.csv, model.json, model.dot and
 * summary.json are written there. */
SHM_API shm_status shm_run(const char* run_config_json, char** out_summary_json);

/* Aggregates metrics across run directories into a comparison CSV. */
SHM_API shm_status shm_compare(const char* const* run_dirs, size_t n_dirs,
                               char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* STREAMHM_STREAMHM_H */
