#ifndef HEXCOMBAT_H
#define HEXCOMBAT_H

/* C interface to the hexcombat library. Every function that can fail
 * returns an hxc_status; the message of the most recent failure on the
 * calling thread is available from hxc_last_error(). Strings returned
 * through char** out-parameters are owned by the caller and must be
 * released with hxc_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HXC_API __declspec(dllexport)
#else
#define HXC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hxc_status {
  HXC_OK = 0,
  HXC_INVALID_ARGUMENT = 1,
  HXC_ILLEGAL_ACTION = 2,
  HXC_INVALID_STATE = 3,
  HXC_IO = 4,
  HXC_PROTOCOL = 5,
  HXC_TIMEOUT = 6,
  HXC_VERIFICATION = 7,
  HXC_INTERNAL = 8
} hxc_status;

enum {
  HXC_CHANNELS = 18,
  HXC_LOCAL_SIZE = 7,
  HXC_ACTIONS = 7,
  HXC_PASS_ACTION = 6
};

HXC_API const char* hxc_version(void);
HXC_API const char* hxc_status_name(hxc_status status);
HXC_API const char* hxc_last_error(void);
HXC_API void hxc_string_free(char* s);

/* Observation helpers. */

HXC_API hxc_status hxc_decay_weight(double distance, double* out);

/* global: 18 x rows x cols doubles, channel-major.
 * out: 18 x 7 x 7 doubles. */
HXC_API hxc_status hxc_localize(const double* global, int rows, int cols, int agent_row,
                                int agent_col, double* out);

/* Scenario generation; writes the scenario as JSON. */
HXC_API hxc_status hxc_scenario_generate(int size, uint64_t seed, char** json_out);

/* Learner protocol handler: feed one request line, get one reply line. */

typedef struct hxc_protocol hxc_protocol;

/* replay_dir may be NULL to disable replay persistence. */
HXC_API hxc_status hxc_protocol_create(const char* replay_dir, hxc_protocol** out);
HXC_API hxc_status hxc_protocol_handle(hxc_protocol* p, const char* line, char** reply);
HXC_API int hxc_protocol_closed(const hxc_protocol* p);
HXC_API void hxc_protocol_destroy(hxc_protocol* p);

/* Typed episode interface. */

typedef struct hxc_env hxc_env;

typedef struct hxc_step_info {
  double reward;
  int terminal;
  int illegal;
  long raw_score_delta;
  long total_score;
  int phase;
  int unit; /* -1 when no friendly unit is on move */
  unsigned char legal_mask[HXC_ACTIONS];
  int obs_channels;
  int obs_rows;
  int obs_cols;
} hxc_step_info;

HXC_API hxc_status hxc_env_create(hxc_env** out);
/* params_json uses the fields of the protocol's reset request.
 * The observation is written as float32 when obs has room for it. */
HXC_API hxc_status hxc_env_reset(hxc_env* env, const char* params_json, float* obs,
                                 size_t obs_capacity, hxc_step_info* info);
HXC_API hxc_status hxc_env_step(hxc_env* env, int action, float* obs, size_t obs_capacity,
                                hxc_step_info* info);
HXC_API hxc_status hxc_env_replay(const hxc_env* env, char** replay_json);
HXC_API void hxc_env_destroy(hxc_env* env);

/* Evaluation. config_json fields: blue, red, sizes ("3..12" or list),
 * games, seed, workers, allow_failures, replay_dir, baseline ("random",
 * another agent or null), external_timeout_ms. csv_out may be NULL. */
HXC_API hxc_status hxc_eval_run(const char* config_json, char** report_json, char** csv_out);

/* Re-simulates a replay document. Returns HXC_VERIFICATION on mismatch;
 * message_out (may be NULL) receives the explanation or "ok". */
HXC_API hxc_status hxc_replay_verify(const char* replay_json, char** message_out);

/* Service host. config_json fields: host, port, http_port, replay_dir,
 * static_dir; HEXCOMBAT_* environment variables override them. */

typedef struct hxc_server hxc_server;

HXC_API hxc_status hxc_server_start(const char* config_json, hxc_server** out);
HXC_API int hxc_server_port(const hxc_server* s);
HXC_API int hxc_server_http_port(const hxc_server* s);
HXC_API hxc_status hxc_server_wait(hxc_server* s);
HXC_API hxc_status hxc_server_stop(hxc_server* s);
HXC_API void hxc_server_destroy(hxc_server* s);

/* Serves the learner protocol over two descriptors until EOF or close. */
HXC_API hxc_status hxc_serve_stream(int in_fd, int out_fd, const char* replay_dir);

#ifdef __cplusplus
}
#endif

#endif /* HEXCOMBAT_H */
