/*
 * aav.h - C interface to the attention-aware visualization engine.
 *
 * All functions return an aav_status; on failure aav_last_error() holds a
 * message for the calling thread. Strings returned through char** out
 * parameters are owned by the caller and released with aav_string_free().
 * JSON documents use the same schemas as the session log, snapshot and
 * streaming protocol.
 */
#ifndef AAV_H
#define AAV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AAV_BUILDING_LIBRARY)
#    define AAV_API __declspec(dllexport)
#  else
#    define AAV_API __declspec(dllimport)
#  endif
#else
#  define AAV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aav_status {
  AAV_OK = 0,
  AAV_ERR_INVALID_ARGUMENT = 1,
  AAV_ERR_OUT_OF_RANGE = 2,
  AAV_ERR_PARSE = 3,
  AAV_ERR_IO = 4,
  AAV_ERR_STATE = 5,
  AAV_ERR_PROTOCOL = 6,
  AAV_ERR_INTERNAL = 99
} aav_status;

typedef enum aav_source {
  AAV_SOURCE_GAZE = 0,
  AAV_SOURCE_POINTER = 1,
  AAV_SOURCE_TOUCH = 2,
  AAV_SOURCE_HEAD = 3
} aav_source;

typedef struct aav_session aav_session;
typedef struct aav_server aav_server;

AAV_API const char* aav_version(void);
AAV_API const char* aav_last_error(void);
AAV_API void aav_string_free(char* s);

/* Sessions ---------------------------------------------------------------- */

/* header_json: a session header object (mode, config, params, trigger_mode). */
AAV_API aav_status aav_session_create(const char* header_json, aav_session** out);
AAV_API void aav_session_destroy(aav_session* session);

/* Position sample; radius_px < 0 selects the default radius. */
AAV_API aav_status aav_session_push_sample(aav_session* session, int64_t t_ms, double x, double y,
                                           aav_source source, double radius_px);
/* Screen-center sample (head-orientation proxy). */
AAV_API aav_status aav_session_push_center_sample(aav_session* session, int64_t t_ms, aav_source source,
                                                  double radius_px);
AAV_API aav_status aav_session_push_trigger(aav_session* session, int64_t t_ms, int pressed);
/* Any log event record ({"t":..,"kind":..,...}). */
AAV_API aav_status aav_session_push_event_json(aav_session* session, const char* event_json);
AAV_API aav_status aav_session_advance(aav_session* session, int64_t t_ms);
AAV_API aav_status aav_session_end(aav_session* session);

AAV_API aav_status aav_session_ticks(const aav_session* session, int64_t* out);
AAV_API aav_status aav_session_target_count(const aav_session* session, size_t* out);
AAV_API aav_status aav_session_state(const aav_session* session, size_t target, aav_source source,
                                     double* cumulative, double* short_term);
AAV_API aav_status aav_session_coverage(const aav_session* session, double* out);
AAV_API aav_status aav_session_snapshot_json(const aav_session* session, char** out);
AAV_API aav_status aav_session_frame_json(const aav_session* session, char** out);
AAV_API aav_status aav_session_log_jsonl(const aav_session* session, char** out);
AAV_API aav_status aav_session_write_log(const aav_session* session, const char* path);

/* Files ------------------------------------------------------------------- */

/* Replays a .aav.jsonl log, up to until_ms when has_until is non-zero. The
 * snapshot is written to snapshot_path when given and returned through
 * snapshot_out when non-null; summary_out receives a short text report. */
AAV_API aav_status aav_replay_file(const char* log_path, int has_until, int64_t until_ms,
                                   const char* snapshot_path, char** snapshot_out, char** summary_out);

/* options_json: {"style": "heatmap"|"contour"|"border", "stat", "levels",
 * "border_style", "axis", "background"}. */
AAV_API aav_status aav_render_svg(const char* snapshot_path, const char* options_json, char** svg_out);

/* Generates a session log from a scanpath spec and a session header. */
AAV_API aav_status aav_simulate(const char* spec_json, const char* header_json, char** log_out);

AAV_API aav_status aav_stats_file(const char* log_path, size_t top_k, char** report_out);

/* Server ------------------------------------------------------------------ */

/* options_json: {"address", "port", "tick_ms", "log_dir", "threads",
 * "handle_signals"}; AAV_PORT / AAV_TICK_MS apply when the keys are absent. */
AAV_API aav_status aav_server_create(const char* options_json, aav_server** out);
AAV_API aav_status aav_server_start(aav_server* server, uint16_t* port_out);
AAV_API aav_status aav_server_wait(aav_server* server);
AAV_API aav_status aav_server_stop(aav_server* server);
AAV_API void aav_server_destroy(aav_server* server);

#ifdef __cplusplus
}
#endif

#endif /* AAV_H */
