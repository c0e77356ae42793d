/*
 * C interface to the game core. Handles are opaque; structured data crosses
 * the boundary as UTF-8 JSON text. Strings returned through `char**` belong
 * to the caller and are released with getin_string_free. On failure the
 * message of the last error on the calling thread is available from
 * getin_last_error until the next call on that thread.
 */
#ifndef GETIN_H
#define GETIN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GETIN_API __declspec(dllexport)
#else
#define GETIN_API __attribute__((visibility("default")))
#endif

typedef enum getin_status {
    GETIN_OK = 0,
    GETIN_INVALID_ARGUMENT,
    GETIN_EMPTY_QUERY,
    GETIN_MALFORMED_EMAIL,
    GETIN_OUT_OF_SIMULATED_RANGE,
    GETIN_UNKNOWN_LISTING,
    GETIN_INSUFFICIENT_FUNDS,
    GETIN_NO_SUCH_PATH,
    GETIN_NOT_A_DIRECTORY,
    GETIN_IS_A_DIRECTORY,
    GETIN_PARSE_ERROR,
    GETIN_VALIDATION_ERROR,
    GETIN_UNKNOWN_SCENARIO,
    GETIN_SCENARIO_IN_PROGRESS,
    GETIN_NO_ACTIVE_SCENARIO,
    GETIN_SESSION_TERMINATED,
    GETIN_CORRUPT_LOG,
    GETIN_UNKNOWN_TARGET,
    GETIN_TEMPLATE_NOT_SELECTED,
    GETIN_UNKNOWN_EXPLOIT,
    GETIN_MISSING_OPTION,
    GETIN_INVALID_PAYLOAD,
    GETIN_UNKNOWN_HOST,
    GETIN_PROP_NOT_FOUND,
    GETIN_ZERO_DAY_NOT_OWNED,
    GETIN_NOT_FLASHED,
    GETIN_UNKNOWN_SESSION,
    GETIN_UNKNOWN_FORM,
    GETIN_VALIDATION_FAILED,
    GETIN_WORLD_LOAD_ERROR,
    GETIN_CONFLICT,
    GETIN_IO_ERROR,
    GETIN_INTERNAL = 99
} getin_status;

typedef struct getin_game getin_game;
typedef struct getin_session getin_session;
typedef struct getin_service getin_service;

GETIN_API const char* getin_last_error(void);
GETIN_API const char* getin_status_name(getin_status status);
GETIN_API void getin_string_free(char* text);

/* Content. `scenario_dir` holds *.scenario files. */
GETIN_API getin_status getin_game_load(const char* world_path, const char* scenario_dir, getin_game** out);
GETIN_API getin_status getin_game_load_files(const char* world_path, const char* const* scenario_paths,
                                             size_t count, getin_game** out);
GETIN_API void getin_game_free(getin_game* game);

/* Checks scenario files (and, with a world path, cross-references) and
 * reports every defect plus the skill coverage table:
 * {"defects": [...], "coverage": {skill: [ids]}, "table": "..."}.
 * Returns GETIN_VALIDATION_ERROR when any defect was found. `world_path` may
 * be NULL. */
GETIN_API getin_status getin_validate(const char* world_path, const char* const* scenario_paths, size_t count,
                                      char** report_json);

/* Sessions */
GETIN_API getin_status getin_session_new(const getin_game* game, getin_session** out);
GETIN_API void getin_session_free(getin_session* session);
GETIN_API getin_status getin_session_start(getin_session* session, const char* scenario_id, int abandon,
                                           char** view_json);
GETIN_API getin_status getin_session_abandon(getin_session* session);
/* kind: "choice", "text" or "command". */
GETIN_API getin_status getin_session_input(getin_session* session, const char* kind, const char* value,
                                           char** result_json);
GETIN_API getin_status getin_session_view(const getin_session* session, char** state_json);
GETIN_API getin_status getin_session_log(const getin_session* session, char** canonical_log);

/* Runs an input script on a fresh session and returns its transcript.
 * `reached_terminal` may be NULL. */
GETIN_API getin_status getin_simulate(const getin_game* game, const char* script, char** transcript,
                                      int* reached_terminal);

/* Survey export from a response store file. `mode`: "aggregate", "paired"
 * or "responses". */
GETIN_API getin_status getin_survey_report(const char* store_path, const char* form, const char* mode,
                                           char** csv);

/* Game service. config_json keys: world, scenarios, storage, web, unlinked. */
GETIN_API getin_status getin_service_new(const char* config_json, getin_service** out);
GETIN_API void getin_service_free(getin_service* service);
/* Serves one request in-process; body may be NULL. */
GETIN_API getin_status getin_service_handle(getin_service* service, const char* method, const char* target,
                                            const char* body, int* http_status, char** response_body);
/* Blocks until getin_service_stop is called from another thread. */
GETIN_API getin_status getin_service_listen(getin_service* service, const char* host, int port);
GETIN_API void getin_service_stop(getin_service* service);
/* Non-NULL diagnostic when content failed to load; caller frees. */
GETIN_API char* getin_service_content_error(const getin_service* service);

#ifdef __cplusplus
}
#endif

#endif
