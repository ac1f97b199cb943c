#ifndef LIMSUP_H
#define LIMSUP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LIMSUP_API __declspec(dllexport)
#else
#define LIMSUP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum limsup_status {
    LIMSUP_OK = 0,
    LIMSUP_INVALID_ARGUMENT,
    LIMSUP_PRECISION_EXHAUSTED,
    LIMSUP_UNATTAINABLE_HEIGHT,
    LIMSUP_OUT_OF_TABLE_RANGE,
    LIMSUP_HYPOTHESIS_VIOLATED,
    LIMSUP_PRECONDITION_UNMET,
    LIMSUP_EMPTY_ADMISSIBLE_SET,
    LIMSUP_BUDGET_EXCEEDED,
    LIMSUP_PARSE_ERROR,
    LIMSUP_UNKNOWN_KEY,
    LIMSUP_MISSING_REQUIRED,
    LIMSUP_IO_ERROR,
    LIMSUP_INTERNAL_ERROR
} limsup_status;

typedef struct limsup_config limsup_config;
typedef struct limsup_result limsup_result;

LIMSUP_API const char* limsup_version(void);
LIMSUP_API const char* limsup_status_name(limsup_status status);
/* 0, 2 (hypothesis/precondition), 3 (budget) or 1. */
LIMSUP_API int limsup_exit_code(limsup_status status);
/* Message of the last failure on this thread, "" if none. */
LIMSUP_API const char* limsup_last_error(void);

/* Parses key=value text; keys[i]=values[i] override the text. */
LIMSUP_API limsup_status limsup_config_parse(const char* text, const char* const* keys, const char* const* values,
                                             size_t override_count, limsup_config** out);
LIMSUP_API const char* limsup_config_command(const limsup_config* config);
/* Value of a key, or NULL when absent. */
LIMSUP_API const char* limsup_config_get(const limsup_config* config, const char* key);
LIMSUP_API void limsup_config_free(limsup_config* config);

/* Runs the experiment in memory. Nothing is written. */
LIMSUP_API limsup_status limsup_run(const limsup_config* config, limsup_result** out);
LIMSUP_API size_t limsup_result_artifact_count(const limsup_result* result);
LIMSUP_API const char* limsup_result_artifact_name(const limsup_result* result, size_t index);
LIMSUP_API const char* limsup_result_artifact_content(const limsup_result* result, size_t index, size_t* length);
LIMSUP_API const char* limsup_result_summary(const limsup_result* result);
/* Atomically writes every artifact and manifest.json into dir. */
LIMSUP_API limsup_status limsup_result_write(const limsup_result* result, const limsup_config* config, const char* dir);
LIMSUP_API void limsup_result_free(limsup_result* result);

LIMSUP_API limsup_status limsup_emit_fixtures(const char* dir);
/* LIMSUP_OK when every digest in dir/manifest.json matches. */
LIMSUP_API limsup_status limsup_verify_manifest(const char* dir);

#ifdef __cplusplus
}
#endif

#endif
