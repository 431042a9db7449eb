#ifndef IMGRL_IMGRL_H
#define IMGRL_IMGRL_H

#include <stddef.h>
#include <stdint.h>

#if defined(IMGRL_BUILDING)
#define IMGRL_API __attribute__((visibility("default")))
#else
#define IMGRL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imgrl_status {
  IMGRL_OK = 0,
  IMGRL_E_INVALID_PARAMETER = 1,
  IMGRL_E_DIMENSION_MISMATCH,
  IMGRL_E_MALFORMED_HEADER,
  IMGRL_E_TRUNCATED_PAYLOAD,
  IMGRL_E_UNSUPPORTED_MAXVAL,
  IMGRL_E_UNKNOWN_IMAGE,
  IMGRL_E_TRANSPORT,
  IMGRL_E_PROTOCOL,
  IMGRL_E_INVALID_PROBABILITY,
  IMGRL_E_INDEX_OUT_OF_RANGE,
  IMGRL_E_MISSING_ORACLE_ENTRY,
  IMGRL_E_MALFORMED_SNAPSHOT,
  IMGRL_E_EMPTY_ROUND,
  IMGRL_E_CONFIG,
  IMGRL_E_IO,
  IMGRL_E_MALFORMED_LOG,
  IMGRL_E_INTERNAL,
} imgrl_status;

typedef enum imgrl_noise {
  IMGRL_NOISE_BLUR = 0,
  IMGRL_NOISE_DARK = 1,
  IMGRL_NOISE_WHITE = 2,
  IMGRL_NOISE_CLEAN = 3,
} imgrl_noise;

typedef enum imgrl_action {
  IMGRL_ACTION_NONE = 0,
  IMGRL_ACTION_DEBLUR = 1,
  IMGRL_ACTION_WEAK_WHITEN = 2,
  IMGRL_ACTION_STRONG_WHITEN = 3,
  IMGRL_ACTION_WEAK_DARKEN = 4,
  IMGRL_ACTION_STRONG_DARKEN = 5,
} imgrl_action;

typedef enum imgrl_accuracy {
  IMGRL_ACCURACY_LOGGED = 0,
  IMGRL_ACCURACY_STRICT = 1,
  IMGRL_ACCURACY_LENIENT = 2,
} imgrl_accuracy;

typedef struct imgrl_state {
  int blur;       /* 0..2 */
  int brightness; /* -1..1 */
  int value;      /* 0..2 */
  int lightness;  /* 0..2 */
} imgrl_state;

typedef struct imgrl_run_summary {
  int64_t iterations;
  double final_running_accuracy;
  double mean_reward;
} imgrl_run_summary;

typedef struct imgrl_raster imgrl_raster;
typedef struct imgrl_config imgrl_config;
typedef struct imgrl_agent imgrl_agent;

/* Library metadata and errors. The last error message is per thread and is
   overwritten by the next failing call on that thread. */
IMGRL_API const char* imgrl_version(void);
IMGRL_API const char* imgrl_status_name(imgrl_status status);
IMGRL_API const char* imgrl_last_error(void);

/* Releases strings returned through char** out-parameters. */
IMGRL_API void imgrl_string_free(char* s);

/* Names: "blur", "dark", "white", "clean"; "none", "deblur", "weak_whiten",
   "strong_whiten", "weak_darken", "strong_darken". NULL when out of range. */
IMGRL_API const char* imgrl_noise_name(int noise);
IMGRL_API const char* imgrl_action_name(int action);
IMGRL_API imgrl_status imgrl_parse_noise(const char* name, int* out);
IMGRL_API imgrl_status imgrl_parse_action(const char* name, int* out);

/* Rasters: interleaved 8-bit RGB, row-major. `pixels` may be NULL for a black
   image, otherwise it must hold width * height * 3 bytes. */
IMGRL_API imgrl_status imgrl_raster_new(int width, int height, const uint8_t* pixels, imgrl_raster** out);
IMGRL_API imgrl_status imgrl_raster_load(const char* path, imgrl_raster** out);
IMGRL_API imgrl_status imgrl_raster_save(const imgrl_raster* img, const char* path);
IMGRL_API void imgrl_raster_free(imgrl_raster* img);
IMGRL_API int imgrl_raster_width(const imgrl_raster* img);
IMGRL_API int imgrl_raster_height(const imgrl_raster* img);
/* Borrowed pointer valid until the raster is freed. */
IMGRL_API const uint8_t* imgrl_raster_data(const imgrl_raster* img);

/* Default filter parameters. */
IMGRL_API imgrl_status imgrl_apply_noise(const imgrl_raster* img, int noise, imgrl_raster** out);
IMGRL_API imgrl_status imgrl_apply_action(const imgrl_raster* img, int action, imgrl_raster** out);
IMGRL_API imgrl_status imgrl_rmse(const imgrl_raster* a, const imgrl_raster* b, double* out);
IMGRL_API imgrl_status imgrl_laplacian_variance(const imgrl_raster* img, double* out);

/* Default sensing thresholds around the given brightness reference. */
IMGRL_API imgrl_status imgrl_sense(const imgrl_raster* img, double brightness_ref, imgrl_state* out);
IMGRL_API int imgrl_state_index(const imgrl_state* s);

IMGRL_API imgrl_status imgrl_quantize_reward(double denoise_pr, double oracle_pr, double pd, int floor, int cap,
                                             int* out);

/* Run configuration. JSON text with one object per section; overrides take
   "section.key=value". */
IMGRL_API imgrl_status imgrl_config_new(imgrl_config** out);
IMGRL_API imgrl_status imgrl_config_parse(const char* json, imgrl_config** out);
IMGRL_API imgrl_status imgrl_config_load(const char* path, imgrl_config** out);
IMGRL_API void imgrl_config_free(imgrl_config* cfg);
IMGRL_API imgrl_status imgrl_config_set(imgrl_config* cfg, const char* assignment);
/* Value at a dotted key: strings as-is, anything else as compact JSON. */
IMGRL_API imgrl_status imgrl_config_get(const imgrl_config* cfg, const char* key, char** out);
/* IMGRL_OK when valid; otherwise IMGRL_E_CONFIG and, when `messages` is not
   NULL, every violation joined by newlines. */
IMGRL_API imgrl_status imgrl_config_validate(const imgrl_config* cfg, char** messages);
IMGRL_API imgrl_status imgrl_config_dump(const imgrl_config* cfg, char** out);

/* File-backed commands. */
IMGRL_API imgrl_status imgrl_synth_textures(const imgrl_config* cfg, const char* out_dir, int* count);
/* `kinds` is a comma-separated list of noise names; NULL or "" means
   blur,dark,white. */
IMGRL_API imgrl_status imgrl_synth_noisy(const imgrl_config* cfg, const char* in_dir, const char* out_dir,
                                         const char* kinds, int* count);
IMGRL_API imgrl_status imgrl_build_oracle(const imgrl_config* cfg, const char* images_dir, const char* out_csv,
                                          int jobs, int* count);
IMGRL_API imgrl_status imgrl_run(const imgrl_config* cfg, imgrl_run_summary* out);
/* Writes summary.csv and series.csv into out_dir, plus comparison.csv when
   compare logs are given and bands.csv when run_bands is set. */
IMGRL_API imgrl_status imgrl_report(const char* log, const char* out_dir, const char* const* compare,
                                    size_t compare_count, int run_bands, int accuracy, size_t* rounds);

/* Agents. */
IMGRL_API imgrl_status imgrl_agent_new(const imgrl_config* cfg, imgrl_agent** out);
IMGRL_API imgrl_status imgrl_agent_restore(const char* snapshot, imgrl_agent** out);
IMGRL_API void imgrl_agent_free(imgrl_agent* agent);
IMGRL_API imgrl_status imgrl_agent_select(imgrl_agent* agent, const imgrl_state* s, int* action);
/* `next` may be NULL for a terminal transition. */
IMGRL_API imgrl_status imgrl_agent_update(imgrl_agent* agent, const imgrl_state* s, int action, int reward,
                                          const imgrl_state* next);
IMGRL_API imgrl_status imgrl_agent_snapshot(const imgrl_agent* agent, char** out);

#ifdef __cplusplus
}
#endif

#endif
