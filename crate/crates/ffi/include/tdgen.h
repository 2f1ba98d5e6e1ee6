#ifndef TDGEN_H
#define TDGEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TdgStatus {
  TDG_STATUS_OK = 0,
  TDG_STATUS_NULL_ARGUMENT = 1,
  TDG_STATUS_INVALID_UTF8 = 2,
  TDG_STATUS_PARSE_ERROR = 3,
  TDG_STATUS_SEMANTIC_ERROR = 4,
  TDG_STATUS_SCHEMA_ERROR = 5,
  TDG_STATUS_INPUT_ERROR = 6,
  TDG_STATUS_RUNTIME_ERROR = 7,
  TDG_STATUS_BUDGET_EXCEEDED = 8,
  TDG_STATUS_CONFIG_ERROR = 9,
  TDG_STATUS_UNKNOWN_CONSTRUCT = 10,
  TDG_STATUS_PANIC = 11,
} TdgStatus;

// A finished campaign with its rendered outputs.
typedef struct TdgCampaign TdgCampaign;

// A parsed and labelled subject program.
typedef struct TdgProgram TdgProgram;

// Closed-form heuristic values; `k_s` is meaningful only if `has_k_s`.
typedef struct TdgHeuristic {
  uint64_t k_l;
  uint64_t k_s;
  bool has_k_s;
  uint64_t l_max;
} TdgHeuristic;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// Valid until the next `tdg_*` call on the same thread.
const char *tdg_last_error(void);

const char *tdg_version(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void tdg_string_free(char *s);

// Parse subject source text.
//
// # Safety
// `source` must be a NUL-terminated string; `out` must be writable.
enum TdgStatus tdg_program_parse(const char *source, struct TdgProgram **out);

// # Safety
// `program` must be null or a handle from `tdg_program_parse`, freed once.
void tdg_program_free(struct TdgProgram *program);

// Number of labelled decisions; 0 for a null handle.
//
// # Safety
// `program` must be null or a live handle.
size_t tdg_program_decision_count(const struct TdgProgram *program);

// Execute one JSON input and return its path string in `*out_path`.
//
// # Safety
// `program` must be a live handle, `input_json` a NUL-terminated string,
// `out_path` writable.
enum TdgStatus tdg_program_run(const struct TdgProgram *program,
                               const char *input_json,
                               uint64_t step_budget,
                               char **out_path);

// Closed-form prediction for `construct` ("linear", "bubble", "matrix",
// "merge") with `ndims` dimensions.
//
// # Safety
// `construct` must be a NUL-terminated string, `dims` must point to
// `ndims` values (or be null when `ndims` is 0), `out` writable.
enum TdgStatus tdg_predict(const char *construct,
                           const uint64_t *dims,
                           size_t ndims,
                           struct TdgHeuristic *out);

// Run a campaign. `config_json` may be null for defaults; `workers` of 0
// means 1. Timing columns are zeroed when `stable_time` is set.
//
// # Safety
// `program` must be a live handle, `schema_json` a NUL-terminated string,
// `config_json` null or NUL-terminated, `out` writable.
enum TdgStatus tdg_campaign_run(const struct TdgProgram *program,
                                const char *schema_json,
                                const char *config_json,
                                size_t workers,
                                bool stable_time,
                                struct TdgCampaign **out);

// # Safety
// `campaign` must be null or a handle from `tdg_campaign_run`, freed once.
void tdg_campaign_free(struct TdgCampaign *campaign);

// Detected longest-path level, or -1 if none was detected.
//
// # Safety
// `campaign` must be null or a live handle.
int64_t tdg_campaign_k_longest(const struct TdgCampaign *campaign);

// Detected saturation level, or -1 if none was detected.
//
// # Safety
// `campaign` must be null or a live handle.
int64_t tdg_campaign_k_saturation(const struct TdgCampaign *campaign);

// Number of unique feasible paths found; 0 for a null handle.
//
// # Safety
// `campaign` must be null or a live handle.
size_t tdg_campaign_path_count(const struct TdgCampaign *campaign);

// Per-step report as CSV, in a new string.
//
// # Safety
// `campaign` must be a live handle, `out` writable.
enum TdgStatus tdg_campaign_report_csv(const struct TdgCampaign *campaign, char **out);

// Extracted test suite as JSON, in a new string.
//
// # Safety
// `campaign` must be a live handle, `out` writable.
enum TdgStatus tdg_campaign_suite_json(const struct TdgCampaign *campaign, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TDGEN_H */
