/* Copyright (c) 2026, The SaCTI-cpp Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of libsacti. Every function returns a sacti_status; on failure
 * sacti_last_error() and sacti_last_error_field() describe the problem for
 * the calling thread. Strings returned through char** are NUL-terminated,
 * UTF-8, and must be released with sacti_free_string().
 */
#ifndef SACTI_SACTI_H_
#define SACTI_SACTI_H_

#include <stddef.h>

#if defined(_WIN32)
#define SACTI_API __declspec(dllexport)
#elif defined(SACTI_BUILDING_LIBRARY)
#define SACTI_API __attribute__((visibility("default")))
#else
#define SACTI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sacti_status {
  SACTI_OK = 0,
  SACTI_ERR_INVALID_ARGUMENT = 1,
  SACTI_ERR_DIMENSION = 2,
  SACTI_ERR_INDEX = 3,
  SACTI_ERR_CONTRACT = 4,
  SACTI_ERR_SCHEMA = 5,
  SACTI_ERR_LABEL_SPACE = 6,
  SACTI_ERR_NUMERIC = 7,
  SACTI_ERR_IO = 8,
  SACTI_ERR_NOT_FOUND = 9,
  SACTI_ERR_UNAVAILABLE = 10,
  SACTI_ERR_INTERNAL = 11
} sacti_status;

typedef struct sacti_model sacti_model;
typedef struct sacti_annotations sacti_annotations;

SACTI_API const char* sacti_version(void);
SACTI_API const char* sacti_status_name(sacti_status status);
SACTI_API const char* sacti_last_error(void);
/* Offending input field of the last error, or "" when none applies. */
SACTI_API const char* sacti_last_error_field(void);
SACTI_API void sacti_free_string(char* s);

/* ---- training and evaluation ------------------------------------------- */

/* request: {"config": {...}, "train": path, "dev": path?, "checkpoint": path,
 *           "log": path?}
 * result:  {"epochs", "best_epoch", "best_dev": metrics|null, "checkpoint"} */
SACTI_API sacti_status sacti_train(const char* request_json, char** result_json);

SACTI_API sacti_status sacti_model_load(const char* checkpoint_path, sacti_model** out);
SACTI_API void sacti_model_free(sacti_model* model);
/* {"model": config, "labels": [...], "parameters": count, "step": n} */
SACTI_API sacti_status sacti_model_info(const sacti_model* model, char** info_json);

/* instance: {"tokens": [...], "compound_index": p, "id"?: s,
 *            "attention_layer"?: l, "attention_head"?: h}
 * Safe to call concurrently on one model. */
SACTI_API sacti_status sacti_predict(const sacti_model* model, const char* instance_json, char** report_json);

/* {"metrics": {...}, "confusion": {...}} over a labeled JSONL file. */
SACTI_API sacti_status sacti_evaluate(const sacti_model* model, const char* data_path, char** result_json);

/* ---- data -------------------------------------------------------------- */

/* request: {"splits": [{"name", "path"}]} */
SACTI_API sacti_status sacti_data_stats(const char* request_json, char** stats_json);

/* Dataset JSONL with CoNLL-U pseudo-labels filled in. */
SACTI_API sacti_status sacti_merge_conllu(const char* data_path, const char* conllu_path, char** jsonl);

/* request: {"config": {...}, "grid": {"variants", "mode", "datasets"},
 *           "base_dir"?: path}
 * result:  {"rows": [...], "csv": "..."} */
SACTI_API sacti_status sacti_run_grid(const char* request_json, char** result_json);

/* request: {"matrix": [[...]], "rows": [...], "cols": [...], "title"?: s} */
SACTI_API sacti_status sacti_render_heatmap_svg(const char* request_json, char** svg);

/* ---- annotation store -------------------------------------------------- */

/* options: {"instances": path, "journal": path, "labels"?: [...],
 *           "annotators_per_instance"?: n} */
SACTI_API sacti_status sacti_annotations_open(const char* options_json, sacti_annotations** out);
SACTI_API void sacti_annotations_free(sacti_annotations* store);
/* {"instance": {...}|null, "labels": [...], "progress": n, "total": n} */
SACTI_API sacti_status sacti_annotations_next(sacti_annotations* store, const char* annotator_id, char** result_json);
/* request: {"instance_id", "annotator_id", "choice", "comment"?, "idempotency_key"?} */
SACTI_API sacti_status sacti_annotations_submit(sacti_annotations* store, const char* request_json,
                                                char** record_json);
SACTI_API sacti_status sacti_annotations_export(sacti_annotations* store, char** records_jsonl, char** summary_json);
SACTI_API sacti_status sacti_annotations_import(sacti_annotations* store, const char* records_jsonl, size_t* added);
SACTI_API sacti_status sacti_annotations_labels(sacti_annotations* store, char** labels_json);
SACTI_API sacti_status sacti_annotations_set_labels(sacti_annotations* store, const char* labels_json);

#ifdef __cplusplus
}
#endif

#endif /* SACTI_SACTI_H_ */
