// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "sacti/sacti.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "common/error.hpp"
#include "model/report.hpp"
#include "model/sacti_model.hpp"
#include "service/annotation_store.hpp"
#include "service/heatmap_svg.hpp"
#include "text/conllu.hpp"
#include "text/stats.hpp"
#include "training/grid.hpp"
#include "training/metrics.hpp"
#include "training/trainer.hpp"

using nlohmann::json;

struct sacti_model {
  sacti::model::SactiModel model;
};

struct sacti_annotations {
  explicit sacti_annotations(const sacti::service::AnnotationStoreOptions& o) : store(o) {}
  sacti::service::AnnotationStore store;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_field;

sacti_status status_for(sacti::ErrorKind kind) {
  using sacti::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SACTI_ERR_INVALID_ARGUMENT;
    case ErrorKind::kDimension: return SACTI_ERR_DIMENSION;
    case ErrorKind::kIndex: return SACTI_ERR_INDEX;
    case ErrorKind::kContract: return SACTI_ERR_CONTRACT;
    case ErrorKind::kSchema: return SACTI_ERR_SCHEMA;
    case ErrorKind::kLabelSpace: return SACTI_ERR_LABEL_SPACE;
    case ErrorKind::kNumeric: return SACTI_ERR_NUMERIC;
    case ErrorKind::kIo: return SACTI_ERR_IO;
    case ErrorKind::kNotFound: return SACTI_ERR_NOT_FOUND;
    case ErrorKind::kUnavailable: return SACTI_ERR_UNAVAILABLE;
  }
  return SACTI_ERR_INTERNAL;
}

template <typename F>
sacti_status guarded(F&& body) {
  g_error.clear();
  g_field.clear();
  try {
    body();
    return SACTI_OK;
  } catch (const sacti::Error& e) {
    g_error = e.what();
    g_field = e.field();
    return status_for(e.kind());
  } catch (const json::exception& e) {
    g_error = e.what();
    return SACTI_ERR_SCHEMA;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return SACTI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return SACTI_ERR_INTERNAL;
  } catch (...) {
    g_error = "unknown failure";
    return SACTI_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(const void* p, const char* field) {
  if (p == nullptr) sacti::fail(sacti::ErrorKind::kInvalidArgument, std::string(field) + " must not be null", field);
}

json parse_request(const char* text, const char* field) {
  require(text, field);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) sacti::fail(sacti::ErrorKind::kSchema, std::string(field) + " is not valid JSON", field);
  return j;
}

std::string string_field(const json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) sacti::fail(sacti::ErrorKind::kSchema, std::string("missing field '") + key + "'", key);
    return {};
  }
  if (!j.at(key).is_string()) sacti::fail(sacti::ErrorKind::kSchema, std::string("'") + key + "' must be a string", key);
  return j.at(key).get<std::string>();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) sacti::fail(sacti::ErrorKind::kIo, "cannot write " + path, "out");
  out << content;
  if (!out) sacti::fail(sacti::ErrorKind::kIo, "write to " + path + " failed", "out");
}

}  // namespace

extern "C" {

const char* sacti_version(void) { return "1.0.0"; }

const char* sacti_status_name(sacti_status status) {
  switch (status) {
    case SACTI_OK: return "ok";
    case SACTI_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SACTI_ERR_DIMENSION: return "dimension";
    case SACTI_ERR_INDEX: return "index";
    case SACTI_ERR_CONTRACT: return "contract";
    case SACTI_ERR_SCHEMA: return "schema";
    case SACTI_ERR_LABEL_SPACE: return "label_space";
    case SACTI_ERR_NUMERIC: return "numeric";
    case SACTI_ERR_IO: return "io";
    case SACTI_ERR_NOT_FOUND: return "not_found";
    case SACTI_ERR_UNAVAILABLE: return "unavailable";
    case SACTI_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sacti_last_error(void) { return g_error.c_str(); }
const char* sacti_last_error_field(void) { return g_field.c_str(); }
void sacti_free_string(char* s) { std::free(s); }

sacti_status sacti_train(const char* request_json, char** result_json) {
  return guarded([&] {
    require(result_json, "result_json");
    const json req = parse_request(request_json, "request");
    if (!req.contains("config")) sacti::fail(sacti::ErrorKind::kSchema, "missing field 'config'", "config");
    const sacti::training::TrainConfig cfg = sacti::training::train_config_from_json(req.at("config"));
    const std::string train_path = string_field(req, "train", true);
    const std::string dev_path = string_field(req, "dev", false);
    const std::string checkpoint = string_field(req, "checkpoint", true);
    const std::string log_path = string_field(req, "log", false);
    const sacti::text::Dataset train = sacti::text::load_jsonl_dataset(train_path);
    const sacti::text::Dataset dev = dev_path.empty() ? sacti::text::Dataset{} : sacti::text::load_jsonl_dataset(dev_path);
    const sacti::training::TrainResult res = sacti::training::train(train, dev, cfg);
    res.model.save(checkpoint, json{{"train_config", sacti::training::to_json(cfg)}, {"best_epoch", res.best_epoch}});
    if (!log_path.empty()) write_file(log_path, sacti::training::format_log(res.log));
    json out{{"epochs", cfg.epochs},
             {"best_epoch", res.best_epoch},
             {"best_dev", res.best_dev ? sacti::training::to_json(*res.best_dev) : json(nullptr)},
             {"checkpoint", checkpoint}};
    *result_json = dup_string(out.dump());
  });
}

sacti_status sacti_model_load(const char* checkpoint_path, sacti_model** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint");
    require(out, "out");
    auto handle = std::make_unique<sacti_model>();
    handle->model = sacti::model::SactiModel::load(checkpoint_path);
    *out = handle.release();
  });
}

void sacti_model_free(sacti_model* model) { delete model; }

sacti_status sacti_model_info(const sacti_model* model, char** info_json) {
  return guarded([&] {
    require(model, "model");
    require(info_json, "info_json");
    const auto& m = model->model;
    json out{{"model", sacti::model::to_json(m.config())},
             {"labels", m.vocab().semantic.names()},
             {"parameters", m.store().scalar_count()},
             {"step", m.store().step()}};
    *info_json = dup_string(out.dump());
  });
}

sacti_status sacti_predict(const sacti_model* model, const char* instance_json, char** report_json) {
  return guarded([&] {
    require(report_json, "report_json");
    if (model == nullptr) sacti::fail(sacti::ErrorKind::kUnavailable, "no model loaded", "model");
    json req = parse_request(instance_json, "instance");
    if (!req.is_object()) sacti::fail(sacti::ErrorKind::kSchema, "instance must be a JSON object", "instance");
    int layer = -1, head = -1;
    if (req.contains("attention_layer")) {
      layer = req.at("attention_layer").get<int>();
      req.erase("attention_layer");
    }
    if (req.contains("attention_head")) {
      head = req.at("attention_head").get<int>();
      req.erase("attention_head");
    }
    if (!req.contains("id")) req["id"] = "request";
    const sacti::text::ContextInstance inst = sacti::text::instance_from_json(req);
    const sacti::model::PredictionReport rep = sacti::model::predict(model->model, inst, layer, head);
    *report_json = dup_string(sacti::model::to_json(rep).dump());
  });
}

sacti_status sacti_evaluate(const sacti_model* model, const char* data_path, char** result_json) {
  return guarded([&] {
    require(model, "model");
    require(data_path, "data");
    require(result_json, "result_json");
    const sacti::text::Dataset data = sacti::text::load_jsonl_dataset(data_path);
    const sacti::training::Evaluation ev = sacti::training::evaluate(model->model, data);
    json out{{"metrics", sacti::training::to_json(ev.metrics)}, {"confusion", sacti::training::to_json(ev.confusion)}};
    *result_json = dup_string(out.dump());
  });
}

sacti_status sacti_data_stats(const char* request_json, char** stats_json) {
  return guarded([&] {
    require(stats_json, "stats_json");
    const json req = parse_request(request_json, "request");
    if (!req.contains("splits") || !req.at("splits").is_array()) {
      sacti::fail(sacti::ErrorKind::kSchema, "request needs a 'splits' array", "splits");
    }
    std::vector<sacti::text::Dataset> data;
    std::vector<std::string> names;
    for (const auto& s : req.at("splits")) {
      names.push_back(string_field(s, "name", true));
      data.push_back(sacti::text::load_jsonl_dataset(string_field(s, "path", true)));
    }
    std::vector<sacti::text::NamedSplit> splits;
    for (std::size_t i = 0; i < data.size(); ++i) splits.push_back({names[i], &data[i]});
    *stats_json = dup_string(sacti::text::to_json(sacti::text::dataset_stats(splits)).dump());
  });
}

sacti_status sacti_merge_conllu(const char* data_path, const char* conllu_path, char** jsonl) {
  return guarded([&] {
    require(data_path, "data");
    require(conllu_path, "conllu");
    require(jsonl, "jsonl");
    const sacti::text::Dataset data = sacti::text::load_jsonl_dataset(data_path);
    const auto sentences = sacti::text::read_conllu(conllu_path);
    *jsonl = dup_string(sacti::text::format_jsonl_dataset(sacti::text::merge_conllu_pseudolabels(data, sentences)));
  });
}

sacti_status sacti_run_grid(const char* request_json, char** result_json) {
  return guarded([&] {
    require(result_json, "result_json");
    const json req = parse_request(request_json, "request");
    if (!req.contains("config") || !req.contains("grid")) {
      sacti::fail(sacti::ErrorKind::kSchema, "request needs 'config' and 'grid'", "grid");
    }
    const auto base = sacti::training::train_config_from_json(req.at("config"));
    const std::string base_dir = string_field(req, "base_dir", false);
    const auto grid = sacti::training::grid_request_from_json(req.at("grid"), base, base_dir.empty() ? "." : base_dir);
    const auto rows = sacti::training::run_grid(grid);
    json out{{"rows", sacti::training::grid_json(rows)}, {"csv", sacti::training::grid_csv(rows)}};
    *result_json = dup_string(out.dump());
  });
}

sacti_status sacti_render_heatmap_svg(const char* request_json, char** svg) {
  return guarded([&] {
    require(svg, "svg");
    const json req = parse_request(request_json, "request");
    const auto rows = req.at("matrix").get<std::vector<std::vector<double>>>();
    if (rows.empty() || rows[0].empty()) sacti::fail(sacti::ErrorKind::kDimension, "matrix is empty", "matrix");
    std::vector<double> values;
    for (const auto& r : rows) {
      if (r.size() != rows[0].size()) sacti::fail(sacti::ErrorKind::kDimension, "matrix rows differ in length", "matrix");
      values.insert(values.end(), r.begin(), r.end());
    }
    sacti::ad::Tensor m({rows.size(), rows[0].size()}, std::move(values));
    const auto row_labels = req.at("rows").get<std::vector<std::string>>();
    const auto col_labels = req.at("cols").get<std::vector<std::string>>();
    *svg = dup_string(sacti::service::render_heatmap_svg(m, row_labels, col_labels, req.value("title", "")));
  });
}

sacti_status sacti_annotations_open(const char* options_json, sacti_annotations** out) {
  return guarded([&] {
    require(out, "out");
    const json req = parse_request(options_json, "options");
    sacti::service::AnnotationStoreOptions o;
    o.instances = string_field(req, "instances", true);
    o.journal = string_field(req, "journal", true);
    if (req.contains("labels")) o.labels = req.at("labels").get<std::vector<std::string>>();
    if (req.contains("annotators_per_instance")) o.annotators_per_instance = req.at("annotators_per_instance").get<std::size_t>();
    *out = new sacti_annotations(o);
  });
}

void sacti_annotations_free(sacti_annotations* store) { delete store; }

sacti_status sacti_annotations_next(sacti_annotations* store, const char* annotator_id, char** result_json) {
  return guarded([&] {
    require(store, "store");
    require(annotator_id, "annotator");
    require(result_json, "result_json");
    const auto inst = store->store.next(annotator_id);
    json out{{"instance", inst ? sacti::text::to_json(*inst) : json(nullptr)},
             {"labels", store->store.labels()},
             {"progress", store->store.progress(annotator_id)},
             {"total", store->store.instance_count()}};
    *result_json = dup_string(out.dump());
  });
}

sacti_status sacti_annotations_submit(sacti_annotations* store, const char* request_json, char** record_json) {
  return guarded([&] {
    require(store, "store");
    require(record_json, "record_json");
    const json req = parse_request(request_json, "request");
    sacti::service::SubmitRequest s;
    s.instance_id = string_field(req, "instance_id", true);
    s.annotator_id = string_field(req, "annotator_id", true);
    s.choice = string_field(req, "choice", true);
    s.comment = string_field(req, "comment", false);
    s.idempotency_key = string_field(req, "idempotency_key", false);
    *record_json = dup_string(sacti::text::to_json(store->store.submit(s)).dump());
  });
}

sacti_status sacti_annotations_export(sacti_annotations* store, char** records_jsonl, char** summary_json) {
  return guarded([&] {
    require(store, "store");
    require(records_jsonl, "records_jsonl");
    require(summary_json, "summary_json");
    std::string records = store->store.export_jsonl();
    std::string summary = store->store.export_summary().dump();
    *records_jsonl = dup_string(records);
    *summary_json = dup_string(summary);
  });
}

sacti_status sacti_annotations_import(sacti_annotations* store, const char* records_jsonl, size_t* added) {
  return guarded([&] {
    require(store, "store");
    require(records_jsonl, "records_jsonl");
    const std::size_t n = store->store.import_jsonl(records_jsonl);
    if (added != nullptr) *added = n;
  });
}

sacti_status sacti_annotations_labels(sacti_annotations* store, char** labels_json) {
  return guarded([&] {
    require(store, "store");
    require(labels_json, "labels_json");
    *labels_json = dup_string(json(store->store.labels()).dump());
  });
}

sacti_status sacti_annotations_set_labels(sacti_annotations* store, const char* labels_json) {
  return guarded([&] {
    require(store, "store");
    const json req = parse_request(labels_json, "labels");
    if (!req.is_array()) sacti::fail(sacti::ErrorKind::kSchema, "labels must be a JSON array of strings", "labels");
    store->store.set_labels(req.get<std::vector<std::string>>());
  });
}

}  // extern "C"
