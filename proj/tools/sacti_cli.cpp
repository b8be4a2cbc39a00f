// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over libsacti.
//
//   sacti train --config cfg.json --data train.jsonl [--dev dev.jsonl] --out DIR
//   sacti eval --checkpoint model.ckpt --data test.jsonl --out DIR
//   sacti predict --checkpoint model.ckpt --data inputs.jsonl --out DIR
//   sacti grid --config cfg.json --grid grid.json --out DIR
//   sacti heatmap --checkpoint model.ckpt --data inputs.jsonl --out DIR [--svg]
//   sacti data-stats --data train=train.jsonl --data dev=dev.jsonl --out DIR
//   sacti annotate-export --instances pool.jsonl --journal journal.jsonl --out DIR
//   sacti merge-conllu --data in.jsonl --conllu parsed.conllu --out DIR
//   sacti serve --checkpoint model.ckpt [--instances pool.jsonl --journal j.jsonl]
//
// Failures print one JSON line {"error", "status", "field"} to stderr.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "http_service.hpp"
#include "sacti/sacti.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  std::string message;
  std::string status;
  std::string field;
};

[[noreturn]] void raise(const std::string& message, const std::string& status, const std::string& field) {
  throw CliError{message, status, field};
}

void check(sacti_status s) {
  if (s != SACTI_OK) raise(sacti_last_error(), sacti_status_name(s), sacti_last_error_field());
}

struct CString {
  char* p = nullptr;
  ~CString() { sacti_free_string(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string read_file(const std::string& path, const std::string& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise("cannot read " + path, "io", flag);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise("cannot write " + path.string(), "io", "out");
  out << content;
  if (!out) raise("write to " + path.string() + " failed", "io", "out");
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) raise("cannot create output directory " + dir, "io", "out");
  return dir;
}

json read_json_file(const std::string& path, const std::string& flag) {
  json j = json::parse(read_file(path, flag), nullptr, false);
  if (j.is_discarded()) raise(path + " is not valid JSON", "schema", flag);
  return j;
}

std::vector<json> read_jsonl(const std::string& path, const std::string& flag) {
  std::vector<json> out;
  std::istringstream in(read_file(path, flag));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) raise(path + " line " + std::to_string(n) + ": invalid JSON", "schema", flag);
    out.push_back(std::move(j));
  }
  return out;
}

struct ConfigOverrides {
  std::string config;
  std::int64_t seed = -1;
  std::int64_t epochs = -1;
  std::string context_mode;
  std::string heads;
};

json load_config(const ConfigOverrides& o) {
  json cfg = o.config.empty() ? json::object() : read_json_file(o.config, "config");
  if (!cfg.is_object()) raise("config must be a JSON object", "schema", "config");
  if (o.seed >= 0) cfg["seed"] = o.seed;
  if (o.epochs >= 0) cfg["epochs"] = o.epochs;
  if (!o.context_mode.empty()) cfg["context_mode"] = o.context_mode;
  if (!o.heads.empty()) cfg["heads"] = o.heads;
  return cfg;
}

void add_overrides(CLI::App* cmd, ConfigOverrides& o) {
  cmd->add_option("--config", o.config, "training configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--epochs", o.epochs, "number of epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--context-mode", o.context_mode, "with | without")->check(CLI::IsMember({"with", "without"}));
  cmd->add_option("--heads", o.heads, "comma list of sacti, morph, dep, case, lemma, relation");
}

struct ModelHandle {
  sacti_model* p = nullptr;
  explicit ModelHandle(const std::string& path) { check(sacti_model_load(path.c_str(), &p)); }
  ~ModelHandle() { sacti_model_free(p); }
};

std::string predict_one(const ModelHandle& m, const json& instance) {
  CString out;
  check(sacti_predict(m.p, instance.dump().c_str(), &out.p));
  return out.str();
}

volatile std::sig_atomic_t g_stop = 0;
sacti::server::HttpService* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-sensitive compound type identification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sacti_version()));

  std::string data, dev, out, checkpoint, grid_path, conllu, instances, journal, bind, labels;
  std::vector<std::string> data_list;
  int layer = -1, head = -1;
  bool svg = false;
  std::size_t per_instance = 3;
  ConfigOverrides overrides;

  auto* train = app.add_subcommand("train", "train a model");
  add_overrides(train, overrides);
  train->add_option("--data", data, "training JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--dev", dev, "development JSONL")->check(CLI::ExistingFile);
  train->add_option("--out", out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data)->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out)->required();

  auto* predict = app.add_subcommand("predict", "predict compound types");
  predict->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  predict->add_option("--data", data, "JSONL of instances")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", out)->required();

  auto* grid = app.add_subcommand("grid", "run an experiment grid");
  add_overrides(grid, overrides);
  grid->add_option("--grid", grid_path, "grid specification JSON")->required()->check(CLI::ExistingFile);
  grid->add_option("--out", out)->required();

  auto* heatmap = app.add_subcommand("heatmap", "export heatmap matrices");
  heatmap->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  heatmap->add_option("--data", data)->required()->check(CLI::ExistingFile);
  heatmap->add_option("--out", out)->required();
  heatmap->add_option("--layer", layer)->check(CLI::NonNegativeNumber);
  heatmap->add_option("--head", head)->check(CLI::NonNegativeNumber);
  heatmap->add_flag("--svg", svg, "also render SVG files");

  auto* stats = app.add_subcommand("data-stats", "dataset statistics");
  stats->add_option("--data", data_list, "NAME=PATH or PATH; repeatable")->required();
  stats->add_option("--out", out)->required();

  auto* export_cmd = app.add_subcommand("annotate-export", "export annotations with an agreement summary");
  export_cmd->add_option("--instances", instances)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--journal", journal)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--out", out)->required();

  auto* merge = app.add_subcommand("merge-conllu", "fill pseudo-labels from CoNLL-U");
  merge->add_option("--data", data)->required()->check(CLI::ExistingFile);
  merge->add_option("--conllu", conllu)->required()->check(CLI::ExistingFile);
  merge->add_option("--out", out)->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--checkpoint", checkpoint)->check(CLI::ExistingFile);
  serve->add_option("--instances", instances, "JSONL pool to annotate")->check(CLI::ExistingFile);
  serve->add_option("--journal", journal, "annotation journal");
  serve->add_option("--labels", labels, "comma list of annotation labels");
  serve->add_option("--annotators-per-instance", per_instance)->check(CLI::PositiveNumber);
  serve->add_option("--bind", bind, "HOST:PORT (default $SACTI_BIND or 127.0.0.1:8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", e.what()}, {"status", "invalid_argument"}, {"field", "argv"}}.dump() << "\n";
    return 2;
  }

  try {
    if (*train) {
      const fs::path dir = prepare_out(out);
      json req{{"config", load_config(overrides)},
               {"train", data},
               {"checkpoint", (dir / "model.ckpt").string()},
               {"log", (dir / "train_log.jsonl").string()}};
      if (!dev.empty()) req["dev"] = dev;
      CString res;
      check(sacti_train(req.dump().c_str(), &res.p));
      write_file(dir / "train_result.json", res.str() + "\n");
      std::cout << res.str() << "\n";
    } else if (*eval) {
      const fs::path dir = prepare_out(out);
      ModelHandle m(checkpoint);
      CString res;
      check(sacti_evaluate(m.p, data.c_str(), &res.p));
      const json r = json::parse(res.str());
      write_file(dir / "eval.json", r.dump(2) + "\n");
      std::string csv = "gold\\predicted";
      const auto names = r.at("confusion").at("labels").get<std::vector<std::string>>();
      for (const auto& n : names) csv += "," + n;
      csv += "\n";
      const auto counts = r.at("confusion").at("counts");
      for (std::size_t i = 0; i < names.size(); ++i) {
        csv += names[i];
        for (const auto& c : counts.at(i)) csv += "," + std::to_string(c.get<std::size_t>());
        csv += "\n";
      }
      write_file(dir / "confusion.csv", csv);
      std::cout << r.at("metrics").dump() << "\n";
    } else if (*predict) {
      const fs::path dir = prepare_out(out);
      ModelHandle m(checkpoint);
      std::string lines;
      for (const auto& inst : read_jsonl(data, "data")) lines += predict_one(m, inst) + "\n";
      write_file(dir / "predictions.jsonl", lines);
    } else if (*grid) {
      const fs::path dir = prepare_out(out);
      json req{{"config", load_config(overrides)},
               {"grid", read_json_file(grid_path, "grid")},
               {"base_dir", fs::absolute(grid_path).parent_path().string()}};
      CString res;
      check(sacti_run_grid(req.dump().c_str(), &res.p));
      const json r = json::parse(res.str());
      write_file(dir / "grid.csv", r.at("csv").get<std::string>());
      write_file(dir / "grid.json", r.at("rows").dump(2) + "\n");
      std::cout << r.at("csv").get<std::string>();
    } else if (*heatmap) {
      const fs::path dir = prepare_out(out);
      ModelHandle m(checkpoint);
      std::size_t index = 0;
      for (json inst : read_jsonl(data, "data")) {
        if (layer >= 0) inst["attention_layer"] = layer;
        if (head >= 0) inst["attention_head"] = head;
        const json report = json::parse(predict_one(m, inst));
        const json& maps = report.at("heatmaps");
        const std::string stem = "heatmap_" + std::to_string(index++);
        write_file(dir / (stem + ".json"), maps.dump(2) + "\n");
        if (!svg) continue;
        auto render = [&](const json& matrix, const json& rows, const json& cols, const std::string& title,
                          const std::string& suffix) {
          if (matrix.empty()) return;
          CString picture;
          const json r{{"matrix", matrix}, {"rows", rows}, {"cols", cols}, {"title", title}};
          check(sacti_render_heatmap_svg(r.dump().c_str(), &picture.p));
          write_file(dir / (stem + "_" + suffix + ".svg"), picture.str());
        };
        render(maps.at("sacti"), maps.at("tokens"), maps.at("tokens"), "SaCTI pair scores", "sacti");
        render(maps.at("attention").at("matrix"), maps.at("tokens"), maps.at("tokens"), "encoder attention",
               "attention");
        if (!maps.at("dependency").is_null()) {
          const json& d = maps.at("dependency");
          render(d.at("matrix"), d.at("tokens"), d.at("tokens"), "dependency arcs", "dependency");
        }
      }
    } else if (*stats) {
      const fs::path dir = prepare_out(out);
      json splits = json::array();
      for (const auto& item : data_list) {
        const auto eq = item.find('=');
        std::string name = eq == std::string::npos ? fs::path(item).stem().string() : item.substr(0, eq);
        std::string path = eq == std::string::npos ? item : item.substr(eq + 1);
        if (!fs::exists(path)) raise("file does not exist: " + path, "io", "data");
        splits.push_back(json{{"name", name}, {"path", path}});
      }
      CString res;
      check(sacti_data_stats(json{{"splits", splits}}.dump().c_str(), &res.p));
      const json r = json::parse(res.str());
      write_file(dir / "stats.json", r.dump(2) + "\n");
      std::cout << r.dump() << "\n";
    } else if (*export_cmd) {
      const fs::path dir = prepare_out(out);
      // Work on a copy so the journal itself is never touched.
      const fs::path copy = dir / ".journal.snapshot";
      fs::copy_file(journal, copy, fs::copy_options::overwrite_existing);
      sacti_annotations* store = nullptr;
      const json opts{{"instances", instances}, {"journal", copy.string()}};
      const sacti_status s = sacti_annotations_open(opts.dump().c_str(), &store);
      if (s != SACTI_OK) {
        fs::remove(copy);
        check(s);
      }
      CString records, summary;
      const sacti_status e = sacti_annotations_export(store, &records.p, &summary.p);
      sacti_annotations_free(store);
      fs::remove(copy);
      check(e);
      write_file(dir / "annotations.jsonl", records.str());
      write_file(dir / "summary.json", json::parse(summary.str()).dump(2) + "\n");
    } else if (*merge) {
      const fs::path dir = prepare_out(out);
      CString res;
      check(sacti_merge_conllu(data.c_str(), conllu.c_str(), &res.p));
      write_file(dir / "merged.jsonl", res.str());
    } else if (*serve) {
      sacti::server::ServiceOptions opts;
      opts.checkpoint = checkpoint;
      opts.instances = instances;
      opts.journal = journal;
      opts.annotators_per_instance = per_instance;
      std::stringstream ss(labels);
      for (std::string l; std::getline(ss, l, ',');) {
        if (!l.empty()) opts.labels.push_back(l);
      }
      auto [host, port] = sacti::server::bind_address_from_env();
      if (!bind.empty()) {
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos) raise("--bind expects HOST:PORT", "invalid_argument", "bind");
        host = bind.substr(0, colon);
        try {
          port = std::stoi(bind.substr(colon + 1));
        } catch (const std::exception&) {
          raise("--bind port is not a number", "invalid_argument", "bind");
        }
      }
      sacti::server::HttpService service(opts);
      g_service = &service;
      std::signal(SIGINT, [](int) {
        g_stop = 1;
        if (g_service) g_service->stop();
      });
      std::signal(SIGTERM, [](int) {
        g_stop = 1;
        if (g_service) g_service->stop();
      });
      std::cerr << json{{"listening", host + ":" + std::to_string(port)}}.dump() << "\n";
      if (!service.listen(host, port) && !g_stop) raise("cannot listen on " + host + ":" + std::to_string(port), "io", "bind");
      g_service = nullptr;
    }
  } catch (const CliError& e) {
    std::cerr << json{{"error", e.message}, {"status", e.status}, {"field", e.field}}.dump() << "\n";
    return 1;
  } catch (const sacti::server::ServiceError& e) {
    std::cerr << json{{"error", e.what()}, {"status", e.status()}, {"field", e.field()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"status", "internal"}, {"field", ""}}.dump() << "\n";
    return 1;
  }
  return 0;
}
