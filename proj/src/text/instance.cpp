// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "text/instance.hpp"

#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace sacti::text {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorKind::kSchema, "field '" + field + "': " + why, field);
}

template <class T>
void check_length(const std::optional<std::vector<T>>& v, std::size_t n, const char* field) {
  if (v && v->size() != n) {
    invalid(field, "has " + std::to_string(v->size()) + " entries for " + std::to_string(n) + " tokens");
  }
}

template <class T>
std::optional<std::vector<T>> optional_array(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) invalid(key, "must be an array");
  try {
    return it->get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    invalid(key, "has elements of the wrong type");
  }
}

std::string optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) invalid(key, "must be a string");
  return it->get<std::string>();
}

}  // namespace

bool is_binary_compound(const std::string& token) {
  const auto dash = token.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == token.size()) return false;
  return token.find('-', dash + 1) == std::string::npos;
}

void validate(const ContextInstance& inst) {
  const std::size_t n = inst.tokens.size();
  if (n == 0) invalid("tokens", "must contain at least one token");
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.tokens[i].empty()) invalid("tokens", "token " + std::to_string(i) + " is empty");
  }
  if (inst.compound_index >= n) {
    invalid("compound_index", std::to_string(inst.compound_index) + " is outside [0," + std::to_string(n) + ")");
  }
  if (!is_binary_compound(inst.compound())) {
    invalid("compound_index", "token '" + inst.compound() + "' is not a binary compound of the form a-b");
  }
  check_length(inst.morph_tags, n, "morph_tags");
  check_length(inst.dep_heads, n, "dep_heads");
  check_length(inst.dep_rels, n, "dep_rels");
  check_length(inst.case_tags, n, "case_tags");
  check_length(inst.lemmas, n, "lemmas");
  if (inst.dep_rels && !inst.dep_heads) invalid("dep_rels", "given without dep_heads");
  if (inst.dep_heads) {
    for (std::size_t i = 0; i < n; ++i) {
      const int h = (*inst.dep_heads)[i];
      if (h < 0 || static_cast<std::size_t>(h) > n) {
        invalid("dep_heads", "head " + std::to_string(h) + " of token " + std::to_string(i) + " outside [0," +
                                 std::to_string(n) + "]");
      }
      if (static_cast<std::size_t>(h) == i + 1) invalid("dep_heads", "token " + std::to_string(i) + " is its own head");
    }
  }
}

nlohmann::json to_json(const ContextInstance& inst) {
  nlohmann::json j;
  if (!inst.id.empty()) j["id"] = inst.id;
  j["tokens"] = inst.tokens;
  j["compound_index"] = inst.compound_index;
  if (!inst.label.empty()) j["label"] = inst.label;
  if (inst.morph_tags) j["morph_tags"] = *inst.morph_tags;
  if (inst.dep_heads) j["dep_heads"] = *inst.dep_heads;
  if (inst.dep_rels) j["dep_rels"] = *inst.dep_rels;
  if (inst.case_tags) j["case_tags"] = *inst.case_tags;
  if (inst.lemmas) j["lemmas"] = *inst.lemmas;
  if (!inst.language.empty()) j["language"] = inst.language;
  return j;
}

ContextInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kSchema, "instance must be a JSON object");
  ContextInstance inst;
  auto tokens = j.find("tokens");
  if (tokens == j.end()) invalid("tokens", "missing");
  if (!tokens->is_array()) invalid("tokens", "must be an array of strings");
  for (const auto& t : *tokens) {
    if (!t.is_string()) invalid("tokens", "must be an array of strings");
    inst.tokens.push_back(t.get<std::string>());
  }
  auto index = j.find("compound_index");
  if (index == j.end()) invalid("compound_index", "missing");
  if (!index->is_number_integer()) invalid("compound_index", "must be an integer");
  if (index->get<long long>() < 0) invalid("compound_index", "must be non-negative");
  inst.compound_index = index->get<std::size_t>();
  inst.id = optional_string(j, "id");
  inst.label = optional_string(j, "label");
  inst.language = optional_string(j, "language");
  inst.morph_tags = optional_array<std::string>(j, "morph_tags");
  inst.dep_heads = optional_array<int>(j, "dep_heads");
  inst.dep_rels = optional_array<std::string>(j, "dep_rels");
  inst.case_tags = optional_array<std::string>(j, "case_tags");
  inst.lemmas = optional_array<std::string>(j, "lemmas");
  validate(inst);
  return inst;
}

Dataset parse_jsonl_dataset(const std::string& text) {
  Dataset out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(instance_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::kSchema, "line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(line_no) + ": " + e.what(), e.field());
    }
  }
  return out;
}

Dataset load_jsonl_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open dataset " + path.string(), "data");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_jsonl_dataset(buffer.str());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what(), e.field());
  }
}

std::string format_jsonl_dataset(const Dataset& data) {
  std::string out;
  for (const auto& inst : data) {
    out += to_json(inst).dump();
    out += '\n';
  }
  return out;
}

void write_jsonl_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing", "out");
  out << format_jsonl_dataset(data);
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string(), "out");
}

PieceEncoding encode_instance(const ContextInstance& inst, const SubwordVocab& vocab) {
  PieceEncoding enc;
  auto append = [&](const std::string& token) {
    const auto ids = vocab.encode(token);
    enc.spans.push_back({enc.ids.size(), ids.size()});
    enc.ids.insert(enc.ids.end(), ids.begin(), ids.end());
  };
  for (const auto& token : inst.tokens) append(token);
  append(inst.compound());
  return enc;
}

ContextInstance compound_only(const ContextInstance& inst) {
  ContextInstance out;
  out.id = inst.id;
  out.tokens = {inst.compound()};
  out.compound_index = 0;
  out.label = inst.label;
  out.language = inst.language;
  const std::size_t p = inst.compound_index;
  if (inst.morph_tags) out.morph_tags = std::vector<std::string>{(*inst.morph_tags)[p]};
  if (inst.case_tags) out.case_tags = std::vector<std::string>{(*inst.case_tags)[p]};
  if (inst.lemmas) out.lemmas = std::vector<std::string>{(*inst.lemmas)[p]};
  // Parses of the original sentence say nothing about a lone token.
  return out;
}

}  // namespace sacti::text
