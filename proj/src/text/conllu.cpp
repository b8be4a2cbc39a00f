// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "text/conllu.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace sacti::text {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cols;
}

int parse_int(const std::string& s, std::size_t line_no, const char* column) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::kSchema, "conllu line " + std::to_string(line_no) + ": bad " + column + " '" + s + "'", column);
  }
  return v;
}

}  // namespace

std::vector<ConlluSentence> parse_conllu(const std::string& text) {
  std::vector<ConlluSentence> out;
  ConlluSentence current;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 10) {
      fail(ErrorKind::kSchema, "conllu line " + std::to_string(line_no) + ": expected 10 columns, got " +
                                   std::to_string(cols.size()));
    }
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    ConlluWord w;
    w.id = parse_int(cols[0], line_no, "ID");
    w.form = cols[1];
    w.lemma = cols[2];
    w.upos = cols[3];
    w.xpos = cols[4];
    w.feats = cols[5];
    w.head = cols[6] == "_" ? 0 : parse_int(cols[6], line_no, "HEAD");
    w.deprel = cols[7];
    w.deps = cols[8];
    w.misc = cols[9];
    current.push_back(std::move(w));
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<ConlluSentence> read_conllu(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open conllu file " + path.string(), "conllu");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_conllu(buffer.str());
}

std::string composite_morph_tag(const ConlluWord& w) {
  if (w.feats.empty() || w.feats == "_") return w.upos;
  return w.upos + "|" + w.feats;
}

std::string case_value(const std::string& feats) {
  std::size_t start = 0;
  while (start <= feats.size()) {
    const auto bar = feats.find('|', start);
    const auto item = feats.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    if (item.rfind("Case=", 0) == 0) return item.substr(5);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return "_";
}

Dataset merge_conllu_pseudolabels(const Dataset& data, const std::vector<ConlluSentence>& sentences) {
  if (sentences.size() != data.size()) {
    fail(ErrorKind::kSchema, "conllu has " + std::to_string(sentences.size()) + " sentences for " +
                                 std::to_string(data.size()) + " instances",
         "conllu");
  }
  Dataset out = data;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& inst = out[k];
    const auto& sent = sentences[k];
    const std::size_t n = inst.tokens.size();
    if (sent.size() != n) {
      fail(ErrorKind::kSchema, "sentence " + std::to_string(k) + " has " + std::to_string(sent.size()) +
                                   " words but instance has " + std::to_string(n) + " tokens",
           "conllu");
    }
    if (!inst.morph_tags) {
      std::vector<std::string> tags;
      for (const auto& w : sent) tags.push_back(composite_morph_tag(w));
      inst.morph_tags = std::move(tags);
    }
    if (!inst.case_tags) {
      std::vector<std::string> tags;
      for (const auto& w : sent) tags.push_back(case_value(w.feats));
      inst.case_tags = std::move(tags);
    }
    if (!inst.lemmas) {
      std::vector<std::string> tags;
      for (const auto& w : sent) tags.push_back(w.lemma);
      inst.lemmas = std::move(tags);
    }
    if (!inst.dep_heads) {
      std::vector<int> heads;
      std::vector<std::string> rels;
      for (const auto& w : sent) {
        heads.push_back(w.head);
        rels.push_back(w.deprel);
      }
      inst.dep_heads = std::move(heads);
      inst.dep_rels = std::move(rels);
    }
    try {
      validate(inst);
    } catch (const Error& e) {
      fail(e.kind(), "sentence " + std::to_string(k) + ": " + e.what(), e.field());
    }
  }
  return out;
}

}  // namespace sacti::text
