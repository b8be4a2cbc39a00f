// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "text/instance.hpp"

namespace sacti::text {

struct ConlluWord {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = 0;
  std::string deprel;
  std::string deps;
  std::string misc;
};

using ConlluSentence = std::vector<ConlluWord>;

// Standard 10-column reader. Comment lines, multiword ranges (1-2) and empty
// nodes (1.1) are skipped.
std::vector<ConlluSentence> parse_conllu(const std::string& text);
std::vector<ConlluSentence> read_conllu(const std::filesystem::path& path);

// "UPOS|FEATS", or just UPOS when FEATS is "_".
std::string composite_morph_tag(const ConlluWord& w);
// Value of the Case feature, or "_" when absent.
std::string case_value(const std::string& feats);

// Fills morph/case/lemma and dependency fields of sentence k into instance k.
// Fields an instance already carries are kept.
Dataset merge_conllu_pseudolabels(const Dataset& data, const std::vector<ConlluSentence>& sentences);

}  // namespace sacti::text
