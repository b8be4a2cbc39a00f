// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "oracles.hpp"
#include "text/annotation.hpp"
#include "text/bpe.hpp"
#include "text/conllu.hpp"
#include "text/instance.hpp"
#include "text/labels.hpp"
#include "text/stats.hpp"
#include "text/utf8.hpp"

using namespace sacti;
using namespace sacti::text;
using sacti::testing::error_kind;

namespace {

const std::vector<std::string> kWords{"aham", "rāma", "īśvaraḥ", "pīta", "ambaram", "namāmi", "sa", "ca", "deva", "ṛṣi"};

ContextInstance random_instance(ad::Rng& rng, std::size_t k) {
  ContextInstance inst;
  inst.id = "r" + std::to_string(k);
  const std::size_t n = 1 + rng.below(6);
  for (std::size_t i = 0; i < n; ++i) inst.tokens.push_back(kWords[rng.below(kWords.size())]);
  inst.compound_index = rng.below(n);
  inst.tokens[inst.compound_index] = kWords[rng.below(kWords.size())] + "-" + kWords[rng.below(kWords.size())];
  if (rng.below(4) != 0) inst.label = std::string(1, "ABDT"[rng.below(4)]);
  if (rng.below(2)) inst.morph_tags = std::vector<std::string>(n, "NOUN|Case=Nom");
  if (rng.below(2)) {
    std::vector<int> heads(n);
    for (std::size_t i = 0; i < n; ++i) heads[i] = i == 0 ? 0 : static_cast<int>(rng.below(i + 1));
    inst.dep_heads = heads;
    if (rng.below(2)) inst.dep_rels = std::vector<std::string>(n, "dep");
  }
  if (rng.below(3) == 0) inst.case_tags = std::vector<std::string>(n, "Acc");
  if (rng.below(3) == 0) inst.lemmas = inst.tokens;
  if (rng.below(2)) inst.language = "sa";
  return inst;
}

}  // namespace

TEST_CASE("utf8 split restores input") {
  const std::string s = "rāma-īśvaraḥ\xff" "x";
  const auto cps = split_code_points(s);
  std::string back;
  for (const auto& c : cps) back += c;
  CHECK(back == s);
  CHECK(split_code_points("ā").size() == 1);
}

TEST_CASE("subword vocabulary") {
  const std::vector<std::string> corpus{"abab", "abab", "abc", "c"};
  const auto v = SubwordVocab::train(corpus, 5);
  CHECK(v.character_count() == 3);
  CHECK(v.size() == SubwordVocab::kSpecialCount + 5);
  // "ab" is the most frequent pair, so it merges first.
  REQUIRE(!v.merges().empty());
  CHECK(v.merges()[0] == std::make_pair(std::string("a"), std::string("b")));
  for (const auto& w : corpus) CHECK(v.decode(v.encode(w)) == w);
  CHECK(v.encode("z") == std::vector<int>{SubwordVocab::kUnk});
  CHECK(SubwordVocab::from_json(v.to_json()) == v);
  CHECK(SubwordVocab::train(corpus, 5) == v);
  CHECK(error_kind([&] { SubwordVocab::train(corpus, 2); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([] { SubwordVocab::train(std::vector<std::string>{}, 3); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("label vocabulary") {
  const auto v = LabelVocab::from_values({"T", "B", "T", "A"});
  CHECK(v.names() == std::vector<std::string>{"A", "B", "T"});
  CHECK(v.id("T") == 2);
  CHECK(v.name(1) == "B");
  CHECK(error_kind([&] { v.id("X"); }) == ErrorKind::kLabelSpace);
  CHECK(error_kind([] { LabelVocab({"A", "A"}); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("instance validation") {
  ContextInstance inst;
  inst.tokens = {"aham", "pīta-ambaram", "namāmi"};
  inst.compound_index = 1;
  CHECK_NOTHROW(validate(inst));
  auto bad = inst;
  bad.compound_index = 0;
  try {
    validate(bad);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSchema);
    CHECK(e.field() == "compound_index");
  }
  bad = inst;
  bad.tokens[1] = "a-b-c";
  CHECK(error_kind([&] { validate(bad); }) == ErrorKind::kSchema);
  bad = inst;
  bad.morph_tags = std::vector<std::string>{"X"};
  CHECK(error_kind([&] { validate(bad); }) == ErrorKind::kSchema);
  bad = inst;
  bad.dep_heads = std::vector<int>{0, 2, 0};
  CHECK(error_kind([&] { validate(bad); }) == ErrorKind::kSchema);
}

TEST_CASE("jsonl round trip and errors") {
  CHECK(parse_jsonl_dataset("").empty());
  CHECK(parse_jsonl_dataset("\n\n").empty());
  ad::Rng rng(50);
  Dataset data;
  for (std::size_t k = 0; k < 50; ++k) data.push_back(random_instance(rng, k));
  CHECK(parse_jsonl_dataset(format_jsonl_dataset(data)) == data);

  const auto dir = sacti::testing::scratch_dir("jsonl");
  write_jsonl_dataset(dir / "d.jsonl", data);
  CHECK(load_jsonl_dataset(dir / "d.jsonl") == data);

  try {
    parse_jsonl_dataset("{\"tokens\":[\"a-b\"],\"compound_index\":0}\n{\"tokens\":[\"ab\"],\"compound_index\":0}\n");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(e.field() == "compound_index");
  }
  CHECK(error_kind([] { parse_jsonl_dataset("{not json\n"); }) == ErrorKind::kSchema);
  CHECK(error_kind([&] { load_jsonl_dataset(dir / "missing.jsonl"); }) == ErrorKind::kIo);
}

TEST_CASE("instance encoding appends the compound") {
  ContextInstance inst;
  inst.tokens = {"sa", "deva-ṛṣi", "ca"};
  inst.compound_index = 1;
  const std::vector<std::string> corpus{"sa", "deva-ṛṣi", "ca"};
  const auto v = SubwordVocab::train(corpus, 14);
  const auto enc = encode_instance(inst, v);
  REQUIRE(enc.spans.size() == 4);
  std::size_t at = 0;
  for (const auto& s : enc.spans) {
    CHECK(s.begin == at);
    CHECK(s.length > 0);
    at += s.length;
  }
  CHECK(at == enc.ids.size());
  const std::vector<int> compound(enc.ids.begin() + enc.spans[1].begin,
                                  enc.ids.begin() + enc.spans[1].begin + enc.spans[1].length);
  const std::vector<int> copy(enc.ids.begin() + enc.spans[3].begin, enc.ids.end());
  CHECK(compound == copy);

  const auto alone = compound_only(inst);
  CHECK(alone.tokens == std::vector<std::string>{"deva-ṛṣi"});
  CHECK(alone.compound_index == 0);
}

TEST_CASE("conllu reader against a manual parse") {
  const std::string text =
      "# sent_id = 1\n"
      "1\taham\taham\tPRON\t_\tCase=Nom|Number=Sing\t3\tnsubj\t_\t_\n"
      "1-2\tx\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "2\tpīta-ambaram\tpīta-ambara\tNOUN\t_\tCase=Acc\t3\tobj\t_\t_\n"
      "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "3\tnamāmi\tnam\tVERB\t_\t_\t0\troot\t_\t_\n"
      "\n";
  const auto sents = parse_conllu(text);
  REQUIRE(sents.size() == 1);
  REQUIRE(sents[0].size() == 3);
  const auto& w = sents[0];
  CHECK(w[0].form == "aham");
  CHECK(w[0].lemma == "aham");
  CHECK(w[0].upos == "PRON");
  CHECK(w[0].feats == "Case=Nom|Number=Sing");
  CHECK(w[0].head == 3);
  CHECK(w[0].deprel == "nsubj");
  CHECK(w[1].form == "pīta-ambaram");
  CHECK(w[2].head == 0);
  CHECK(composite_morph_tag(w[0]) == "PRON|Case=Nom|Number=Sing");
  CHECK(composite_morph_tag(w[2]) == "VERB");
  CHECK(case_value(w[1].feats) == "Acc");
  CHECK(case_value(w[2].feats) == "_");

  ContextInstance inst;
  inst.tokens = {"aham", "pīta-ambaram", "namāmi"};
  inst.compound_index = 1;
  const auto merged = merge_conllu_pseudolabels({inst}, sents);
  CHECK(*merged[0].dep_heads == std::vector<int>{3, 3, 0});
  CHECK(*merged[0].dep_rels == std::vector<std::string>{"nsubj", "obj", "root"});
  CHECK(*merged[0].morph_tags == std::vector<std::string>{"PRON|Case=Nom|Number=Sing", "NOUN|Case=Acc", "VERB"});
  CHECK(*merged[0].case_tags == std::vector<std::string>{"Nom", "Acc", "_"});
  CHECK(*merged[0].lemmas == std::vector<std::string>{"aham", "pīta-ambara", "nam"});

  // Gold fields already present stay.
  auto gold = inst;
  gold.morph_tags = std::vector<std::string>{"a", "b", "c"};
  CHECK(*merge_conllu_pseudolabels({gold}, sents)[0].morph_tags == *gold.morph_tags);

  const auto rooted = parse_conllu("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb-c\t_\tX\t_\t_\t0\troot\t_\t_\n\n");
  ContextInstance two;
  two.tokens = {"a", "b-c"};
  two.compound_index = 1;
  CHECK(*merge_conllu_pseudolabels({two}, rooted)[0].dep_heads == std::vector<int>{0, 0});

  try {
    merge_conllu_pseudolabels({two, inst}, {rooted[0], rooted[0]});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("sentence 1") != std::string::npos);
  }
  CHECK(error_kind([] { parse_conllu("1\ta\n"); }) == ErrorKind::kSchema);
}

TEST_CASE("aggregation examples") {
  auto rec = [](const std::string& inst, const std::string& who, const std::string& choice) {
    AnnotationRecord r;
    r.instance_id = inst;
    r.annotator_id = who;
    r.choice = choice;
    return r;
  };
  const auto res = aggregate_annotations({rec("x", "a", "B"), rec("x", "b", "B"), rec("x", "c", "T"),
                                          rec("y", "a", "B"), rec("y", "b", "T"), rec("y", "c", kNotSure)});
  CHECK(res.labels == std::map<std::string, std::string>{{"x", "B"}});
  CHECK(res.dropped == std::vector<std::string>{"y"});
  // A later record from the same annotator replaces the earlier one.
  const auto redo = aggregate_annotations({rec("z", "a", "T"), rec("z", "b", "B"), rec("z", "a", "B")});
  CHECK(redo.labels.at("z") == "B");
}

TEST_CASE("aggregation matches a brute-force tally on 1000 records") {
  ad::Rng rng(77);
  const std::vector<std::string> choices{"A", "B", "D", "T", kNotSure};
  std::vector<AnnotationRecord> records;
  for (std::size_t k = 0; k < 1000; ++k) {
    AnnotationRecord r;
    r.record_id = k + 1;
    r.instance_id = "i" + std::to_string(rng.below(200));
    r.annotator_id = "u" + std::to_string(rng.below(4));
    r.choice = choices[rng.below(choices.size())];
    records.push_back(r);
  }
  const auto got = aggregate_annotations(records);

  std::set<std::string> instances;
  for (const auto& r : records) instances.insert(r.instance_id);
  AggregationResult want;
  for (const auto& id : instances) {
    // Last word of each annotator on this instance.
    std::map<std::string, std::string> last;
    for (const auto& r : records) {
      if (r.instance_id == id) last[r.annotator_id] = r.choice;
    }
    std::vector<std::pair<std::size_t, std::string>> tally;
    for (const auto& c : choices) {
      if (c == kNotSure) continue;
      std::size_t n = 0;
      for (const auto& [_, ch] : last) n += ch == c;
      tally.emplace_back(n, c);
    }
    std::sort(tally.rbegin(), tally.rend());
    const bool tie = tally[0].first == tally[1].first;
    if (tally[0].first >= 2 && !tie) {
      want.labels[id] = tally[0].second;
    } else {
      want.dropped.push_back(id);
    }
  }
  CHECK(got == want);
  CHECK(!want.labels.empty());
  CHECK(!want.dropped.empty());

  Dataset data;
  for (const auto& id : instances) {
    ContextInstance inst;
    inst.id = id;
    inst.tokens = {"a-b"};
    data.push_back(inst);
  }
  const auto labeled = apply_labels(data, got);
  CHECK(labeled.size() == got.labels.size());
  for (const auto& inst : labeled) CHECK(inst.label == got.labels.at(inst.id));
}

TEST_CASE("kappa") {
  CHECK(cohen_kappa({"X", "Y", "X"}, {"X", "Y", "X"}) == 1.0);
  CHECK(cohen_kappa({"X", "X"}, {"X", "X"}) == 1.0);
  CHECK(cohen_kappa({"X", "X", "Y", "Y"}, {"X", "Y", "X", "Y"}) == 0.0);
  CHECK(error_kind([] { cohen_kappa({}, {}); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([] { cohen_kappa({"X"}, {"X", "Y"}); }) == ErrorKind::kDimension);

  ad::Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> a, b;
    for (int i = 0; i < 100; ++i) {
      a.push_back(std::string(1, "ABCD"[rng.below(4)]));
      b.push_back(rng.below(3) == 0 ? std::string(1, "ABCD"[rng.below(4)]) : a.back());
    }
    double agree = 0;
    std::map<std::string, double> ca, cb;
    for (int i = 0; i < 100; ++i) {
      agree += a[i] == b[i];
      ca[a[i]] += 1;
      cb[b[i]] += 1;
    }
    const double po = agree / 100.0;
    double pe = 0;
    for (const auto& [label, n] : ca) pe += (n / 100.0) * (cb.count(label) ? cb[label] / 100.0 : 0.0);
    CHECK(std::abs(cohen_kappa(a, b) - (po - pe) / (1 - pe)) < 1e-12);
  }
}

TEST_CASE("pairwise kappa and record json") {
  std::vector<AnnotationRecord> records;
  std::uint64_t id = 1;
  for (const auto& who : {"ann1", "ann2", "ann3"}) {
    for (int i = 0; i < 4; ++i) {
      AnnotationRecord r;
      r.record_id = id++;
      r.instance_id = "i" + std::to_string(i);
      r.annotator_id = who;
      r.choice = std::string(who) == "ann3" ? "T" : (i % 2 ? "A" : "B");
      r.comment = "c\"ö";
      r.timestamp = "2026-01-02T03:04:05.000Z";
      records.push_back(r);
      CHECK(record_from_json(to_json(r)) == r);
    }
  }
  const auto k = pairwise_kappa(records);
  REQUIRE(k.size() == 3);
  CHECK(k[0].first == "ann1");
  CHECK(k[0].second == "ann2");
  CHECK(k[0].items == 4);
  CHECK(k[0].kappa == 1.0);
  CHECK(k[1].kappa == 0.0);
  CHECK(error_kind([] { record_from_json(nlohmann::json{{"instance_id", "x"}}); }) == ErrorKind::kSchema);
}

TEST_CASE("dataset stats") {
  const Dataset train = sacti::testing::separable_dataset(32);
  const Dataset dev = sacti::testing::separable_dataset(8);
  const auto s = dataset_stats({{"train", &train}, {"dev", &dev}});
  REQUIRE(s.splits.size() == 2);
  CHECK(s.splits[0].instances == 32);
  CHECK(s.splits[0].per_label.at("A") == 8);
  CHECK(s.unique_compounds == 8);
  CHECK(s.types == 4);
}
