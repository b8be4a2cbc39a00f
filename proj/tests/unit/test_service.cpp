// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <set>
#include <thread>

#include "oracles.hpp"
#include "service/annotation_store.hpp"
#include "service/heatmap_svg.hpp"
#include "text/annotation.hpp"

using namespace sacti;
using sacti::testing::error_kind;

namespace {

struct Fixture {
  std::filesystem::path dir;
  service::AnnotationStoreOptions opts;

  explicit Fixture(const std::string& tag, std::size_t per_instance = 2) {
    dir = sacti::testing::scratch_dir(tag);
    auto data = sacti::testing::separable_dataset(4);
    for (auto& inst : data) inst.label.clear();
    text::write_jsonl_dataset(dir / "queue.jsonl", data);
    opts.instances = dir / "queue.jsonl";
    opts.journal = dir / "journal.jsonl";
    opts.labels = {"A", "B", "D", "T"};
    opts.annotators_per_instance = per_instance;
  }
};

service::SubmitRequest req(const std::string& inst, const std::string& who, const std::string& choice,
                           const std::string& key = {}) {
  return service::SubmitRequest{inst, who, choice, "", key};
}

}  // namespace

TEST_CASE("queue order and coverage") {
  Fixture f("svc-next");
  service::AnnotationStore store(f.opts);
  CHECK(store.instance_count() == 4);
  CHECK(store.next("ann1")->id == "syn0");
  store.submit(req("syn0", "ann1", "A"));
  // ann1 moves on; ann2 gets the least-annotated instance, not syn0.
  CHECK(store.next("ann1")->id == "syn1");
  CHECK(store.next("ann2")->id == "syn1");
  store.submit(req("syn0", "ann2", "A"));
  // syn0 is full at two annotators.
  CHECK(store.next("ann3")->id == "syn1");
  for (const char* id : {"syn1", "syn2", "syn3"}) store.submit(req(id, "ann1", "B"));
  CHECK_FALSE(store.next("ann1").has_value());
  CHECK(store.progress("ann1") == 4);
  CHECK(store.progress("ann2") == 1);
  CHECK(error_kind([&] { store.next(""); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("submit validation and idempotency") {
  Fixture f("svc-submit");
  service::AnnotationStore store(f.opts);
  CHECK(error_kind([&] { store.submit(req("nope", "a", "A")); }) == ErrorKind::kNotFound);
  try {
    store.submit(req("syn1", "a", "Q"));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
    CHECK(e.field() == "choice");
  }
  CHECK(store.records().empty());

  const auto first = store.submit(req("syn1", "a", "T", "k1"));
  const auto again = store.submit(req("syn1", "a", "B", "k1"));
  CHECK(again == first);
  CHECK(store.records().size() == 1);
  const auto unsure = store.submit(req("syn2", "a", text::kNotSure));
  CHECK(unsure.record_id == first.record_id + 1);
  CHECK(unsure.timestamp.size() == 24);
  CHECK(unsure.timestamp.back() == 'Z');
}

TEST_CASE("journal replay restores state") {
  Fixture f("svc-journal");
  std::vector<text::AnnotationRecord> before;
  {
    service::AnnotationStore store(f.opts);
    store.submit(req("syn0", "a", "A", "key"));
    store.submit(req("syn0", "b", "B"));
    store.set_labels({"A", "B", "K"});
    store.submit(req("syn1", "a", "K"));
    before = store.records();
  }
  service::AnnotationStore reopened(f.opts);
  CHECK(reopened.records() == before);
  CHECK(reopened.labels() == std::vector<std::string>{"A", "B", "K"});
  CHECK(reopened.submit(req("syn0", "a", "B", "key")) == before[0]);
  CHECK(reopened.submit(req("syn2", "c", "A")).record_id == 4);
  CHECK(error_kind([&] { reopened.submit(req("syn2", "c", "T")); }) == ErrorKind::kInvalidArgument);

  std::ofstream(f.opts.journal, std::ios::app) << "{not json\n";
  CHECK(error_kind([&] { service::AnnotationStore broken(f.opts); }) == ErrorKind::kSchema);
}

TEST_CASE("label administration") {
  Fixture f("svc-labels");
  service::AnnotationStore store(f.opts);
  CHECK(error_kind([&] { store.set_labels({}); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([&] { store.set_labels({"A", "A"}); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([&] { store.set_labels({"A", text::kNotSure}); }) == ErrorKind::kInvalidArgument);
  CHECK(store.labels() == f.opts.labels);
  store.set_labels({"X"});
  CHECK(store.submit(req("syn0", "a", "X")).choice == "X");
}

TEST_CASE("export and import round trip") {
  Fixture f("svc-export", 3);
  service::AnnotationStore store(f.opts);
  store.submit(req("syn0", "a", "A"));
  store.submit(req("syn0", "b", "A"));
  store.submit(req("syn0", "c", "B"));
  store.submit(req("syn1", "a", "T"));
  store.submit(req("syn1", "b", "D"));
  const std::string dump = store.export_jsonl();

  CHECK(store.import_jsonl(dump) == 0);
  CHECK(store.records().size() == 5);

  Fixture g("svc-import", 3);
  service::AnnotationStore other(g.opts);
  CHECK(other.import_jsonl(dump) == 5);
  CHECK(other.import_jsonl(dump) == 0);
  CHECK(other.export_jsonl() == dump);

  const auto summary = store.export_summary();
  const auto agg = text::aggregate_annotations(store.records());
  CHECK(summary.at("labels") == nlohmann::json(agg.labels));
  CHECK(summary.at("labels").at("syn0") == "A");
  CHECK(summary.at("dropped") == nlohmann::json{"syn1"});
  CHECK(summary.at("records") == 5);
  const auto kappas = text::pairwise_kappa(store.records());
  REQUIRE(summary.at("kappa").size() == kappas.size());
  for (std::size_t i = 0; i < kappas.size(); ++i) CHECK(summary.at("kappa")[i].at("kappa") == kappas[i].kappa);

  CHECK(error_kind([&] { other.import_jsonl("{\"bad\": 1}\n"); }) == ErrorKind::kSchema);
  auto unknown = text::to_json(store.records()[0]);
  unknown["instance_id"] = "ghost";
  CHECK(error_kind([&] { other.import_jsonl(unknown.dump()); }) == ErrorKind::kNotFound);
}

TEST_CASE("concurrent submissions are serialized") {
  Fixture f("svc-threads", 8);
  service::AnnotationStore store(f.opts);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (const char* id : {"syn0", "syn1", "syn2", "syn3"}) {
        store.submit(req(id, "ann" + std::to_string(t), "A", "k" + std::to_string(t) + id));
        store.submit(req(id, "ann" + std::to_string(t), "A", "k" + std::to_string(t) + id));
      }
    });
  }
  for (auto& th : pool) th.join();
  const auto recs = store.records();
  CHECK(recs.size() == 16);
  std::set<std::uint64_t> ids;
  for (const auto& r : recs) ids.insert(r.record_id);
  CHECK(ids.size() == 16);
  CHECK(service::AnnotationStore(f.opts).records() == recs);
}

TEST_CASE("heatmap svg") {
  const auto m = ad::Tensor::matrix({{0.25, 0.75}, {1.0, 0.0}});
  const std::string svg = service::render_heatmap_svg(m, {"a", "b"}, {"x", "y"}, "demo");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t titles = 0;
  for (std::size_t at = svg.find("<title>"); at != std::string::npos; at = svg.find("<title>", at + 1)) ++titles;
  CHECK(titles == 4);
  CHECK(svg.find("<title>0.25</title>") != std::string::npos);
  CHECK(svg.find("0.75") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
  CHECK(service::render_heatmap_svg(m, {"<&>", "b"}, {"x", "y"}).find("<&>") == std::string::npos);
  CHECK(error_kind([&] { service::render_heatmap_svg(m, {"a"}, {"x", "y"}); }) == ErrorKind::kDimension);
}
