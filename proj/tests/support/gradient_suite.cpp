// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "model/encoder.hpp"
#include "model/heads.hpp"
#include "model/sacti_model.hpp"
#include "oracles.hpp"

namespace sacti::testing {

namespace {

using ad::Graph;
using ad::Rng;
using ad::Shape;
using ad::Tensor;
using ad::Var;
using Vars = std::vector<Var>;

constexpr std::size_t kShapes = 10;

std::size_t dim(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

void merge(GradCheck& into, const GradCheck& c) {
  into.entries += c.entries;
  into.kinks += c.kinks;
  if (c.max_rel_error >= into.max_rel_error) {
    into.max_rel_error = c.max_rel_error;
    into.worst = c.worst;
  }
}

// Spans partitioning `pieces` into `tokens` non-empty runs.
std::vector<ad::PieceSpan> random_spans(Rng& rng, std::size_t tokens, std::size_t pieces) {
  std::vector<std::size_t> len(tokens, 1);
  for (std::size_t extra = pieces - tokens; extra > 0; --extra) ++len[rng.below(tokens)];
  std::vector<ad::PieceSpan> spans;
  std::size_t at = 0;
  for (std::size_t l : len) {
    spans.push_back({at, l});
    at += l;
  }
  return spans;
}

std::vector<int> random_ids(Rng& rng, std::size_t count, std::size_t classes) {
  std::vector<int> ids(count);
  for (int& v : ids) v = static_cast<int>(rng.below(classes));
  return ids;
}

class Suite {
 public:
  explicit Suite(std::uint64_t seed) : rng_(seed) {}

  template <class Case>
  void add(const std::string& name, Case&& one) {
    SuiteEntry e;
    e.name = name;
    for (std::size_t s = 0; s < kShapes; ++s) {
      merge(e.worst, one(rng_, s));
      ++e.cases;
    }
    entries_.push_back(std::move(e));
  }

  std::vector<SuiteEntry> take() { return std::move(entries_); }

 private:
  Rng rng_;
  std::vector<SuiteEntry> entries_;
};

void op_cases(Suite& suite) {
  suite.add("matmul", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4), k = dim(r, 1, 4), n = dim(r, 1, 4);
    return check_input_gradients([](Graph&, const Vars& v) { return ad::matmul(v[0], v[1]); },
                                 {random_tensor({m, k}, r), random_tensor({k, n}, r)});
  });
  suite.add("add", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::add(v[0], v[1]); },
                                 {random_tensor(s, r), random_tensor(s, r)});
  });
  suite.add("sub", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::sub(v[0], v[1]); },
                                 {random_tensor(s, r), random_tensor(s, r)});
  });
  suite.add("mul", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::mul(v[0], v[1]); },
                                 {random_tensor(s, r), random_tensor(s, r)});
  });
  suite.add("scale", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    const double f = r.uniform(-2.0, 2.0);
    return check_input_gradients([f](Graph&, const Vars& v) { return ad::scale(v[0], f); }, {random_tensor(s, r)});
  });
  suite.add("add_row", [](Rng& r, std::size_t i) {
    const std::size_t m = dim(r, 1, 4), n = dim(r, 1, 4);
    const Shape bias = i % 2 ? Shape{n} : Shape{1, n};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::add_row(v[0], v[1]); },
                                 {random_tensor({m, n}, r), random_tensor(bias, r)});
  });
  suite.add("add_constant", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    Tensor c = random_tensor(s, r);
    return check_input_gradients([c](Graph&, const Vars& v) { return ad::add_constant(v[0], c); },
                                 {random_tensor(s, r)});
  });
  suite.add("tanh", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::tanh(v[0]); }, {random_tensor(s, r, -2, 2)});
  });
  suite.add("relu", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    Tensor x = random_tensor(s, r, -2, 2);
    // Keep clear of the kink.
    for (double& v : x.values()) v = v < 0 ? std::min(v, -0.05) : std::max(v, 0.05);
    return check_input_gradients([](Graph&, const Vars& v) { return ad::relu(v[0]); }, {x});
  });
  suite.add("softmax", [](Rng& r, std::size_t i) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    const std::size_t axis = i % 2;
    return check_input_gradients([axis](Graph&, const Vars& v) { return ad::softmax(v[0], axis); },
                                 {random_tensor(s, r, -3, 3)});
  });
  suite.add("log_softmax", [](Rng& r, std::size_t i) {
    const Shape s = i % 3 == 0 ? Shape{dim(r, 1, 5)} : Shape{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::log_softmax(v[0]); },
                                 {random_tensor(s, r, -3, 3)});
  });
  suite.add("cross_entropy", [](Rng& r, std::size_t) {
    const std::size_t b = dim(r, 1, 4), n = dim(r, 2, 5);
    const std::vector<int> t = random_ids(r, b, n);
    return check_input_gradients([t](Graph&, const Vars& v) { return ad::cross_entropy(v[0], t); },
                                 {random_tensor({b, n}, r, -3, 3)});
  });
  suite.add("layer_norm", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4), n = dim(r, 2, 6);
    return check_input_gradients([](Graph&, const Vars& v) { return ad::layer_norm(v[0], v[1], v[2]); },
                                 {random_tensor({m, n}, r, -2, 2), random_tensor({n}, r, 0.5, 1.5),
                                  random_tensor({n}, r)});
  });
  suite.add("dropout", [](Rng& r, std::size_t i) {
    const Shape s{dim(r, 1, 5), dim(r, 1, 5)};
    const double rate = 0.1 + 0.05 * static_cast<double>(i);
    return check_input_gradients([rate](Graph&, const Vars& v) { return ad::dropout(v[0], rate); },
                                 {random_tensor(s, r)}, true, 1000 + i);
  });
  suite.add("embedding", [](Rng& r, std::size_t) {
    const std::size_t vocab = dim(r, 2, 5), d = dim(r, 1, 4), len = dim(r, 2, 6);
    // Repeated ids on purpose: gradients must accumulate.
    std::vector<int> ids = random_ids(r, len, vocab);
    ids.push_back(ids.front());
    return check_input_gradients([ids](Graph&, const Vars& v) { return ad::embedding(v[0], ids); },
                                 {random_tensor({vocab, d}, r)});
  });
  suite.add("transpose", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::transpose(v[0]); }, {random_tensor(s, r)});
  });
  suite.add("reshape", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4), n = dim(r, 1, 4);
    return check_input_gradients([m, n](Graph&, const Vars& v) { return ad::reshape(v[0], {n, m}); },
                                 {random_tensor({m, n}, r)});
  });
  suite.add("slice_rows", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 2, 5), n = dim(r, 1, 4);
    const std::size_t begin = r.below(m), count = 1 + r.below(m - begin);
    return check_input_gradients([=](Graph&, const Vars& v) { return ad::slice_rows(v[0], begin, count); },
                                 {random_tensor({m, n}, r)});
  });
  suite.add("slice_cols", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4), n = dim(r, 2, 5);
    const std::size_t begin = r.below(n), count = 1 + r.below(n - begin);
    return check_input_gradients([=](Graph&, const Vars& v) { return ad::slice_cols(v[0], begin, count); },
                                 {random_tensor({m, n}, r)});
  });
  suite.add("concat_rows", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 4);
    return check_input_gradients(
        [](Graph&, const Vars& v) { return ad::concat_rows(v); },
        {random_tensor({dim(r, 1, 3), n}, r), random_tensor({dim(r, 1, 3), n}, r), random_tensor({1, n}, r)});
  });
  suite.add("concat_cols", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4);
    return check_input_gradients([](Graph&, const Vars& v) { return ad::concat_cols(v); },
                                 {random_tensor({m, dim(r, 1, 3)}, r), random_tensor({m, dim(r, 1, 3)}, r)});
  });
  suite.add("gather_rows", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4), n = dim(r, 1, 4);
    std::vector<std::size_t> rows;
    for (std::size_t k = 0, c = dim(r, 1, 6); k < c; ++k) rows.push_back(r.below(m));
    return check_input_gradients([rows](Graph&, const Vars& v) { return ad::gather_rows(v[0], rows); },
                                 {random_tensor({m, n}, r)});
  });
  suite.add("span_mean", [](Rng& r, std::size_t) {
    const std::size_t tokens = dim(r, 1, 4), pieces = tokens + r.below(5), d = dim(r, 1, 4);
    const auto spans = random_spans(r, tokens, pieces);
    return check_input_gradients([spans](Graph&, const Vars& v) { return ad::span_mean(v[0], spans); },
                                 {random_tensor({pieces, d}, r)});
  });
  suite.add("sum", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::sum(ad::mul(v[0], v[0])); },
                                 {random_tensor(s, r)});
  });
  suite.add("mean", [](Rng& r, std::size_t) {
    const Shape s{dim(r, 1, 4), dim(r, 1, 4)};
    return check_input_gradients([](Graph&, const Vars& v) { return ad::mean(ad::mul(v[0], v[0])); },
                                 {random_tensor(s, r)});
  });
  suite.add("pick", [](Rng& r, std::size_t) {
    const std::size_t m = dim(r, 1, 4), n = dim(r, 1, 4);
    const std::vector<int> cols = random_ids(r, m, n);
    return check_input_gradients([cols](Graph&, const Vars& v) { return ad::pick(v[0], cols); },
                                 {random_tensor({m, n}, r)});
  });
  suite.add("bilinear", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 3), m = dim(r, 1, 3), A = dim(r, 1, 3), B = dim(r, 1, 3), R = dim(r, 1, 3);
    return check_input_gradients([](Graph&, const Vars& v) { return ad::bilinear(v[0], v[1], v[2]); },
                                 {random_tensor({n, A}, r), random_tensor({R, A, B}, r), random_tensor({m, B}, r)});
  });
  suite.add("chain", [](Rng& r, std::size_t) {
    // A five-op chain ending in a scalar.
    const std::size_t m = dim(r, 1, 4), k = dim(r, 1, 4);
    return check_input_gradients(
        [](Graph&, const Vars& v) {
          return ad::mean(ad::tanh(ad::add(ad::matmul(v[0], ad::transpose(v[1])), ad::scale(v[2], 0.5))));
        },
        {random_tensor({m, k}, r), random_tensor({m, k}, r), random_tensor({m, m}, r)});
  });
}

void head_math_cases(Suite& suite) {
  suite.add("pair_scores", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 4), d = dim(r, 1, 4);
    return check_input_gradients(
        [](Graph&, const Vars& v) { return model::pair_scores(v[0], v[1], v[2], v[3]); },
        {random_tensor({n, d}, r), random_tensor({1, d}, r), random_tensor({d, d}, r), random_tensor({d}, r)});
  });
  suite.add("pair_score_matrix", [](Rng& r, std::size_t) {
    const std::size_t a = dim(r, 1, 4), b = dim(r, 1, 4), d = dim(r, 1, 4);
    return check_input_gradients(
        [](Graph&, const Vars& v) { return model::pair_score_matrix(v[0], v[1], v[2], v[3]); },
        {random_tensor({a, d}, r), random_tensor({b, d}, r), random_tensor({d, d}, r), random_tensor({d}, r)});
  });
  suite.add("label_scores", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 4), d = dim(r, 1, 3), K = dim(r, 1, 4);
    return check_input_gradients(
        [](Graph&, const Vars& v) { return model::label_scores(v[0], v[1], v[2], v[3], v[4]); },
        {random_tensor({n, d}, r), random_tensor({1, d}, r), random_tensor({K, d, d}, r), random_tensor({K, 2 * d}, r),
         random_tensor({K}, r)});
  });
  suite.add("sacti_loss/binary", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 5), K = dim(r, 1, 4);
    const int gold = static_cast<int>(r.below(K));
    return check_input_gradients(
        [gold](Graph&, const Vars& v) { return model::sacti_loss(v[0], v[1], gold, model::AttachmentNorm::kBinaryNull); },
        {random_tensor({n, 1}, r, -2, 2), random_tensor({n, K}, r, -2, 2)});
  });
  suite.add("sacti_loss/full_row", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 5), K = dim(r, 1, 4);
    const int gold = static_cast<int>(r.below(K));
    return check_input_gradients(
        [gold](Graph&, const Vars& v) { return model::sacti_loss(v[0], v[1], gold, model::AttachmentNorm::kFullRow); },
        {random_tensor({n, n + 1}, r, -2, 2), random_tensor({n, K}, r, -2, 2)});
  });
  suite.add("token_classification_loss", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 5), C = dim(r, 2, 6);
    std::vector<int> t = random_ids(r, n, C);
    if (n > 1) t[r.below(n)] = -1;
    return check_input_gradients([t](Graph&, const Vars& v) { return model::token_classification_loss(v[0], t); },
                                 {random_tensor({n, C}, r, -2, 2)});
  });
  suite.add("dep_loss", [](Rng& r, std::size_t) {
    const std::size_t n = dim(r, 1, 4), R = dim(r, 1, 4);
    std::vector<int> heads(n), rels = random_ids(r, n, R);
    for (std::size_t i = 0; i < n; ++i) {
      int h = static_cast<int>(r.below(n + 1));
      if (static_cast<std::size_t>(h) == i + 1) h = 0;
      heads[i] = h;
    }
    if (n > 1) rels[0] = -1;
    Tensor mask({n, n + 1}, 0.0);
    for (std::size_t i = 0; i < n; ++i) mask.at(i, i + 1) = -std::numeric_limits<double>::infinity();
    return check_input_gradients(
        [=](Graph&, const Vars& v) {
          model::DepScores s{ad::add_constant(v[0], mask), v[1], n, R};
          return model::dep_loss(s, heads, rels);
        },
        {random_tensor({n, n + 1}, r, -2, 2), random_tensor({n * (n + 1), R}, r, -2, 2)});
  });
}

// Pooled states after a random projection, for heads that take h[(n+1) x D].
Tensor states(Rng& r, std::size_t rows, std::size_t D) { return random_tensor({rows, D}, r); }

void head_param_cases(Suite& suite) {
  constexpr std::size_t kSamples = 6;
  suite.add("PairScorer", [](Rng& r, std::size_t i) {
    const std::size_t n = dim(r, 1, 4), D = dim(r, 2, 5), d = dim(r, 2, 4);
    const auto norm = i % 2 ? model::AttachmentNorm::kFullRow : model::AttachmentNorm::kBinaryNull;
    ad::ParameterStore store;
    model::PairScorer head(D, d, 0.2);
    head.init(store, r);
    const Tensor h = states(r, n + 1, D);
    return check_param_gradients(
        store,
        [&](Graph& g) {
          Var z = head.project(g, g.constant(h));
          return ad::add(ad::sum(head.attachment(g, z, norm)), ad::mean(head.matrix(g, z)));
        },
        kSamples, 5 + i, true, 77 + i);
  });
  suite.add("LabelScorer", [](Rng& r, std::size_t i) {
    const std::size_t n = dim(r, 1, 4), D = dim(r, 2, 5), d = dim(r, 2, 4), K = dim(r, 2, 4);
    ad::ParameterStore store;
    model::LabelScorer head(D, d, K, 0.2);
    head.init(store, r);
    const Tensor h = states(r, n + 1, D);
    return check_param_gradients(
        store, [&](Graph& g) { return head.scores(g, g.constant(h)); }, kSamples, 15 + i, true, 87 + i);
  });
  suite.add("TaggingHead", [](Rng& r, std::size_t i) {
    const std::size_t n = dim(r, 1, 5), D = dim(r, 2, 5), C = dim(r, 2, 6);
    ad::ParameterStore store;
    model::TaggingHead head("t", D, C);
    head.init(store, r);
    const Tensor h = states(r, n, D);
    const std::vector<int> t = random_ids(r, n, C);
    return check_param_gradients(
        store, [&](Graph& g) { return model::token_classification_loss(head.logits(g, g.constant(h)), t); }, kSamples,
        25 + i);
  });
  suite.add("DependencyHead", [](Rng& r, std::size_t i) {
    const std::size_t n = dim(r, 1, 4), D = dim(r, 2, 5), R = dim(r, 1, 3);
    ad::ParameterStore store;
    model::DependencyHead head(D, 3, 2, R, 0.2);
    head.init(store, r);
    const Tensor h = states(r, n, D);
    std::vector<int> heads(n), rels = random_ids(r, n, R);
    for (std::size_t k = 0; k < n; ++k) heads[k] = k == 0 ? 0 : static_cast<int>(r.below(k + 1));
    return check_param_gradients(
        store, [&](Graph& g) { return model::dep_loss(head.scores(g, g.constant(h)), heads, rels); }, kSamples, 35 + i,
        true, 97 + i);
  });
  suite.add("CompoundClassifier", [](Rng& r, std::size_t i) {
    const std::size_t n = dim(r, 1, 4), D = dim(r, 2, 5), K = dim(r, 2, 4);
    ad::ParameterStore store;
    model::CompoundClassifier head(D, 3, K, 0.2);
    head.init(store, r);
    const Tensor h = states(r, n + 1, D);
    return check_param_gradients(
        store, [&](Graph& g) { return head.logits(g, g.constant(h)); }, kSamples, 45 + i, true, 107 + i);
  });
  suite.add("Encoder", [](Rng& r, std::size_t i) {
    model::EncoderConfig cfg;
    cfg.layers = 1 + i % 2;
    cfg.model_dim = 8;
    cfg.heads = 2;
    cfg.ff_dim = 12;
    cfg.max_pieces = 16;
    cfg.dropout = 0.1;
    const std::size_t vocab = 9, tokens = dim(r, 1, 4), pieces = tokens + r.below(3);
    ad::ParameterStore store;
    model::Encoder enc(cfg, vocab);
    enc.init(store, r);
    const std::vector<int> ids = random_ids(r, pieces, vocab);
    const auto spans = random_spans(r, tokens, pieces);
    return check_param_gradients(
        store, [&](Graph& g) { return enc.encode(g, ids, spans).token_states; }, kSamples, 55 + i, true, 117 + i);
  });
}

void model_cases(Suite& suite) {
  // Whole multi-task objective, every head on, dropout active.
  suite.add("SactiModel total loss", [](Rng& r, std::size_t i) {
    text::Dataset data = separable_dataset(8);
    for (std::size_t k = 0; k < data.size(); ++k) {
      data[k].case_tags = std::vector<std::string>(data[k].tokens.size(), k % 2 ? "Nom" : "Acc");
      data[k].lemmas = data[k].tokens;
    }
    model::ModelConfig cfg;
    cfg.encoder.layers = 1;
    cfg.encoder.model_dim = 8;
    cfg.encoder.heads = 2;
    cfg.encoder.ff_dim = 12;
    cfg.head_dims = {4, 4, 3, 2};
    cfg.attachment = i % 2 ? model::AttachmentNorm::kFullRow : model::AttachmentNorm::kBinaryNull;
    cfg.heads = {true, true, true, true, true};
    model::SactiModel m = model::SactiModel::create(cfg, model::build_vocabularies(data, 20, {}), 300 + i);
    const model::Example ex = m.make_example(data[r.below(data.size())]);
    const model::LossWeights w{1.0, 0.01, 1.0};
    return check_param_gradients(
        m.store(), [&](Graph& g) { return model::total_loss(m.losses(m.forward(g, ex), ex), w); }, 3, 65 + i, true,
        127 + i);
  });
}

}  // namespace

std::vector<SuiteEntry> run_gradient_suite(std::uint64_t seed) {
  Suite suite(seed);
  op_cases(suite);
  head_math_cases(suite);
  head_param_cases(suite);
  model_cases(suite);
  return suite.take();
}

}  // namespace sacti::testing
