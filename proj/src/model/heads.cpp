// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "model/heads.hpp"

#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace sacti::model {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

ad::Var pair_scores(ad::Var z_context, ad::Var z_compound, ad::Var u, ad::Var q) {
  const std::size_t n = z_context.shape().at(0);
  const std::size_t d = z_context.shape().at(1);
  if (z_compound.shape() != ad::Shape{1, d} || u.shape() != ad::Shape{d, d} || q.value().size() != d) {
    fail(ErrorKind::kDimension, "pair_scores: inconsistent dimensions " + ad::shape_str(z_context.shape()) + ", " +
                                    ad::shape_str(z_compound.shape()) + ", " + ad::shape_str(u.shape()) + ", " +
                                    ad::shape_str(q.shape()));
  }
  ad::Var bil = ad::reshape(ad::bilinear(z_context, ad::reshape(u, {1, d, d}), z_compound), {n, 1});
  return ad::add(bil, ad::matmul(z_context, ad::reshape(q, {d, 1})));
}

ad::Var pair_score_matrix(ad::Var rows, ad::Var cols, ad::Var u, ad::Var q) {
  const std::size_t a = rows.shape().at(0), b = cols.shape().at(0), d = rows.shape().at(1);
  if (cols.shape().at(1) != d || u.shape() != ad::Shape{d, d} || q.value().size() != d) {
    fail(ErrorKind::kDimension, "pair_score_matrix: inconsistent dimensions");
  }
  ad::Var bil = ad::reshape(ad::bilinear(rows, ad::reshape(u, {1, d, d}), cols), {a, b});
  ad::Var prior = ad::matmul(rows, ad::reshape(q, {d, 1}));
  ad::Var ones = rows.graph().constant(ad::Tensor({1, b}, 1.0));
  return ad::add(bil, ad::matmul(prior, ones));
}

ad::Var label_scores(ad::Var z_context, ad::Var z_compound, ad::Var u, ad::Var q, ad::Var b) {
  const std::size_t n = z_context.shape().at(0), d = z_context.shape().at(1);
  const std::size_t K = u.shape().at(0);
  if (z_compound.shape() != ad::Shape{1, d} || u.shape() != ad::Shape{K, d, d} || q.shape() != ad::Shape{K, 2 * d} ||
      b.value().size() != K) {
    fail(ErrorKind::kDimension, "label_scores: inconsistent dimensions " + ad::shape_str(z_context.shape()) + ", " +
                                    ad::shape_str(u.shape()) + ", " + ad::shape_str(q.shape()) + ", " +
                                    ad::shape_str(b.shape()));
  }
  ad::Var bil = ad::reshape(ad::bilinear(z_context, u, z_compound), {n, K});
  ad::Var ctx = ad::matmul(z_context, ad::transpose(ad::slice_cols(q, 0, d)));
  ad::Var cmp = ad::matmul(z_compound, ad::transpose(ad::slice_cols(q, d, d)));
  return ad::add_row(ad::add(bil, ctx), ad::add(ad::reshape(cmp, {K}), ad::reshape(b, {K})));
}

std::string to_string(AttachmentNorm norm) {
  return norm == AttachmentNorm::kBinaryNull ? "binary" : "full_row";
}

AttachmentNorm parse_attachment_norm(const std::string& name) {
  if (name == "binary") return AttachmentNorm::kBinaryNull;
  if (name == "full_row") return AttachmentNorm::kFullRow;
  fail(ErrorKind::kInvalidArgument, "unknown attachment normalization '" + name + "' (expected binary|full_row)",
       "attachment");
}

ad::Var sacti_loss(ad::Var s, ad::Var r, int gold, AttachmentNorm norm) {
  ad::Graph& g = s.graph();
  if (r.value().rank() != 2) fail(ErrorKind::kDimension, "sacti_loss: label scores must be a matrix");
  const std::size_t n = r.shape()[0], K = r.shape()[1];
  if (gold < 0 || static_cast<std::size_t>(gold) >= K) {
    fail(ErrorKind::kIndex, "sacti_loss: gold label " + std::to_string(gold) + " outside [0," + std::to_string(K) + ")",
         "label");
  }
  ad::Var attach;
  if (norm == AttachmentNorm::kBinaryNull) {
    if (s.shape() != ad::Shape{n, 1}) fail(ErrorKind::kDimension, "sacti_loss: binary mode needs s[n x 1], got " + ad::shape_str(s.shape()));
    ad::Var null_slot = g.constant(ad::Tensor({n, 1}, 0.0));
    const ad::Var parts[] = {s, null_slot};
    attach = ad::sum(ad::pick(ad::log_softmax(ad::concat_cols(parts)), std::vector<int>(n, 0)));
  } else {
    if (s.shape() != ad::Shape{n, n + 1}) fail(ErrorKind::kDimension, "sacti_loss: full-row mode needs s[n x (n+1)], got " + ad::shape_str(s.shape()));
    ad::Tensor mask({n, n + 1}, 0.0);
    for (std::size_t i = 0; i < n; ++i) mask.at(i, i) = kNegInf;
    ad::Var lp = ad::log_softmax(ad::add_constant(s, mask));
    attach = ad::sum(ad::pick(lp, std::vector<int>(n, static_cast<int>(n))));
  }
  ad::Var label = ad::sum(ad::pick(ad::log_softmax(r), std::vector<int>(n, gold)));
  return ad::scale(ad::add(attach, label), -1.0);
}

VoteResult vote_decode(const ad::Tensor& r) {
  if (r.rank() != 2) fail(ErrorKind::kDimension, "vote_decode expects a matrix");
  const std::size_t n = r.dim(0), K = r.dim(1);
  VoteResult out;
  out.confidence.assign(K, 0.0);
  out.log_prob_sums.assign(K, 0.0);
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double mx = r.at(i, 0);
    for (std::size_t k = 1; k < K; ++k) {
      if (r.at(i, k) > mx) {
        mx = r.at(i, k);
        best = k;
      }
    }
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) total += std::exp(r.at(i, k) - mx);
    const double lse = mx + std::log(total);
    for (std::size_t k = 0; k < K; ++k) out.log_prob_sums[k] += r.at(i, k) - lse;
    out.votes.push_back(static_cast<int>(best));
    ++counts[best];
  }
  std::size_t winner = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (counts[k] > counts[winner] ||
        (counts[k] == counts[winner] && out.log_prob_sums[k] > out.log_prob_sums[winner])) {
      winner = k;
    }
  }
  out.label = static_cast<int>(winner);
  for (std::size_t k = 0; k < K; ++k) out.confidence[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
  return out;
}

ad::Var token_classification_loss(ad::Var logits, std::span<const int> targets) {
  if (logits.value().rank() != 2 || logits.shape()[0] != targets.size()) {
    fail(ErrorKind::kDimension, "token_classification_loss: " + std::to_string(targets.size()) +
                                    " targets for logits " + ad::shape_str(logits.shape()));
  }
  std::vector<std::size_t> rows;
  std::vector<int> kept;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= 0) {
      rows.push_back(i);
      kept.push_back(targets[i]);
    }
  }
  if (rows.empty()) return logits.graph().constant(ad::Tensor::scalar(0.0));
  if (rows.size() == targets.size()) return ad::cross_entropy(logits, kept);
  return ad::cross_entropy(ad::gather_rows(logits, rows), kept);
}

ad::Var dep_loss(const DepScores& scores, std::span<const int> heads, std::span<const int> rels) {
  ad::Graph& g = scores.arc.graph();
  if (heads.empty()) return g.constant(ad::Tensor::scalar(0.0));
  const std::size_t n = scores.tokens;
  if (heads.size() != n || rels.size() != n) {
    fail(ErrorKind::kDimension, "dep_loss: " + std::to_string(heads.size()) + " heads / " +
                                    std::to_string(rels.size()) + " relations for " + std::to_string(n) + " tokens");
  }
  std::vector<std::size_t> rel_rows;
  std::vector<int> rel_targets;
  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] < 0 || static_cast<std::size_t>(heads[i]) > n) {
      fail(ErrorKind::kIndex, "dep_loss: head " + std::to_string(heads[i]) + " of token " + std::to_string(i) +
                                  " outside [0," + std::to_string(n) + "]", "dep_heads");
    }
    if (static_cast<std::size_t>(heads[i]) == i + 1) {
      fail(ErrorKind::kIndex, "dep_loss: token " + std::to_string(i) + " is its own head", "dep_heads");
    }
    if (rels[i] >= 0) {
      rel_rows.push_back(i * (n + 1) + static_cast<std::size_t>(heads[i]));
      rel_targets.push_back(rels[i]);
    }
  }
  ad::Var loss = ad::cross_entropy(scores.arc, heads);
  if (!rel_rows.empty()) loss = ad::add(loss, ad::cross_entropy(ad::gather_rows(scores.rel, rel_rows), rel_targets));
  return loss;
}

DepParse greedy_dep_decode(const ad::Tensor& arc, const ad::Tensor& rel) {
  const std::size_t n = arc.dim(0);
  if (arc.dim(1) != n + 1 || rel.dim(0) != n * (n + 1)) {
    fail(ErrorKind::kDimension, "greedy_dep_decode: arc " + ad::shape_str(arc.shape()) + " and rel " +
                                    ad::shape_str(rel.shape()) + " disagree");
  }
  const std::size_t R = rel.dim(1);
  DepParse out;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double mx = kNegInf;
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == i + 1) continue;
      if (arc.at(i, j) > mx) {
        mx = arc.at(i, j);
        best = j;
      }
    }
    out.heads.push_back(static_cast<int>(best));
    const std::size_t row = i * (n + 1) + best;
    std::size_t best_rel = 0;
    for (std::size_t r = 1; r < R; ++r) {
      if (rel.at(row, r) > rel.at(row, best_rel)) best_rel = r;
    }
    out.relations.push_back(static_cast<int>(best_rel));
  }
  return out;
}

namespace {

void softmax_row(const double* in, double* out, std::size_t len) {
  double mx = kNegInf;
  for (std::size_t j = 0; j < len; ++j) mx = std::max(mx, in[j]);
  double total = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    out[j] = std::exp(in[j] - mx);
    total += out[j];
  }
  for (std::size_t j = 0; j < len; ++j) out[j] /= total;
}

}  // namespace

ad::Tensor sacti_pair_heatmap(const ad::Tensor& pair_matrix) {
  if (pair_matrix.rank() != 2 || pair_matrix.dim(0) != pair_matrix.dim(1)) {
    fail(ErrorKind::kDimension, "sacti_pair_heatmap expects a square matrix, got " + ad::shape_str(pair_matrix.shape()));
  }
  const std::size_t m = pair_matrix.dim(0);
  ad::Tensor out({m, m}, 0.0);
  for (std::size_t i = 0; i < m; ++i) softmax_row(pair_matrix.data() + i * m, out.data() + i * m, m);
  return out;
}

ad::Tensor dependency_heatmap(const ad::Tensor& arc) {
  const std::size_t n = arc.dim(0);
  ad::Tensor out({n + 1, n + 1}, 0.0);
  out.at(0, 0) = 1.0;
  for (std::size_t i = 0; i < n; ++i) softmax_row(arc.data() + i * (n + 1), out.data() + (i + 1) * (n + 1), n + 1);
  return out;
}

// ---------------------------------------------------------------------------

PairScorer::PairScorer(std::size_t model_dim, std::size_t dim, double dropout)
    : mlp_("heads.pair.mlp", model_dim, {dim}, dropout), u_("heads.pair.u"), q_("heads.pair.q"), dim_(dim) {}

void PairScorer::init(ad::ParameterStore& store, ad::Rng& rng) const {
  mlp_.init(store, rng);
  store.create(u_, {dim_, dim_}, ad::Init::kXavierUniform, rng);
  store.create(q_, {dim_}, ad::Init::kZeros, rng);
}

ad::Var PairScorer::matrix(ad::Graph& g, ad::Var z) const { return pair_score_matrix(z, z, g.param(u_), g.param(q_)); }

ad::Var PairScorer::attachment(ad::Graph& g, ad::Var z, AttachmentNorm norm) const {
  const std::size_t n = z.shape().at(0) - 1;
  if (norm == AttachmentNorm::kFullRow) return ad::slice_rows(matrix(g, z), 0, n);
  return pair_scores(ad::slice_rows(z, 0, n), ad::slice_rows(z, n, 1), g.param(u_), g.param(q_));
}

LabelScorer::LabelScorer(std::size_t model_dim, std::size_t dim, std::size_t labels, double dropout)
    : mlp_("heads.label.mlp", model_dim, {dim}, dropout),
      u_("heads.label.u"),
      q_("heads.label.q"),
      b_("heads.label.b"),
      dim_(dim),
      labels_(labels) {}

void LabelScorer::init(ad::ParameterStore& store, ad::Rng& rng) const {
  mlp_.init(store, rng);
  store.create(u_, {labels_, dim_, dim_}, ad::Init::kXavierUniform, rng);
  store.create(q_, {labels_, 2 * dim_}, ad::Init::kXavierUniform, rng);
  store.create(b_, {labels_}, ad::Init::kZeros, rng);
}

ad::Var LabelScorer::scores(ad::Graph& g, ad::Var h) const {
  const std::size_t n = h.shape().at(0) - 1;
  if (n == 0) fail(ErrorKind::kDimension, "label scorer needs at least one context token");
  ad::Var z = mlp_(g, h);
  return label_scores(ad::slice_rows(z, 0, n), ad::slice_rows(z, n, 1), g.param(u_), g.param(q_), g.param(b_));
}

TaggingHead::TaggingHead(const std::string& name, std::size_t model_dim, std::size_t classes)
    : proj_("heads." + name + ".proj", model_dim, classes) {}

DependencyHead::DependencyHead(std::size_t model_dim, std::size_t arc_dim, std::size_t rel_dim, std::size_t relations,
                               double dropout)
    : root_("heads.dep.root"),
      arc_dep_("heads.dep.arc_dep", model_dim, {arc_dim}, dropout),
      arc_head_("heads.dep.arc_head", model_dim, {arc_dim}, dropout),
      rel_dep_("heads.dep.rel_dep", model_dim, {rel_dim}, dropout),
      rel_head_("heads.dep.rel_head", model_dim, {rel_dim}, dropout),
      arc_u_("heads.dep.arc_u"),
      arc_bias_("heads.dep.arc_bias"),
      rel_u_("heads.dep.rel_u"),
      rel_w_dep_("heads.dep.rel_w_dep"),
      rel_w_head_("heads.dep.rel_w_head"),
      rel_b_("heads.dep.rel_b"),
      model_dim_(model_dim),
      arc_dim_(arc_dim),
      rel_dim_(rel_dim),
      relations_(relations) {}

void DependencyHead::init(ad::ParameterStore& store, ad::Rng& rng) const {
  store.create(root_, {1, model_dim_}, ad::Init::kEmbedding, rng);
  arc_dep_.init(store, rng);
  arc_head_.init(store, rng);
  rel_dep_.init(store, rng);
  rel_head_.init(store, rng);
  store.create(arc_u_, {1, arc_dim_, arc_dim_}, ad::Init::kXavierUniform, rng);
  store.create(arc_bias_, {arc_dim_}, ad::Init::kZeros, rng);
  store.create(rel_u_, {relations_, rel_dim_, rel_dim_}, ad::Init::kXavierUniform, rng);
  store.create(rel_w_dep_, {rel_dim_, relations_}, ad::Init::kXavierUniform, rng);
  store.create(rel_w_head_, {rel_dim_, relations_}, ad::Init::kXavierUniform, rng);
  store.create(rel_b_, {relations_}, ad::Init::kZeros, rng);
}

DepScores DependencyHead::scores(ad::Graph& g, ad::Var h_context) const {
  const std::size_t n = h_context.shape().at(0);
  const ad::Var parts[] = {g.param(root_), h_context};
  ad::Var candidates = ad::concat_rows(parts);

  ad::Var arc_dep = arc_dep_(g, h_context);
  ad::Var arc_head = arc_head_(g, candidates);
  ad::Var arc = ad::reshape(ad::bilinear(arc_dep, g.param(arc_u_), arc_head), {n, n + 1});
  ad::Var head_prior = ad::matmul(arc_head, ad::reshape(g.param(arc_bias_), {arc_dim_, 1}));
  arc = ad::add_row(arc, ad::reshape(head_prior, {n + 1}));
  ad::Tensor mask({n, n + 1}, 0.0);
  for (std::size_t i = 0; i < n; ++i) mask.at(i, i + 1) = kNegInf;
  arc = ad::add_constant(arc, mask);

  ad::Var rel_dep = rel_dep_(g, h_context);
  ad::Var rel_head = rel_head_(g, candidates);
  ad::Var rel = ad::reshape(ad::bilinear(rel_dep, g.param(rel_u_), rel_head), {n * (n + 1), relations_});
  std::vector<std::size_t> dep_index, head_index;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      dep_index.push_back(i);
      head_index.push_back(j);
    }
  }
  ad::Var dep_term = ad::gather_rows(ad::matmul(rel_dep, g.param(rel_w_dep_)), dep_index);
  ad::Var head_term = ad::gather_rows(ad::matmul(rel_head, g.param(rel_w_head_)), head_index);
  rel = ad::add_row(ad::add(ad::add(rel, dep_term), head_term), g.param(rel_b_));
  return DepScores{arc, rel, n, relations_};
}

CompoundClassifier::CompoundClassifier(std::size_t model_dim, std::size_t dim, std::size_t labels, double dropout)
    : mlp_("heads.compound.mlp", model_dim, {dim}, dropout), out_("heads.compound.out", dim, labels) {}

void CompoundClassifier::init(ad::ParameterStore& store, ad::Rng& rng) const {
  mlp_.init(store, rng);
  out_.init(store, rng);
}

ad::Var CompoundClassifier::logits(ad::Graph& g, ad::Var h) const {
  const std::size_t n = h.shape().at(0) - 1;
  return out_(g, mlp_(g, ad::slice_rows(h, n, 1)));
}

}  // namespace sacti::model
