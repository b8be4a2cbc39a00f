// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autodiff/graph.hpp"
#include "model/layers.hpp"

namespace sacti::model {

// ---------------------------------------------------------------------------
// Biaffine scoring math. Inputs are already-projected representations; the
// parameter-owning head classes below feed these.

// s[i] = z_i^T U z_c + q^T z_i for every context row i.
// z_context[n x d], z_compound[1 x d], u[d x d], q[d] -> [n x 1]
ad::Var pair_scores(ad::Var z_context, ad::Var z_compound, ad::Var u, ad::Var q);

// s[i, j] = z_i^T U z_j + q^T z_i. rows[a x d], cols[b x d] -> [a x b]
ad::Var pair_score_matrix(ad::Var rows, ad::Var cols, ad::Var u, ad::Var q);

// r[i, k] = z_i^T U_k z_c + q_k^T [z_i ; z_c] + b_k.
// z_context[n x d], z_compound[1 x d], u[K x d x d], q[K x 2d], b[K] -> [n x K]
ad::Var label_scores(ad::Var z_context, ad::Var z_compound, ad::Var u, ad::Var q, ad::Var b);

// How p(compound | context word i) is normalized.
enum class AttachmentNorm {
  // Candidates are the compound and a null slot of score 0: a per-pair
  // binary term log sigmoid(s_i). Takes s[n x 1].
  kBinaryNull,
  // Softmax over every other position of the extended context, compound in
  // the last column, self-attachment excluded. Takes s[n x (n+1)].
  kFullRow,
};

std::string to_string(AttachmentNorm norm);
AttachmentNorm parse_attachment_norm(const std::string& name);

// -sum_i [ log p(compound | c_i) + log p(gold | c_i, compound) ]
ad::Var sacti_loss(ad::Var s, ad::Var r, int gold, AttachmentNorm norm);

struct VoteResult {
  int label = 0;
  std::vector<double> confidence;     // vote share per label
  std::vector<int> votes;             // argmax label of each pair
  std::vector<double> log_prob_sums;  // per label, summed log-softmax over pairs
};

// Each pair votes for its argmax label (lowest id on ties). Plurality wins;
// ties go to the higher summed log-probability, then the lower label id.
VoteResult vote_decode(const ad::Tensor& r);

// Mean cross-entropy over rows whose target is >= 0; a constant 0 when every
// row is masked (so no gradient flows).
ad::Var token_classification_loss(ad::Var logits, std::span<const int> targets);

struct DepScores {
  ad::Var arc;  // [n x (n+1)], column 0 is the root, self-attachment is -inf
  ad::Var rel;  // [n*(n+1) x R], row i*(n+1)+j scores relations for head j of token i
  std::size_t tokens = 0;
  std::size_t relations = 0;
};

// Arc cross-entropy over the n+1 candidates plus relation cross-entropy at
// the gold head. heads: 0 = root, j = token j-1; rels -1 masks one token's
// relation term. Constant 0 when `heads` is empty.
ad::Var dep_loss(const DepScores& scores, std::span<const int> heads, std::span<const int> rels);

struct DepParse {
  std::vector<int> heads;
  std::vector<int> relations;
};

// Per-token argmax head (self excluded) and argmax relation at that head.
// The result need not be a tree.
DepParse greedy_dep_decode(const ad::Tensor& arc, const ad::Tensor& rel);

// Row softmax of the extended pair-score matrix [(n+1) x (n+1)].
ad::Tensor sacti_pair_heatmap(const ad::Tensor& pair_matrix);

// Arc softmax as an (n+1) x (n+1) grid over [ROOT, c_1..c_n]; the ROOT row
// is one-hot on itself.
ad::Tensor dependency_heatmap(const ad::Tensor& arc);

// ---------------------------------------------------------------------------
// Parameter-owning heads.

struct HeadDims {
  std::size_t pair = 32;
  std::size_t label = 32;
  std::size_t arc = 32;
  std::size_t rel = 16;

  friend bool operator==(const HeadDims&, const HeadDims&) = default;
};

class PairScorer {
 public:
  PairScorer() = default;
  PairScorer(std::size_t model_dim, std::size_t dim, double dropout);
  void init(ad::ParameterStore& store, ad::Rng& rng) const;

  ad::Var project(ad::Graph& g, ad::Var h) const { return mlp_(g, h); }
  // Extended matrix over all n+1 positions from projected states z.
  ad::Var matrix(ad::Graph& g, ad::Var z) const;
  // Attachment scores in the layout sacti_loss expects for `norm`.
  ad::Var attachment(ad::Graph& g, ad::Var z, AttachmentNorm norm) const;

 private:
  Mlp mlp_;
  std::string u_, q_;
  std::size_t dim_ = 0;
};

class LabelScorer {
 public:
  LabelScorer() = default;
  LabelScorer(std::size_t model_dim, std::size_t dim, std::size_t labels, double dropout);
  void init(ad::ParameterStore& store, ad::Rng& rng) const;

  // h[(n+1) x D] -> r[n x K]
  ad::Var scores(ad::Graph& g, ad::Var h) const;

 private:
  Mlp mlp_;
  std::string u_, q_, b_;
  std::size_t dim_ = 0, labels_ = 0;
};

// Fully connected layer + softmax per token (morphology and the extra
// sequence-labeling tasks).
class TaggingHead {
 public:
  TaggingHead() = default;
  TaggingHead(const std::string& name, std::size_t model_dim, std::size_t classes);
  void init(ad::ParameterStore& store, ad::Rng& rng) const { proj_.init(store, rng); }
  ad::Var logits(ad::Graph& g, ad::Var h_context) const { return proj_(g, h_context); }
  std::size_t classes() const { return proj_.out; }

 private:
  Linear proj_;
};

class DependencyHead {
 public:
  DependencyHead() = default;
  DependencyHead(std::size_t model_dim, std::size_t arc_dim, std::size_t rel_dim, std::size_t relations,
                 double dropout);
  void init(ad::ParameterStore& store, ad::Rng& rng) const;

  // h_context[n x D]
  DepScores scores(ad::Graph& g, ad::Var h_context) const;

 private:
  std::string root_;
  Mlp arc_dep_, arc_head_, rel_dep_, rel_head_;
  std::string arc_u_, arc_bias_, rel_u_, rel_w_dep_, rel_w_head_, rel_b_;
  std::size_t model_dim_ = 0, arc_dim_ = 0, rel_dim_ = 0, relations_ = 0;
};

// Classifier over the appended compound's pooled state alone; replaces the
// pairwise head in the -BiAFF ablation.
class CompoundClassifier {
 public:
  CompoundClassifier() = default;
  CompoundClassifier(std::size_t model_dim, std::size_t dim, std::size_t labels, double dropout);
  void init(ad::ParameterStore& store, ad::Rng& rng) const;
  // h[(n+1) x D] -> [1 x K]
  ad::Var logits(ad::Graph& g, ad::Var h) const;

 private:
  Mlp mlp_;
  Linear out_;
};

}  // namespace sacti::model
