// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace sacti::testing {

ad::Tensor random_tensor(const ad::Shape& shape, ad::Rng& rng, double lo, double hi) {
  ad::Tensor t(shape);
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kFdFloor});
  return std::abs(analytic - numeric) / denom;
}

ad::Var probe(ad::Var out) {
  if (out.value().size() == 1) return out;
  ad::Rng rng(0x9a0b + out.value().size());
  ad::Tensor w = random_tensor(out.shape(), rng, 0.5, 1.5);
  return ad::sum(ad::mul(out, out.graph().constant(std::move(w))));
}

namespace {

void note(GradCheck& c, double analytic, double numeric, const std::string& where) {
  const double e = rel_error(analytic, numeric);
  ++c.entries;
  if (e > c.max_rel_error || !std::isfinite(e)) {
    c.max_rel_error = std::isfinite(e) ? e : 1e300;
    std::ostringstream os;
    os << where << " analytic=" << analytic << " numeric=" << numeric;
    c.worst = os.str();
  }
}

// Central difference of f around the current value of x; x is restored.
// On a mismatch, tells a kink apart from a wrong gradient.
template <class Eval>
void check_entry(GradCheck& c, double& x, double analytic, const Eval& f, const std::string& where) {
  const double keep = x;
  auto at = [&](double v) {
    x = v;
    const double y = f();
    x = keep;
    return y;
  };
  const double up = at(keep + kFdStep), down = at(keep - kFdStep);
  const double numeric = (up - down) / (2.0 * kFdStep);
  if (rel_error(analytic, numeric) >= kFdTolerance) {
    const double mid = at(keep);
    const double fwd = (up - mid) / kFdStep, bwd = (mid - down) / kFdStep;
    const double fine_step = kFdStep / 100.0;
    const double fine = (at(keep + fine_step) - at(keep - fine_step)) / (2.0 * fine_step);
    if (rel_error(fwd, bwd) >= kFdTolerance && rel_error(analytic, fine) < kFdTolerance) {
      ++c.kinks;
      return;
    }
  }
  note(c, analytic, numeric, where);
}

}  // namespace

GradCheck check_input_gradients(const InputBuilder& f, const std::vector<ad::Tensor>& inputs, bool training,
                                std::uint64_t dropout_seed) {
  ad::ParameterStore empty;
  auto evaluate = [&](const std::vector<ad::Tensor>& xs) {
    ad::Graph g(empty, training, dropout_seed);
    std::vector<ad::Var> vars;
    for (const auto& x : xs) vars.push_back(g.constant(x));
    return probe(f(g, vars)).value().item();
  };

  ad::Graph g(empty, training, dropout_seed);
  std::vector<ad::Var> vars;
  for (const auto& x : inputs) vars.push_back(g.variable(x));
  ad::Var loss = probe(f(g, vars));
  g.backward(loss);

  GradCheck check;
  std::vector<ad::Tensor> xs = inputs;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    const ad::Tensor& grad = vars[a].grad();
    for (std::size_t k = 0; k < xs[a].size(); ++k) {
      check_entry(check, xs[a][k], grad.empty() ? 0.0 : grad[k], [&] { return evaluate(xs); },
                  "input " + std::to_string(a) + "[" + std::to_string(k) + "]");
    }
  }
  return check;
}

GradCheck check_param_gradients(ad::ParameterStore& store, const StoreBuilder& f, std::size_t samples,
                                std::uint64_t sample_seed, bool training, std::uint64_t dropout_seed) {
  store.zero_grad();
  {
    ad::Graph g(store, training, dropout_seed);
    g.backward(probe(f(g)));
  }
  auto evaluate = [&] {
    ad::Graph g(store, training, dropout_seed);
    return probe(f(g)).value().item();
  };

  GradCheck check;
  ad::Rng pick(sample_seed);
  for (auto& [name, p] : store) {
    std::vector<std::size_t> idx(p.value.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    if (idx.size() > samples) {
      pick.shuffle(idx);
      idx.resize(samples);
    }
    for (std::size_t k : idx) {
      check_entry(check, p.value[k], p.grad[k], evaluate, name + "[" + std::to_string(k) + "]");
    }
  }
  store.zero_grad();
  return check;
}

namespace {

struct Lexicon {
  std::vector<std::string> labels{"A", "B", "D", "T"};
  // Two compounds and one context cue per label.
  std::vector<std::vector<std::string>> compounds{
      {"upa-kumbha", "yatha-sakti"}, {"pita-ambara", "maha-bahu"}, {"rama-laksmana", "deva-asura"},
      {"raja-putra", "grama-gata"}};
  std::vector<std::string> cues{"eva", "yasya", "ca", "asya"};
  std::vector<std::string> subjects{"aham", "sah", "tvam", "vayam"};
  std::vector<std::string> verbs{"namami", "gacchati", "pasyati", "vadati"};
};

}  // namespace

text::Dataset separable_dataset(std::size_t count) {
  const Lexicon d;
  text::Dataset out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = i % 4;
    text::ContextInstance inst;
    inst.id = "syn" + std::to_string(i);
    const std::string& compound = d.compounds[k][(i / 4) % 2];
    const std::string& subject = d.subjects[(i / 8) % 4];
    const std::string& verb = d.verbs[(i / 2) % 4];
    if (i % 3 == 0) {
      inst.tokens = {compound, d.cues[k], subject, verb};
      inst.compound_index = 0;
      inst.morph_tags = std::vector<std::string>{"NOUN", "PART", "PRON", "VERB"};
      inst.dep_heads = std::vector<int>{4, 1, 4, 0};
      inst.dep_rels = std::vector<std::string>{"obj", "dep", "nsubj", "root"};
    } else {
      inst.tokens = {subject, compound, d.cues[k], verb};
      inst.compound_index = 1;
      inst.morph_tags = std::vector<std::string>{"PRON", "NOUN", "PART", "VERB"};
      inst.dep_heads = std::vector<int>{4, 4, 2, 0};
      inst.dep_rels = std::vector<std::string>{"nsubj", "obj", "dep", "root"};
    }
    inst.label = d.labels[k];
    out.push_back(std::move(inst));
  }
  return out;
}

text::Dataset context_pair() {
  text::ContextInstance a;
  a.id = "ctx-t";
  a.tokens = {"rama-isvarah", "sivam", "pujayati"};
  a.compound_index = 0;
  a.label = "T";
  text::ContextInstance b;
  b.id = "ctx-b";
  b.tokens = {"yah", "rama-isvarah", "sa", "sivah"};
  b.compound_index = 1;
  b.label = "B";
  return {a, b};
}

training::TrainConfig tiny_config() {
  training::TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 8;
  cfg.subword_vocab_size = 60;
  cfg.seed = 11;
  cfg.model.encoder.layers = 2;
  cfg.model.encoder.model_dim = 64;
  cfg.model.encoder.heads = 4;
  cfg.model.encoder.ff_dim = 128;
  return cfg;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("sacti-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace sacti::testing
