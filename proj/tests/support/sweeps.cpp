// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "model/encoder.hpp"
#include "model/heads.hpp"
#include "oracles.hpp"
#include "text/annotation.hpp"
#include "training/metrics.hpp"

namespace sacti::testing {

namespace {

struct OracleVote {
  int label = 0;
  std::vector<int> votes;
  std::vector<std::size_t> counts;
};

OracleVote oracle_vote(const ad::Tensor& r) {
  const std::size_t n = r.dim(0), K = r.dim(1);
  OracleVote o;
  o.counts.assign(K, 0);
  std::vector<long double> sums(K, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = r.data() + i * K;
    const int v = static_cast<int>(std::max_element(row, row + K) - row);
    o.votes.push_back(v);
    ++o.counts[static_cast<std::size_t>(v)];
    const long double mx = row[v];
    long double z = 0.0L;
    for (std::size_t k = 0; k < K; ++k) z += std::exp(static_cast<long double>(row[k]) - mx);
    for (std::size_t k = 0; k < K; ++k) sums[k] += static_cast<long double>(row[k]) - mx - std::log(z);
  }
  const std::size_t top = *std::max_element(o.counts.begin(), o.counts.end());
  int best = -1;
  for (std::size_t k = 0; k < K; ++k) {
    if (o.counts[k] != top) continue;
    if (best < 0 || sums[k] > sums[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  o.label = best;
  return o;
}

ad::Tensor scores_for(const std::vector<int>& votes, std::size_t K, int family, ad::Rng& rng) {
  const std::size_t n = votes.size();
  ad::Tensor r({n, K}, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::size_t>(votes[i]);
    for (std::size_t k = 0; k < K; ++k) {
      switch (family) {
        case 0:  // saturated: equal counts give bit-equal sums
          r.at(i, k) = k == v ? 0.0 : -1e300;
          break;
        case 1:  // continuous
          r.at(i, k) = rng.uniform(-3.0, 0.0);
          break;
        default:  // the vote ties with every higher label
          r.at(i, k) = k >= v ? 1.0 : 0.0;
          break;
      }
    }
    if (family == 1) r.at(i, v) = 0.5 + rng.uniform();
  }
  return r;
}

}  // namespace

Sweep vote_sweep(std::size_t max_n, std::size_t max_k, std::uint64_t seed) {
  Sweep s;
  ad::Rng rng(seed);
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t K = 1; K <= max_k; ++K) {
      std::size_t total = 1;
      for (std::size_t i = 0; i < n; ++i) total *= K;
      for (std::size_t code = 0; code < total; ++code) {
        std::vector<int> votes(n);
        for (std::size_t i = 0, c = code; i < n; ++i, c /= K) votes[i] = static_cast<int>(c % K);
        for (int family = 0; family < 3; ++family) {
          const ad::Tensor r = scores_for(votes, K, family, rng);
          const OracleVote want = oracle_vote(r);
          const model::VoteResult got = model::vote_decode(r);
          ++s.cases;
          bool ok = got.label == want.label && got.votes == want.votes;
          for (std::size_t k = 0; k < K && ok; ++k) {
            ok = got.confidence[k] == static_cast<double>(want.counts[k]) / static_cast<double>(n);
          }
          if (!ok) {
            if (s.mismatches == 0) {
              std::ostringstream os;
              os << "n=" << n << " K=" << K << " code=" << code << " family=" << family << " got=" << got.label
                 << " want=" << want.label;
              s.first_mismatch = os.str();
            }
            ++s.mismatches;
          }
        }
      }
    }
  }
  return s;
}

Sweep metrics_sweep(std::size_t sets, double tol, std::uint64_t seed) {
  Sweep s;
  ad::Rng rng(seed);
  auto track = [&](double got, double want, const std::string& what) {
    const double e = std::abs(got - want);
    s.max_abs_error = std::max(s.max_abs_error, e);
    if (e > tol) {
      if (s.mismatches == 0) s.first_mismatch = what;
      ++s.mismatches;
    }
  };
  for (std::size_t t = 0; t < sets; ++t) {
    const std::size_t K = 2 + rng.below(5), n = 1 + rng.below(60);
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < K; ++k) labels.push_back("L" + std::to_string(k));
    std::vector<int> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(rng.below(K));
      pred[i] = rng.below(3) == 0 ? static_cast<int>(rng.below(K)) : gold[i];
    }
    const training::Evaluation ev = training::score_predictions(gold, pred, labels);
    ++s.cases;

    double correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += gold[i] == pred[i];
    track(ev.metrics.accuracy, correct / static_cast<double>(n), "accuracy");
    double sp = 0, sr = 0, sf = 0;
    for (std::size_t k = 0; k < K; ++k) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool g = gold[i] == static_cast<int>(k), p = pred[i] == static_cast<int>(k);
        tp += g && p;
        fp += !g && p;
        fn += g && !p;
      }
      const double P = tp + fp > 0 ? tp / (tp + fp) : 0.0;
      const double R = tp + fn > 0 ? tp / (tp + fn) : 0.0;
      const double F = P + R > 0 ? 2 * P * R / (P + R) : 0.0;
      track(ev.metrics.per_class[k].precision, P, "precision");
      track(ev.metrics.per_class[k].recall, R, "recall");
      track(ev.metrics.per_class[k].f1, F, "f1");
      sp += P;
      sr += R;
      sf += F;
      for (std::size_t j = 0; j < K; ++j) {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < n; ++i) cell += gold[i] == static_cast<int>(k) && pred[i] == static_cast<int>(j);
        track(static_cast<double>(ev.confusion.counts[k][j]), static_cast<double>(cell), "confusion");
      }
    }
    track(ev.metrics.macro_precision, sp / static_cast<double>(K), "macro precision");
    track(ev.metrics.macro_recall, sr / static_cast<double>(K), "macro recall");
    track(ev.metrics.macro_f1, sf / static_cast<double>(K), "macro f1");
  }
  return s;
}

Sweep kappa_sweep(std::size_t pairs, std::uint64_t seed) {
  Sweep s;
  ad::Rng rng(seed);
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t n = 2 + rng.below(150), K = 2 + rng.below(4);
    std::vector<std::string> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::string(1, static_cast<char>('A' + rng.below(K)));
      b[i] = rng.below(2) ? a[i] : std::string(1, static_cast<char>('A' + rng.below(K)));
    }
    long double agree = 0;
    std::map<std::string, long double> ma, mb;
    for (std::size_t i = 0; i < n; ++i) {
      agree += a[i] == b[i];
      ma[a[i]] += 1;
      mb[b[i]] += 1;
    }
    const long double N = static_cast<long double>(n);
    long double pe = 0;
    for (const auto& [label, c] : ma) pe += (c / N) * (mb[label] / N);
    if (pe >= 1.0L) continue;
    const long double want = (agree / N - pe) / (1.0L - pe);
    const double e = static_cast<double>(std::abs(static_cast<long double>(text::cohen_kappa(a, b)) - want));
    ++s.cases;
    s.max_abs_error = std::max(s.max_abs_error, e);
    if (e >= 1e-12) ++s.mismatches;
  }
  return s;
}

Sweep pooling_sweep(std::size_t inputs, std::uint64_t seed) {
  Sweep s;
  ad::Rng rng(seed);
  model::EncoderConfig cfg;
  cfg.model_dim = 16;
  cfg.ff_dim = 32;
  for (std::size_t t = 0; t < inputs; ++t) {
    ad::ParameterStore store;
    model::Encoder enc(cfg, 30);
    enc.init(store, rng);
    const std::size_t tokens = 1 + rng.below(8);
    std::vector<ad::PieceSpan> spans;
    std::size_t at = 0;
    for (std::size_t k = 0; k < tokens; ++k) {
      const std::size_t len = 1 + rng.below(4);
      spans.push_back({at, len});
      at += len;
    }
    std::vector<int> ids(at);
    for (int& v : ids) v = static_cast<int>(rng.below(30));
    ad::Graph g(static_cast<const ad::ParameterStore&>(store));
    const model::EncoderOutput out = enc.encode(g, ids, spans);
    const ad::Tensor pieces = out.piece_states.value();
    const ad::Tensor pooled = out.token_states.value();
    const std::size_t d = pieces.dim(1);
    ++s.cases;
    for (std::size_t k = 0; k < tokens; ++k) {
      for (std::size_t c = 0; c < d; ++c) {
        long double acc = 0;
        for (std::size_t p = spans[k].begin; p < spans[k].begin + spans[k].length; ++p) acc += pieces.at(p, c);
        const double want = static_cast<double>(acc / static_cast<long double>(spans[k].length));
        const double e = std::abs(pooled.at(k, c) - want);
        s.max_abs_error = std::max(s.max_abs_error, e);
        if (e > 1e-12) ++s.mismatches;
      }
    }
  }
  return s;
}

}  // namespace sacti::testing
