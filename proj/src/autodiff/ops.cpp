// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "autodiff/graph.hpp"
#include "common/error.hpp"

namespace sacti::ad {

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  fail(ErrorKind::kDimension, std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

void require_rank(const char* op, Var v, std::size_t rank) {
  if (v.value().rank() != rank) {
    fail(ErrorKind::kDimension, std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                                    shape_str(v.shape()));
  }
}

void accumulate(Graph& g, Var v, const Tensor& delta) {
  if (!v.requires_grad()) return;
  Tensor& dst = g.grad_buffer(v.index());
  for (std::size_t i = 0; i < delta.size(); ++i) dst[i] += delta[i];
}

// Gradient buffer of v, or nullptr when v does not need one.
Tensor* grad_of(Graph& g, Var v) { return v.requires_grad() ? &g.grad_buffer(v.index()) : nullptr; }

// c[m x n] += a[m x k] * b[k x n]
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[m x k] += g[m x n] * b[k x n]^T
void gemm_bt(const double* g, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double acc = 0.0;
      const double* grow = g + i * n;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      c[i * k + p] += acc;
    }
  }
}

// c[k x n] += a[m x k]^T * g[m x n]
void gemm_at(const double* a, const double* g, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* grow = g + i * n;
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

struct AxisLayout {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisLayout layout_for(const Shape& shape, std::size_t axis) {
  AxisLayout l;
  for (std::size_t i = 0; i < axis; ++i) l.outer *= shape[i];
  l.len = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) l.inner *= shape[i];
  return l;
}

// Row length of the last axis; works for vectors and matrices.
std::pair<std::size_t, std::size_t> rows_cols(const Tensor& t) {
  if (t.rank() == 1) return {1, t.dim(0)};
  if (t.rank() == 2) return {t.dim(0), t.dim(1)};
  fail(ErrorKind::kDimension, "expected a vector or matrix, got " + shape_str(t.shape()));
}

}  // namespace

Var matmul(Var a, Var b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) shape_error("matmul", a.shape(), b.shape());
  Tensor out({m, n}, 0.0);
  gemm(a.value().data(), b.value().data(), out.data(), m, k, n);
  return a.graph().record(std::move(out), {a, b}, [a, b, m, k, n](Graph& g, const Tensor& go) {
    if (Tensor* ga = grad_of(g, a)) gemm_bt(go.data(), b.value().data(), ga->data(), m, n, k);
    if (Tensor* gb = grad_of(g, b)) gemm_at(a.value().data(), go.data(), gb->data(), m, k, n);
  });
}

Var add(Var a, Var b) {
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    accumulate(g, a, go);
    accumulate(g, b, go);
  });
}

Var sub(Var a, Var b) {
  if (a.shape() != b.shape()) shape_error("sub", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    accumulate(g, a, go);
    if (Tensor* gb = grad_of(g, b)) {
      for (std::size_t i = 0; i < go.size(); ++i) (*gb)[i] -= go[i];
    }
  });
}

Var mul(Var a, Var b) {
  if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.graph().record(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    if (Tensor* ga = grad_of(g, a)) {
      for (std::size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * b.value()[i];
    }
    if (Tensor* gb = grad_of(g, b)) {
      for (std::size_t i = 0; i < go.size(); ++i) (*gb)[i] += go[i] * a.value()[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (auto& v : out.values()) v *= factor;
  return a.graph().record(std::move(out), {a}, [a, factor](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * factor;
  });
}

Var add_row(Var a, Var b) {
  require_rank("add_row", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  const bool ok = (b.value().rank() == 1 && b.shape()[0] == n) ||
                  (b.value().rank() == 2 && b.shape()[0] == 1 && b.shape()[1] == n);
  if (!ok) shape_error("add_row", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += b.value()[j];
  return a.graph().record(std::move(out), {a, b}, [a, b, m, n](Graph& g, const Tensor& go) {
    accumulate(g, a, go);
    if (Tensor* gb = grad_of(g, b)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) (*gb)[j] += go[i * n + j];
    }
  });
}

Var add_constant(Var a, const Tensor& c) {
  if (a.shape() != c.shape()) shape_error("add_constant", a.shape(), c.shape());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
  return a.graph().record(std::move(out), {a}, [a](Graph& g, const Tensor& go) { accumulate(g, a, go); });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = std::tanh(v);
  return a.graph().record(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < go.size(); ++i) {
      const double y = std::tanh(a.value()[i]);
      (*ga)[i] += go[i] * (1.0 - y * y);
    }
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return a.graph().record(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < go.size(); ++i) {
      if (a.value()[i] > 0.0) (*ga)[i] += go[i];
    }
  });
}

Var softmax(Var a, std::size_t axis) {
  if (axis >= a.value().rank()) {
    fail(ErrorKind::kIndex, "softmax axis " + std::to_string(axis) + " out of range for " + shape_str(a.shape()));
  }
  const AxisLayout l = layout_for(a.shape(), axis);
  Tensor out(a.shape(), 0.0);
  const Tensor& x = a.value();
  for (std::size_t o = 0; o < l.outer; ++o) {
    for (std::size_t in = 0; in < l.inner; ++in) {
      auto idx = [&](std::size_t k) { return (o * l.len + k) * l.inner + in; };
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < l.len; ++k) mx = std::max(mx, x[idx(k)]);
      double total = 0.0;
      for (std::size_t k = 0; k < l.len; ++k) {
        const double e = std::exp(x[idx(k)] - mx);
        out[idx(k)] = e;
        total += e;
      }
      for (std::size_t k = 0; k < l.len; ++k) out[idx(k)] /= total;
    }
  }
  Tensor saved = out;
  return a.graph().record(std::move(out), {a}, [a, l, y = std::move(saved)](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t o = 0; o < l.outer; ++o) {
      for (std::size_t in = 0; in < l.inner; ++in) {
        auto idx = [&](std::size_t k) { return (o * l.len + k) * l.inner + in; };
        double dot = 0.0;
        for (std::size_t k = 0; k < l.len; ++k) dot += go[idx(k)] * y[idx(k)];
        for (std::size_t k = 0; k < l.len; ++k) (*ga)[idx(k)] += y[idx(k)] * (go[idx(k)] - dot);
      }
    }
  });
}

Var log_softmax(Var a) {
  const auto [rows, cols] = rows_cols(a.value());
  const Tensor& x = a.value();
  Tensor out(a.shape(), 0.0);
  Tensor probs(a.shape(), 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* xr = x.data() + i * cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) mx = std::max(mx, xr[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += std::exp(xr[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < cols; ++j) {
      out[i * cols + j] = xr[j] - lse;
      probs[i * cols + j] = std::exp(xr[j] - lse);
    }
  }
  return a.graph().record(std::move(out), {a}, [a, rows, cols, p = std::move(probs)](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < rows; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < cols; ++j) total += go[i * cols + j];
      for (std::size_t j = 0; j < cols; ++j) {
        (*ga)[i * cols + j] += go[i * cols + j] - p[i * cols + j] * total;
      }
    }
  });
}

Var cross_entropy(Var logits, std::span<const int> targets) {
  require_rank("cross_entropy", logits, 2);
  const std::size_t b = logits.shape()[0], n = logits.shape()[1];
  if (targets.size() != b) {
    fail(ErrorKind::kDimension, "cross_entropy: " + std::to_string(targets.size()) + " targets for " +
                                    std::to_string(b) + " rows");
  }
  for (std::size_t i = 0; i < b; ++i) {
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= n) {
      fail(ErrorKind::kIndex, "cross_entropy: target " + std::to_string(targets[i]) + " at row " +
                                  std::to_string(i) + " outside [0," + std::to_string(n) + ")");
    }
  }
  const Tensor& x = logits.value();
  Tensor probs(x.shape(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double* xr = x.data() + i * n;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, xr[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::exp(xr[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < n; ++j) probs[i * n + j] = std::exp(xr[j] - lse);
    loss += lse - xr[targets[i]];
  }
  loss /= static_cast<double>(b);
  std::vector<int> t(targets.begin(), targets.end());
  return logits.graph().record(
      Tensor::scalar(loss), {logits}, [logits, b, n, t = std::move(t), p = std::move(probs)](Graph& g, const Tensor& go) {
        Tensor* gl = grad_of(g, logits);
        const double s = go[0] / static_cast<double>(b);
        for (std::size_t i = 0; i < b; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double onehot = static_cast<int>(j) == t[i] ? 1.0 : 0.0;
            (*gl)[i * n + j] += s * (p[i * n + j] - onehot);
          }
        }
      });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  require_rank("layer_norm", x, 2);
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (gamma.value().size() != n || gamma.value().rank() != 1) shape_error("layer_norm", x.shape(), gamma.shape());
  if (beta.value().size() != n || beta.value().rank() != 1) shape_error("layer_norm", x.shape(), beta.shape());
  Tensor xhat(x.shape(), 0.0);
  std::vector<double> inv_std(m);
  Tensor out(x.shape(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* xr = x.value().data() + i * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += xr[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (xr[j] - mu) * inv_std[i];
      out[i * n + j] = xhat[i * n + j] * gamma.value()[j] + beta.value()[j];
    }
  }
  return x.graph().record(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, m, n, xh = std::move(xhat), inv = std::move(inv_std)](Graph& g, const Tensor& go) {
        if (Tensor* gg = grad_of(g, gamma)) {
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) (*gg)[j] += go[i * n + j] * xh[i * n + j];
        }
        if (Tensor* gb = grad_of(g, beta)) {
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) (*gb)[j] += go[i * n + j];
        }
        if (Tensor* gx = grad_of(g, x)) {
          const double dn = static_cast<double>(n);
          for (std::size_t i = 0; i < m; ++i) {
            double sum_d = 0.0, sum_dx = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              const double d = go[i * n + j] * gamma.value()[j];
              sum_d += d;
              sum_dx += d * xh[i * n + j];
            }
            for (std::size_t j = 0; j < n; ++j) {
              const double d = go[i * n + j] * gamma.value()[j];
              (*gx)[i * n + j] += inv[i] / dn * (dn * d - sum_d - xh[i * n + j] * sum_dx);
            }
          }
        }
      });
}

Var dropout(Var x, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "dropout rate must lie in [0,1), got " + std::to_string(rate), "dropout");
  }
  Graph& graph = x.graph();
  if (!graph.training() || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(x.shape(), 0.0);
  for (auto& m : mask.values()) m = graph.rng().uniform() >= rate ? keep_scale : 0.0;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return graph.record(std::move(out), {x}, [x, mk = std::move(mask)](Graph& g, const Tensor& go) {
    Tensor* gx = grad_of(g, x);
    for (std::size_t i = 0; i < go.size(); ++i) (*gx)[i] += go[i] * mk[i];
  });
}

Var embedding(Var table, std::span<const int> ids) {
  require_rank("embedding", table, 2);
  const std::size_t vocab = table.shape()[0], d = table.shape()[1];
  if (ids.empty()) fail(ErrorKind::kDimension, "embedding: empty id sequence");
  Tensor out({ids.size(), d}, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      fail(ErrorKind::kIndex, "embedding: id " + std::to_string(ids[i]) + " outside [0," + std::to_string(vocab) + ")");
    }
    std::copy_n(table.value().data() + static_cast<std::size_t>(ids[i]) * d, d, out.data() + i * d);
  }
  std::vector<int> saved(ids.begin(), ids.end());
  return table.graph().record(std::move(out), {table}, [table, d, rows = std::move(saved)](Graph& g, const Tensor& go) {
    Tensor* gt = grad_of(g, table);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double* dst = gt->data() + static_cast<std::size_t>(rows[i]) * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] += go[i * d + j];
    }
  });
}

Var transpose(Var a) {
  require_rank("transpose", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  Tensor out({n, m}, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.value()[i * n + j];
  return a.graph().record(std::move(out), {a}, [a, m, n](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) (*ga)[i * n + j] += go[j * m + i];
  });
}

Var reshape(Var a, Shape shape) {
  if (numel(shape) != a.value().size()) shape_error("reshape", a.shape(), shape);
  Tensor out(std::move(shape), std::vector<double>(a.value().values().begin(), a.value().values().end()));
  return a.graph().record(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i];
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
  require_rank("slice_rows", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (count == 0 || begin + count > m) {
    fail(ErrorKind::kIndex, "slice_rows [" + std::to_string(begin) + "," + std::to_string(begin + count) +
                                ") outside " + shape_str(a.shape()));
  }
  Tensor out({count, n}, std::vector<double>(a.value().data() + begin * n, a.value().data() + (begin + count) * n));
  return a.graph().record(std::move(out), {a}, [a, begin, n](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < go.size(); ++i) (*ga)[begin * n + i] += go[i];
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  require_rank("slice_cols", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (count == 0 || begin + count > n) {
    fail(ErrorKind::kIndex, "slice_cols [" + std::to_string(begin) + "," + std::to_string(begin + count) +
                                ") outside " + shape_str(a.shape()));
  }
  Tensor out({m, count}, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < count; ++j) out[i * count + j] = a.value()[i * n + begin + j];
  return a.graph().record(std::move(out), {a}, [a, begin, m, n, count](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < count; ++j) (*ga)[i * n + begin + j] += go[i * count + j];
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kDimension, "concat_rows: no inputs");
  const std::size_t n = parts[0].shape().at(1);
  std::size_t m = 0;
  for (const Var& p : parts) {
    require_rank("concat_rows", p, 2);
    if (p.shape()[1] != n) shape_error("concat_rows", parts[0].shape(), p.shape());
    m += p.shape()[0];
  }
  std::vector<double> values;
  values.reserve(m * n);
  for (const Var& p : parts) values.insert(values.end(), p.value().values().begin(), p.value().values().end());
  std::vector<Var> saved(parts.begin(), parts.end());
  return parts[0].graph().record(Tensor({m, n}, std::move(values)), parts, [saved](Graph& g, const Tensor& go) {
    std::size_t offset = 0;
    for (const Var& p : saved) {
      if (Tensor* gp = grad_of(g, p)) {
        for (std::size_t i = 0; i < gp->size(); ++i) (*gp)[i] += go[offset + i];
      }
      offset += p.value().size();
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kDimension, "concat_cols: no inputs");
  const std::size_t m = parts[0].shape().at(0);
  std::size_t n = 0;
  for (const Var& p : parts) {
    require_rank("concat_cols", p, 2);
    if (p.shape()[0] != m) shape_error("concat_cols", parts[0].shape(), p.shape());
    n += p.shape()[1];
  }
  Tensor out({m, n}, 0.0);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const std::size_t w = p.shape()[1];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j) out[i * n + offset + j] = p.value()[i * w + j];
    offset += w;
  }
  std::vector<Var> saved(parts.begin(), parts.end());
  return parts[0].graph().record(std::move(out), parts, [saved, m, n](Graph& g, const Tensor& go) {
    std::size_t col = 0;
    for (const Var& p : saved) {
      const std::size_t w = p.shape()[1];
      if (Tensor* gp = grad_of(g, p)) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < w; ++j) (*gp)[i * w + j] += go[i * n + col + j];
      }
      col += w;
    }
  });
}

Var gather_rows(Var a, std::span<const std::size_t> rows) {
  require_rank("gather_rows", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (rows.empty()) fail(ErrorKind::kDimension, "gather_rows: no rows requested");
  Tensor out({rows.size(), n}, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m) fail(ErrorKind::kIndex, "gather_rows: row " + std::to_string(rows[i]) + " outside " + shape_str(a.shape()));
    std::copy_n(a.value().data() + rows[i] * n, n, out.data() + i * n);
  }
  std::vector<std::size_t> saved(rows.begin(), rows.end());
  return a.graph().record(std::move(out), {a}, [a, n, idx = std::move(saved)](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) (*ga)[idx[i] * n + j] += go[i * n + j];
  });
}

Var span_mean(Var a, std::span<const PieceSpan> spans) {
  require_rank("span_mean", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (spans.empty()) fail(ErrorKind::kDimension, "span_mean: no spans");
  Tensor out({spans.size(), n}, 0.0);
  for (std::size_t t = 0; t < spans.size(); ++t) {
    const PieceSpan s = spans[t];
    if (s.length == 0 || s.begin + s.length > m) {
      fail(ErrorKind::kIndex, "span_mean: span " + std::to_string(t) + " outside " + shape_str(a.shape()));
    }
    for (std::size_t r = s.begin; r < s.begin + s.length; ++r)
      for (std::size_t j = 0; j < n; ++j) out[t * n + j] += a.value()[r * n + j];
    const double inv = 1.0 / static_cast<double>(s.length);
    for (std::size_t j = 0; j < n; ++j) out[t * n + j] *= inv;
  }
  std::vector<PieceSpan> saved(spans.begin(), spans.end());
  return a.graph().record(std::move(out), {a}, [a, n, sp = std::move(saved)](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t t = 0; t < sp.size(); ++t) {
      const double inv = 1.0 / static_cast<double>(sp[t].length);
      for (std::size_t r = sp[t].begin; r < sp[t].begin + sp[t].length; ++r)
        for (std::size_t j = 0; j < n; ++j) (*ga)[r * n + j] += go[t * n + j] * inv;
    }
  });
}

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return a.graph().record(Tensor::scalar(total), {a}, [a](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (auto& v : ga->values()) v += go[0];
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var pick(Var a, std::span<const int> cols) {
  require_rank("pick", a, 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (cols.size() != m) fail(ErrorKind::kDimension, "pick: " + std::to_string(cols.size()) + " indices for " + std::to_string(m) + " rows");
  Tensor out({m}, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (cols[i] < 0 || static_cast<std::size_t>(cols[i]) >= n) {
      fail(ErrorKind::kIndex, "pick: column " + std::to_string(cols[i]) + " outside " + shape_str(a.shape()));
    }
    out[i] = a.value()[i * n + static_cast<std::size_t>(cols[i])];
  }
  std::vector<int> saved(cols.begin(), cols.end());
  return a.graph().record(std::move(out), {a}, [a, n, c = std::move(saved)](Graph& g, const Tensor& go) {
    Tensor* ga = grad_of(g, a);
    for (std::size_t i = 0; i < c.size(); ++i) (*ga)[i * n + static_cast<std::size_t>(c[i])] += go[i];
  });
}

Var bilinear(Var x, Var u, Var y) {
  require_rank("bilinear", x, 2);
  require_rank("bilinear", u, 3);
  require_rank("bilinear", y, 2);
  const std::size_t n = x.shape()[0], A = x.shape()[1];
  const std::size_t R = u.shape()[0], B = u.shape()[2];
  const std::size_t m = y.shape()[0];
  if (u.shape()[1] != A) shape_error("bilinear", x.shape(), u.shape());
  if (y.shape()[1] != B) shape_error("bilinear", u.shape(), y.shape());
  const double* X = x.value().data();
  const double* U = u.value().data();
  const double* Y = y.value().data();
  // t[r, a, j] = sum_b U[r, a, b] * Y[j, b]
  std::vector<double> t(R * A * m, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t b = 0; b < B; ++b) acc += U[(r * A + a) * B + b] * Y[j * B + b];
        t[(r * A + a) * m + j] = acc;
      }
  Tensor out({n, m, R}, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t r = 0; r < R; ++r) {
        double acc = 0.0;
        for (std::size_t a = 0; a < A; ++a) acc += X[i * A + a] * t[(r * A + a) * m + j];
        out[(i * m + j) * R + r] = acc;
      }
  return x.graph().record(
      std::move(out), {x, u, y}, [x, u, y, n, A, R, B, m, t = std::move(t)](Graph& g, const Tensor& go) {
        const double* Xv = x.value().data();
        const double* Uv = u.value().data();
        const double* Yv = y.value().data();
        if (Tensor* gx = grad_of(g, x)) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < A; ++a) {
              double acc = 0.0;
              for (std::size_t j = 0; j < m; ++j)
                for (std::size_t r = 0; r < R; ++r) acc += go[(i * m + j) * R + r] * t[(r * A + a) * m + j];
              (*gx)[i * A + a] += acc;
            }
        }
        if (Tensor* gu = grad_of(g, u)) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
              for (std::size_t r = 0; r < R; ++r) {
                const double gv = go[(i * m + j) * R + r];
                if (gv == 0.0) continue;
                for (std::size_t a = 0; a < A; ++a) {
                  const double ga = gv * Xv[i * A + a];
                  double* dst = gu->data() + (r * A + a) * B;
                  for (std::size_t b = 0; b < B; ++b) dst[b] += ga * Yv[j * B + b];
                }
              }
        }
        if (Tensor* gy = grad_of(g, y)) {
          // w[r, i, b] = sum_a X[i, a] * U[r, a, b]
          std::vector<double> w(R * n * B, 0.0);
          for (std::size_t r = 0; r < R; ++r)
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t a = 0; a < A; ++a) {
                const double xv = Xv[i * A + a];
                for (std::size_t b = 0; b < B; ++b) w[(r * n + i) * B + b] += xv * Uv[(r * A + a) * B + b];
              }
          for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t r = 0; r < R; ++r) {
                const double gv = go[(i * m + j) * R + r];
                for (std::size_t b = 0; b < B; ++b) (*gy)[j * B + b] += gv * w[(r * n + i) * B + b];
              }
        }
      });
}

}  // namespace sacti::ad
