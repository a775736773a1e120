// Copyright 2026 The cgg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cgg/numcore/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgg/core/error.hpp"
#include "cgg/numcore/kernels.hpp"

namespace cgg::num {

// --- ParameterStore ---------------------------------------------------------

std::size_t ParameterStore::add(const std::string& name, Tensor init) {
  if (by_name_.contains(name)) throw UsageError("duplicate parameter name '" + name + "'");
  const std::size_t slot = params_.size();
  params_.push_back({name, std::move(init), slot});
  by_name_[name] = slot;
  return slot;
}

std::size_t ParameterStore::add_normal(const std::string& name, Shape shape, double stddev,
                                       std::mt19937_64& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : t.values()) v = dist(rng);
  return add(name, std::move(t));
}

std::size_t ParameterStore::slot_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw UsageError("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<Tensor> ParameterStore::zero_grads() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.emplace_back(p.value.shape());
  return out;
}

std::size_t ParameterStore::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

bool ParameterStore::operator==(const ParameterStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name != other.params_[i].name || !(params_[i].value == other.params_[i].value)) {
      return false;
    }
  }
  return true;
}

// --- Graph ------------------------------------------------------------------

Var Graph::push(Tensor value, std::vector<Var> inputs, const char* op,
                std::function<void(Graph&, std::size_t)> backward) {
  if (!value.all_finite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  Node n;
  n.value = std::move(value);
  for (auto v : inputs) n.requires_grad = n.requires_grad || needs(v);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::constant(Tensor value) {
  if (!value.all_finite()) throw NumericError("non-finite constant");
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::param(const Parameter& p) {
  if (!p.value.all_finite()) throw NumericError("non-finite parameter " + p.name);
  Node n;
  n.external = &p.value;
  n.requires_grad = true;
  n.param_slot = static_cast<long>(p.slot);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

double Graph::scalar(Var v) const {
  const auto& t = value(v);
  if (t.size() != 1) throw ShapeError("expected a scalar, got " + shape_string(t.shape()));
  return t[0];
}

Var Graph::matmul(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  if (A.cols() != B.rows()) {
    throw ShapeError("matmul: shape mismatch " + shape_string(A.shape()) + " x " +
                     shape_string(B.shape()));
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C({m, n});
  kernels::gemm_nn(m, n, k, A.data(), B.data(), C.data());
  return push(std::move(C), {a, b}, "matmul", [a, b, m, n, k](Graph& g, std::size_t self) {
    const auto& dC = g.nodes_[self].grad;
    if (g.needs(a)) kernels::gemm_nt(m, k, n, dC.data(), g.value(b).data(), g.grad_of(a).data());
    if (g.needs(b)) kernels::gemm_tn(k, n, m, g.value(a).data(), dC.data(), g.grad_of(b).data());
  });
}

Var Graph::matmul_nt(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  if (A.cols() != B.cols()) {
    throw ShapeError("matmul_nt: shape mismatch " + shape_string(A.shape()) + " x " +
                     shape_string(B.shape()) + "^T");
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
  Tensor C({m, n});
  kernels::gemm_nt(m, n, k, A.data(), B.data(), C.data());
  return push(std::move(C), {a, b}, "matmul_nt", [a, b, m, n, k](Graph& g, std::size_t self) {
    const auto& dC = g.nodes_[self].grad;
    if (g.needs(a)) kernels::gemm_nn(m, k, n, dC.data(), g.value(b).data(), g.grad_of(a).data());
    if (g.needs(b)) kernels::gemm_tn(n, k, m, dC.data(), g.value(a).data(), g.grad_of(b).data());
  });
}

Var Graph::add(Var a, Var b) {
  const auto& A = value(a);
  require_same_shape(A, value(b), "add");
  Tensor C = A;
  const auto& B = value(b);
  for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
  return push(std::move(C), {a, b}, "add", [a, b](Graph& g, std::size_t self) {
    const auto& dC = g.nodes_[self].grad;
    for (Var v : {a, b}) {
      if (!g.needs(v)) continue;
      auto& d = g.grad_of(v);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dC[i];
    }
  });
}

Var Graph::add_row(Var a, Var row) {
  const auto& A = value(a);
  const auto& R = value(row);
  if (R.rows() != 1 || R.cols() != A.cols()) {
    throw ShapeError("add_row: shape mismatch " + shape_string(A.shape()) + " + " +
                     shape_string(R.shape()));
  }
  Tensor C = A;
  const std::size_t m = A.rows(), n = A.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) C.at(i, j) += R[j];
  }
  return push(std::move(C), {a, row}, "add_row", [a, row, m, n](Graph& g, std::size_t self) {
    const auto& dC = g.nodes_[self].grad;
    if (g.needs(a)) {
      auto& d = g.grad_of(a);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dC[i];
    }
    if (g.needs(row)) {
      auto& d = g.grad_of(row);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[j] += dC[i * n + j];
      }
    }
  });
}

Var Graph::scale(Var a, double s) {
  Tensor C = value(a);
  for (auto& v : C.values()) v *= s;
  return push(std::move(C), {a}, "scale", [a, s](Graph& g, std::size_t self) {
    const auto& dC = g.nodes_[self].grad;
    auto& d = g.grad_of(a);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s * dC[i];
  });
}

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

Var Graph::gelu(Var a) {
  const auto& X = value(a);
  Tensor Y(X.shape());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double x = X[i];
    Y[i] = 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
  }
  return push(std::move(Y), {a}, "gelu", [a](Graph& g, std::size_t self) {
    const auto& dY = g.nodes_[self].grad;
    const auto& X = g.value(a);
    auto& d = g.grad_of(a);
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double x = X[i];
      const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
      const double dt = (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
      d[i] += dY[i] * (0.5 * (1.0 + t) + 0.5 * x * dt);
    }
  });
}

Var Graph::layer_norm(Var x, Var gain, Var bias, double eps) {
  const auto& X = value(x);
  const auto& G = value(gain);
  const auto& B = value(bias);
  const std::size_t m = X.rows(), n = X.cols();
  if (G.size() != n || B.size() != n) {
    throw ShapeError("layer_norm: shape mismatch " + shape_string(X.shape()) + " with gain " +
                     shape_string(G.shape()) + " and bias " + shape_string(B.shape()));
  }
  Tensor Y({m, n});
  Tensor xhat({m, n});
  std::vector<double> inv(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = X.row_ptr(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += xi[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (xi[j] - mean) * (xi[j] - mean);
    var /= static_cast<double>(n);
    inv[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      const double h = (xi[j] - mean) * inv[i];
      xhat.at(i, j) = h;
      Y.at(i, j) = h * G[j] + B[j];
    }
  }
  return push(std::move(Y), {x, gain, bias}, "layer_norm",
              [x, gain, bias, m, n, xhat = std::move(xhat), inv = std::move(inv)](
                  Graph& g, std::size_t self) {
                const auto& dY = g.nodes_[self].grad;
                const auto& G = g.value(gain);
                if (g.needs(gain) || g.needs(bias)) {
                  for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                      if (g.needs(gain)) g.grad_of(gain)[j] += dY.at(i, j) * xhat.at(i, j);
                      if (g.needs(bias)) g.grad_of(bias)[j] += dY.at(i, j);
                    }
                  }
                }
                if (!g.needs(x)) return;
                auto& dX = g.grad_of(x);
                const double nn = static_cast<double>(n);
                for (std::size_t i = 0; i < m; ++i) {
                  double sum_dh = 0.0, sum_dh_h = 0.0;
                  for (std::size_t j = 0; j < n; ++j) {
                    const double dh = dY.at(i, j) * G[j];
                    sum_dh += dh;
                    sum_dh_h += dh * xhat.at(i, j);
                  }
                  for (std::size_t j = 0; j < n; ++j) {
                    const double dh = dY.at(i, j) * G[j];
                    dX.at(i, j) += inv[i] / nn * (nn * dh - sum_dh - xhat.at(i, j) * sum_dh_h);
                  }
                }
              });
}

Var Graph::softmax_rows(Var x) {
  const auto& X = value(x);
  const std::size_t m = X.rows(), n = X.cols();
  Tensor Y({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = X.row_ptr(i);
    double* yi = Y.row_ptr(i);
    const double mx = *std::max_element(xi, xi + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      yi[j] = std::exp(xi[j] - mx);
      z += yi[j];
    }
    for (std::size_t j = 0; j < n; ++j) yi[j] /= z;
  }
  return push(std::move(Y), {x}, "softmax_rows", [x, m, n](Graph& g, std::size_t self) {
    const auto& Y = g.nodes_[self].value;
    const auto& dY = g.nodes_[self].grad;
    auto& dX = g.grad_of(x);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += dY.at(i, j) * Y.at(i, j);
      for (std::size_t j = 0; j < n; ++j) dX.at(i, j) += Y.at(i, j) * (dY.at(i, j) - s);
    }
  });
}

Var Graph::l2_normalize_rows(Var x, double eps) {
  const auto& X = value(x);
  const std::size_t m = X.rows(), n = X.cols();
  Tensor Y({m, n});
  std::vector<double> norm(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += X.at(i, j) * X.at(i, j);
    norm[i] = std::sqrt(s + eps);
    for (std::size_t j = 0; j < n; ++j) Y.at(i, j) = X.at(i, j) / norm[i];
  }
  return push(std::move(Y), {x}, "l2_normalize_rows",
              [x, m, n, norm = std::move(norm)](Graph& g, std::size_t self) {
                const auto& Y = g.nodes_[self].value;
                const auto& dY = g.nodes_[self].grad;
                auto& dX = g.grad_of(x);
                for (std::size_t i = 0; i < m; ++i) {
                  double s = 0.0;
                  for (std::size_t j = 0; j < n; ++j) s += Y.at(i, j) * dY.at(i, j);
                  for (std::size_t j = 0; j < n; ++j) {
                    dX.at(i, j) += (dY.at(i, j) - Y.at(i, j) * s) / norm[i];
                  }
                }
              });
}

Var Graph::gather_rows(Var x, const std::vector<std::size_t>& rows) {
  const auto& X = value(x);
  const std::size_t n = X.cols();
  Tensor Y({rows.size(), n});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= X.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[r]) + " out of range for " +
                       shape_string(X.shape()));
    }
    std::copy_n(X.row_ptr(rows[r]), n, Y.row_ptr(r));
  }
  return push(std::move(Y), {x}, "gather_rows", [x, rows, n](Graph& g, std::size_t self) {
    const auto& dY = g.nodes_[self].grad;
    auto& dX = g.grad_of(x);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t j = 0; j < n; ++j) dX.at(rows[r], j) += dY.at(r, j);
    }
  });
}

Var Graph::concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t n = value(parts[0]).cols();
  std::size_t m = 0;
  for (Var p : parts) {
    if (value(p).cols() != n) {
      throw ShapeError("concat_rows: shape mismatch " + shape_string(value(parts[0]).shape()) +
                       " vs " + shape_string(value(p).shape()));
    }
    m += value(p).rows();
  }
  Tensor Y({m, n});
  std::size_t off = 0;
  for (Var p : parts) {
    const auto& P = value(p);
    std::copy(P.data(), P.data() + P.size(), Y.data() + off * n);
    off += P.rows();
  }
  return push(std::move(Y), parts, "concat_rows", [parts, n](Graph& g, std::size_t self) {
    const auto& dY = g.nodes_[self].grad;
    std::size_t off = 0;
    for (Var p : parts) {
      const std::size_t rows = g.value(p).rows();
      if (g.needs(p)) {
        auto& d = g.grad_of(p);
        for (std::size_t i = 0; i < rows * n; ++i) d[i] += dY[off * n + i];
      }
      off += rows;
    }
  });
}

Var Graph::slice_cols(Var x, std::size_t start, std::size_t len) {
  const auto& X = value(x);
  if (start + len > X.cols()) {
    throw ShapeError("slice_cols: columns [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") out of range for " + shape_string(X.shape()));
  }
  const std::size_t m = X.rows();
  Tensor Y({m, len});
  for (std::size_t i = 0; i < m; ++i) std::copy_n(X.row_ptr(i) + start, len, Y.row_ptr(i));
  return push(std::move(Y), {x}, "slice_cols", [x, start, len, m](Graph& g, std::size_t self) {
    const auto& dY = g.nodes_[self].grad;
    auto& dX = g.grad_of(x);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < len; ++j) dX.at(i, start + j) += dY.at(i, j);
    }
  });
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t m = value(parts[0]).rows();
  std::size_t n = 0;
  for (Var p : parts) {
    if (value(p).rows() != m) {
      throw ShapeError("concat_cols: shape mismatch " + shape_string(value(parts[0]).shape()) +
                       " vs " + shape_string(value(p).shape()));
    }
    n += value(p).cols();
  }
  Tensor Y({m, n});
  std::size_t off = 0;
  for (Var p : parts) {
    const auto& P = value(p);
    for (std::size_t i = 0; i < m; ++i) std::copy_n(P.row_ptr(i), P.cols(), Y.row_ptr(i) + off);
    off += P.cols();
  }
  return push(std::move(Y), parts, "concat_cols", [parts, m, n](Graph& g, std::size_t self) {
    const auto& dY = g.nodes_[self].grad;
    std::size_t off = 0;
    for (Var p : parts) {
      const std::size_t c = g.value(p).cols();
      if (g.needs(p)) {
        auto& d = g.grad_of(p);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < c; ++j) d.at(i, j) += dY.at(i, off + j);
        }
      }
      off += c;
    }
  });
}

Var Graph::soft_target_xent(Var logits, const Tensor& mask, const Tensor& weights, double norm) {
  const auto& S = value(logits);
  require_same_shape(S, mask, "soft_target_xent mask");
  require_same_shape(S, weights, "soft_target_xent weights");
  if (!(norm > 0.0)) throw UsageError("soft_target_xent: norm must be positive");
  const std::size_t m = S.rows(), n = S.cols();
  // Masked log-softmax per row, kept for the backward pass.
  Tensor prob({m, n});
  std::vector<double> row_weight(m, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.at(i, j) != 0.0) {
        mx = std::max(mx, S.at(i, j));
        any = true;
      } else if (weights.at(i, j) != 0.0) {
        throw UsageError("soft_target_xent: weight outside the candidate mask");
      }
      row_weight[i] += weights.at(i, j);
    }
    if (!any) {
      if (row_weight[i] != 0.0) throw UsageError("soft_target_xent: weighted row with empty mask");
      continue;
    }
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.at(i, j) != 0.0) z += std::exp(S.at(i, j) - mx);
    }
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.at(i, j) == 0.0) continue;
      const double logp = S.at(i, j) - lse;
      prob.at(i, j) = std::exp(logp);
      loss -= weights.at(i, j) * logp;
    }
  }
  loss /= norm;
  return push(Tensor::scalar(loss), {logits}, "soft_target_xent",
              [logits, weights, m, n, norm, prob = std::move(prob),
               row_weight = std::move(row_weight)](Graph& g, std::size_t self) {
                const double up = g.nodes_[self].grad[0];
                auto& dS = g.grad_of(logits);
                for (std::size_t i = 0; i < m; ++i) {
                  for (std::size_t j = 0; j < n; ++j) {
                    dS.at(i, j) -=
                        up / norm * (weights.at(i, j) - row_weight[i] * prob.at(i, j));
                  }
                }
              });
}

void Graph::backward(Var loss) {
  if (backward_done_) throw UsageError("backward called twice on one graph");
  const auto& L = value(loss);
  if (L.size() != 1) throw ShapeError("backward needs a scalar loss, got " + shape_string(L.shape()));
  backward_done_ = true;
  for (auto& n : nodes_) {
    if (n.requires_grad) n.grad = Tensor((n.external ? *n.external : n.value).shape());
  }
  if (!nodes_[loss.id].requires_grad) return;
  nodes_[loss.id].grad[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (n.requires_grad && n.backward) n.backward(*this, i);
  }
}

void Graph::accumulate_param_grads(Gradients& grads) const {
  for (const auto& n : nodes_) {
    if (n.param_slot < 0 || n.grad.size() == 0) continue;
    auto& dst = grads.at(static_cast<std::size_t>(n.param_slot));
    require_same_shape(dst, n.grad, "accumulate_param_grads");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad[i];
  }
}

}  // namespace cgg::num
