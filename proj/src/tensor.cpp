/*
 * Copyright 2026 the den authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "den/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "den/error.hpp"

namespace den {

namespace {

thread_local bool g_grad_enabled = true;

std::string shape_str(std::size_t r, std::size_t c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

std::string shape_str(const Tensor& t) { return shape_str(t.rows(), t.cols()); }

void check_finite(const char* op, const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string("op '") + op + "' produced a non-finite value");
    }
  }
}

void require_defined(const char* op, const Tensor& t) {
  if (!t.defined()) throw NumericError(std::string(op) + ": undefined tensor");
}

}  // namespace

std::vector<double>& detail::TensorNode::grad_buffer() {
  if (grad.empty()) grad.assign(size(), 0.0);
  return grad;
}

Tensor Tensor::make_node(const char* op, std::size_t rows, std::size_t cols,
                         std::vector<double> value, std::vector<Tensor> parents,
                         std::function<void(detail::TensorNode&)> backprop) {
  check_finite(op, value);
  auto node = std::make_shared<detail::TensorNode>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(value);
  node->op = op;
  bool rg = false;
  for (const Tensor& p : parents) rg = rg || p.requires_grad();
  if (rg && g_grad_enabled) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (const Tensor& p : parents) node->parents.push_back(p.node());
    node->backprop = std::move(backprop);
  }
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  auto node = std::make_shared<detail::TensorNode>();
  node->rows = rows;
  node->cols = cols;
  node->value.assign(rows * cols, 0.0);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::constant(std::size_t rows, std::size_t cols, std::vector<double> value) {
  if (value.size() != rows * cols) {
    throw NumericError("constant: value length " + std::to_string(value.size()) +
                       " does not match " + shape_str(rows, cols));
  }
  auto node = std::make_shared<detail::TensorNode>();
  node->rows = rows;
  node->cols = cols;
  node->value = std::move(value);
  return Tensor(std::move(node));
}

Tensor Tensor::constant(const Mat& m) { return constant(m.rows, m.cols, m.a); }

Tensor Tensor::scalar(double v) { return constant(1, 1, {v}); }

Tensor Tensor::parameter(std::size_t rows, std::size_t cols, std::vector<double> value) {
  Tensor t = constant(rows, cols, std::move(value));
  t.node_->requires_grad = true;
  return t;
}

double Tensor::scalar_value() const {
  if (rows() != 1 || cols() != 1) {
    throw NumericError("scalar_value: tensor is " + shape_str(*this) + ", expected [1x1]");
  }
  return node_->value[0];
}

Mat Tensor::to_mat() const {
  Mat m(rows(), cols());
  m.a = node_->value;
  return m;
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

NoGradScope::NoGradScope() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradScope::~NoGradScope() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

BackwardStats backward(const Tensor& loss) {
  require_defined("backward", loss);
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw NumericError("backward: loss must be [1x1], got " + shape_str(loss));
  }
  BackwardStats stats;
  if (!loss.requires_grad()) return stats;

  // Iterative post-order topological sort over requires-grad ancestors.
  std::vector<detail::TensorNode*> order;
  std::unordered_set<detail::TensorNode*> seen;
  struct Frame {
    detail::TensorNode* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack{{loss.node().get(), 0}};
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    Frame& frame = stack.back();
    if (frame.next_parent < frame.node->parents.size()) {
      detail::TensorNode* parent = frame.node->parents[frame.next_parent++].get();
      if (parent->requires_grad && !seen.count(parent)) {
        seen.insert(parent);
        stack.push_back({parent, 0});
      }
    } else {
      order.push_back(frame.node);
      stack.pop_back();
    }
  }

  loss.node()->grad_buffer()[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorNode* node = *it;
    ++stats.visited_nodes;
    if (node->backprop) node->backprop(*node);
  }

  // Release the tape: interior nodes drop their links and buffers; leaves
  // keep accumulated gradients for the optimizer.
  for (detail::TensorNode* node : order) {
    if (!node->is_leaf()) {
      node->backprop = nullptr;
      node->parents.clear();
      node->grad.clear();
      node->grad.shrink_to_fit();
    }
  }
  return stats;
}

// ---- sparse ------------------------------------------------------------

SparseMatrix SparseMatrix::from_dense(const Mat& m) {
  SparseMatrix s;
  s.rows = m.rows;
  s.cols = m.cols;
  s.row_ptr.assign(m.rows + 1, 0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m.at(i, j) != 0.0) {
        s.col_idx.push_back(j);
        s.values.push_back(m.at(i, j));
      }
    }
    s.row_ptr[i + 1] = s.col_idx.size();
  }
  return s;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(cols + 1, 0);
  for (std::size_t c : col_idx) ++t.row_ptr[c + 1];
  for (std::size_t i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(col_idx.size());
  t.values.resize(values.size());
  std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      std::size_t pos = cursor[col_idx[k]]++;
      t.col_idx[pos] = r;
      t.values[pos] = values[k];
    }
  }
  return t;
}

// ---- ops ---------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.cols() != b.rows()) {
    throw NumericError("matmul: shapes " + shape_str(a) + " x " + shape_str(b) +
                       " are incompatible");
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = pa[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = pb + p * n;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return Tensor::make_node("matmul", m, n, std::move(out), {a, b},
                           [m, k, n](detail::TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    const std::vector<double>& g = self.grad;
    if (pa->requires_grad) {
      std::vector<double>& ga = pa->grad_buffer();
      // dA += G * B^T
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * pb->value[p * n + j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (pb->requires_grad) {
      std::vector<double>& gb = pb->grad_buffer();
      // dB += A^T * G
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = pa->value[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& x) {
  require_defined("transpose", x);
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x.data()[i * n + j];
  return Tensor::make_node("transpose", n, m, std::move(out), {x},
                           [m, n](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& gp = p->grad_buffer();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) gp[i * n + j] += self.grad[j * m + i];
  });
}

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                       " differ");
  }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_defined("add", a);
  require_defined("add", b);
  require_same_shape("add", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Tensor::make_node("add", a.rows(), a.cols(), std::move(out), {a, b},
                           [](detail::TensorNode& self) {
    for (auto& p : self.parents) {
      if (!p->requires_grad) continue;
      std::vector<double>& gp = p->grad_buffer();
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_defined("sub", a);
  require_defined("sub", b);
  require_same_shape("sub", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return Tensor::make_node("sub", a.rows(), a.cols(), std::move(out), {a, b},
                           [](detail::TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad) {
      std::vector<double>& g = pa->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      std::vector<double>& g = pb->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_defined("mul", a);
  require_defined("mul", b);
  require_same_shape("mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return Tensor::make_node("mul", a.rows(), a.cols(), std::move(out), {a, b},
                           [](detail::TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad) {
      std::vector<double>& g = pa->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb->value[i];
    }
    if (pb->requires_grad) {
      std::vector<double>& g = pb->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa->value[i];
    }
  });
}

Tensor scale(const Tensor& x, double c) {
  require_defined("scale", x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x.data()[i];
  return Tensor::make_node("scale", x.rows(), x.cols(), std::move(out), {x},
                           [c](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * self.grad[i];
  });
}

Tensor add_const(const Tensor& x, double c) {
  require_defined("add_const", x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] + c;
  return Tensor::make_node("add_const", x.rows(), x.cols(), std::move(out), {x},
                           [](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor add_bias_row(const Tensor& m, const Tensor& bias) {
  require_defined("add_bias_row", m);
  require_defined("add_bias_row", bias);
  if (bias.rows() != 1 || bias.cols() != m.cols()) {
    throw NumericError("add_bias_row: bias " + shape_str(bias) + " does not broadcast over " +
                       shape_str(m));
  }
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = m.data()[i * cols + j] + bias.data()[j];
  return Tensor::make_node("add_bias_row", rows, cols, std::move(out), {m, bias},
                           [rows, cols](detail::TensorNode& self) {
    auto& pm = self.parents[0];
    auto& pb = self.parents[1];
    if (pm->requires_grad) {
      std::vector<double>& g = pm->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      std::vector<double>& g = pb->grad_buffer();
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) g[j] += self.grad[i * cols + j];
    }
  });
}

Tensor scalar_mul(const Tensor& s, const Tensor& x) {
  require_defined("scalar_mul", s);
  require_defined("scalar_mul", x);
  if (s.rows() != 1 || s.cols() != 1) {
    throw NumericError("scalar_mul: scalar operand is " + shape_str(s) + ", expected [1x1]");
  }
  const double sv = s.data()[0];
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sv * x.data()[i];
  return Tensor::make_node("scalar_mul", x.rows(), x.cols(), std::move(out), {s, x},
                           [](detail::TensorNode& self) {
    auto& ps = self.parents[0];
    auto& px = self.parents[1];
    if (ps->requires_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * px->value[i];
      ps->grad_buffer()[0] += acc;
    }
    if (px->requires_grad) {
      const double sv = ps->value[0];
      std::vector<double>& g = px->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sv * self.grad[i];
    }
  });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_defined("concat_cols", a);
  require_defined("concat_cols", b);
  if (a.rows() != b.rows()) {
    throw NumericError("concat_cols: row counts of " + shape_str(a) + " and " + shape_str(b) +
                       " differ");
  }
  const std::size_t rows = a.rows(), ca = a.cols(), cb = b.cols();
  std::vector<double> out(rows * (ca + cb));
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy_n(a.data().begin() + i * ca, ca, out.begin() + i * (ca + cb));
    std::copy_n(b.data().begin() + i * cb, cb, out.begin() + i * (ca + cb) + ca);
  }
  return Tensor::make_node("concat_cols", rows, ca + cb, std::move(out), {a, b},
                           [rows, ca, cb](detail::TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad) {
      std::vector<double>& g = pa->grad_buffer();
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < ca; ++j) g[i * ca + j] += self.grad[i * (ca + cb) + j];
    }
    if (pb->requires_grad) {
      std::vector<double>& g = pb->grad_buffer();
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cb; ++j) g[i * cb + j] += self.grad[i * (ca + cb) + ca + j];
    }
  });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  require_defined("concat_rows", a);
  require_defined("concat_rows", b);
  if (a.cols() != b.cols()) {
    throw NumericError("concat_rows: column counts of " + shape_str(a) + " and " + shape_str(b) +
                       " differ");
  }
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  const std::size_t na = a.size();
  return Tensor::make_node("concat_rows", a.rows() + b.rows(), a.cols(), std::move(out), {a, b},
                           [na](detail::TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad) {
      std::vector<double>& g = pa->grad_buffer();
      for (std::size_t i = 0; i < na; ++i) g[i] += self.grad[i];
    }
    if (pb->requires_grad) {
      std::vector<double>& g = pb->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[na + i];
    }
  });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require_defined("slice_rows", x);
  if (begin > end || end > x.rows()) {
    throw NumericError("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                       ") out of bounds for " + shape_str(x));
  }
  const std::size_t cols = x.cols();
  std::vector<double> out(x.data().begin() + begin * cols, x.data().begin() + end * cols);
  return Tensor::make_node("slice_rows", end - begin, cols, std::move(out), {x},
                           [begin, cols](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * cols + i] += self.grad[i];
  });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  require_defined("slice_cols", x);
  if (begin > end || end > x.cols()) {
    throw NumericError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                       ") out of bounds for " + shape_str(x));
  }
  const std::size_t rows = x.rows(), cols = x.cols(), width = end - begin;
  std::vector<double> out(rows * width);
  for (std::size_t i = 0; i < rows; ++i)
    std::copy_n(x.data().begin() + i * cols + begin, width, out.begin() + i * width);
  return Tensor::make_node("slice_cols", rows, width, std::move(out), {x},
                           [begin, rows, cols, width](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < width; ++j) g[i * cols + begin + j] += self.grad[i * width + j];
  });
}

Tensor mean_rows(const Tensor& x) {
  require_defined("mean_rows", x);
  if (x.rows() == 0) throw NumericError("mean_rows: empty tensor");
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> out(n, 0.0);
  std::vector<double> column(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) column[i] = x.data()[i * n + j];
    std::sort(column.begin(), column.end());
    double acc = 0.0;
    for (double v : column) acc += v;
    out[j] = acc / static_cast<double>(m);
  }
  return Tensor::make_node("mean_rows", 1, n, std::move(out), {x},
                           [m, n](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += inv * self.grad[j];
  });
}

Tensor sum_all(const Tensor& x) {
  require_defined("sum_all", x);
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  return Tensor::make_node("sum_all", 1, 1, {acc}, {x}, [](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    const double gv = self.grad[0];
    for (double& x : g) x += gv;
  });
}

Tensor gather_rows(const Tensor& table, const std::vector<std::size_t>& indices) {
  require_defined("gather_rows", table);
  const std::size_t n = table.cols();
  for (std::size_t idx : indices) {
    if (idx >= table.rows()) {
      throw NumericError("gather_rows: index " + std::to_string(idx) + " out of range for " +
                         shape_str(table));
    }
  }
  std::vector<double> out(indices.size() * n);
  for (std::size_t i = 0; i < indices.size(); ++i)
    std::copy_n(table.data().begin() + indices[i] * n, n, out.begin() + i * n);
  return Tensor::make_node("gather_rows", indices.size(), n, std::move(out), {table},
                           [indices, n](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < indices.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) g[indices[i] * n + j] += self.grad[i * n + j];
  });
}

Tensor spmm(const std::shared_ptr<const SparseMatrix>& s, const Tensor& x) {
  require_defined("spmm", x);
  if (!s) throw NumericError("spmm: null sparse matrix");
  if (s->cols != x.rows()) {
    throw NumericError("spmm: shapes [" + std::to_string(s->rows) + "x" + std::to_string(s->cols) +
                       "] x " + shape_str(x) + " are incompatible");
  }
  const std::size_t n = x.cols();
  std::vector<double> out(s->rows * n, 0.0);
  for (std::size_t i = 0; i < s->rows; ++i) {
    for (std::size_t k = s->row_ptr[i]; k < s->row_ptr[i + 1]; ++k) {
      const double v = s->values[k];
      const double* xrow = x.data().data() + s->col_idx[k] * n;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += v * xrow[j];
    }
  }
  // dX += S^T * G
  std::shared_ptr<const SparseMatrix> st;
  if (x.requires_grad() && grad_enabled()) {
    st = std::make_shared<const SparseMatrix>(s->transposed());
  }
  return Tensor::make_node("spmm", s->rows, n, std::move(out), {x},
                           [st, n](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < st->rows; ++i) {
      for (std::size_t k = st->row_ptr[i]; k < st->row_ptr[i + 1]; ++k) {
        const double v = st->values[k];
        const double* grow = self.grad.data() + st->col_idx[k] * n;
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += v * grow[j];
      }
    }
  });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  require_defined("leaky_relu", x);
  if (!(slope > 0.0 && slope < 1.0)) {
    throw NumericError("leaky_relu: slope must be in (0, 1)");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = x.data()[i];
    out[i] = v >= 0.0 ? v : slope * v;
  }
  return Tensor::make_node("leaky_relu", x.rows(), x.cols(), std::move(out), {x},
                           [slope](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * (p->value[i] >= 0.0 ? 1.0 : slope);
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  require_defined("sigmoid", x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = x.data()[i];
    if (v >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      out[i] = e / (1.0 + e);
    }
  }
  return Tensor::make_node("sigmoid", x.rows(), x.cols(), std::move(out), {x},
                           [](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = self.value[i];
      g[i] += self.grad[i] * y * (1.0 - y);
    }
  });
}

Tensor softmax_rows(const Tensor& x) {
  require_defined("softmax_rows", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (n == 0) throw NumericError("softmax_rows: zero columns");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = x.data().data() + i * n;
    double mx = row[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = std::exp(row[j] - mx);
      denom += out[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= denom;
  }
  return Tensor::make_node("softmax_rows", m, n, std::move(out), {x},
                           [m, n](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < m; ++i) {
      const double* prob = self.value.data() + i * n;
      const double* gout = self.grad.data() + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += gout[j] * prob[j];
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += prob[j] * (gout[j] - dot);
    }
  });
}

Tensor row_normalize(const Tensor& x, double eps) {
  require_defined("row_normalize", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (n == 0) throw NumericError("row_normalize: zero columns");
  std::vector<double> out(x.size());
  std::vector<double> inv_sigma(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = x.data().data() + i * n;
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += row[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(n);
    inv_sigma[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = (row[j] - mean) * inv_sigma[i];
  }
  return Tensor::make_node("row_normalize", m, n, std::move(out), {x},
                           [m, n, inv_sigma](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < m; ++i) {
      const double* y = self.value.data() + i * n;
      const double* gout = self.grad.data() + i * n;
      double gmean = 0.0, gydot = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        gmean += gout[j];
        gydot += gout[j] * y[j];
      }
      gmean /= static_cast<double>(n);
      gydot /= static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        g[i * n + j] += inv_sigma[i] * (gout[j] - gmean - y[j] * gydot);
      }
    }
  });
}

Tensor log_elem(const Tensor& x) {
  require_defined("log_elem", x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(x.data()[i]);
  return Tensor::make_node("log", x.rows(), x.cols(), std::move(out), {x},
                           [](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / p->value[i];
  });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  require_defined("clamp", x);
  if (lo > hi) throw NumericError("clamp: lo > hi");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(std::max(x.data()[i], lo), hi);
  return Tensor::make_node("clamp", x.rows(), x.cols(), std::move(out), {x},
                           [lo, hi](detail::TensorNode& self) {
    auto& p = self.parents[0];
    if (!p->requires_grad) return;
    std::vector<double>& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = p->value[i];
      if (v >= lo && v <= hi) g[i] += self.grad[i];
    }
  });
}

}  // namespace den
