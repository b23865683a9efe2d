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

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "den/mat.hpp"

namespace den {

namespace detail {

struct TensorNode {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;

  std::size_t size() const { return rows * cols; }
  bool is_leaf() const { return parents.empty(); }
  std::vector<double>& grad_buffer();  // zero-filled on first use
};

}  // namespace detail

// Dense 2-D double tensor with reverse-mode gradients. A Tensor is a shared
// handle to a tape node; ops build the tape as they run (define-by-run) and
// backward() releases it. Every forward op checks its output for NaN/Inf
// and throws NumericError on the first non-finite value.
//
// A tape belongs to one thread. Parameters (leaves) may be shared across
// sequential forwards; their gradients accumulate until zero_grad().
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor constant(std::size_t rows, std::size_t cols, std::vector<double> value);
  static Tensor constant(const Mat& m);
  static Tensor scalar(double v);
  // Leaf with requires_grad set; the unit all optimizer updates act on.
  static Tensor parameter(std::size_t rows, std::size_t cols, std::vector<double> value);

  bool defined() const { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->size(); }
  bool requires_grad() const { return node_->requires_grad; }

  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  double scalar_value() const;  // requires 1x1

  std::vector<double>& data() { return node_->value; }
  const std::vector<double>& data() const { return node_->value; }
  Mat to_mat() const;

  bool has_grad() const { return !node_->grad.empty(); }
  std::vector<double>& grad() { return node_->grad; }
  const std::vector<double>& grad() const { return node_->grad; }
  void ensure_grad() { node_->grad_buffer(); }
  void zero_grad();

  std::shared_ptr<detail::TensorNode> node() const { return node_; }

  // Extension point used by tests to register custom ops.
  static Tensor make_node(const char* op, std::size_t rows, std::size_t cols,
                          std::vector<double> value, std::vector<Tensor> parents,
                          std::function<void(detail::TensorNode&)> backprop);

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;
};

// Disables tape construction in its scope; forwards run value-only.
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

struct BackwardStats {
  std::size_t visited_nodes = 0;
};

// Reverse accumulation from a 1x1 loss. Gradients of all requires-grad
// ancestors are += accumulated; interior tape links are released afterward.
BackwardStats backward(const Tensor& loss);

// Compressed-row constant matrix for adjacency products; keeps the
// message-passing cost proportional to the edge count.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  static SparseMatrix from_dense(const Mat& m);
  SparseMatrix transposed() const;
};

// ---- ops ---------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& x, double c);
Tensor add_const(const Tensor& x, double c);
Tensor add_bias_row(const Tensor& m, const Tensor& bias);  // bias is 1 x n
Tensor scalar_mul(const Tensor& s, const Tensor& x);       // s is 1 x 1
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor stack_rows(const std::vector<Tensor>& parts);  // vertical concat, n-ary
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
// Column means over rows. Summation happens in sorted value order so the
// result is bitwise invariant under row permutations.
Tensor mean_rows(const Tensor& x);
Tensor sum_all(const Tensor& x);
Tensor gather_rows(const Tensor& table, const std::vector<std::size_t>& indices);
Tensor spmm(const std::shared_ptr<const SparseMatrix>& s, const Tensor& x);

Tensor leaky_relu(const Tensor& x, double slope);
Tensor sigmoid(const Tensor& x);
Tensor softmax_rows(const Tensor& x);
// Per-row standardization (zero mean, unit variance, no learned affine).
Tensor row_normalize(const Tensor& x, double eps = 1e-5);
Tensor log_elem(const Tensor& x);
Tensor clamp(const Tensor& x, double lo, double hi);

}  // namespace den
