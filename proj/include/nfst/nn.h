// Copyright 2026 The nfst Authors.
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

#ifndef NFST_NN_H_
#define NFST_NN_H_

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nfst/common.h"

namespace nfst::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A named parameter. `grad` is mutable so a model handed out by const
// reference can still be differentiated through; freezing is a matter of not
// stepping the optimizer on it.
struct Tensor {
  std::string name;
  Matrix value;
  mutable Matrix grad;

  Tensor() = default;
  Tensor(std::string n, int rows, int cols)
      : name(std::move(n)),
        value(Matrix::Zero(rows, cols)),
        grad(Matrix::Zero(rows, cols)) {}

  int rows() const { return static_cast<int>(value.rows()); }
  int cols() const { return static_cast<int>(value.cols()); }
  void zero_grad() const { grad.setZero(value.rows(), value.cols()); }
};

// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) with fan_in = cols.
void init_uniform_fan_in(Tensor& t, Rng& rng);
void init_uniform(Tensor& t, double bound, Rng& rng);
// For W acting on [1; x]: zero bias column, fan-in bound elsewhere.
void init_biased(Tensor& t, Rng& rng);

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Nodes are appended in evaluation order; backward()
// walks them in reverse. With gradients disabled the tape only evaluates.
class Tape {
 public:
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  Var constant(Matrix value);
  Var scalar(double v);
  // Leaf bound to a parameter; at most one node per tensor per tape.
  Var param(const Tensor& t);

  const Matrix& value(Var v) const;
  double item(Var v) const;  // value of a 1x1 node
  int rows(Var v) const { return static_cast<int>(value(v).rows()); }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Seeds d(out)/d(out) = seed and accumulates into parameter grads.
  void backward(Var out, double seed = 1.0);

  // Used by op implementations.
  using Backward = std::function<void(Tape&, const Matrix& grad,
                                      const Matrix& out)>;
  Var push(Matrix value, Backward back);
  void accumulate(Var v, const Matrix& g);

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;
    const Tensor* param = nullptr;
    Matrix grad;
    Backward back;
  };
  bool grad_enabled_;
  std::vector<Node> nodes_;
  std::vector<std::pair<const Tensor*, int>> params_;
};

// Elementwise and linear algebra. Shapes must agree; mismatches throw
// kShapeMismatch.
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);  // elementwise
Var scale(Tape& t, Var a, double c);
Var affine(Tape& t, Var a, double alpha, double beta);  // alpha*a + beta
Var matmul(Tape& t, Var a, Var b);
Var matmul_tn(Tape& t, Var a, Var b);  // a^T b
Var sigmoid(Tape& t, Var a);
Var tanh(Tape& t, Var a);
Var exp(Tape& t, Var a);
Var log(Tape& t, Var a);
Var concat(Tape& t, std::span<const Var> parts);  // stack rows
Var hstack(Tape& t, std::span<const Var> columns);
Var slice_rows(Tape& t, Var a, int start, int count);
Var column(Tape& t, Var a, int j);
Var dot(Tape& t, Var a, Var b);  // 1x1
Var sum(Tape& t, Var a);         // 1x1
Var gather(Tape& t, Var a, std::span<const int> rows);  // column vector
Var pick(Tape& t, Var a, int row);                      // 1x1
Var log_softmax(Tape& t, Var a);
Var softmax(Tape& t, Var a);
Var log_sum_exp(Tape& t, Var a);  // 1x1
Var add_const(Tape& t, Var a, const Matrix& c);
// Inverted dropout; identity when !train or rate == 0.
Var dropout(Tape& t, Var a, double rate, bool train, Rng* rng);

// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|,
// floor), with central differences of step h.
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "tensor[r,c]"
  int checked = 0;
};
GradCheckResult grad_check(const std::function<Var(Tape&)>& f,
                           std::span<Tensor* const> params, double h = 1e-5,
                           double floor = 1e-3);

}  // namespace nfst::nn

#endif  // NFST_NN_H_
