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

#include "nfst/nn.h"

#include <cmath>

namespace nfst::nn {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

void init_uniform(Tensor& t, double bound, Rng& rng) {
  for (int c = 0; c < t.cols(); ++c) {
    for (int r = 0; r < t.rows(); ++r) {
      t.value(r, c) = rng.uniform(-bound, bound);
    }
  }
  t.zero_grad();
}

void init_uniform_fan_in(Tensor& t, Rng& rng) {
  init_uniform(t, 1.0 / std::sqrt(static_cast<double>(t.cols())), rng);
}

Var Tape::push(Matrix value, Backward back) {
  Node n;
  n.value = std::move(value);
  if (grad_enabled_) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{size() - 1};
}

Var Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

Var Tape::param(const Tensor& t) {
  for (const auto& [p, id] : params_) {
    if (p == &t) return Var{id};
  }
  Node n;
  n.external = &t.value;
  n.param = &t;
  nodes_.push_back(std::move(n));
  params_.emplace_back(&t, size() - 1);
  return Var{size() - 1};
}

const Matrix& Tape::value(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.external ? *n.external : n.value;
}

double Tape::item(Var v) const {
  const Matrix& m = value(v);
  if (m.size() != 1) throw Error(ErrorKind::kShapeMismatch, "item of non-1x1");
  return m(0, 0);
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.id];
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var out, double seed) {
  if (!grad_enabled_) {
    throw Error(ErrorKind::kUnsupported, "backward on a no-grad tape");
  }
  const Matrix& v = value(out);
  accumulate(out, Matrix::Constant(v.rows(), v.cols(), seed));
  for (int i = out.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0) continue;
    if (n.param) {
      if (n.param->grad.size() == 0) n.param->zero_grad();
      n.param->grad += n.grad;
    } else if (n.back) {
      // The closure may append to grads of earlier nodes only.
      const Matrix g = std::move(n.grad);
      n.back(*this, g, n.value);
    }
    n.grad.resize(0, 0);
  }
}

Var add(Tape& t, Var a, Var b) {
  require_same_shape(t.value(a), t.value(b), "add");
  return t.push(t.value(a) + t.value(b), [a, b](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(Tape& t, Var a, Var b) {
  require_same_shape(t.value(a), t.value(b), "sub");
  return t.push(t.value(a) - t.value(b), [a, b](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var mul(Tape& t, Var a, Var b) {
  require_same_shape(t.value(a), t.value(b), "mul");
  return t.push(t.value(a).cwiseProduct(t.value(b)),
                [a, b](Tape& t, const Matrix& g, const Matrix&) {
                  t.accumulate(a, g.cwiseProduct(t.value(b)));
                  t.accumulate(b, g.cwiseProduct(t.value(a)));
                });
}

Var scale(Tape& t, Var a, double c) {
  return t.push(t.value(a) * c,
                [a, c](Tape& t, const Matrix& g, const Matrix&) { t.accumulate(a, g * c); });
}

Var affine(Tape& t, Var a, double alpha, double beta) {
  Matrix v = (t.value(a) * alpha).array() + beta;
  return t.push(std::move(v), [a, alpha](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, g * alpha);
  });
}

Var add_const(Tape& t, Var a, const Matrix& c) {
  require_same_shape(t.value(a), c, "add_const");
  return t.push(t.value(a) + c,
                [a](Tape& t, const Matrix& g, const Matrix&) { t.accumulate(a, g); });
}

Var matmul(Tape& t, Var a, Var b) {
  const Matrix& va = t.value(a);
  const Matrix& vb = t.value(b);
  if (va.cols() != vb.rows()) {
    throw Error(ErrorKind::kShapeMismatch,
                "matmul: " + std::to_string(va.rows()) + "x" +
                    std::to_string(va.cols()) + " * " +
                    std::to_string(vb.rows()) + "x" +
                    std::to_string(vb.cols()));
  }
  return t.push(va * vb, [a, b](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, g * t.value(b).transpose());
    t.accumulate(b, t.value(a).transpose() * g);
  });
}

Var matmul_tn(Tape& t, Var a, Var b) {
  const Matrix& va = t.value(a);
  const Matrix& vb = t.value(b);
  if (va.rows() != vb.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "matmul_tn: row mismatch");
  }
  return t.push(va.transpose() * vb, [a, b](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, t.value(b) * g.transpose());
    t.accumulate(b, t.value(a) * g);
  });
}

Var sigmoid(Tape& t, Var a) {
  Matrix v = (1.0 / (1.0 + (-t.value(a).array()).exp())).matrix();
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix& y) {
    t.accumulate(a, (g.array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var tanh(Tape& t, Var a) {
  Matrix v = t.value(a).array().tanh().matrix();
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix& y) {
    t.accumulate(a, (g.array() * (1.0 - y.array().square())).matrix());
  });
}

Var exp(Tape& t, Var a) {
  Matrix v = t.value(a).array().exp().matrix();
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix& y) {
    t.accumulate(a, g.cwiseProduct(y));
  });
}

Var log(Tape& t, Var a) {
  Matrix v = t.value(a).array().log().matrix();
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, (g.array() / t.value(a).array()).matrix());
  });
}

Var concat(Tape& t, std::span<const Var> parts) {
  int rows = 0;
  if (parts.empty()) throw Error(ErrorKind::kShapeMismatch, "concat of nothing");
  const int cols = static_cast<int>(t.value(parts[0]).cols());
  for (Var p : parts) {
    if (t.value(p).cols() != cols) {
      throw Error(ErrorKind::kShapeMismatch, "concat: column mismatch");
    }
    rows += t.rows(p);
  }
  Matrix v(rows, cols);
  int r = 0;
  for (Var p : parts) {
    v.middleRows(r, t.rows(p)) = t.value(p);
    r += t.rows(p);
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return t.push(std::move(v), [ps](Tape& t, const Matrix& g, const Matrix&) {
    int r = 0;
    for (Var p : ps) {
      const int n = t.rows(p);
      t.accumulate(p, g.middleRows(r, n));
      r += n;
    }
  });
}

Var hstack(Tape& t, std::span<const Var> columns) {
  if (columns.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "hstack of nothing");
  }
  const int rows = t.rows(columns[0]);
  Matrix v(rows, static_cast<int>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const Matrix& col = t.value(columns[c]);
    if (col.rows() != rows || col.cols() != 1) {
      throw Error(ErrorKind::kShapeMismatch, "hstack: column shape");
    }
    v.col(static_cast<int>(c)) = col;
  }
  std::vector<Var> cs(columns.begin(), columns.end());
  return t.push(std::move(v), [cs](Tape& t, const Matrix& g, const Matrix&) {
    for (std::size_t c = 0; c < cs.size(); ++c) {
      t.accumulate(cs[c], g.col(static_cast<int>(c)));
    }
  });
}

Var slice_rows(Tape& t, Var a, int start, int count) {
  const Matrix& va = t.value(a);
  if (start < 0 || count < 0 || start + count > va.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "slice_rows out of range");
  }
  return t.push(va.middleRows(start, count),
                [a, start, count](Tape& t, const Matrix& g, const Matrix&) {
                  const Matrix& va = t.value(a);
                  Matrix full = Matrix::Zero(va.rows(), va.cols());
                  full.middleRows(start, count) = g;
                  t.accumulate(a, full);
                });
}

Var column(Tape& t, Var a, int j) {
  const Matrix& va = t.value(a);
  if (j < 0 || j >= va.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "column out of range");
  }
  return t.push(va.col(j), [a, j](Tape& t, const Matrix& g, const Matrix&) {
    const Matrix& va = t.value(a);
    Matrix full = Matrix::Zero(va.rows(), va.cols());
    full.col(j) = g;
    t.accumulate(a, full);
  });
}

Var dot(Tape& t, Var a, Var b) {
  require_same_shape(t.value(a), t.value(b), "dot");
  Matrix v(1, 1);
  v(0, 0) = t.value(a).cwiseProduct(t.value(b)).sum();
  return t.push(std::move(v), [a, b](Tape& t, const Matrix& g, const Matrix&) {
    const double s = g(0, 0);
    t.accumulate(a, t.value(b) * s);
    t.accumulate(b, t.value(a) * s);
  });
}

Var sum(Tape& t, Var a) {
  Matrix v(1, 1);
  v(0, 0) = t.value(a).sum();
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix&) {
    const Matrix& va = t.value(a);
    t.accumulate(a, Matrix::Constant(va.rows(), va.cols(), g(0, 0)));
  });
}

Var gather(Tape& t, Var a, std::span<const int> rows) {
  const Matrix& va = t.value(a);
  if (va.cols() != 1) throw Error(ErrorKind::kShapeMismatch, "gather: vector");
  Matrix v(static_cast<int>(rows.size()), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= va.rows()) {
      throw Error(ErrorKind::kShapeMismatch, "gather index out of range");
    }
    v(static_cast<int>(i), 0) = va(rows[i], 0);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  return t.push(std::move(v), [a, idx](Tape& t, const Matrix& g, const Matrix&) {
    Matrix full = Matrix::Zero(t.rows(a), 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      full(idx[i], 0) += g(static_cast<int>(i), 0);
    }
    t.accumulate(a, full);
  });
}

Var pick(Tape& t, Var a, int row) {
  const Matrix& va = t.value(a);
  if (row < 0 || row >= va.rows() || va.cols() != 1) {
    throw Error(ErrorKind::kShapeMismatch, "pick out of range");
  }
  Matrix v(1, 1);
  v(0, 0) = va(row, 0);
  return t.push(std::move(v), [a, row](Tape& t, const Matrix& g, const Matrix&) {
    Matrix full = Matrix::Zero(t.rows(a), 1);
    full(row, 0) = g(0, 0);
    t.accumulate(a, full);
  });
}

Var log_softmax(Tape& t, Var a) {
  const Matrix& va = t.value(a);
  if (va.cols() != 1 || va.rows() == 0) {
    throw Error(ErrorKind::kShapeMismatch, "log_softmax: nonempty vector");
  }
  const double m = va.maxCoeff();
  const double lse = m + std::log((va.array() - m).exp().sum());
  Matrix v = (va.array() - lse).matrix();
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix& y) {
    const Matrix p = y.array().exp().matrix();
    t.accumulate(a, g - p * g.sum());
  });
}

Var softmax(Tape& t, Var a) {
  const Matrix& va = t.value(a);
  if (va.cols() != 1 || va.rows() == 0) {
    throw Error(ErrorKind::kShapeMismatch, "softmax: nonempty vector");
  }
  const double m = va.maxCoeff();
  Matrix e = (va.array() - m).exp().matrix();
  e /= e.sum();
  return t.push(std::move(e), [a](Tape& t, const Matrix& g, const Matrix& p) {
    const double inner = p.cwiseProduct(g).sum();
    t.accumulate(a, (p.array() * (g.array() - inner)).matrix());
  });
}

Var log_sum_exp(Tape& t, Var a) {
  const Matrix& va = t.value(a);
  if (va.size() == 0) throw Error(ErrorKind::kShapeMismatch, "lse of nothing");
  const double m = va.maxCoeff();
  Matrix v(1, 1);
  v(0, 0) = m + std::log((va.array() - m).exp().sum());
  return t.push(std::move(v), [a](Tape& t, const Matrix& g, const Matrix&) {
    const Matrix& va = t.value(a);
    const double m = va.maxCoeff();
    Matrix p = (va.array() - m).exp().matrix();
    p /= p.sum();
    t.accumulate(a, p * g(0, 0));
  });
}

Var dropout(Tape& t, Var a, double rate, bool train, Rng* rng) {
  if (!train || rate <= 0.0) return a;
  if (!rng) throw Error(ErrorKind::kUnsupported, "dropout needs an Rng");
  const Matrix& va = t.value(a);
  Matrix mask(va.rows(), va.cols());
  const double keep = 1.0 - rate;
  for (int c = 0; c < va.cols(); ++c) {
    for (int r = 0; r < va.rows(); ++r) {
      mask(r, c) = rng->uniform() < keep ? 1.0 / keep : 0.0;
    }
  }
  Matrix v = va.cwiseProduct(mask);
  return t.push(std::move(v), [a, mask](Tape& t, const Matrix& g, const Matrix&) {
    t.accumulate(a, g.cwiseProduct(mask));
  });
}

GradCheckResult grad_check(const std::function<Var(Tape&)>& f,
                           std::span<Tensor* const> params, double h,
                           double floor) {
  for (Tensor* p : params) p->zero_grad();
  {
    Tape tape(true);
    const Var out = f(tape);
    tape.backward(out);
  }
  std::vector<Matrix> analytic;
  for (Tensor* p : params) analytic.push_back(p->grad);

  auto eval = [&]() {
    Tape tape(false);
    return tape.item(f(tape));
  };
  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    for (int c = 0; c < p.cols(); ++c) {
      for (int r = 0; r < p.rows(); ++r) {
        const double orig = p.value(r, c);
        p.value(r, c) = orig + h;
        const double up = eval();
        p.value(r, c) = orig - h;
        const double down = eval();
        p.value(r, c) = orig;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[k](r, c);
        const double denom =
            std::max({std::abs(a), std::abs(numeric), floor});
        const double err = std::abs(a - numeric) / denom;
        ++result.checked;
        if (err > result.max_rel_error) {
          result.max_rel_error = err;
          result.worst = p.name + "[" + std::to_string(r) + "," +
                         std::to_string(c) + "]";
        }
      }
    }
  }
  for (Tensor* p : params) p->zero_grad();
  return result;
}

}  // namespace nfst::nn
