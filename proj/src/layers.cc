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

#include "nfst/layers.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace nfst::nn {

Tensor& ParamSet::add(const std::string& name, int rows, int cols) {
  if (by_name_.count(name)) {
    throw Error(ErrorKind::kShapeMismatch, "duplicate parameter " + name);
  }
  tensors_.push_back(std::make_unique<Tensor>(name, rows, cols));
  by_name_[name] = tensors_.back().get();
  return *tensors_.back();
}

Tensor& ParamSet::get(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw Error(ErrorKind::kShapeMismatch, "no parameter " + name);
  }
  return *it->second;
}

const Tensor& ParamSet::get(const std::string& name) const {
  return const_cast<ParamSet*>(this)->get(name);
}

bool ParamSet::contains(const std::string& name) const {
  return by_name_.count(name) > 0;
}

std::vector<Tensor*> ParamSet::pointers() {
  std::vector<Tensor*> out;
  for (auto& t : tensors_) out.push_back(t.get());
  return out;
}

void ParamSet::zero_grad() const {
  for (const auto& t : tensors_) t->zero_grad();
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += static_cast<std::size_t>(t->value.size());
  return n;
}

void ParamSet::copy_values_from(const ParamSet& other) {
  for (auto& t : tensors_) {
    if (!other.contains(t->name)) continue;
    const Tensor& o = other.get(t->name);
    if (o.rows() == t->rows() && o.cols() == t->cols()) t->value = o.value;
  }
}

std::string ParamSet::digest() const {
  Fnv1a h;
  for (const auto& t : tensors_) {
    h.update(t->name);
    const std::int64_t shape[2] = {t->rows(), t->cols()};
    h.update(std::string_view(reinterpret_cast<const char*>(shape),
                              sizeof(shape)));
    h.update(std::string_view(reinterpret_cast<const char*>(t->value.data()),
                              sizeof(double) * t->value.size()));
  }
  return h.hex();
}

Var with_bias(Tape& t, Var x) {
  const Var parts[2] = {t.scalar(1.0), x};
  return concat(t, parts);
}

void init_biased(Tensor& t, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(
                                 std::max(1, t.cols() - 1)));
  for (int c = 0; c < t.cols(); ++c) {
    for (int r = 0; r < t.rows(); ++r) {
      t.value(r, c) = c == 0 ? 0.0 : rng.uniform(-bound, bound);
    }
  }
  t.zero_grad();
}

Linear::Linear(ParamSet& ps, const std::string& name, int in, int out)
    : w(&ps.add(name, out, in + 1)) {}

Var Linear::operator()(Tape& t, Var x) const {
  return matmul(t, t.param(*w), with_bias(t, x));
}

void Linear::init(Rng& rng) const { init_biased(*w, rng); }

Embedding::Embedding(ParamSet& ps, const std::string& name, int vocab,
                     int dim)
    : table(&ps.add(name, dim, vocab)) {}

Var Embedding::operator()(Tape& t, int index) const {
  if (index < 0 || index >= vocab()) {
    throw Error(ErrorKind::kUnknownSymbol,
                table->name + " index " + std::to_string(index));
  }
  return column(t, t.param(*table), index);
}

void Embedding::init(Rng& rng) const {
  init_uniform(*table, 1.0 / std::sqrt(static_cast<double>(dim())), rng);
}

std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::kGru:
      return "gru";
    case CellKind::kLstm:
      return "lstm";
    case CellKind::kRnn:
      return "rnn";
  }
  return "?";
}

CellKind cell_kind_from_string(const std::string& s) {
  if (s == "gru") return CellKind::kGru;
  if (s == "lstm") return CellKind::kLstm;
  if (s == "rnn") return CellKind::kRnn;
  throw Error(ErrorKind::kParse, "unknown cell kind " + s);
}

Cell::Cell(ParamSet& ps, const std::string& name, CellKind kind, int in,
           int hidden)
    : kind_(kind), in_(in), hidden_(hidden) {
  const int cols = 1 + in + hidden;
  switch (kind) {
    case CellKind::kGru:
      w_ = &ps.add(name + ".gates", 2 * hidden, cols);
      wn_ = &ps.add(name + ".cand", hidden, cols);
      break;
    case CellKind::kLstm:
      w_ = &ps.add(name + ".gates", 4 * hidden, cols);
      break;
    case CellKind::kRnn:
      w_ = &ps.add(name + ".gates", hidden, cols);
      break;
  }
}

void Cell::init(Rng& rng) const {
  init_biased(*w_, rng);
  if (wn_) init_biased(*wn_, rng);
}

CellState Cell::zero_state(Tape& t) const {
  CellState s;
  s.h = t.constant(Matrix::Zero(hidden_, 1));
  if (kind_ == CellKind::kLstm) s.c = t.constant(Matrix::Zero(hidden_, 1));
  return s;
}

CellState Cell::step(Tape& t, const CellState& s, Var x) const {
  const Var xs[3] = {t.scalar(1.0), x, s.h};
  const Var in = concat(t, xs);
  const Var pre = matmul(t, t.param(*w_), in);
  const int h = hidden_;
  CellState out;
  switch (kind_) {
    case CellKind::kGru: {
      const Var gates = sigmoid(t, pre);
      const Var z = slice_rows(t, gates, 0, h);
      const Var r = slice_rows(t, gates, h, h);
      const Var rh = mul(t, r, s.h);
      const Var ys[3] = {t.scalar(1.0), x, rh};
      const Var n = tanh(t, matmul(t, t.param(*wn_), concat(t, ys)));
      // (1 - z) n + z h
      out.h = add(t, mul(t, affine(t, z, -1.0, 1.0), n), mul(t, z, s.h));
      break;
    }
    case CellKind::kLstm: {
      const Var i = sigmoid(t, slice_rows(t, pre, 0, h));
      const Var f = sigmoid(t, slice_rows(t, pre, h, h));
      const Var g = tanh(t, slice_rows(t, pre, 2 * h, h));
      const Var o = sigmoid(t, slice_rows(t, pre, 3 * h, h));
      out.c = add(t, mul(t, f, s.c), mul(t, i, g));
      out.h = mul(t, o, tanh(t, out.c));
      break;
    }
    case CellKind::kRnn:
      out.h = tanh(t, pre);
      break;
  }
  return out;
}

std::vector<Var> bi_encode(Tape& t, const Cell& fwd, const Cell& bwd,
                           std::span<const Var> seq, const CellState& fwd0,
                           const CellState& bwd0) {
  const std::size_t n = seq.size();
  std::vector<Var> f(n), b(n);
  CellState s = fwd0;
  for (std::size_t i = 0; i < n; ++i) {
    s = fwd.step(t, s, seq[i]);
    f[i] = s.h;
  }
  s = bwd0;
  for (std::size_t i = n; i-- > 0;) {
    s = bwd.step(t, s, seq[i]);
    b[i] = s.h;
  }
  std::vector<Var> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Var parts[2] = {f[i], b[i]};
    out[i] = concat(t, parts);
  }
  return out;
}

Var attention_matrix(Tape& t, Var query, Var enc) {
  if (t.value(enc).cols() == 0) {
    throw Error(ErrorKind::kShapeMismatch, "attention over nothing");
  }
  const Var a = softmax(t, matmul_tn(t, enc, query));
  return matmul(t, enc, a);
}

Var attention(Tape& t, Var query, std::span<const Var> enc) {
  if (enc.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "attention over nothing");
  }
  return attention_matrix(t, query, hstack(t, enc));
}

Adam::Adam(std::vector<Tensor*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (Tensor* p : params_) {
    m_.push_back(Matrix::Zero(p->rows(), p->cols()));
    v_.push_back(Matrix::Zero(p->rows(), p->cols()));
  }
}

void Adam::step() {
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = *params_[k];
    if (p.grad.size() != p.value.size()) p.zero_grad();
    m_[k] = b1 * m_[k] + (1.0 - b1) * p.grad;
    v_[k] = b2 * v_[k] + (1.0 - b2) * p.grad.cwiseProduct(p.grad);
    const auto mhat = m_[k].array() / c1;
    const auto vhat = v_[k].array() / c2;
    p.value.array() -= config_.lr * mhat / (vhat.sqrt() + config_.eps);
  }
}

double grad_norm(std::span<Tensor* const> params) {
  double sq = 0.0;
  for (Tensor* p : params) {
    if (p->grad.size()) sq += p->grad.squaredNorm();
  }
  return std::sqrt(sq);
}

void scale_grads(std::span<Tensor* const> params, double factor) {
  for (Tensor* p : params) {
    if (p->grad.size()) p->grad *= factor;
  }
}

double clip_grad_norm(std::span<Tensor* const> params, double max_norm) {
  const double norm = grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) scale_grads(params, max_norm / norm);
  return norm;
}

namespace {

constexpr char kMagic[8] = {'N', 'F', 'S', 'T', 'C', 'K', 'P', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_str(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw Error(ErrorKind::kParse, "truncated checkpoint");
  return v;
}

std::string get_str(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  if (n > (1ull << 32)) throw Error(ErrorKind::kParse, "bad string length");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw Error(ErrorKind::kParse, "truncated checkpoint");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
  os.write(kMagic, sizeof(kMagic));
  put_str(os, ck.kind);
  put_u64(os, ck.seed);
  put_str(os, ck.config_digest);
  put_u64(os, ck.metadata.size());
  for (const auto& [k, v] : ck.metadata) {
    put_str(os, k);
    put_str(os, v);
  }
  put_u64(os, ck.tensors.size());
  for (const auto& [name, m] : ck.tensors) {
    put_str(os, name);
    put_u64(os, static_cast<std::uint64_t>(m.rows()));
    put_u64(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
  }
  if (!os) throw Error(ErrorKind::kIo, "checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& is) {
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kParse, "not a checkpoint");
  }
  Checkpoint ck;
  ck.kind = get_str(is);
  ck.seed = get_u64(is);
  ck.config_digest = get_str(is);
  const std::uint64_t nmeta = get_u64(is);
  for (std::uint64_t i = 0; i < nmeta; ++i) {
    std::string k = get_str(is);
    ck.metadata[k] = get_str(is);
  }
  const std::uint64_t ntensors = get_u64(is);
  for (std::uint64_t i = 0; i < ntensors; ++i) {
    std::string name = get_str(is);
    const auto rows = static_cast<Eigen::Index>(get_u64(is));
    const auto cols = static_cast<Eigen::Index>(get_u64(is));
    if (rows < 0 || cols < 0 || rows * cols > (1ll << 30)) {
      throw Error(ErrorKind::kParse, "bad tensor shape");
    }
    Matrix m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!is) throw Error(ErrorKind::kParse, "truncated checkpoint");
    ck.tensors[name] = std::move(m);
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path);
  write_checkpoint(os, ck);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot read " + path);
  return read_checkpoint(is);
}

void store_params(Checkpoint& ck, const ParamSet& ps) {
  for (const auto& t : ps.tensors()) ck.tensors[t->name] = t->value;
}

void load_params(const Checkpoint& ck, ParamSet& ps) {
  for (const auto& t : ps.tensors()) {
    auto it = ck.tensors.find(t->name);
    if (it == ck.tensors.end()) {
      throw Error(ErrorKind::kShapeMismatch, "checkpoint lacks " + t->name);
    }
    if (it->second.rows() != t->rows() || it->second.cols() != t->cols()) {
      throw Error(ErrorKind::kShapeMismatch, "shape of " + t->name);
    }
    t->value = it->second;
    t->zero_grad();
  }
}

}  // namespace nfst::nn
