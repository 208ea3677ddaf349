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

#ifndef NFST_LAYERS_H_
#define NFST_LAYERS_H_

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nfst/nn.h"

namespace nfst::nn {

// Owns tensors by name with stable addresses.
class ParamSet {
 public:
  Tensor& add(const std::string& name, int rows, int cols);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<std::unique_ptr<Tensor>>& tensors() const {
    return tensors_;
  }
  std::vector<Tensor*> pointers();
  void zero_grad() const;
  std::size_t num_values() const;
  // Copies values of tensors with matching names and shapes.
  void copy_values_from(const ParamSet& other);
  // FNV over names, shapes and raw values.
  std::string digest() const;

 private:
  std::vector<std::unique_ptr<Tensor>> tensors_;
  std::map<std::string, Tensor*> by_name_;
};

// y = W [1; x]
struct Linear {
  Tensor* w = nullptr;
  Linear() = default;
  Linear(ParamSet& ps, const std::string& name, int in, int out);
  Var operator()(Tape& t, Var x) const;
  void init(Rng& rng) const;
  int in() const { return w->cols() - 1; }
  int out() const { return w->rows(); }
};

// Var with a leading 1 for biased products.
Var with_bias(Tape& t, Var x);

struct Embedding {
  Tensor* table = nullptr;  // dim x vocab
  Embedding() = default;
  Embedding(ParamSet& ps, const std::string& name, int vocab, int dim);
  Var operator()(Tape& t, int index) const;
  void init(Rng& rng) const;
  int dim() const { return table->rows(); }
  int vocab() const { return table->cols(); }
};

enum class CellKind { kGru, kLstm, kRnn };
std::string to_string(CellKind kind);
CellKind cell_kind_from_string(const std::string& s);

struct CellState {
  Var h;
  Var c;  // LSTM only
};

// Recurrent cell over column vectors. Gates are W [1; x; h].
class Cell {
 public:
  Cell() = default;
  Cell(ParamSet& ps, const std::string& name, CellKind kind, int in,
       int hidden);
  CellState step(Tape& t, const CellState& s, Var x) const;
  CellState zero_state(Tape& t) const;
  void init(Rng& rng) const;
  CellKind kind() const { return kind_; }
  int hidden() const { return hidden_; }
  int in() const { return in_; }

 private:
  CellKind kind_ = CellKind::kGru;
  int in_ = 0;
  int hidden_ = 0;
  Tensor* w_ = nullptr;   // gates stacked, (g*hidden) x (1 + in + hidden)
  Tensor* wn_ = nullptr;  // GRU candidate, hidden x (1 + in + hidden)
};

// Per-position concatenation [forward state after i; backward state after
// reading from the end down to i].
std::vector<Var> bi_encode(Tape& t, const Cell& fwd,
                           const Cell& bwd, std::span<const Var> seq,
                           const CellState& fwd0,
                           const CellState& bwd0);

// sum_i softmax_i(query . enc_i) enc_i. Throws kShapeMismatch when empty.
Var attention(Tape& t, Var query, std::span<const Var> enc);
// Same, with the encodings already stacked as columns.
Var attention_matrix(Tape& t, Var query, Var enc);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamConfig config);
  // One update from the current grads; does not clear them.
  void step();
  long steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  std::vector<Tensor*> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  AdamConfig config_;
  long t_ = 0;
};

// Global L2 norm of grads before clipping; rescales them when above max_norm.
double clip_grad_norm(std::span<Tensor* const> params, double max_norm);
double grad_norm(std::span<Tensor* const> params);
void scale_grads(std::span<Tensor* const> params, double factor);

struct Checkpoint {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::map<std::string, std::string> metadata;
  // Name -> matrix.
  std::map<std::string, Matrix> tensors;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

void store_params(Checkpoint& ck, const ParamSet& ps);
// Every tensor in ps must be present with the same shape.
void load_params(const Checkpoint& ck, ParamSet& ps);

}  // namespace nfst::nn

#endif  // NFST_LAYERS_H_
