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

#ifndef NFST_SCORER_H_
#define NFST_SCORER_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nfst/common.h"
#include "nfst/lattice.h"
#include "nfst/layers.h"

namespace nfst {

struct ScorerConfig {
  int num_marks = 0;
  int embed_dim = 32;
  int hidden = 256;
  int layers = 2;
};

// Locally normalized model over mark strings: an LSTM stack with a learned
// initial state reads marks and predicts the next mark or EOS (index
// num_marks) from W [1; h].
class Scorer {
 public:
  Scorer() = default;
  Scorer(const ScorerConfig& config, Rng& rng);
  Scorer(const Scorer&) = delete;
  Scorer& operator=(const Scorer&) = delete;
  Scorer(Scorer&&) = default;
  Scorer& operator=(Scorer&&) = default;

  const ScorerConfig& config() const { return config_; }
  nn::ParamSet& params() { return *params_; }
  const nn::ParamSet& params() const { return *params_; }
  int eos() const { return config_.num_marks; }

  struct Options {
    bool train = false;
    double dropout = 0.0;
    double label_smoothing = 0.0;
    Rng* rng = nullptr;
  };
  // Sum over steps of log p(mark_t | prefix) including EOS. With label
  // smoothing eps each step contributes (1 - eps) log p(target) +
  // eps * mean_j log p(j).
  nn::Var score(nn::Tape& t, std::span<const Label> marks,
                const Options& options) const;
  double score_marks(std::span<const Label> marks) const;
  // Distribution over marks and EOS after `prefix`.
  nn::Vector next_mark_dist(std::span<const Label> prefix) const;

  std::string digest() const { return params_->digest(); }

  void save(const std::string& path, const SymbolTable& marks,
            std::uint64_t seed, const std::string& config_digest) const;
  // Restores parameters and returns the mark vocabulary.
  static Scorer load(const std::string& path, SymbolTable* marks);

 private:
  std::vector<nn::CellState> initial_state(nn::Tape& t) const;
  std::vector<nn::CellState> advance(nn::Tape& t,
                                     const std::vector<nn::CellState>& state,
                                     Label mark, const Options& options) const;
  nn::Var next_logp(nn::Tape& t, const std::vector<nn::CellState>& state,
                    const Options& options) const;

  ScorerConfig config_;
  std::unique_ptr<nn::ParamSet> params_;
  nn::Embedding emb_;
  std::vector<nn::Cell> cells_;
  std::vector<nn::Tensor*> h0_;
  std::vector<nn::Tensor*> c0_;
  nn::Linear out_;
};

nn::Checkpoint scorer_checkpoint(const Scorer& scorer, const SymbolTable& marks,
                                 std::uint64_t seed,
                                 const std::string& config_digest);
Scorer scorer_from_checkpoint(const nn::Checkpoint& ck, SymbolTable* marks);

// Sum of p~(w) over the lattice's mark strings. kLimitExceeded past
// max_paths.
double grammatical_mass(const Scorer& scorer, const Lattice& lattice,
                        std::size_t max_paths = 100000);

}  // namespace nfst

#endif  // NFST_SCORER_H_
