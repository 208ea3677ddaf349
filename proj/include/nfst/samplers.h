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

#ifndef NFST_SAMPLERS_H_
#define NFST_SAMPLERS_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nfst/common.h"
#include "nfst/lattice.h"
#include "nfst/layers.h"
#include "nfst/scorer.h"

namespace nfst {

enum class SamplerKind { kSwa, kSws, kSwp, kNolook };
std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& s);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kSwp;
  int num_marks = 0;
  int input_vocab = 0;
  int output_vocab = 0;
  int dim = 64;
  nn::CellKind history = nn::CellKind::kGru;
};

// How a walk or table is evaluated. Dropout applies to mark embeddings and,
// for the history kinds, to the features feeding the logits.
struct RunOptions {
  bool train = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // dropout stream
  // When positive, each scored step is (1 - eps) log q(choice) +
  // eps * mean log q over the choices. Sampling still follows q.
  double label_smoothing = 0.0;
};

// Per-lattice quantities computed once per tape: encoder states for SWA and
// SWS, backward weights for SWP.
struct LatticeContext {
  const Lattice* lattice = nullptr;
  nn::Var enc;                   // SWA: d x n stacked encodings
  std::vector<nn::Var> enc_x;    // SWS: suffix encodings by start position
  std::vector<nn::Var> enc_y;
  std::vector<nn::Var> log_w;    // SWP: per arc
  std::vector<nn::Var> log_beta; // SWP: per state
  std::vector<nn::Var> arc_emb;  // SWP: per arc
  std::vector<nn::Var> state_emb;// SWP: per state
};

struct Walk {
  LatticePath path;
  nn::Var log_q;
  bool truncated = false;  // exceeded max_steps before stopping
};

struct SampleDraw {
  LatticePath path;
  LabelString marks;
  double log_q = 0.0;
};

struct WeightedSample {
  LatticePath path;
  LabelString marks;
  double log_q = 0.0;
  double log_ptilde = 0.0;
  double weight = 0.0;  // exp(log_ptilde - log_q)
};

// Proposal over complete lattice paths. At each state the choices are the
// out-arcs in order, then stop when the state is final; stop is scored as
// the EOS mark (index num_marks).
class Sampler {
 public:
  Sampler() = default;
  Sampler(const SamplerConfig& config, Rng& rng);
  Sampler(const Sampler&) = delete;
  Sampler& operator=(const Sampler&) = delete;
  Sampler(Sampler&&) = default;
  Sampler& operator=(Sampler&&) = default;

  const SamplerConfig& config() const { return config_; }
  SamplerKind kind() const { return config_.kind; }
  nn::ParamSet& params() { return *params_; }
  const nn::ParamSet& params() const { return *params_; }
  std::string digest() const { return params_->digest(); }

  LatticeContext prepare(nn::Tape& t, const Lattice& lattice,
                         const RunOptions& options) const;
  // Follows `forced` when given, otherwise samples with rng. A sampled walk
  // longer than max_steps arcs is abandoned with truncated set.
  Walk walk(nn::Tape& t, const LatticeContext& ctx,
            const LatticePath* forced, Rng* rng, const RunOptions& options,
            int max_steps = -1) const;

  double path_logprob(const Lattice& lattice, const LatticePath& path) const;
  // One context for many paths of the same lattice.
  std::vector<double> path_logprobs(const Lattice& lattice,
                                    std::span<const LatticePath> paths) const;
  nn::Var path_logprob(nn::Tape& t, const LatticeContext& ctx,
                       const LatticePath& path,
                       const RunOptions& options) const;
  SampleDraw sample(const Lattice& lattice, Rng& rng) const;
  std::vector<SampleDraw> sample_many(const Lattice& lattice, int n,
                                      Rng& rng) const;
  // Probabilities over the choices at path_end(prefix): out-arcs in order,
  // then stop if final.
  std::vector<double> next_dist(const Lattice& lattice,
                                const LatticePath& prefix) const;

 private:
  friend class SamplerRunner;
  SamplerConfig config_;
  std::unique_ptr<nn::ParamSet> params_;
  nn::Embedding mark_emb_;
  // History kinds.
  nn::Cell history_;
  nn::Tensor* h0_ = nullptr;
  nn::Linear out_;
  // SWA.
  nn::Embedding tok_emb_;
  nn::Cell enc_fwd_;
  nn::Cell enc_bwd_;
  // SWS.
  nn::Embedding in_emb_;
  nn::Embedding out_emb_;
  nn::Cell enc_x_;
  nn::Cell enc_y_;
  nn::Tensor* ex0_ = nullptr;
  nn::Tensor* ey0_ = nullptr;
  // SWP.
  nn::Tensor* u_ = nullptr;
  nn::Tensor* wvec_ = nullptr;
};

WeightedSample weigh(const Scorer& scorer, const SampleDraw& draw);

nn::Checkpoint sampler_checkpoint(const Sampler& sampler,
                                  const std::string& scorer_digest,
                                  std::uint64_t seed,
                                  const std::string& config_digest);
Sampler sampler_from_checkpoint(const nn::Checkpoint& ck);

// Values of the SWP backward pass for one lattice, in plain doubles.
struct SwpTables {
  std::vector<nn::Vector> arc_embeddings;
  std::vector<double> log_weights;  // per arc
  std::vector<nn::Vector> state_embeddings;
  std::vector<double> log_beta;     // per state
  std::vector<double> transition;   // per arc, q(arc | src)
  std::vector<double> stop;         // per state, 1[final] / beta
  double weight(int arc) const;
  double beta(StateId s) const;
};

SwpTables swp_precompute(const Sampler& sampler, const Lattice& lattice);
// The same recurrence driven by given arc log-weights, without embeddings.
SwpTables swp_tables_from_log_weights(const Lattice& lattice,
                                      std::span<const double> log_w);
// Choice probabilities at s: out-arcs in order, then stop if final.
std::vector<double> swp_next_dist(const SwpTables& tables,
                                  const Lattice& lattice, StateId s);

}  // namespace nfst

#endif  // NFST_SAMPLERS_H_
