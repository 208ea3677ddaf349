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

#ifndef NFST_TRAINING_H_
#define NFST_TRAINING_H_

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nfst/lattice.h"
#include "nfst/layers.h"
#include "nfst/metrics.h"
#include "nfst/samplers.h"
#include "nfst/scorer.h"

namespace nfst {

struct TrainConfig {
  int batch_size = 16;
  int k_proposals = 16;
  int k_iwae = 32;
  double dropout = 0.3;
  double scorer_dropout = 0.3;
  double grad_clip = 5.0;
  double sampler_lr = 1e-5;
  double scorer_lr = 1e-3;
  double label_smoothing = 0.1;
  // Smoothing of the sampler's own targets; off by default.
  bool sampler_label_smoothing = false;
  int length_threshold = 100;
  double length_penalty = 1.0;
  std::uint64_t seed = 1;
  int epochs = 1;
  int hidden_dim = 64;
  // Redraws allowed when a proposal exceeds length_threshold.
  int max_redraws = 8;
};

// key=value lines; '#' starts a comment. Unknown keys throw kParse.
TrainConfig parse_train_config(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> train_config_to_map(const TrainConfig& c);
std::string config_digest(const std::map<std::string, std::string>& kv);

struct StepStats {
  double loss = 0.0;       // mean over used examples
  double grad_norm = 0.0;  // before clipping
  int used = 0;
  int skipped = 0;
};

// Self-normalized inclusive-KL step on q with the scorer frozen: per example
// k proposals, weights from p~/q held constant, loss -sum w_hat log q plus
// the length penalty, averaged over the batch, clipped, one Adam update.
StepStats inclusive_kl_step(Sampler& sampler, const Scorer& scorer,
                            std::span<const Lattice* const> batch,
                            nn::Adam& opt, const TrainConfig& config,
                            Rng& rng);

// The loss of inclusive_kl_step for one example on a caller's tape, for
// gradient checks. Proposals come from `draws`; returns an invalid Var when
// every weight is zero.
nn::Var inclusive_kl_loss(nn::Tape& t, const Sampler& sampler,
                          const Scorer& scorer, const Lattice& lattice,
                          std::span<const LatticePath> draws,
                          const TrainConfig& config, const RunOptions& run);
// Self-normalized weights of `draws`; empty when every weight is zero.
std::vector<double> inclusive_kl_weights(const Sampler& sampler,
                                         const Scorer& scorer,
                                         const Lattice& lattice,
                                         std::span<const LatticePath> draws,
                                         const RunOptions& run);
// The same loss with the weights supplied, as a function of the sampler
// alone.
nn::Var inclusive_kl_loss(nn::Tape& t, const Sampler& sampler,
                          const Lattice& lattice,
                          std::span<const LatticePath> draws,
                          std::span<const double> w_hat,
                          const TrainConfig& config, const RunOptions& run);

// -log (1/K sum_k p~(z_k) / q(z_k)), z_k ~ q.
double iwae_bound(const Scorer& scorer, const Sampler& sampler,
                  const Lattice& lattice, int k, Rng& rng);

// Scorer update from K proposals of `sampler`: minimizes
// -sum_k w_hat_k log p~(z_k) with smoothed targets.
StepStats train_scorer_step(Scorer& scorer, const Sampler& sampler,
                            std::span<const Lattice* const> batch,
                            nn::Adam& opt, const TrainConfig& config,
                            Rng& rng);
nn::Var scorer_loss(nn::Tape& t, const Scorer& scorer,
                    std::span<const LabelString> marks,
                    std::span<const double> weights,
                    const Scorer::Options& options);

struct TraceRow {
  std::string phase;  // "scorer", "helper" or "sampler"
  int epoch = 0;
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  // Mean exact inclusive KL over probe lattices, NaN when not measured.
  double probe_kl = 0.0;
};
using TraceSink = std::function<void(const TraceRow&)>;

void write_trace_header(std::ostream& os);
void write_trace_row(std::ostream& os, const TraceRow& row);

struct AlternateSchedule {
  int rounds = 1;
  int scorer_epochs = 1;   // per round
  int sampler_epochs = 1;  // per round
};

// Alternates scorer epochs and helper-sampler epochs over `data`.
void alternate_train(Scorer& scorer, Sampler& helper,
                     std::span<const Lattice> data,
                     const AlternateSchedule& schedule,
                     const TrainConfig& config, Rng& rng,
                     const TraceSink& sink = {});

// Inclusive-KL training of a sampler against a frozen scorer for
// config.epochs. When probes are given, the exact inclusive KL is measured
// before training and after every epoch.
void train_sampler(Sampler& sampler, const Scorer& scorer,
                   std::span<const Lattice> data, const TrainConfig& config,
                   Rng& rng, std::span<const Lattice> probes = {},
                   const TraceSink& sink = {});

double mean_probe_kl(const Sampler& sampler, const Scorer& scorer,
                     std::span<const Lattice> probes);

}  // namespace nfst

#endif  // NFST_TRAINING_H_
