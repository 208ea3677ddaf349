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

#ifndef NFST_EXPERIMENT_H_
#define NFST_EXPERIMENT_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "nfst/config.h"
#include "nfst/datasets.h"
#include "nfst/metrics.h"
#include "nfst/samplers.h"
#include "nfst/scorer.h"
#include "nfst/training.h"

namespace nfst {

struct ModelConfig {
  int scorer_embed = 32;
  int scorer_hidden = 256;
  int scorer_layers = 2;
  int sampler_dim = 64;
};

CipherCorpusConfig parse_corpus_config(const KeyValues& kv);
KeyValues corpus_config_to_map(const CipherCorpusConfig& c);
ModelConfig parse_model_config(const KeyValues& kv);
KeyValues model_config_to_map(const ModelConfig& c);
AlternateSchedule parse_schedule(const KeyValues& kv);
KeyValues schedule_to_map(const AlternateSchedule& s);

// The cipher comparison: generate a corpus, train the scorer alternately
// with an RNN-celled SWA helper, freeze it, then train and evaluate each
// sampler kind from one initialization.
struct ExperimentConfig {
  CipherCorpusConfig corpus;
  TrainConfig train;
  ModelConfig model;
  AlternateSchedule schedule;
  int eval_samples = 16;
  int probe_count = 6;
  LengthProfile probe_lengths{1, 2};
  std::vector<SamplerKind> kinds{SamplerKind::kSwa, SamplerKind::kSws,
                                 SamplerKind::kSwp};
};

// Sections "corpus.", "model.", "schedule.", "eval."; other keys are
// training keys.
ExperimentConfig parse_experiment_config(const KeyValues& kv);
KeyValues experiment_config_to_map(const ExperimentConfig& c);

struct SamplerOutcome {
  SamplerKind kind = SamplerKind::kSwp;
  EvalReport before;
  EvalReport after;
  // Mean exact inclusive KL on the probes; entry 0 is before training.
  std::vector<double> probe_kl;
};

struct ExperimentResult {
  std::uint64_t seed = 0;
  std::string corpus_digest;
  std::string scorer_digest;
  std::string trace_digest;   // every training trace row
  std::string report_digest;  // every evaluation report
  std::vector<SamplerOutcome> samplers;
  double seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* progress = nullptr);

// Random streams split from Rng(train.seed), shared by the pipeline and the
// command-line stages so both draw identical initializations.
enum class Stream : std::uint64_t {
  kScorerInit = 1,
  kHelperInit = 2,
  kScorerTrain = 3,
  kSamplerInit = 100,
  kEval = 200,
  kSamplerTrain = 300,
};
Rng stream(const TrainConfig& train, Stream s, int offset = 0);

Scorer make_scorer(const ExperimentConfig& config, const Mfst& task);
// SWA with an RNN history cell, used only while training the scorer.
Sampler make_helper(const ExperimentConfig& config, const Mfst& task);
Sampler make_sampler(const ExperimentConfig& config, const Mfst& task,
                     SamplerKind kind);

// Lattices for each pair; throws kEmptyLanguage on a pair T cannot generate.
std::vector<Lattice> build_lattices(const Mfst& t, const Corpus& corpus);

}  // namespace nfst

#endif  // NFST_EXPERIMENT_H_
