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

#ifndef NFST_METRICS_H_
#define NFST_METRICS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nfst/lattice.h"
#include "nfst/samplers.h"
#include "nfst/scorer.h"

namespace nfst {

// Mean over examples with a Monte Carlo standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::vector<double> per_example;
};

// (1/|D|) sum_i E_q[log q - log p~], m draws per example.
Estimate partial_kl(const Sampler& sampler, const Scorer& scorer,
                    std::span<const Lattice> lattices, int m, Rng& rng);
// Self-normalized estimate of E_p[|marks|] from m proposals per example.
Estimate expected_mark_length(const Sampler& sampler, const Scorer& scorer,
                              std::span<const Lattice> lattices, int m,
                              Rng& rng);

// Merges samples with equal mark strings, then 1 / sum(w_hat^2). Throws
// kDegenerate when every weight is zero.
double dedup_ess(std::span<const WeightedSample> samples);
// From raw (mark string, weight) pairs.
double dedup_ess(std::span<const LabelString> marks,
                 std::span<const double> weights);

struct PosteriorEntry {
  LatticePath path;
  LabelString marks;
  double log_ptilde = 0.0;
  double prob = 0.0;
};

struct ExactPosterior {
  std::vector<PosteriorEntry> entries;  // enumeration order
  double log_mass = 0.0;                // log p~(x, y)
};

ExactPosterior exact_posterior(const Scorer& scorer, const Lattice& lattice,
                               std::size_t max_paths = 100000);

// Exact quantities by enumeration.
double exact_inclusive_kl(const Sampler& sampler, const Lattice& lattice,
                          const ExactPosterior& post);
double exact_exclusive_kl(const Sampler& sampler, const Lattice& lattice,
                          const ExactPosterior& post);
// sum_z q(z) (log q(z) - log p~(z)).
double exact_partial_kl(const Sampler& sampler, const Lattice& lattice,
                        const ExactPosterior& post);

struct EvalRow {
  int index = 0;
  int x_len = 0;
  int y_len = 0;
  double partial_kl = 0.0;
  double mark_length = 0.0;
  double dedup_ess = 0.0;
};

struct EvalReport {
  std::string sampler_kind;
  std::string sampler_digest;
  std::string scorer_digest;
  int n_examples = 0;
  int n_samples = 0;  // per example
  double partial_kl = 0.0;
  double partial_kl_se = 0.0;
  double expected_mark_length = 0.0;
  double expected_mark_length_se = 0.0;
  double dedup_ess = 0.0;  // mean over examples
  std::vector<EvalRow> rows;
};

EvalReport evaluate(const Sampler& sampler, const Scorer& scorer,
                    std::span<const Lattice> lattices, int m, Rng& rng);

// Throws kDigestMismatch unless every report shares one scorer digest.
void require_same_scorer(std::span<const EvalReport> reports);

void write_report_tsv(std::ostream& os, const EvalReport& report);
// One row per sampler: partial KL and expected mark length with errors.
void write_summary(std::ostream& os, std::span<const EvalReport> reports);

}  // namespace nfst

#endif  // NFST_METRICS_H_
