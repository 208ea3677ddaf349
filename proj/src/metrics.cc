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

#include "nfst/metrics.h"

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace nfst {
namespace {

struct ExampleDraws {
  std::vector<WeightedSample> samples;
};

ExampleDraws draw(const Sampler& sampler, const Scorer& scorer,
                  const Lattice& lattice, int m, Rng& rng) {
  ExampleDraws d;
  std::map<LabelString, double> cache;
  for (const SampleDraw& s : sampler.sample_many(lattice, m, rng)) {
    auto it = cache.find(s.marks);
    if (it == cache.end()) {
      it = cache.emplace(s.marks, scorer.score_marks(s.marks)).first;
    }
    WeightedSample w;
    w.path = s.path;
    w.marks = s.marks;
    w.log_q = s.log_q;
    w.log_ptilde = it->second;
    w.weight = std::exp(w.log_ptilde - w.log_q);
    d.samples.push_back(std::move(w));
  }
  return d;
}

// Self-normalized weights from log p~ - log q.
std::vector<double> snis(std::span<const WeightedSample> samples) {
  std::vector<double> lw;
  for (const auto& s : samples) lw.push_back(s.log_ptilde - s.log_q);
  const double z = log_sum_exp(lw);
  std::vector<double> w;
  for (double l : lw) w.push_back(std::exp(l - z));
  return w;
}

double length_estimate(std::span<const WeightedSample> samples,
                       double* variance) {
  const std::vector<double> w = snis(samples);
  // Offsets from the first length keep equal lengths exact.
  const double base = static_cast<double>(samples[0].marks.size());
  double est = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    est += w[i] * (static_cast<double>(samples[i].marks.size()) - base);
  }
  est += base;
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double dlen = static_cast<double>(samples[i].marks.size()) - est;
    var += w[i] * w[i] * dlen * dlen;
  }
  if (variance) *variance = var;
  return est;
}

double kl_estimate(std::span<const WeightedSample> samples, double* variance) {
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const auto& s : samples) mean += s.log_q - s.log_ptilde;
  mean /= m;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double d = s.log_q - s.log_ptilde - mean;
    ss += d * d;
  }
  if (variance) *variance = samples.size() > 1 ? ss / (m - 1.0) / m : 0.0;
  return mean;
}

Estimate combine(std::vector<double> values, const std::vector<double>& vars) {
  Estimate e;
  const double n = static_cast<double>(values.size());
  double sum = 0.0, var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    var += vars[i];
  }
  e.value = n > 0 ? sum / n : 0.0;
  e.std_error = n > 0 ? std::sqrt(var) / n : 0.0;
  e.per_example = std::move(values);
  return e;
}

}  // namespace

Estimate partial_kl(const Sampler& sampler, const Scorer& scorer,
                    std::span<const Lattice> lattices, int m, Rng& rng) {
  std::vector<double> values, vars;
  for (const Lattice& l : lattices) {
    const ExampleDraws d = draw(sampler, scorer, l, m, rng);
    double v = 0.0;
    values.push_back(kl_estimate(d.samples, &v));
    vars.push_back(v);
  }
  return combine(std::move(values), vars);
}

Estimate expected_mark_length(const Sampler& sampler, const Scorer& scorer,
                              std::span<const Lattice> lattices, int m,
                              Rng& rng) {
  std::vector<double> values, vars;
  for (const Lattice& l : lattices) {
    const ExampleDraws d = draw(sampler, scorer, l, m, rng);
    double v = 0.0;
    values.push_back(length_estimate(d.samples, &v));
    vars.push_back(v);
  }
  return combine(std::move(values), vars);
}

double dedup_ess(std::span<const LabelString> marks,
                 std::span<const double> weights) {
  if (marks.size() != weights.size() || marks.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "dedup_ess needs matched samples");
  }
  std::map<LabelString, double> merged;
  double total = 0.0;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    merged[marks[i]] += weights[i];
    total += weights[i];
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kDegenerate, "all weights zero");
  double sq = 0.0;
  for (const auto& [k, w] : merged) sq += (w / total) * (w / total);
  return 1.0 / sq;
}

double dedup_ess(std::span<const WeightedSample> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::kShapeMismatch, "dedup_ess of nothing");
  }
  // Rescale in log space so tiny raw weights do not underflow to zero.
  std::vector<double> lw;
  for (const auto& s : samples) lw.push_back(s.log_ptilde - s.log_q);
  double top = kNegInf;
  for (double l : lw) top = std::max(top, l);
  if (top == kNegInf) throw Error(ErrorKind::kDegenerate, "all weights zero");
  std::vector<LabelString> marks;
  std::vector<double> w;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    marks.push_back(samples[i].marks);
    w.push_back(std::exp(lw[i] - top));
  }
  return dedup_ess(marks, w);
}

ExactPosterior exact_posterior(const Scorer& scorer, const Lattice& lattice,
                               std::size_t max_paths) {
  ExactPosterior post;
  std::vector<double> scores;
  for (auto& path : enumerate_lattice_paths(lattice, max_paths)) {
    PosteriorEntry e;
    e.marks = path_marks(lattice, path);
    e.path = std::move(path);
    e.log_ptilde = scorer.score_marks(e.marks);
    scores.push_back(e.log_ptilde);
    post.entries.push_back(std::move(e));
  }
  post.log_mass = log_sum_exp(scores);
  for (auto& e : post.entries) e.prob = std::exp(e.log_ptilde - post.log_mass);
  return post;
}

namespace {

std::vector<double> posterior_log_q(const Sampler& sampler,
                                    const Lattice& lattice,
                                    const ExactPosterior& post) {
  std::vector<LatticePath> paths;
  for (const auto& e : post.entries) paths.push_back(e.path);
  return sampler.path_logprobs(lattice, paths);
}

}  // namespace

double exact_inclusive_kl(const Sampler& sampler, const Lattice& lattice,
                          const ExactPosterior& post) {
  const std::vector<double> log_q = posterior_log_q(sampler, lattice, post);
  double kl = 0.0;
  for (std::size_t i = 0; i < post.entries.size(); ++i) {
    const auto& e = post.entries[i];
    if (e.prob <= 0.0) continue;
    kl += e.prob * (e.log_ptilde - post.log_mass - log_q[i]);
  }
  return kl;
}

double exact_partial_kl(const Sampler& sampler, const Lattice& lattice,
                        const ExactPosterior& post) {
  const std::vector<double> log_q = posterior_log_q(sampler, lattice, post);
  double kl = 0.0;
  for (std::size_t i = 0; i < post.entries.size(); ++i) {
    const double q = std::exp(log_q[i]);
    if (q > 0.0) kl += q * (log_q[i] - post.entries[i].log_ptilde);
  }
  return kl;
}

double exact_exclusive_kl(const Sampler& sampler, const Lattice& lattice,
                          const ExactPosterior& post) {
  return exact_partial_kl(sampler, lattice, post) + post.log_mass;
}

EvalReport evaluate(const Sampler& sampler, const Scorer& scorer,
                    std::span<const Lattice> lattices, int m, Rng& rng) {
  EvalReport r;
  r.sampler_kind = to_string(sampler.kind());
  r.sampler_digest = sampler.digest();
  r.scorer_digest = scorer.digest();
  r.n_examples = static_cast<int>(lattices.size());
  r.n_samples = m;
  std::vector<double> kl_v, kl_var, len_v, len_var;
  double ess_sum = 0.0;
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const Lattice& l = lattices[i];
    const ExampleDraws d = draw(sampler, scorer, l, m, rng);
    EvalRow row;
    row.index = static_cast<int>(i);
    row.x_len = static_cast<int>(l.x().size());
    row.y_len = static_cast<int>(l.y().size());
    double v = 0.0;
    row.partial_kl = kl_estimate(d.samples, &v);
    kl_v.push_back(row.partial_kl);
    kl_var.push_back(v);
    row.mark_length = length_estimate(d.samples, &v);
    len_v.push_back(row.mark_length);
    len_var.push_back(v);
    row.dedup_ess = dedup_ess(d.samples);
    ess_sum += row.dedup_ess;
    r.rows.push_back(row);
  }
  const Estimate kl = combine(kl_v, kl_var);
  const Estimate len = combine(len_v, len_var);
  r.partial_kl = kl.value;
  r.partial_kl_se = kl.std_error;
  r.expected_mark_length = len.value;
  r.expected_mark_length_se = len.std_error;
  r.dedup_ess = lattices.empty() ? 0.0 : ess_sum / lattices.size();
  return r;
}

void require_same_scorer(std::span<const EvalReport> reports) {
  for (const auto& r : reports) {
    if (r.scorer_digest != reports.front().scorer_digest) {
      throw Error(ErrorKind::kDigestMismatch,
                  "reports were scored by different models (" +
                      reports.front().scorer_digest + " vs " +
                      r.scorer_digest + "); partial KL is not comparable");
    }
  }
}

void write_report_tsv(std::ostream& os, const EvalReport& report) {
  std::ostringstream s;
  s.precision(10);
  s << "# sampler=" << report.sampler_kind
    << " sampler_digest=" << report.sampler_digest
    << " scorer_digest=" << report.scorer_digest
    << " samples=" << report.n_samples << "\n";
  s << "index\tx_len\ty_len\tpartial_kl\tmark_length\tdedup_ess\n";
  for (const auto& r : report.rows) {
    s << r.index << '\t' << r.x_len << '\t' << r.y_len << '\t' << r.partial_kl
      << '\t' << r.mark_length << '\t' << r.dedup_ess << '\n';
  }
  os << s.str();
}

void write_summary(std::ostream& os, std::span<const EvalReport> reports) {
  require_same_scorer(reports);
  std::ostringstream s;
  s.precision(6);
  s << std::fixed;
  s << "sampler\tpartial_kl\tpartial_kl_se\tmark_length\tmark_length_se"
       "\tdedup_ess\texamples\tsamples\tscorer_digest\n";
  for (const auto& r : reports) {
    s << r.sampler_kind << '\t' << r.partial_kl << '\t' << r.partial_kl_se
      << '\t' << r.expected_mark_length << '\t' << r.expected_mark_length_se
      << '\t' << r.dedup_ess << '\t' << r.n_examples << '\t' << r.n_samples
      << '\t' << r.scorer_digest << '\n';
  }
  os << s.str();
}

}  // namespace nfst
