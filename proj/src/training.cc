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

#include "nfst/training.h"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "nfst/datasets.h"

namespace nfst {

using nn::Tape;
using nn::Var;

namespace {

template <typename T>
void set_num(const std::map<std::string, std::string>& kv, const char* key,
             T& field) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      field = std::stod(it->second);
    } else if constexpr (std::is_same_v<T, bool>) {
      field = it->second == "1" || it->second == "true";
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      field = std::stoull(it->second);
    } else {
      field = std::stoi(it->second);
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, std::string("bad value for ") + key);
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Self-normalized weights; empty when every log-weight is -inf or NaN.
std::vector<double> normalized(std::span<const double> log_w) {
  const double z = log_sum_exp(log_w);
  if (!std::isfinite(z)) return {};
  std::vector<double> w;
  for (double l : log_w) w.push_back(std::exp(l - z));
  return w;
}

RunOptions train_run(const TrainConfig& config, Rng* rng) {
  RunOptions run;
  run.train = true;
  run.dropout = config.dropout;
  run.rng = rng;
  run.label_smoothing =
      config.sampler_label_smoothing ? config.label_smoothing : 0.0;
  return run;
}

std::optional<Walk> draw_with_rejection(Tape& t, const Sampler& sampler,
                                        const LatticeContext& ctx, Rng& rng,
                                        const RunOptions& run,
                                        const TrainConfig& config) {
  for (int attempt = 0; attempt <= config.max_redraws; ++attempt) {
    Walk w = sampler.walk(t, ctx, nullptr, &rng, run, config.length_threshold);
    if (!w.truncated) return w;
  }
  return std::nullopt;
}

// Self-normalized weights of proposals already on the tape.
std::vector<double> kl_weights(Tape& t, const Lattice& lattice,
                               const Scorer& scorer,
                               std::span<const Walk> walks) {
  std::map<LabelString, double> cache;
  std::vector<double> log_w;
  for (const Walk& w : walks) {
    const LabelString marks = path_marks(lattice, w.path);
    auto it = cache.find(marks);
    if (it == cache.end()) {
      it = cache.emplace(marks, scorer.score_marks(marks)).first;
    }
    log_w.push_back(it->second - t.item(w.log_q));
  }
  return normalized(log_w);
}

// -sum w_hat log q plus the length penalty, weights held constant.
Var kl_loss(Tape& t, const Lattice& lattice, std::span<const Walk> walks,
            std::span<const double> w_hat, const TrainConfig& config) {
  const double floor =
      static_cast<double>(lattice.x().size() + lattice.y().size());
  const double k = static_cast<double>(walks.size());
  std::vector<Var> terms;
  for (std::size_t i = 0; i < walks.size(); ++i) {
    double coef = -w_hat[i];
    const double len = static_cast<double>(walks[i].path.size());
    coef += config.length_penalty * std::max(0.0, floor - len) / k;
    if (coef != 0.0) terms.push_back(nn::scale(t, walks[i].log_q, coef));
  }
  if (terms.empty()) return t.scalar(0.0);
  return nn::sum(t, nn::concat(t, terms));
}

template <typename Fn>
void for_batches(int n, int batch_size, Rng& rng, Fn fn) {
  const std::vector<Label> order = fisher_yates(n, rng);
  for (int start = 0; start < n; start += batch_size) {
    const int end = std::min(n, start + batch_size);
    std::vector<int> idx(order.begin() + start, order.begin() + end);
    fn(idx);
  }
}

}  // namespace

TrainConfig parse_train_config(const std::map<std::string, std::string>& kv) {
  static const char* kKeys[] = {
      "batch_size",   "k_proposals",      "k_iwae",
      "dropout",      "scorer_dropout",   "grad_clip",
      "sampler_lr",   "scorer_lr",        "label_smoothing",
      "sampler_label_smoothing",          "length_threshold",
      "length_penalty", "seed",           "epochs",
      "hidden_dim",   "max_redraws"};
  TrainConfig c;
  for (const auto& [k, v] : kv) {
    bool known = false;
    for (const char* key : kKeys) known |= k == key;
    if (!known) throw Error(ErrorKind::kParse, "unknown training key " + k);
  }
  set_num(kv, "batch_size", c.batch_size);
  set_num(kv, "k_proposals", c.k_proposals);
  set_num(kv, "k_iwae", c.k_iwae);
  set_num(kv, "dropout", c.dropout);
  set_num(kv, "scorer_dropout", c.scorer_dropout);
  set_num(kv, "grad_clip", c.grad_clip);
  set_num(kv, "sampler_lr", c.sampler_lr);
  set_num(kv, "scorer_lr", c.scorer_lr);
  set_num(kv, "label_smoothing", c.label_smoothing);
  set_num(kv, "sampler_label_smoothing", c.sampler_label_smoothing);
  set_num(kv, "length_threshold", c.length_threshold);
  set_num(kv, "length_penalty", c.length_penalty);
  set_num(kv, "seed", c.seed);
  set_num(kv, "epochs", c.epochs);
  set_num(kv, "hidden_dim", c.hidden_dim);
  set_num(kv, "max_redraws", c.max_redraws);
  if (c.batch_size < 1 || c.k_proposals < 1 || c.k_iwae < 1 ||
      c.hidden_dim < 1 || c.epochs < 0 || c.grad_clip <= 0.0 ||
      c.sampler_lr <= 0.0 || c.scorer_lr <= 0.0 || c.length_threshold < 1) {
    throw Error(ErrorKind::kParse, "training values must be positive");
  }
  return c;
}

std::map<std::string, std::string> train_config_to_map(const TrainConfig& c) {
  return {{"batch_size", std::to_string(c.batch_size)},
          {"k_proposals", std::to_string(c.k_proposals)},
          {"k_iwae", std::to_string(c.k_iwae)},
          {"dropout", fmt(c.dropout)},
          {"scorer_dropout", fmt(c.scorer_dropout)},
          {"grad_clip", fmt(c.grad_clip)},
          {"sampler_lr", fmt(c.sampler_lr)},
          {"scorer_lr", fmt(c.scorer_lr)},
          {"label_smoothing", fmt(c.label_smoothing)},
          {"sampler_label_smoothing", c.sampler_label_smoothing ? "1" : "0"},
          {"length_threshold", std::to_string(c.length_threshold)},
          {"length_penalty", fmt(c.length_penalty)},
          {"seed", std::to_string(c.seed)},
          {"epochs", std::to_string(c.epochs)},
          {"hidden_dim", std::to_string(c.hidden_dim)},
          {"max_redraws", std::to_string(c.max_redraws)}};
}

std::string config_digest(const std::map<std::string, std::string>& kv) {
  std::string text;
  for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
  return hex_digest(text);
}

namespace {

std::vector<Walk> forced_walks(Tape& t, const Sampler& sampler,
                               const Lattice& lattice,
                               std::span<const LatticePath> draws,
                               const RunOptions& run) {
  const LatticeContext ctx = sampler.prepare(t, lattice, run);
  std::vector<Walk> walks;
  for (const LatticePath& p : draws) {
    Walk w;
    w.path = p;
    w.log_q = sampler.path_logprob(t, ctx, p, run);
    walks.push_back(std::move(w));
  }
  return walks;
}

}  // namespace

std::vector<double> inclusive_kl_weights(const Sampler& sampler,
                                         const Scorer& scorer,
                                         const Lattice& lattice,
                                         std::span<const LatticePath> draws,
                                         const RunOptions& run) {
  Tape t(false);
  return kl_weights(t, lattice, scorer,
                    forced_walks(t, sampler, lattice, draws, run));
}

Var inclusive_kl_loss(Tape& t, const Sampler& sampler, const Scorer& scorer,
                      const Lattice& lattice,
                      std::span<const LatticePath> draws,
                      const TrainConfig& config, const RunOptions& run) {
  const std::vector<Walk> walks = forced_walks(t, sampler, lattice, draws, run);
  const std::vector<double> w_hat = kl_weights(t, lattice, scorer, walks);
  if (w_hat.empty()) return Var{};
  return kl_loss(t, lattice, walks, w_hat, config);
}

Var inclusive_kl_loss(Tape& t, const Sampler& sampler, const Lattice& lattice,
                      std::span<const LatticePath> draws,
                      std::span<const double> w_hat, const TrainConfig& config,
                      const RunOptions& run) {
  if (w_hat.size() != draws.size()) {
    throw Error(ErrorKind::kShapeMismatch, "one weight per proposal");
  }
  return kl_loss(t, lattice, forced_walks(t, sampler, lattice, draws, run),
                 w_hat, config);
}

StepStats inclusive_kl_step(Sampler& sampler, const Scorer& scorer,
                            std::span<const Lattice* const> batch,
                            nn::Adam& opt, const TrainConfig& config,
                            Rng& rng) {
  StepStats st;
  std::vector<nn::Tensor*> params = sampler.params().pointers();
  sampler.params().zero_grad();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  for (const Lattice* lattice : batch) {
    Tape t(true);
    const RunOptions run = train_run(config, &rng);
    const LatticeContext ctx = sampler.prepare(t, *lattice, run);
    std::vector<Walk> walks;
    for (int i = 0; i < config.k_proposals; ++i) {
      auto w = draw_with_rejection(t, sampler, ctx, rng, run, config);
      if (w) walks.push_back(std::move(*w));
    }
    const std::vector<double> w_hat =
        walks.empty() ? std::vector<double>{}
                      : kl_weights(t, *lattice, scorer, walks);
    const Var loss = w_hat.empty() ? Var{}
                                   : kl_loss(t, *lattice, walks, w_hat, config);
    if (!loss.valid()) {
      ++st.skipped;
      continue;
    }
    ++st.used;
    loss_sum += t.item(loss);
    t.backward(loss, scale);
  }
  st.loss = st.used ? loss_sum / st.used : 0.0;
  if (st.used == 0) return st;
  if (st.used < static_cast<int>(batch.size())) {
    nn::scale_grads(params, static_cast<double>(batch.size()) / st.used);
  }
  st.grad_norm = nn::clip_grad_norm(params, config.grad_clip);
  opt.step();
  sampler.params().zero_grad();
  return st;
}

double iwae_bound(const Scorer& scorer, const Sampler& sampler,
                  const Lattice& lattice, int k, Rng& rng) {
  std::vector<double> log_w;
  for (const SampleDraw& d : sampler.sample_many(lattice, k, rng)) {
    log_w.push_back(scorer.score_marks(d.marks) - d.log_q);
  }
  return -(log_sum_exp(log_w) - std::log(static_cast<double>(k)));
}

Var scorer_loss(Tape& t, const Scorer& scorer,
                std::span<const LabelString> marks,
                std::span<const double> weights,
                const Scorer::Options& options) {
  std::vector<Var> terms;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (weights[i] == 0.0) continue;
    terms.push_back(nn::scale(t, scorer.score(t, marks[i], options),
                              -weights[i]));
  }
  if (terms.empty()) return t.scalar(0.0);
  return nn::sum(t, nn::concat(t, terms));
}

StepStats train_scorer_step(Scorer& scorer, const Sampler& sampler,
                            std::span<const Lattice* const> batch,
                            nn::Adam& opt, const TrainConfig& config,
                            Rng& rng) {
  StepStats st;
  std::vector<nn::Tensor*> params = scorer.params().pointers();
  scorer.params().zero_grad();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  for (const Lattice* lattice : batch) {
    // Proposals and their weights under the current scorer, merged by mark
    // string.
    std::map<LabelString, double> merged_lw;
    {
      Tape t(false);
      const RunOptions run;
      const LatticeContext ctx = sampler.prepare(t, *lattice, run);
      std::vector<LabelString> marks;
      std::vector<double> log_w;
      for (int i = 0; i < config.k_proposals; ++i) {
        auto w = draw_with_rejection(t, sampler, ctx, rng, run, config);
        if (!w) continue;
        marks.push_back(path_marks(*lattice, w->path));
        log_w.push_back(t.item(w->log_q));
      }
      std::map<LabelString, double> cache;
      for (std::size_t i = 0; i < marks.size(); ++i) {
        auto it = cache.find(marks[i]);
        if (it == cache.end()) {
          it = cache.emplace(marks[i], scorer.score_marks(marks[i])).first;
        }
        log_w[i] = it->second - log_w[i];
      }
      const std::vector<double> w_hat = normalized(log_w);
      for (std::size_t i = 0; i < w_hat.size(); ++i) {
        merged_lw[marks[i]] += w_hat[i];
      }
    }
    if (merged_lw.empty()) {
      ++st.skipped;
      continue;
    }
    std::vector<LabelString> marks;
    std::vector<double> weights;
    for (const auto& [m, w] : merged_lw) {
      marks.push_back(m);
      weights.push_back(w);
    }
    Tape t(true);
    Scorer::Options so;
    so.train = true;
    so.dropout = config.scorer_dropout;
    so.label_smoothing = config.label_smoothing;
    so.rng = &rng;
    const Var loss = scorer_loss(t, scorer, marks, weights, so);
    ++st.used;
    loss_sum += t.item(loss);
    t.backward(loss, scale);
  }
  st.loss = st.used ? loss_sum / st.used : 0.0;
  if (st.used == 0) return st;
  if (st.used < static_cast<int>(batch.size())) {
    nn::scale_grads(params, static_cast<double>(batch.size()) / st.used);
  }
  st.grad_norm = nn::clip_grad_norm(params, config.grad_clip);
  opt.step();
  scorer.params().zero_grad();
  return st;
}

void write_trace_header(std::ostream& os) {
  os << "phase\tepoch\tstep\tloss\tgrad_norm\tprobe_kl\n";
}

void write_trace_row(std::ostream& os, const TraceRow& row) {
  std::ostringstream s;
  s.precision(17);
  s << row.phase << '\t' << row.epoch << '\t' << row.step << '\t' << row.loss
    << '\t' << row.grad_norm << '\t';
  if (std::isnan(row.probe_kl)) {
    s << "nan";
  } else {
    s << row.probe_kl;
  }
  s << '\n';
  os << s.str();
}

void alternate_train(Scorer& scorer, Sampler& helper,
                     std::span<const Lattice> data,
                     const AlternateSchedule& schedule,
                     const TrainConfig& config, Rng& rng,
                     const TraceSink& sink) {
  nn::Adam scorer_opt(scorer.params().pointers(), {config.scorer_lr});
  nn::Adam helper_opt(helper.params().pointers(), {config.sampler_lr});
  const int n = static_cast<int>(data.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int step = 0;
  for (int round = 0; round < schedule.rounds; ++round) {
    for (int e = 0; e < schedule.scorer_epochs; ++e) {
      for_batches(n, config.batch_size, rng, [&](const std::vector<int>& idx) {
        std::vector<const Lattice*> batch;
        for (int i : idx) batch.push_back(&data[i]);
        const StepStats st =
            train_scorer_step(scorer, helper, batch, scorer_opt, config, rng);
        if (sink) sink({"scorer", round, step, st.loss, st.grad_norm, nan});
        ++step;
      });
    }
    for (int e = 0; e < schedule.sampler_epochs; ++e) {
      for_batches(n, config.batch_size, rng, [&](const std::vector<int>& idx) {
        std::vector<const Lattice*> batch;
        for (int i : idx) batch.push_back(&data[i]);
        const StepStats st =
            inclusive_kl_step(helper, scorer, batch, helper_opt, config, rng);
        if (sink) sink({"helper", round, step, st.loss, st.grad_norm, nan});
        ++step;
      });
    }
  }
}

double mean_probe_kl(const Sampler& sampler, const Scorer& scorer,
                     std::span<const Lattice> probes) {
  if (probes.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const Lattice& l : probes) {
    sum += exact_inclusive_kl(sampler, l, exact_posterior(scorer, l));
  }
  return sum / static_cast<double>(probes.size());
}

void train_sampler(Sampler& sampler, const Scorer& scorer,
                   std::span<const Lattice> data, const TrainConfig& config,
                   Rng& rng, std::span<const Lattice> probes,
                   const TraceSink& sink) {
  nn::Adam opt(sampler.params().pointers(), {config.sampler_lr});
  const int n = static_cast<int>(data.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int step = 0;
  if (sink && !probes.empty()) {
    sink({"sampler", 0, 0, nan, nan, mean_probe_kl(sampler, scorer, probes)});
  }
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    int batches = 0;
    for_batches(n, config.batch_size, rng, [&](const std::vector<int>& idx) {
      std::vector<const Lattice*> batch;
      for (int i : idx) batch.push_back(&data[i]);
      const StepStats st =
          inclusive_kl_step(sampler, scorer, batch, opt, config, rng);
      loss_sum += st.loss;
      ++batches;
      ++step;
      if (sink) sink({"sampler", epoch, step, st.loss, st.grad_norm, nan});
    });
    if (sink && !probes.empty()) {
      sink({"sampler", epoch, step, batches ? loss_sum / batches : 0.0, nan,
            mean_probe_kl(sampler, scorer, probes)});
    }
  }
}

}  // namespace nfst
