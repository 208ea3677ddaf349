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

#include "nfst/samplers.h"

#include <algorithm>
#include <cmath>

namespace nfst {

using nn::Matrix;
using nn::Tape;
using nn::Var;

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kSwa:
      return "swa";
    case SamplerKind::kSws:
      return "sws";
    case SamplerKind::kSwp:
      return "swp";
    case SamplerKind::kNolook:
      return "nolook";
  }
  return "?";
}

SamplerKind sampler_kind_from_string(const std::string& s) {
  if (s == "swa") return SamplerKind::kSwa;
  if (s == "sws") return SamplerKind::kSws;
  if (s == "swp") return SamplerKind::kSwp;
  if (s == "nolook") return SamplerKind::kNolook;
  throw Error(ErrorKind::kParse, "unknown sampler kind " + s);
}

Sampler::Sampler(const SamplerConfig& config, Rng& rng)
    : config_(config), params_(std::make_unique<nn::ParamSet>()) {
  const int d = config.dim;
  if (config.num_marks <= 0 || d <= 0) {
    throw Error(ErrorKind::kShapeMismatch, "sampler dimensions");
  }
  nn::ParamSet& ps = *params_;
  mark_emb_ = nn::Embedding(ps, "sampler.mark_emb", config.num_marks, d);
  mark_emb_.init(rng);
  if (config.kind == SamplerKind::kSwp) {
    u_ = &ps.add("sampler.swp.u", d, 1 + 2 * d);
    wvec_ = &ps.add("sampler.swp.w", d, 1);
    nn::init_biased(*u_, rng);
    nn::init_uniform(*wvec_, 1.0 / std::sqrt(static_cast<double>(d)), rng);
    return;
  }
  history_ = nn::Cell(ps, "sampler.history", config.history, d, d);
  h0_ = &ps.add("sampler.h0", d, 1);
  history_.init(rng);
  int features = d;
  if (config.kind == SamplerKind::kSwa) {
    if (d % 2 != 0) {
      throw Error(ErrorKind::kShapeMismatch, "SWA needs an even dimension");
    }
    tok_emb_ = nn::Embedding(ps, "sampler.swa.tok_emb",
                             config.input_vocab + 1 + config.output_vocab, d);
    enc_fwd_ = nn::Cell(ps, "sampler.swa.fwd", config.history, d, d / 2);
    enc_bwd_ = nn::Cell(ps, "sampler.swa.bwd", config.history, d, d / 2);
    tok_emb_.init(rng);
    enc_fwd_.init(rng);
    enc_bwd_.init(rng);
    features += d;
  } else if (config.kind == SamplerKind::kSws) {
    in_emb_ = nn::Embedding(ps, "sampler.sws.in_emb", config.input_vocab, d);
    out_emb_ =
        nn::Embedding(ps, "sampler.sws.out_emb", config.output_vocab, d);
    enc_x_ = nn::Cell(ps, "sampler.sws.enc_x", config.history, d, d);
    enc_y_ = nn::Cell(ps, "sampler.sws.enc_y", config.history, d, d);
    ex0_ = &ps.add("sampler.sws.ex0", d, 1);
    ey0_ = &ps.add("sampler.sws.ey0", d, 1);
    in_emb_.init(rng);
    out_emb_.init(rng);
    enc_x_.init(rng);
    enc_y_.init(rng);
    features += 2 * d;
  }
  out_ = nn::Linear(ps, "sampler.out", features, config.num_marks + 1);
  out_.init(rng);
}

namespace {

nn::CellState cell_state(Var h) {
  nn::CellState s;
  s.h = h;
  return s;
}

// Right-to-left encodings of every suffix; result[i] encodes s[i..].
std::vector<Var> suffix_encodings(Tape& t, const nn::Cell& cell,
                                  const nn::Embedding& emb,
                                  std::span<const Label> s, Var init) {
  std::vector<Var> out(s.size() + 1);
  out[s.size()] = init;
  nn::CellState st = cell_state(init);
  if (cell.kind() == nn::CellKind::kLstm) {
    st.c = t.constant(Matrix::Zero(cell.hidden(), 1));
  }
  for (std::size_t i = s.size(); i-- > 0;) {
    st = cell.step(t, st, emb(t, s[i]));
    out[i] = st.h;
  }
  return out;
}

}  // namespace

LatticeContext Sampler::prepare(Tape& t, const Lattice& lattice,
                                const RunOptions& options) const {
  LatticeContext ctx;
  ctx.lattice = &lattice;
  const int d = config_.dim;
  switch (config_.kind) {
    case SamplerKind::kNolook:
      break;
    case SamplerKind::kSwa: {
      // Tokens of x # reverse(y).
      std::vector<Var> seq;
      for (Label a : lattice.x()) seq.push_back(tok_emb_(t, a));
      seq.push_back(tok_emb_(t, config_.input_vocab));
      for (auto it = lattice.y().rbegin(); it != lattice.y().rend(); ++it) {
        seq.push_back(tok_emb_(t, config_.input_vocab + 1 + *it));
      }
      const nn::CellState z = enc_fwd_.zero_state(t);
      const std::vector<Var> enc = nn::bi_encode(t, enc_fwd_, enc_bwd_, seq,
                                                 z, enc_bwd_.zero_state(t));
      ctx.enc = nn::hstack(t, enc);
      break;
    }
    case SamplerKind::kSws:
      ctx.enc_x = suffix_encodings(t, enc_x_, in_emb_, lattice.x(),
                                   t.param(*ex0_));
      ctx.enc_y = suffix_encodings(t, enc_y_, out_emb_, lattice.y(),
                                   t.param(*ey0_));
      break;
    case SamplerKind::kSwp: {
      const int n = lattice.num_states();
      ctx.log_beta.assign(n, Var{});
      ctx.state_emb.assign(n, Var{});
      ctx.log_w.assign(lattice.num_arcs(), Var{});
      ctx.arc_emb.assign(lattice.num_arcs(), Var{});
      const Var u = t.param(*u_);
      const Var w = t.param(*wvec_);
      const Var one = t.scalar(1.0);
      const Var zero_emb = t.constant(Matrix::Zero(d, 1));
      for (StateId s : lattice.reverse_topo()) {
        const auto& outs = lattice.out_arcs(s);
        std::vector<Var> terms;
        std::vector<Var> embs;
        for (int ai : outs) {
          const LatticeArc& a = lattice.arc(ai);
          const Var em = nn::dropout(t, mark_emb_(t, a.mark), options.dropout,
                                     options.train, options.rng);
          const Var in[3] = {one, em, ctx.state_emb[a.dst]};
          const Var e = nn::sigmoid(t, nn::matmul(t, u, nn::concat(t, in)));
          ctx.arc_emb[ai] = e;
          ctx.log_w[ai] = nn::dot(t, w, e);
          terms.push_back(nn::add(t, ctx.log_w[ai], ctx.log_beta[a.dst]));
          embs.push_back(e);
        }
        std::vector<Var> all = terms;
        if (lattice.is_final(s)) all.push_back(t.scalar(0.0));
        ctx.log_beta[s] = nn::log_sum_exp(t, nn::concat(t, all));
        if (outs.empty()) {
          ctx.state_emb[s] = zero_emb;
        } else {
          const Var ones =
              t.constant(Matrix::Ones(static_cast<int>(outs.size()), 1));
          const Var q = nn::exp(
              t, nn::sub(t, nn::concat(t, terms),
                         nn::matmul(t, ones, ctx.log_beta[s])));
          ctx.state_emb[s] = nn::matmul(t, nn::hstack(t, embs), q);
        }
      }
      break;
    }
  }
  return ctx;
}

// Walks one lattice, keeping the history state between choices.
class SamplerRunner {
 public:
  SamplerRunner(const Sampler& sampler, Tape& t, const LatticeContext& ctx,
                const RunOptions& options)
      : sp_(sampler), t_(t), ctx_(ctx), opt_(options) {
    state_ = ctx.lattice->initial();
    if (sampler.kind() != SamplerKind::kSwp) {
      h_ = cell_state(t.param(*sampler.h0_));
      if (sampler.history_.kind() == nn::CellKind::kLstm) {
        h_.c = t.constant(Matrix::Zero(sampler.config_.dim, 1));
      }
    }
  }

  StateId state() const { return state_; }

  // Choice list at the current state: arc indices, then -1 for stop.
  std::vector<int> choices() const {
    std::vector<int> c = ctx_.lattice->out_arcs(state_);
    if (ctx_.lattice->is_final(state_)) c.push_back(-1);
    return c;
  }

  // Log-probabilities over choices(), as a column vector.
  Var logp(const std::vector<int>& choices) {
    const Lattice& L = *ctx_.lattice;
    if (sp_.kind() == SamplerKind::kSwp) {
      std::vector<Var> terms;
      for (int ai : choices) {
        if (ai < 0) {
          terms.push_back(nn::scale(t_, ctx_.log_beta[state_], -1.0));
        } else {
          const LatticeArc& a = L.arc(ai);
          terms.push_back(nn::sub(
              t_, nn::add(t_, ctx_.log_w[ai], ctx_.log_beta[a.dst]),
              ctx_.log_beta[state_]));
        }
      }
      return nn::concat(t_, terms);
    }
    std::vector<Var> feats{h_.h};
    if (sp_.kind() == SamplerKind::kSwa) {
      feats.push_back(nn::attention_matrix(t_, h_.h, ctx_.enc));
    } else if (sp_.kind() == SamplerKind::kSws) {
      const Progress p = L.progress(state_);
      feats.push_back(ctx_.enc_x[p.nx]);
      feats.push_back(ctx_.enc_y[p.ny]);
    }
    Var f = feats.size() == 1 ? feats[0] : nn::concat(t_, feats);
    f = nn::dropout(t_, f, opt_.dropout, opt_.train, opt_.rng);
    const Var logits = sp_.out_(t_, f);
    std::vector<int> rows;
    for (int ai : choices) {
      rows.push_back(ai < 0 ? sp_.config_.num_marks : L.arc(ai).mark);
    }
    return nn::log_softmax(t_, nn::gather(t_, logits, rows));
  }

  // Moves along arc ai (not stop).
  void take(int ai) {
    const LatticeArc& a = ctx_.lattice->arc(ai);
    if (sp_.kind() != SamplerKind::kSwp) {
      const Var em = nn::dropout(t_, sp_.mark_emb_(t_, a.mark), opt_.dropout,
                                 opt_.train, opt_.rng);
      h_ = sp_.history_.step(t_, h_, em);
    }
    state_ = a.dst;
  }

 private:
  const Sampler& sp_;
  Tape& t_;
  const LatticeContext& ctx_;
  const RunOptions& opt_;
  StateId state_ = kNoState;
  nn::CellState h_;
};

Walk Sampler::walk(Tape& t, const LatticeContext& ctx,
                   const LatticePath* forced, Rng* rng,
                   const RunOptions& options, int max_steps) const {
  if (!forced && !rng) {
    throw Error(ErrorKind::kUnsupported, "sampling walk needs an Rng");
  }
  SamplerRunner run(*this, t, ctx, options);
  Walk w;
  std::vector<Var> picks;
  std::size_t step = 0;
  while (true) {
    const std::vector<int> choices = run.choices();
    if (choices.empty()) {
      throw Error(ErrorKind::kInvalidPath, "dead state in lattice");
    }
    int pick = -1;
    if (forced) {
      const int want = step < forced->size() ? (*forced)[step] : -1;
      for (std::size_t c = 0; c < choices.size(); ++c) {
        if (choices[c] == want) pick = static_cast<int>(c);
      }
      if (pick < 0) {
        throw Error(ErrorKind::kInvalidPath,
                    step < forced->size()
                        ? "arc " + std::to_string(want) + " not at state " +
                              std::to_string(run.state())
                        : "path ends at a non-final state");
      }
    }
    Var lp;
    if (choices.size() == 1) {
      // A forced choice has probability one under every kind.
      pick = 0;
      lp = t.scalar(0.0);
    } else {
      const Var dist = run.logp(choices);
      if (!forced) {
        const Matrix& v = t.value(dist);
        const double u = rng->uniform();
        double acc = 0.0;
        pick = static_cast<int>(choices.size()) - 1;
        for (std::size_t c = 0; c < choices.size(); ++c) {
          acc += std::exp(v(static_cast<int>(c), 0));
          if (u < acc) {
            pick = static_cast<int>(c);
            break;
          }
        }
      }
      lp = nn::pick(t, dist, pick);
      const double eps = options.label_smoothing;
      if (eps > 0.0) {
        const Var mean = nn::scale(t, nn::sum(t, dist),
                                   1.0 / static_cast<double>(choices.size()));
        lp = nn::add(t, nn::scale(t, lp, 1.0 - eps), nn::scale(t, mean, eps));
      }
    }
    picks.push_back(lp);
    const int ai = choices[pick];
    if (ai < 0) break;
    w.path.push_back(ai);
    ++step;
    if (!forced && max_steps >= 0 && static_cast<int>(step) > max_steps) {
      w.truncated = true;
      break;
    }
    run.take(ai);
  }
  w.log_q = nn::sum(t, nn::concat(t, picks));
  return w;
}

Var Sampler::path_logprob(Tape& t, const LatticeContext& ctx,
                          const LatticePath& path,
                          const RunOptions& options) const {
  return walk(t, ctx, &path, nullptr, options).log_q;
}

double Sampler::path_logprob(const Lattice& lattice,
                             const LatticePath& path) const {
  Tape t(false);
  const RunOptions opt;
  const LatticeContext ctx = prepare(t, lattice, opt);
  return t.item(path_logprob(t, ctx, path, opt));
}

std::vector<double> Sampler::path_logprobs(
    const Lattice& lattice, std::span<const LatticePath> paths) const {
  Tape t(false);
  const RunOptions opt;
  const LatticeContext ctx = prepare(t, lattice, opt);
  std::vector<double> out;
  for (const LatticePath& p : paths) {
    out.push_back(t.item(path_logprob(t, ctx, p, opt)));
  }
  return out;
}

SampleDraw Sampler::sample(const Lattice& lattice, Rng& rng) const {
  return sample_many(lattice, 1, rng).front();
}

std::vector<SampleDraw> Sampler::sample_many(const Lattice& lattice, int n,
                                             Rng& rng) const {
  Tape t(false);
  const RunOptions opt;
  const LatticeContext ctx = prepare(t, lattice, opt);
  std::vector<SampleDraw> out;
  for (int i = 0; i < n; ++i) {
    const Walk w = walk(t, ctx, nullptr, &rng, opt);
    out.push_back({w.path, path_marks(lattice, w.path), t.item(w.log_q)});
  }
  return out;
}

std::vector<double> Sampler::next_dist(const Lattice& lattice,
                                       const LatticePath& prefix) const {
  Tape t(false);
  const RunOptions opt;
  const LatticeContext ctx = prepare(t, lattice, opt);
  SamplerRunner run(*this, t, ctx, opt);
  for (int ai : prefix) {
    const auto& outs = lattice.out_arcs(run.state());
    if (std::find(outs.begin(), outs.end(), ai) == outs.end()) {
      throw Error(ErrorKind::kInvalidPath, "prefix leaves the lattice");
    }
    run.take(ai);
  }
  const std::vector<int> choices = run.choices();
  std::vector<double> p;
  if (choices.size() == 1) return {1.0};
  const Matrix& v = t.value(run.logp(choices));
  for (int i = 0; i < v.rows(); ++i) p.push_back(std::exp(v(i, 0)));
  return p;
}

WeightedSample weigh(const Scorer& scorer, const SampleDraw& draw) {
  WeightedSample w;
  w.path = draw.path;
  w.marks = draw.marks;
  w.log_q = draw.log_q;
  w.log_ptilde = scorer.score_marks(draw.marks);
  w.weight = std::exp(w.log_ptilde - w.log_q);
  return w;
}

nn::Checkpoint sampler_checkpoint(const Sampler& sampler,
                                  const std::string& scorer_digest,
                                  std::uint64_t seed,
                                  const std::string& config_digest) {
  nn::Checkpoint ck;
  ck.kind = "sampler";
  ck.seed = seed;
  ck.config_digest = config_digest;
  const SamplerConfig& c = sampler.config();
  ck.metadata["sampler_kind"] = to_string(c.kind);
  ck.metadata["num_marks"] = std::to_string(c.num_marks);
  ck.metadata["input_vocab"] = std::to_string(c.input_vocab);
  ck.metadata["output_vocab"] = std::to_string(c.output_vocab);
  ck.metadata["dim"] = std::to_string(c.dim);
  ck.metadata["history"] = nn::to_string(c.history);
  ck.metadata["scorer_digest"] = scorer_digest;
  nn::store_params(ck, sampler.params());
  return ck;
}

Sampler sampler_from_checkpoint(const nn::Checkpoint& ck) {
  if (ck.kind != "sampler") {
    throw Error(ErrorKind::kParse, "checkpoint kind " + ck.kind);
  }
  SamplerConfig c;
  c.kind = sampler_kind_from_string(ck.metadata.at("sampler_kind"));
  c.num_marks = std::stoi(ck.metadata.at("num_marks"));
  c.input_vocab = std::stoi(ck.metadata.at("input_vocab"));
  c.output_vocab = std::stoi(ck.metadata.at("output_vocab"));
  c.dim = std::stoi(ck.metadata.at("dim"));
  c.history = nn::cell_kind_from_string(ck.metadata.at("history"));
  Rng rng(0);
  Sampler s(c, rng);
  nn::load_params(ck, s.params());
  return s;
}

double SwpTables::weight(int arc) const { return std::exp(log_weights.at(arc)); }
double SwpTables::beta(StateId s) const { return std::exp(log_beta.at(s)); }

namespace {

void fill_transitions(const Lattice& lattice, SwpTables& tb) {
  tb.transition.assign(lattice.num_arcs(), 0.0);
  tb.stop.assign(lattice.num_states(), 0.0);
  for (int ai = 0; ai < lattice.num_arcs(); ++ai) {
    const LatticeArc& a = lattice.arc(ai);
    tb.transition[ai] = std::exp(tb.log_weights[ai] + tb.log_beta[a.dst] -
                                 tb.log_beta[a.src]);
  }
  for (StateId s = 0; s < lattice.num_states(); ++s) {
    if (lattice.is_final(s)) tb.stop[s] = std::exp(-tb.log_beta[s]);
  }
}

}  // namespace

SwpTables swp_precompute(const Sampler& sampler, const Lattice& lattice) {
  if (sampler.kind() != SamplerKind::kSwp) {
    throw Error(ErrorKind::kUnsupported, "swp_precompute on a non-SWP sampler");
  }
  Tape t(false);
  const LatticeContext ctx = sampler.prepare(t, lattice, {});
  SwpTables tb;
  for (int ai = 0; ai < lattice.num_arcs(); ++ai) {
    tb.arc_embeddings.push_back(t.value(ctx.arc_emb[ai]));
    tb.log_weights.push_back(t.item(ctx.log_w[ai]));
  }
  for (StateId s = 0; s < lattice.num_states(); ++s) {
    tb.state_embeddings.push_back(t.value(ctx.state_emb[s]));
    tb.log_beta.push_back(t.item(ctx.log_beta[s]));
  }
  fill_transitions(lattice, tb);
  return tb;
}

SwpTables swp_tables_from_log_weights(const Lattice& lattice,
                                      std::span<const double> log_w) {
  if (static_cast<int>(log_w.size()) != lattice.num_arcs()) {
    throw Error(ErrorKind::kShapeMismatch, "one log-weight per arc");
  }
  SwpTables tb;
  tb.log_weights.assign(log_w.begin(), log_w.end());
  tb.log_beta.assign(lattice.num_states(), kNegInf);
  for (StateId s : lattice.reverse_topo()) {
    std::vector<double> terms;
    for (int ai : lattice.out_arcs(s)) {
      terms.push_back(log_w[ai] + tb.log_beta[lattice.arc(ai).dst]);
    }
    if (lattice.is_final(s)) terms.push_back(0.0);
    tb.log_beta[s] = log_sum_exp(terms);
  }
  fill_transitions(lattice, tb);
  return tb;
}

std::vector<double> swp_next_dist(const SwpTables& tables,
                                  const Lattice& lattice, StateId s) {
  std::vector<double> p;
  for (int ai : lattice.out_arcs(s)) p.push_back(tables.transition.at(ai));
  if (lattice.is_final(s)) p.push_back(tables.stop.at(s));
  return p;
}

}  // namespace nfst
