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

#include "nfst/scorer.h"

#include <cmath>

namespace nfst {

using nn::Tape;
using nn::Var;

Scorer::Scorer(const ScorerConfig& config, Rng& rng)
    : config_(config), params_(std::make_unique<nn::ParamSet>()) {
  if (config.num_marks <= 0 || config.layers <= 0 || config.hidden <= 0 ||
      config.embed_dim <= 0) {
    throw Error(ErrorKind::kShapeMismatch, "scorer dimensions");
  }
  nn::ParamSet& ps = *params_;
  emb_ = nn::Embedding(ps, "scorer.emb", config.num_marks, config.embed_dim);
  for (int l = 0; l < config.layers; ++l) {
    const std::string name = "scorer.lstm" + std::to_string(l);
    cells_.emplace_back(ps, name, nn::CellKind::kLstm,
                        l == 0 ? config.embed_dim : config.hidden,
                        config.hidden);
    h0_.push_back(&ps.add(name + ".h0", config.hidden, 1));
    c0_.push_back(&ps.add(name + ".c0", config.hidden, 1));
  }
  out_ = nn::Linear(ps, "scorer.out", config.hidden, config.num_marks + 1);
  emb_.init(rng);
  for (const auto& c : cells_) c.init(rng);
  out_.init(rng);
}

std::vector<nn::CellState> Scorer::initial_state(Tape& t) const {
  std::vector<nn::CellState> s(cells_.size());
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    s[l].h = t.param(*h0_[l]);
    s[l].c = t.param(*c0_[l]);
  }
  return s;
}

std::vector<nn::CellState> Scorer::advance(
    Tape& t, const std::vector<nn::CellState>& state, Label mark,
    const Options& options) const {
  Var in = nn::dropout(t, emb_(t, mark), options.dropout, options.train,
                       options.rng);
  std::vector<nn::CellState> next(cells_.size());
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    next[l] = cells_[l].step(t, state[l], in);
    in = next[l].h;
  }
  return next;
}

Var Scorer::next_logp(Tape& t, const std::vector<nn::CellState>& state,
                      const Options& options) const {
  const Var h = nn::dropout(t, state.back().h, options.dropout, options.train,
                            options.rng);
  return nn::log_softmax(t, out_(t, h));
}

Var Scorer::score(Tape& t, std::span<const Label> marks,
                  const Options& options) const {
  for (Label m : marks) {
    if (m < 0 || m >= config_.num_marks) {
      throw Error(ErrorKind::kUnknownSymbol,
                  "mark id " + std::to_string(m) + " outside scorer vocabulary");
    }
  }
  const double eps = options.label_smoothing;
  std::vector<nn::CellState> state = initial_state(t);
  std::vector<Var> terms;
  terms.reserve(marks.size() + 1);
  for (std::size_t i = 0; i <= marks.size(); ++i) {
    const Var logp = next_logp(t, state, options);
    const int target = i < marks.size() ? marks[i] : eos();
    Var term = nn::pick(t, logp, target);
    if (eps > 0.0) {
      const Var mean =
          nn::scale(t, nn::sum(t, logp), 1.0 / (config_.num_marks + 1));
      term = nn::add(t, nn::scale(t, term, 1.0 - eps), nn::scale(t, mean, eps));
    }
    terms.push_back(term);
    if (i < marks.size()) state = advance(t, state, marks[i], options);
  }
  return nn::sum(t, nn::concat(t, terms));
}

double Scorer::score_marks(std::span<const Label> marks) const {
  Tape t(false);
  return t.item(score(t, marks, {}));
}

nn::Vector Scorer::next_mark_dist(std::span<const Label> prefix) const {
  Tape t(false);
  std::vector<nn::CellState> state = initial_state(t);
  for (Label m : prefix) {
    if (m < 0 || m >= config_.num_marks) {
      throw Error(ErrorKind::kUnknownSymbol, "mark id " + std::to_string(m));
    }
    state = advance(t, state, m, {});
  }
  return t.value(next_logp(t, state, {})).array().exp().matrix();
}

nn::Checkpoint scorer_checkpoint(const Scorer& scorer, const SymbolTable& marks,
                                 std::uint64_t seed,
                                 const std::string& config_digest) {
  nn::Checkpoint ck;
  ck.kind = "scorer";
  ck.seed = seed;
  ck.config_digest = config_digest;
  const ScorerConfig& c = scorer.config();
  ck.metadata["num_marks"] = std::to_string(c.num_marks);
  ck.metadata["embed_dim"] = std::to_string(c.embed_dim);
  ck.metadata["hidden"] = std::to_string(c.hidden);
  ck.metadata["layers"] = std::to_string(c.layers);
  std::string vocab;
  for (const auto& name : marks.names()) vocab += name + "\n";
  ck.metadata["marks"] = vocab;
  nn::store_params(ck, scorer.params());
  return ck;
}

Scorer scorer_from_checkpoint(const nn::Checkpoint& ck, SymbolTable* marks) {
  if (ck.kind != "scorer") {
    throw Error(ErrorKind::kParse, "checkpoint kind " + ck.kind);
  }
  auto num = [&](const char* key) { return std::stoi(ck.metadata.at(key)); };
  ScorerConfig c;
  c.num_marks = num("num_marks");
  c.embed_dim = num("embed_dim");
  c.hidden = num("hidden");
  c.layers = num("layers");
  Rng rng(0);
  Scorer s(c, rng);
  nn::load_params(ck, s.params());
  if (marks) {
    SymbolTable t;
    for (const auto& name : split(ck.metadata.at("marks"), '\n')) {
      if (!name.empty()) t.add(name);
    }
    *marks = t;
  }
  return s;
}

void Scorer::save(const std::string& path, const SymbolTable& marks,
                  std::uint64_t seed, const std::string& config_digest) const {
  nn::save_checkpoint(path, scorer_checkpoint(*this, marks, seed,
                                              config_digest));
}

Scorer Scorer::load(const std::string& path, SymbolTable* marks) {
  return scorer_from_checkpoint(nn::load_checkpoint(path), marks);
}

double grammatical_mass(const Scorer& scorer, const Lattice& lattice,
                        std::size_t max_paths) {
  double mass = 0.0;
  for (const auto& path : enumerate_lattice_paths(lattice, max_paths)) {
    mass += std::exp(scorer.score_marks(path_marks(lattice, path)));
  }
  return mass;
}

}  // namespace nfst
