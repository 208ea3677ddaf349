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

#include "nfst/experiment.h"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nfst {
namespace {

int get_int(const KeyValues& kv, const std::string& key, int fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, "bad integer for " + key);
  }
}

double get_double(const KeyValues& kv, const std::string& key,
                  double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, "bad number for " + key);
  }
}

void require_known(const KeyValues& kv, std::initializer_list<const char*> keys,
                   const std::string& section) {
  for (const auto& [k, v] : kv) {
    bool known = false;
    for (const char* key : keys) known |= k == key;
    if (!known) throw Error(ErrorKind::kParse, "unknown key " + section + k);
  }
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

CipherCorpusConfig parse_corpus_config(const KeyValues& kv) {
  require_known(kv,
                {"alphabet_size", "n_ciphers", "seed", "train_size",
                 "valid_size", "test_size", "train_min_len", "train_max_len",
                 "valid_min_len", "valid_max_len", "test_min_len",
                 "test_max_len", "p_del", "p_ins"},
                "corpus.");
  CipherCorpusConfig c;
  c.alphabet_size = get_int(kv, "alphabet_size", c.alphabet_size);
  c.n_ciphers = get_int(kv, "n_ciphers", c.n_ciphers);
  if (kv.count("seed")) c.seed = std::stoull(kv.at("seed"));
  c.train_size = get_int(kv, "train_size", c.train_size);
  c.valid_size = get_int(kv, "valid_size", c.valid_size);
  c.test_size = get_int(kv, "test_size", c.test_size);
  c.train_lengths.min_len = get_int(kv, "train_min_len", c.train_lengths.min_len);
  c.train_lengths.max_len = get_int(kv, "train_max_len", c.train_lengths.max_len);
  c.valid_lengths.min_len = get_int(kv, "valid_min_len", c.valid_lengths.min_len);
  c.valid_lengths.max_len = get_int(kv, "valid_max_len", c.valid_lengths.max_len);
  c.test_lengths.min_len = get_int(kv, "test_min_len", c.test_lengths.min_len);
  c.test_lengths.max_len = get_int(kv, "test_max_len", c.test_lengths.max_len);
  c.p_del = get_double(kv, "p_del", c.p_del);
  c.p_ins = get_double(kv, "p_ins", c.p_ins);
  if (c.alphabet_size < 1 || c.n_ciphers < 1 || c.p_del < 0 || c.p_del > 1 ||
      c.p_ins < 0 || c.p_ins > 1) {
    throw Error(ErrorKind::kParse, "corpus values out of range");
  }
  return c;
}

KeyValues corpus_config_to_map(const CipherCorpusConfig& c) {
  return {{"alphabet_size", std::to_string(c.alphabet_size)},
          {"n_ciphers", std::to_string(c.n_ciphers)},
          {"seed", std::to_string(c.seed)},
          {"train_size", std::to_string(c.train_size)},
          {"valid_size", std::to_string(c.valid_size)},
          {"test_size", std::to_string(c.test_size)},
          {"train_min_len", std::to_string(c.train_lengths.min_len)},
          {"train_max_len", std::to_string(c.train_lengths.max_len)},
          {"valid_min_len", std::to_string(c.valid_lengths.min_len)},
          {"valid_max_len", std::to_string(c.valid_lengths.max_len)},
          {"test_min_len", std::to_string(c.test_lengths.min_len)},
          {"test_max_len", std::to_string(c.test_lengths.max_len)},
          {"p_del", num(c.p_del)},
          {"p_ins", num(c.p_ins)}};
}

ModelConfig parse_model_config(const KeyValues& kv) {
  require_known(kv,
                {"scorer_embed", "scorer_hidden", "scorer_layers",
                 "sampler_dim"},
                "model.");
  ModelConfig c;
  c.scorer_embed = get_int(kv, "scorer_embed", c.scorer_embed);
  c.scorer_hidden = get_int(kv, "scorer_hidden", c.scorer_hidden);
  c.scorer_layers = get_int(kv, "scorer_layers", c.scorer_layers);
  c.sampler_dim = get_int(kv, "sampler_dim", c.sampler_dim);
  if (c.scorer_embed < 1 || c.scorer_hidden < 1 || c.scorer_layers < 1 ||
      c.sampler_dim < 2) {
    throw Error(ErrorKind::kParse, "model dimensions out of range");
  }
  return c;
}

KeyValues model_config_to_map(const ModelConfig& c) {
  return {{"scorer_embed", std::to_string(c.scorer_embed)},
          {"scorer_hidden", std::to_string(c.scorer_hidden)},
          {"scorer_layers", std::to_string(c.scorer_layers)},
          {"sampler_dim", std::to_string(c.sampler_dim)}};
}

AlternateSchedule parse_schedule(const KeyValues& kv) {
  require_known(kv, {"rounds", "scorer_epochs", "sampler_epochs"},
                "schedule.");
  AlternateSchedule s;
  s.rounds = get_int(kv, "rounds", s.rounds);
  s.scorer_epochs = get_int(kv, "scorer_epochs", s.scorer_epochs);
  s.sampler_epochs = get_int(kv, "sampler_epochs", s.sampler_epochs);
  if (s.rounds < 0 || s.scorer_epochs < 0 || s.sampler_epochs < 0) {
    throw Error(ErrorKind::kParse, "schedule values must be non-negative");
  }
  return s;
}

KeyValues schedule_to_map(const AlternateSchedule& s) {
  return {{"rounds", std::to_string(s.rounds)},
          {"scorer_epochs", std::to_string(s.scorer_epochs)},
          {"sampler_epochs", std::to_string(s.sampler_epochs)}};
}

ExperimentConfig parse_experiment_config(const KeyValues& kv) {
  ExperimentConfig c;
  c.corpus = parse_corpus_config(with_prefix(kv, "corpus."));
  c.model = parse_model_config(with_prefix(kv, "model."));
  c.schedule = parse_schedule(with_prefix(kv, "schedule."));
  c.train = parse_train_config(top_level(kv));
  const KeyValues ev = with_prefix(kv, "eval.");
  require_known(ev,
                {"samples", "probe_count", "probe_min_len", "probe_max_len",
                 "kinds"},
                "eval.");
  c.eval_samples = get_int(ev, "samples", c.eval_samples);
  c.probe_count = get_int(ev, "probe_count", c.probe_count);
  c.probe_lengths.min_len = get_int(ev, "probe_min_len", c.probe_lengths.min_len);
  c.probe_lengths.max_len = get_int(ev, "probe_max_len", c.probe_lengths.max_len);
  if (ev.count("kinds")) {
    c.kinds.clear();
    for (const auto& k : split(ev.at("kinds"), ',')) {
      c.kinds.push_back(sampler_kind_from_string(k));
    }
  }
  for (const auto& [k, v] : kv) {
    const auto dot = k.find('.');
    if (dot == std::string::npos) continue;
    const std::string sec = k.substr(0, dot);
    if (sec != "corpus" && sec != "model" && sec != "schedule" &&
        sec != "eval") {
      throw Error(ErrorKind::kParse, "unknown section in " + k);
    }
  }
  return c;
}

KeyValues experiment_config_to_map(const ExperimentConfig& c) {
  KeyValues kv = train_config_to_map(c.train);
  for (const auto& [k, v] : corpus_config_to_map(c.corpus)) kv["corpus." + k] = v;
  for (const auto& [k, v] : model_config_to_map(c.model)) kv["model." + k] = v;
  for (const auto& [k, v] : schedule_to_map(c.schedule)) {
    kv["schedule." + k] = v;
  }
  kv["eval.samples"] = std::to_string(c.eval_samples);
  kv["eval.probe_count"] = std::to_string(c.probe_count);
  kv["eval.probe_min_len"] = std::to_string(c.probe_lengths.min_len);
  kv["eval.probe_max_len"] = std::to_string(c.probe_lengths.max_len);
  std::string kinds;
  for (SamplerKind k : c.kinds) kinds += (kinds.empty() ? "" : ",") + to_string(k);
  kv["eval.kinds"] = kinds;
  return kv;
}

Rng stream(const TrainConfig& train, Stream s, int offset) {
  return Rng(train.seed).split(static_cast<std::uint64_t>(s) + offset);
}

Scorer make_scorer(const ExperimentConfig& config, const Mfst& task) {
  Rng rng = stream(config.train, Stream::kScorerInit);
  return Scorer(ScorerConfig{task.mark_symbols().size(),
                             config.model.scorer_embed,
                             config.model.scorer_hidden,
                             config.model.scorer_layers},
                rng);
}

Sampler make_helper(const ExperimentConfig& config, const Mfst& task) {
  Rng rng = stream(config.train, Stream::kHelperInit);
  return Sampler(SamplerConfig{SamplerKind::kSwa, task.mark_symbols().size(),
                               task.input_symbols().size(),
                               task.output_symbols().size(),
                               config.model.sampler_dim, nn::CellKind::kRnn},
                 rng);
}

Sampler make_sampler(const ExperimentConfig& config, const Mfst& task,
                     SamplerKind kind) {
  Rng rng = stream(config.train, Stream::kSamplerInit, static_cast<int>(kind));
  return Sampler(SamplerConfig{kind, task.mark_symbols().size(),
                               task.input_symbols().size(),
                               task.output_symbols().size(),
                               config.model.sampler_dim, nn::CellKind::kGru},
                 rng);
}

std::vector<Lattice> build_lattices(const Mfst& t, const Corpus& corpus) {
  std::vector<Lattice> out;
  out.reserve(corpus.pairs.size());
  for (const Pair& p : corpus.pairs) out.push_back(canonicalize(t, p.x, p.y));
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* progress) {
  const auto start = std::chrono::steady_clock::now();
  auto say = [&](const std::string& msg) {
    if (progress) *progress << msg << std::endl;
  };
  ExperimentResult result;
  result.seed = config.train.seed;

  const CipherCorpus corpus = gen_cipher_corpus(config.corpus);
  const Mfst& task = corpus.machine.task;
  {
    std::ostringstream s;
    write_tsv(s, corpus.train);
    write_tsv(s, corpus.valid);
    write_tsv(s, corpus.test);
    s << mfst_to_string(task);
    result.corpus_digest = hex_digest(s.str());
  }
  const std::vector<Lattice> train = build_lattices(task, corpus.train);
  const std::vector<Lattice> test = build_lattices(task, corpus.test);
  Rng probe_rng(splitmix64(config.corpus.seed ^ 0x70726f6265ULL));
  const Corpus probe_pairs =
      gen_cipher_split(corpus.machine, config.probe_count,
                       config.probe_lengths, config.corpus.p_del,
                       config.corpus.p_ins, probe_rng);
  const std::vector<Lattice> probes = build_lattices(task, probe_pairs);
  say("corpus " + result.corpus_digest + ": " + std::to_string(train.size()) +
      " train, " + std::to_string(test.size()) + " test, " +
      std::to_string(probes.size()) + " probe lattices");

  Fnv1a trace_hash;
  auto sink = [&](const TraceRow& row) {
    std::ostringstream s;
    write_trace_row(s, row);
    trace_hash.update(s.str());
  };

  Scorer scorer = make_scorer(config, task);
  Sampler helper = make_helper(config, task);
  Rng scorer_rng = stream(config.train, Stream::kScorerTrain);
  alternate_train(scorer, helper, train, config.schedule, config.train,
                  scorer_rng, sink);
  result.scorer_digest = scorer.digest();
  say("scorer frozen " + result.scorer_digest);

  Fnv1a report_hash;
  for (SamplerKind kind : config.kinds) {
    SamplerOutcome out;
    out.kind = kind;
    const int slot = static_cast<int>(kind);
    Sampler sampler = make_sampler(config, task, kind);
    // The same evaluation stream before and after training.
    Rng eval_before = stream(config.train, Stream::kEval, slot);
    out.before = evaluate(sampler, scorer, test, config.eval_samples,
                          eval_before);
    Rng train_rng = stream(config.train, Stream::kSamplerTrain, slot);
    train_sampler(sampler, scorer, train, config.train, train_rng, probes,
                  [&](const TraceRow& row) {
                    sink(row);
                    if (!std::isnan(row.probe_kl)) {
                      out.probe_kl.push_back(row.probe_kl);
                    }
                  });
    Rng eval_after = stream(config.train, Stream::kEval, slot);
    out.after = evaluate(sampler, scorer, test, config.eval_samples,
                         eval_after);
    for (const EvalReport* r : {&out.before, &out.after}) {
      std::ostringstream s;
      write_report_tsv(s, *r);
      report_hash.update(s.str());
    }
    std::ostringstream msg;
    msg.precision(4);
    msg << std::fixed << to_string(kind) << ": partial KL "
        << out.before.partial_kl << " -> " << out.after.partial_kl
        << " (se " << out.after.partial_kl_se << "), probe KL";
    for (double v : out.probe_kl) msg << ' ' << v;
    say(msg.str());
    result.samplers.push_back(std::move(out));
  }
  result.trace_digest = trace_hash.hex();
  result.report_digest = report_hash.hex();
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

}  // namespace nfst
