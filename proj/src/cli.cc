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

#include "nfst/cli.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nfst/experiment.h"

namespace nfst {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  return is;
}

// Flags shared by every subcommand.
struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "run";
};

struct Context {
  Common common;
  std::vector<std::string> argv;
  std::string command;
};

KeyValues load_config(const Common& c) {
  return c.config_path.empty() ? KeyValues{} : load_key_values(c.config_path);
}

ExperimentConfig experiment_config(const Common& c) {
  KeyValues kv = load_config(c);
  kv.erase("task");
  for (auto it = kv.begin(); it != kv.end();) {
    it = it->first.rfind("translit.", 0) == 0 ? kv.erase(it) : std::next(it);
  }
  ExperimentConfig config = parse_experiment_config(kv);
  if (c.seed_given) config.train.seed = c.seed;
  return config;
}

// One JSON object per run, appended to <out>/manifest.jsonl.
void append_manifest(const Context& ctx, const KeyValues& config,
                     const std::uint64_t seed, const json& inputs,
                     const json& outputs) {
  fs::create_directories(ctx.common.out);
  json m;
  m["command"] = ctx.command;
  m["argv"] = ctx.argv;
  m["config"] = config;
  m["config_digest"] = config_digest(config);
  m["seed"] = seed;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["timestamp"] = utc_now();
  m["version"] = kVersion;
  std::ofstream os(fs::path(ctx.common.out) / "manifest.jsonl",
                   std::ios::app | std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot append manifest");
  os << m.dump() << '\n';
}

struct Dataset {
  Mfst task;
  Corpus train, valid, test;
  const Corpus& split(const std::string& name) const {
    if (name == "train") return train;
    if (name == "valid") return valid;
    if (name == "test") return test;
    throw Error(ErrorKind::kParse, "unknown split " + name);
  }
};

Dataset load_dataset(const fs::path& dir) {
  Dataset d;
  std::ifstream is = open_in(dir / "task.mfst");
  d.task = read_mfst(is);
  auto read_split = [&](const char* name) {
    std::ifstream in = open_in(dir / (std::string(name) + ".tsv"));
    return read_tsv(in, d.task.input_symbols(), d.task.output_symbols());
  };
  d.train = read_split("train");
  d.valid = read_split("valid");
  d.test = read_split("test");
  return d;
}

std::string lattice_key(const std::string& task_text, const Corpus& corpus,
                        const Pair& p) {
  Fnv1a h;
  h.update(task_text);
  h.update("\x1f");
  h.update(join_labels(corpus.input, p.x));
  h.update("\x1f");
  h.update(join_labels(corpus.output, p.y));
  return h.hex();
}

struct CacheStats {
  int built = 0;
  int reused = 0;
};

// Lattices cached under <dir>/lattices by content hash of (T, x, y).
std::vector<Lattice> cached_lattices(const fs::path& dir, const Mfst& task,
                                     const Corpus& corpus,
                                     CacheStats* stats = nullptr) {
  const fs::path cache = dir / "lattices";
  fs::create_directories(cache);
  const std::string task_text = mfst_to_string(task);
  std::vector<Lattice> out;
  out.reserve(corpus.pairs.size());
  for (const Pair& p : corpus.pairs) {
    const fs::path file = cache / (lattice_key(task_text, corpus, p) + ".lat");
    if (fs::exists(file)) {
      std::ifstream is = open_in(file);
      out.push_back(read_lattice(is));
      if (stats) ++stats->reused;
      continue;
    }
    out.push_back(canonicalize(task, p.x, p.y));
    const fs::path tmp = file.string() + ".tmp";
    {
      std::ofstream os = open_out(tmp);
      write_lattice(os, out.back());
    }
    fs::rename(tmp, file);
    if (stats) ++stats->built;
  }
  return out;
}

// Validation pairs whose lattices can be enumerated, for exact KL probes.
std::vector<Lattice> select_probes(const std::vector<Lattice>& valid,
                                   const Corpus& corpus,
                                   const ExperimentConfig& config) {
  std::vector<Lattice> probes;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (static_cast<int>(probes.size()) >= config.probe_count) break;
    const int n = static_cast<int>(corpus.pairs[i].x.size());
    if (n < config.probe_lengths.min_len || n > config.probe_lengths.max_len) {
      continue;
    }
    try {
      enumerate_lattice_paths(valid[i], 20000);
      probes.push_back(valid[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kLimitExceeded) throw;
    }
  }
  return probes;
}

void write_corpus_files(const fs::path& dir, const Mfst& task,
                        const Corpus& train, const Corpus& valid,
                        const Corpus& test) {
  fs::create_directories(dir);
  {
    std::ofstream os = open_out(dir / "task.mfst");
    write_mfst(os, task);
  }
  save_tsv((dir / "train.tsv").string(), train);
  save_tsv((dir / "valid.tsv").string(), valid);
  save_tsv((dir / "test.tsv").string(), test);
}

int cmd_gen_data(const Context& ctx, const std::string& task_name) {
  KeyValues kv = load_config(ctx.common);
  const fs::path out = ctx.common.out;
  if (task_name == "cipher") {
    CipherCorpusConfig cc = parse_corpus_config(with_prefix(kv, "corpus."));
    if (ctx.common.seed_given) cc.seed = ctx.common.seed;
    const CipherCorpus corpus = gen_cipher_corpus(cc);
    write_corpus_files(out, corpus.machine.task, corpus.train, corpus.valid,
                       corpus.test);
    std::cerr << "cipher corpus: " << corpus.train.pairs.size() << "/"
              << corpus.valid.pairs.size() << "/" << corpus.test.pairs.size()
              << " pairs, " << corpus.machine.task.num_states() << " states, "
              << corpus.machine.task.num_arcs() << " arcs\n";
    append_manifest(ctx, corpus_config_to_map(cc), cc.seed, json::object(),
                    {{"dir", out.string()}});
    return 0;
  }
  if (task_name == "translit") {
    const KeyValues tk = with_prefix(kv, "translit.");
    TranslitConfig tc;
    auto get = [&](const char* key, int fallback) {
      auto it = tk.find(key);
      return it == tk.end() ? fallback : std::stoi(it->second);
    };
    for (const auto& [k, v] : tk) {
      if (k != "input_size" && k != "output_size" && k != "size" &&
          k != "min_len" && k != "max_len" && k != "seed") {
        throw Error(ErrorKind::kParse, "unknown key translit." + k);
      }
    }
    tc.input_size = get("input_size", tc.input_size);
    tc.output_size = get("output_size", tc.output_size);
    tc.size = get("size", tc.size);
    tc.lengths.min_len = get("min_len", tc.lengths.min_len);
    tc.lengths.max_len = get("max_len", tc.lengths.max_len);
    if (tk.count("seed")) tc.seed = std::stoull(tk.at("seed"));
    if (ctx.common.seed_given) tc.seed = ctx.common.seed;
    const Corpus all = gen_translit_corpus(tc);
    const MarkScheme scheme = make_mark_scheme(all.input, all.output);
    const Mfst task = topology_del_ins(all.input, all.output, scheme);
    // 80/10/10 in generation order.
    Corpus parts[3] = {{all.input, all.output, {}},
                       {all.input, all.output, {}},
                       {all.input, all.output, {}}};
    const std::size_t n = all.pairs.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int part = i < n * 8 / 10 ? 0 : (i < n * 9 / 10 ? 1 : 2);
      parts[part].pairs.push_back(all.pairs[i]);
    }
    write_corpus_files(out, task, parts[0], parts[1], parts[2]);
    std::cerr << "translit corpus: " << n << " pairs\n";
    KeyValues used = {{"input_size", std::to_string(tc.input_size)},
                      {"output_size", std::to_string(tc.output_size)},
                      {"size", std::to_string(tc.size)},
                      {"min_len", std::to_string(tc.lengths.min_len)},
                      {"max_len", std::to_string(tc.lengths.max_len)},
                      {"seed", std::to_string(tc.seed)}};
    append_manifest(ctx, used, tc.seed, json::object(),
                    {{"dir", out.string()}});
    return 0;
  }
  throw CLI::ValidationError("--task", "unknown task " + task_name);
}

int cmd_build_lattice(const Context& ctx, const std::string& data,
                      const std::vector<std::string>& splits) {
  const Dataset d = load_dataset(data);
  CacheStats stats;
  for (const std::string& s : splits) {
    const auto lattices = cached_lattices(data, d.task, d.split(s), &stats);
    std::size_t states = 0, arcs = 0;
    for (const Lattice& l : lattices) {
      states += l.num_states();
      arcs += l.num_arcs();
    }
    std::cerr << s << ": " << lattices.size() << " lattices, "
              << states << " states, " << arcs << " arcs\n";
  }
  std::cerr << "built " << stats.built << ", reused " << stats.reused << "\n";
  append_manifest(ctx, {}, 0, {{"data", data}},
                  {{"cache", (fs::path(data) / "lattices").string()},
                   {"built", stats.built},
                   {"reused", stats.reused}});
  return 0;
}

TraceSink trace_file(std::ofstream& os) {
  write_trace_header(os);
  return [&os](const TraceRow& row) { write_trace_row(os, row); };
}

int cmd_train_scorer(const Context& ctx, const std::string& data) {
  const ExperimentConfig config = experiment_config(ctx.common);
  const Dataset d = load_dataset(data);
  const auto train = cached_lattices(data, d.task, d.train);
  Scorer scorer = make_scorer(config, d.task);
  Sampler helper = make_helper(config, d.task);
  Rng rng = stream(config.train, Stream::kScorerTrain);
  const fs::path out = ctx.common.out;
  fs::create_directories(out);
  std::ofstream trace = open_out(out / "scorer_trace.tsv");
  std::cerr << "training scorer on " << train.size() << " lattices\n";
  alternate_train(scorer, helper, train, config.schedule, config.train, rng,
                  trace_file(trace));
  const KeyValues kv = experiment_config_to_map(config);
  const std::string digest = config_digest(kv);
  const fs::path ckpt = out / "scorer.ckpt";
  scorer.save(ckpt.string(), d.task.mark_symbols(), config.train.seed, digest);
  std::cerr << "scorer " << scorer.digest() << " -> " << ckpt.string() << "\n";
  append_manifest(ctx, kv, config.train.seed, {{"data", data}},
                  {{"checkpoint", ckpt.string()},
                   {"trace", (out / "scorer_trace.tsv").string()},
                   {"scorer_digest", scorer.digest()}});
  return 0;
}

Scorer load_scorer(const std::string& path, const Mfst& task) {
  SymbolTable marks;
  Scorer scorer = Scorer::load(path, &marks);
  if (!(marks == task.mark_symbols())) {
    throw Error(ErrorKind::kAlphabetMismatch,
                "scorer mark vocabulary differs from the task");
  }
  return scorer;
}

struct LoadedSampler {
  Sampler sampler;
  std::string scorer_digest;
};

LoadedSampler load_sampler(const std::string& path) {
  const nn::Checkpoint ck = nn::load_checkpoint(path);
  return {sampler_from_checkpoint(ck), ck.metadata.at("scorer_digest")};
}

void require_scorer(const LoadedSampler& s, const Scorer& scorer,
                    const std::string& path) {
  if (s.scorer_digest != scorer.digest()) {
    throw Error(ErrorKind::kDigestMismatch,
                path + " was trained against scorer " + s.scorer_digest +
                    ", not " + scorer.digest());
  }
}

int cmd_train_sampler(const Context& ctx, const std::string& data,
                      const std::string& scorer_path,
                      const std::string& kind_name) {
  const ExperimentConfig config = experiment_config(ctx.common);
  const SamplerKind kind = sampler_kind_from_string(kind_name);
  const Dataset d = load_dataset(data);
  const Scorer scorer = load_scorer(scorer_path, d.task);
  const auto train = cached_lattices(data, d.task, d.train);
  const auto valid = cached_lattices(data, d.task, d.valid);
  const auto probes = select_probes(valid, d.valid, config);
  Sampler sampler = make_sampler(config, d.task, kind);
  Rng rng = stream(config.train, Stream::kSamplerTrain, static_cast<int>(kind));
  const fs::path out = ctx.common.out;
  fs::create_directories(out);
  const fs::path trace_path = out / ("sampler_" + kind_name + "_trace.tsv");
  std::ofstream trace = open_out(trace_path);
  const TraceSink to_file = trace_file(trace);
  std::cerr << "training " << kind_name << " on " << train.size()
            << " lattices, " << probes.size() << " probes\n";
  train_sampler(sampler, scorer, train, config.train, rng, probes,
                [&](const TraceRow& row) {
                  to_file(row);
                  if (!std::isnan(row.probe_kl)) {
                    std::cerr << "  epoch " << row.epoch << " probe KL "
                              << row.probe_kl << "\n";
                  }
                });
  const KeyValues kv = experiment_config_to_map(config);
  const fs::path ckpt = out / ("sampler_" + kind_name + ".ckpt");
  nn::save_checkpoint(ckpt.string(),
                  sampler_checkpoint(sampler, scorer.digest(),
                                     config.train.seed, config_digest(kv)));
  append_manifest(ctx, kv, config.train.seed,
                  {{"data", data}, {"scorer", scorer_path}},
                  {{"checkpoint", ckpt.string()},
                   {"trace", trace_path.string()},
                   {"sampler_digest", sampler.digest()}});
  return 0;
}

int cmd_evaluate(const Context& ctx, const std::string& data,
                 const std::string& scorer_path,
                 const std::vector<std::string>& sampler_paths,
                 const std::string& split, int samples) {
  const ExperimentConfig config = experiment_config(ctx.common);
  const Dataset d = load_dataset(data);
  const Scorer scorer = load_scorer(scorer_path, d.task);
  std::vector<LoadedSampler> samplers;
  for (const std::string& p : sampler_paths) {
    samplers.push_back(load_sampler(p));
    require_scorer(samplers.back(), scorer, p);
  }
  const auto lattices = cached_lattices(data, d.task, d.split(split));
  const int m = samples > 0 ? samples : config.eval_samples;
  const fs::path out = ctx.common.out;
  fs::create_directories(out);
  std::vector<EvalReport> reports;
  json outputs = json::array();
  for (const LoadedSampler& s : samplers) {
    const int slot = static_cast<int>(s.sampler.kind());
    Rng rng = stream(config.train, Stream::kEval, slot);
    reports.push_back(evaluate(s.sampler, scorer, lattices, m, rng));
    const fs::path path =
        out / ("report_" + to_string(s.sampler.kind()) + ".tsv");
    std::ofstream os = open_out(path);
    write_report_tsv(os, reports.back());
    outputs.push_back(path.string());
    std::cerr << to_string(s.sampler.kind()) << ": partial KL "
              << reports.back().partial_kl << " (se "
              << reports.back().partial_kl_se << ")\n";
  }
  require_same_scorer(reports);
  const fs::path summary = out / "summary.tsv";
  std::ofstream os = open_out(summary);
  write_summary(os, reports);
  outputs.push_back(summary.string());
  append_manifest(ctx, experiment_config_to_map(config), config.train.seed,
                  {{"data", data},
                   {"scorer", scorer_path},
                   {"samplers", sampler_paths},
                   {"split", split}},
                  outputs);
  return 0;
}

int cmd_sample(const Context& ctx, const std::string& data,
               const std::string& sampler_path, const std::string& scorer_path,
               const std::string& split, int n) {
  const Dataset d = load_dataset(data);
  const LoadedSampler s = load_sampler(sampler_path);
  std::optional<Scorer> scorer;
  if (!scorer_path.empty()) {
    scorer.emplace(load_scorer(scorer_path, d.task));
    require_scorer(s, *scorer, sampler_path);
  }
  const Corpus& corpus = d.split(split);
  const auto lattices = cached_lattices(data, d.task, corpus);
  Rng rng(ctx.common.seed_given ? ctx.common.seed : 1);
  const fs::path out = ctx.common.out;
  fs::create_directories(out);
  const fs::path path = out / "samples.tsv";
  std::ofstream os = open_out(path);
  os << "pair\tdraw\tmarks\tlog_q\tlog_ptilde\tweight\n";
  os.precision(17);
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const auto draws = s.sampler.sample_many(lattices[i], n, rng);
    for (std::size_t j = 0; j < draws.size(); ++j) {
      os << i << '\t' << j << '\t'
         << join_labels(d.task.mark_symbols(), draws[j].marks) << '\t'
         << draws[j].log_q << '\t';
      if (scorer) {
        const WeightedSample w = weigh(*scorer, draws[j]);
        os << w.log_ptilde << '\t' << w.weight << '\n';
      } else {
        os << "nan\tnan\n";
      }
    }
  }
  std::cerr << "wrote " << lattices.size() * n << " samples to "
            << path.string() << "\n";
  append_manifest(ctx, {}, rng.seed(),
                  {{"data", data}, {"sampler", sampler_path}, {"split", split}},
                  {path.string()});
  return 0;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  for (const std::string& t : split(text, ',')) {
    try {
      dims.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--dims", "bad dimension " + t);
    }
    if (dims.back() < 2) throw CLI::ValidationError("--dims", "dims >= 2");
  }
  return dims;
}

int cmd_sweep(const Context& ctx, const std::string& dims_text,
              bool plot_data) {
  const ExperimentConfig base = experiment_config(ctx.common);
  const std::vector<int> dims = parse_dims(dims_text);
  const fs::path out = ctx.common.out;
  fs::create_directories(out);
  std::ofstream table = open_out(out / "sweep.tsv");
  table << "dim\tsampler\tpartial_kl_before\tpartial_kl_after\t"
           "partial_kl_se\texpected_mark_length\tdedup_ess\tseconds\n";
  table.precision(10);
  std::ofstream plot;
  if (plot_data) {
    plot = open_out(out / "plot_data.tsv");
    plot << "dim\tsampler\tepoch\tprobe_kl\n";
    plot.precision(10);
  }
  for (int dim : dims) {
    ExperimentConfig config = base;
    config.model.sampler_dim = dim;
    std::cerr << "dim " << dim << "\n";
    const ExperimentResult r = run_experiment(config, &std::cerr);
    for (const SamplerOutcome& s : r.samplers) {
      table << dim << '\t' << to_string(s.kind) << '\t'
            << s.before.partial_kl << '\t' << s.after.partial_kl << '\t'
            << s.after.partial_kl_se << '\t'
            << s.after.expected_mark_length << '\t' << s.after.dedup_ess
            << '\t' << r.seconds << '\n';
      if (plot_data) {
        for (std::size_t e = 0; e < s.probe_kl.size(); ++e) {
          plot << dim << '\t' << to_string(s.kind) << '\t' << e << '\t'
               << s.probe_kl[e] << '\n';
        }
      }
    }
  }
  json outputs = {(out / "sweep.tsv").string()};
  if (plot_data) outputs.push_back((out / "plot_data.tsv").string());
  append_manifest(ctx, experiment_config_to_map(base), base.train.seed,
                  {{"dims", dims}}, outputs);
  return 0;
}

int cmd_stats(const Context& ctx, const std::string& data) {
  const Dataset d = load_dataset(data);
  std::vector<std::string> names = {"train", "valid", "test"};
  std::vector<CorpusStats> rows;
  for (const std::string& n : names) {
    rows.push_back(corpus_stats(d.split(n), d.task));
  }
  const fs::path out = ctx.common.out;
  fs::create_directories(out);
  const fs::path path = out / "stats.tsv";
  std::ofstream os = open_out(path);
  write_stats_tsv(os, names, rows);
  std::cerr << "stats -> " << path.string() << "\n";
  append_manifest(ctx, {}, 0, {{"data", data}}, {path.string()});
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, "output directory");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Neural finite-state transducer toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Context ctx;
  for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

  std::string task = "cipher", data = "run", scorer, kind, split = "test";
  std::string dims = "64,128,256,512,1024";
  std::vector<std::string> splits = {"train", "valid", "test"};
  std::vector<std::string> sampler_paths;
  int samples = 0, n = 4;
  bool plot = false;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  gen->add_option("--task", task, "cipher or translit")
      ->check(CLI::IsMember({"cipher", "translit"}));
  auto* build = app.add_subcommand("build-lattice", "cache lattices");
  build->add_option("--data", data, "corpus directory");
  build->add_option("--split", splits, "splits to build");
  auto* tsc = app.add_subcommand("train-scorer", "alternating scorer training");
  tsc->add_option("--data", data, "corpus directory");
  auto* tsa = app.add_subcommand("train-sampler", "inclusive-KL sampler training");
  tsa->add_option("--data", data, "corpus directory");
  tsa->add_option("--scorer", scorer, "scorer checkpoint")->required();
  tsa->add_option("--kind", kind, "sampler kind")
      ->required()
      ->check(CLI::IsMember({"swa", "sws", "swp", "nolook"}));
  auto* ev = app.add_subcommand("evaluate", "Partial KL, length and ESS");
  ev->add_option("--data", data, "corpus directory");
  ev->add_option("--scorer", scorer, "scorer checkpoint")->required();
  ev->add_option("--sampler", sampler_paths, "sampler checkpoints")
      ->required();
  ev->add_option("--split", split, "split to evaluate");
  ev->add_option("--samples", samples, "samples per pair");
  auto* smp = app.add_subcommand("sample", "emit proposals");
  smp->add_option("--data", data, "corpus directory");
  smp->add_option("--sampler", sampler_paths, "sampler checkpoint")
      ->required()
      ->expected(1);
  smp->add_option("--scorer", scorer, "scorer checkpoint");
  smp->add_option("--split", split, "split to sample");
  smp->add_option("-n", n, "draws per pair")->check(CLI::PositiveNumber);
  auto* sw = app.add_subcommand("sweep", "hidden-dimension ablation");
  sw->add_option("--dims", dims, "comma-separated dimensions");
  sw->add_flag("--emit-plot-data", plot, "write per-epoch probe KL");
  auto* st = app.add_subcommand("stats", "corpus statistics");
  st->add_option("--data", data, "corpus directory");

  for (CLI::App* sub : {gen, build, tsc, tsa, ev, smp, sw, st}) {
    add_common(sub, ctx.common);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    ctx.command = sub->get_name();
    ctx.common.seed_given = sub->count("--seed") > 0;
  }

  try {
    if (ctx.command == "gen-data") return cmd_gen_data(ctx, task);
    if (ctx.command == "build-lattice") {
      return cmd_build_lattice(ctx, data, splits);
    }
    if (ctx.command == "train-scorer") return cmd_train_scorer(ctx, data);
    if (ctx.command == "train-sampler") {
      return cmd_train_sampler(ctx, data, scorer, kind);
    }
    if (ctx.command == "evaluate") {
      return cmd_evaluate(ctx, data, scorer, sampler_paths, split, samples);
    }
    if (ctx.command == "sample") {
      return cmd_sample(ctx, data, sampler_paths.front(), scorer, split, n);
    }
    if (ctx.command == "sweep") return cmd_sweep(ctx, dims, plot);
    if (ctx.command == "stats") return cmd_stats(ctx, data);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace nfst
