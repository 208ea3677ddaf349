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

#include "nfst/datasets.h"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace nfst {

MarkScheme make_mark_scheme(const SymbolTable& input,
                            const SymbolTable& output, int n_ciphers) {
  MarkScheme s;
  s.del = s.marks.add("<delete>");
  s.ins = s.marks.add("<insert>");
  s.rep = s.marks.add("<replace>");
  s.copy = s.marks.add("<copy>");
  for (const auto& name : input.names()) {
    s.input_mark.push_back(s.marks.add("<in:" + name + ">"));
  }
  for (const auto& name : output.names()) {
    s.output_mark.push_back(s.marks.add("<out:" + name + ">"));
  }
  for (int i = 0; i < n_ciphers; ++i) {
    s.cipher_mark.push_back(s.marks.add("<cipher" + std::to_string(i + 1) +
                                        ">"));
  }
  return s;
}

SymbolTable make_alphabet(int size, bool upper) {
  SymbolTable t;
  for (int i = 0; i < size; ++i) {
    if (size <= 26) {
      t.add(std::string(1, static_cast<char>((upper ? 'A' : 'a') + i)));
    } else {
      t.add((upper ? "S" : "s") + std::to_string(i));
    }
  }
  return t;
}

Mfst topology_del_ins(const SymbolTable& input, const SymbolTable& output,
                      const MarkScheme& scheme) {
  Mfst m(input, output, scheme.marks);
  const StateId s = m.add_state();
  m.set_initial(s);
  m.set_final(s);
  for (Label a = 0; a < input.size(); ++a) {
    m.add_arc(s, {a}, {}, {scheme.del, scheme.input_mark.at(a)}, s);
  }
  for (Label b = 0; b < output.size(); ++b) {
    m.add_arc(s, {}, {b}, {scheme.ins, scheme.output_mark.at(b)}, s);
  }
  return m;
}

Mfst topology_del_ins_copy(const SymbolTable& alphabet,
                           const MarkScheme& scheme) {
  Mfst m(alphabet, alphabet, scheme.marks);
  const StateId s = m.add_state();
  m.set_initial(s);
  m.set_final(s);
  for (Label b = 0; b < alphabet.size(); ++b) {
    const Label mb = scheme.output_mark.at(b);
    m.add_arc(s, {b}, {}, {scheme.del, mb}, s);
    m.add_arc(s, {}, {b}, {scheme.ins, mb}, s);
    m.add_arc(s, {b}, {b}, {scheme.copy, mb}, s);
  }
  return m;
}

Mfst topology_edit(const SymbolTable& input, const SymbolTable& output,
                   const MarkScheme& scheme) {
  Mfst m(input, output, scheme.marks);
  const StateId s = m.add_state();
  m.set_initial(s);
  m.set_final(s);
  for (Label a = 0; a < input.size(); ++a) {
    for (Label b = 0; b < output.size(); ++b) {
      m.add_arc(s, {a}, {b},
                {scheme.rep, scheme.input_mark.at(a), scheme.output_mark.at(b)},
                s);
    }
  }
  for (Label a = 0; a < input.size(); ++a) {
    m.add_arc(s, {a}, {}, {scheme.del, scheme.input_mark.at(a)}, s);
  }
  for (Label b = 0; b < output.size(); ++b) {
    m.add_arc(s, {}, {b}, {scheme.ins, scheme.output_mark.at(b)}, s);
  }
  return m;
}

std::vector<Label> fisher_yates(int n, Rng& rng) {
  std::vector<Label> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

CipherMachine build_cipher_mfst(const SymbolTable& input,
                                const SymbolTable& output, int n_ciphers,
                                std::uint64_t seed) {
  if (input.size() != output.size()) {
    throw Error(ErrorKind::kAlphabetMismatch,
                "cipher needs equal alphabet sizes");
  }
  CipherMachine cm;
  cm.scheme = make_mark_scheme(input, output, n_ciphers);
  const MarkScheme& s = cm.scheme;
  Rng rng(seed);
  Mfst stage(input, output, s.marks);
  const StateId init = stage.add_state();
  stage.set_initial(init);
  for (int i = 0; i < n_ciphers; ++i) {
    cm.perms.push_back(fisher_yates(input.size(), rng));
    const StateId c = stage.add_state();
    stage.set_final(c);
    stage.add_arc(init, {}, {}, {s.cipher_mark[i]}, c);
  }
  for (int i = 0; i < n_ciphers; ++i) {
    const StateId c = i + 1;
    for (Label a = 0; a < input.size(); ++a) {
      const Label b = cm.perms[i][a];
      stage.add_arc(c, {a}, {b}, {s.rep, s.input_mark[a], s.output_mark[b]},
                    c);
    }
  }
  cm.stage = stage;
  cm.task = merge_equivalent_states(
      compose_mfst(stage, topology_del_ins_copy(output, s)));
  return cm;
}

namespace {

LabelString draw_string(const LengthProfile& lengths, int alphabet, Rng& rng) {
  const int n = rng.uniform_int(lengths.min_len, lengths.max_len);
  LabelString x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = static_cast<Label>(rng.below(static_cast<std::uint64_t>(alphabet)));
  }
  return x;
}

}  // namespace

Corpus gen_cipher_split(const CipherMachine& machine, int size,
                        const LengthProfile& lengths, double p_del,
                        double p_ins, Rng& rng) {
  const MarkScheme& s = machine.scheme;
  const SymbolTable& marks = s.marks;
  Corpus c{machine.task.input_symbols(), machine.task.output_symbols(), {}};
  const int nout = c.output.size();
  for (int n = 0; n < size; ++n) {
    Pair p;
    p.x = draw_string(lengths, c.input.size(), rng);
    const int cipher =
        static_cast<int>(rng.below(machine.perms.size()));
    const auto& perm = machine.perms[cipher];
    LabelString gold{s.cipher_mark[cipher]};
    auto insert_gap = [&]() {
      if (!rng.bernoulli(p_ins)) return;
      const Label b = static_cast<Label>(rng.below(nout));
      p.y.push_back(b);
      gold.push_back(s.ins);
      gold.push_back(s.output_mark[b]);
    };
    insert_gap();
    for (Label a : p.x) {
      const Label b = perm[a];
      gold.insert(gold.end(), {s.rep, s.input_mark[a], s.output_mark[b]});
      if (rng.bernoulli(p_del)) {
        gold.insert(gold.end(), {s.del, s.output_mark[b]});
      } else {
        p.y.push_back(b);
        gold.insert(gold.end(), {s.copy, s.output_mark[b]});
      }
      insert_gap();
    }
    p.gold = join_labels(marks, gold, " ");
    c.pairs.push_back(std::move(p));
  }
  return c;
}

CipherCorpus gen_cipher_corpus(const CipherCorpusConfig& config) {
  CipherCorpus out;
  out.machine =
      build_cipher_mfst(make_alphabet(config.alphabet_size),
                        make_alphabet(config.alphabet_size, true),
                        config.n_ciphers, config.seed);
  Rng rng(splitmix64(config.seed ^ 0x636f72707573ULL));
  Rng train_rng = rng.split(0);
  Rng valid_rng = rng.split(1);
  Rng test_rng = rng.split(2);
  out.train = gen_cipher_split(out.machine, config.train_size,
                               config.train_lengths, config.p_del,
                               config.p_ins, train_rng);
  out.valid = gen_cipher_split(out.machine, config.valid_size,
                               config.valid_lengths, config.p_del,
                               config.p_ins, valid_rng);
  out.test = gen_cipher_split(out.machine, config.test_size,
                              config.test_lengths, config.p_del, config.p_ins,
                              test_rng);
  return out;
}

Corpus gen_translit_corpus(const TranslitConfig& config) {
  Rng rng(config.seed);
  Corpus c{make_alphabet(config.input_size),
           make_alphabet(config.output_size, true),
           {}};
  const int ni = config.input_size;
  const int no = config.output_size;
  // rules[(prev + 1) * ni + cur]; prev = -1 at the start.
  std::vector<LabelString> rules((ni + 1) * ni);
  for (auto& r : rules) {
    const int len = rng.bernoulli(0.3) ? 2 : 1;
    for (int k = 0; k < len; ++k) {
      r.push_back(static_cast<Label>(rng.below(no)));
    }
  }
  for (int n = 0; n < config.size; ++n) {
    Pair p;
    p.x = draw_string(config.lengths, ni, rng);
    Label prev = -1;
    for (Label a : p.x) {
      const auto& r = rules[(prev + 1) * ni + a];
      p.y.insert(p.y.end(), r.begin(), r.end());
      prev = a;
    }
    c.pairs.push_back(std::move(p));
  }
  return c;
}

namespace {

Corpus read_tsv_impl(std::istream& is, SymbolTable* input,
                     SymbolTable* output, bool induce) {
  Corpus c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2 && cols.size() != 3) {
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(lineno) + ": expected 2 or 3 columns");
    }
    Pair p;
    for (int side = 0; side < 2; ++side) {
      SymbolTable& table = side == 0 ? *input : *output;
      for (const auto& tok : split_ws(cols[side])) {
        Label l = table.find(tok);
        if (l < 0) {
          if (!induce) {
            throw Error(ErrorKind::kUnknownSymbol,
                        "line " + std::to_string(lineno) + ": " + tok);
          }
          l = table.add(tok);
        }
        (side == 0 ? p.x : p.y).push_back(l);
      }
    }
    if (cols.size() == 3) p.gold = cols[2];
    c.pairs.push_back(std::move(p));
  }
  c.input = *input;
  c.output = *output;
  return c;
}

}  // namespace

Corpus read_tsv(std::istream& is) {
  SymbolTable in, out;
  return read_tsv_impl(is, &in, &out, true);
}

Corpus read_tsv(std::istream& is, const SymbolTable& input,
                const SymbolTable& output) {
  SymbolTable in = input, out = output;
  return read_tsv_impl(is, &in, &out, false);
}

Corpus load_tsv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot read " + path);
  return read_tsv(is);
}

void write_tsv(std::ostream& os, const Corpus& corpus) {
  for (const Pair& p : corpus.pairs) {
    os << join_labels(corpus.input, p.x, " ") << '\t'
       << join_labels(corpus.output, p.y, " ");
    if (!p.gold.empty()) os << '\t' << p.gold;
    os << '\n';
  }
}

void save_tsv(const std::string& path, const Corpus& corpus) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + path);
  write_tsv(os, corpus);
}

CorpusStats corpus_stats(const Corpus& corpus, const Mfst& t) {
  CorpusStats st;
  st.pairs = static_cast<int>(corpus.pairs.size());
  st.mark_alphabet = t.mark_symbols().size();
  if (st.pairs == 0) return st;
  for (const Pair& p : corpus.pairs) {
    LatticeBuildStats b;
    canonicalize(t, p.x, p.y, {}, &b);
    st.mean_x += static_cast<double>(p.x.size());
    st.mean_y += static_cast<double>(p.y.size());
    st.mean_states += b.determinized_states;
    st.mean_arcs += b.determinized_arcs;
    st.mean_min_states += b.minimized_states;
    st.mean_min_arcs += b.minimized_arcs;
  }
  const double n = st.pairs;
  st.mean_x /= n;
  st.mean_y /= n;
  st.mean_states /= n;
  st.mean_arcs /= n;
  st.mean_min_states /= n;
  st.mean_min_arcs /= n;
  return st;
}

void write_stats_tsv(std::ostream& os, const std::vector<std::string>& names,
                     const std::vector<CorpusStats>& rows) {
  os << "split\tpairs\tmean_x\tmean_y\tstates\tarcs\tmin_states\tmin_arcs"
        "\tmarks\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CorpusStats& s = rows[i];
    std::ostringstream line;
    line.precision(6);
    line << names.at(i) << '\t' << s.pairs << '\t' << s.mean_x << '\t'
         << s.mean_y << '\t' << s.mean_states << '\t' << s.mean_arcs << '\t'
         << s.mean_min_states << '\t' << s.mean_min_arcs << '\t'
         << s.mark_alphabet << '\n';
    os << line.str();
  }
}

}  // namespace nfst
