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

#ifndef NFST_DATASETS_H_
#define NFST_DATASETS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "nfst/common.h"
#include "nfst/fst.h"
#include "nfst/lattice.h"

namespace nfst {

// Mark alphabet: operation marks, one mark per input symbol, one per output
// symbol, then cipher selectors. Input and output symbol marks are distinct
// even when the alphabets share names.
struct MarkScheme {
  SymbolTable marks;
  Label del = -1;
  Label ins = -1;
  Label rep = -1;
  Label copy = -1;
  std::vector<Label> input_mark;   // by input symbol id
  std::vector<Label> output_mark;  // by output symbol id
  std::vector<Label> cipher_mark;  // by cipher index
};

MarkScheme make_mark_scheme(const SymbolTable& input,
                            const SymbolTable& output, int n_ciphers = 0);

// Symbols "a".."z" (or "s0".. past 26), optionally uppercase.
SymbolTable make_alphabet(int size, bool upper = false);

// One state; a:eps <delete><a> and eps:b <insert><b>.
Mfst topology_del_ins(const SymbolTable& input, const SymbolTable& output,
                      const MarkScheme& scheme);
// Over one alphabet; adds b:b <copy><b>.
Mfst topology_del_ins_copy(const SymbolTable& alphabet,
                           const MarkScheme& scheme);
// Substitution, insertion and deletion over every symbol pair.
Mfst topology_edit(const SymbolTable& input, const SymbolTable& output,
                   const MarkScheme& scheme);

struct CipherMachine {
  MarkScheme scheme;
  // perms[i][a] is the output symbol of input symbol a under cipher i.
  std::vector<std::vector<Label>> perms;
  Mfst stage;  // cipher selection and substitution only
  Mfst task;   // stage composed with deletion/insertion/copy, merged
};

// Fisher-Yates over [0, n).
std::vector<Label> fisher_yates(int n, Rng& rng);

// Requires |input| == |output| (kAlphabetMismatch).
CipherMachine build_cipher_mfst(const SymbolTable& input,
                                const SymbolTable& output, int n_ciphers,
                                std::uint64_t seed);

struct Pair {
  LabelString x;
  LabelString y;
  // Mark string of the generating path, space-separated; empty if unknown.
  std::string gold;
  bool operator==(const Pair&) const = default;
};

struct Corpus {
  SymbolTable input;
  SymbolTable output;
  std::vector<Pair> pairs;
};

struct LengthProfile {
  int min_len = 1;
  int max_len = 10;  // inclusive, uniform in [min_len, max_len]
};

struct CipherCorpusConfig {
  int alphabet_size = 10;
  int n_ciphers = 5;
  std::uint64_t seed = 1;
  int train_size = 500;
  int valid_size = 50;
  int test_size = 50;
  LengthProfile train_lengths{2, 8};
  LengthProfile valid_lengths{2, 8};
  LengthProfile test_lengths{5, 11};
  double p_del = 0.1;
  double p_ins = 0.1;
};

struct CipherCorpus {
  CipherMachine machine;
  Corpus train;
  Corpus valid;
  Corpus test;
};

// Draws x uniformly, picks a cipher uniformly, enciphers, then drops each
// output symbol with p_del and inserts a uniform symbol at each gap with
// p_ins. Each pair's gold field is the generating mark string.
CipherCorpus gen_cipher_corpus(const CipherCorpusConfig& config);
// One split from an existing machine.
Corpus gen_cipher_split(const CipherMachine& machine, int size,
                        const LengthProfile& lengths, double p_del,
                        double p_ins, Rng& rng);

struct TranslitConfig {
  int input_size = 6;
  int output_size = 8;
  int size = 200;
  LengthProfile lengths{2, 7};
  std::uint64_t seed = 1;
};

// Monotone context-dependent rewriting over disjoint alphabets: each input
// symbol emits one or two output symbols chosen by (previous, current).
Corpus gen_translit_corpus(const TranslitConfig& config);

// Two tab-separated columns of space-separated tokens, optional third column
// with the gold mark string. Alphabets are induced in order of appearance.
Corpus load_tsv(const std::string& path);
Corpus read_tsv(std::istream& is);
// Uses the given alphabets instead of inducing new ones.
Corpus read_tsv(std::istream& is, const SymbolTable& input,
                const SymbolTable& output);
void write_tsv(std::ostream& os, const Corpus& corpus);
void save_tsv(const std::string& path, const Corpus& corpus);

struct CorpusStats {
  int pairs = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  // Determinized lattice before minimization.
  double mean_states = 0.0;
  double mean_arcs = 0.0;
  double mean_min_states = 0.0;
  double mean_min_arcs = 0.0;
  int mark_alphabet = 0;
};

CorpusStats corpus_stats(const Corpus& corpus, const Mfst& t);
void write_stats_tsv(std::ostream& os, const std::vector<std::string>& names,
                     const std::vector<CorpusStats>& rows);

}  // namespace nfst

#endif  // NFST_DATASETS_H_
