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

#ifndef NFST_LATTICE_H_
#define NFST_LATTICE_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nfst/common.h"
#include "nfst/fst.h"

namespace nfst {

// Lattice arc: exactly one mark plus how many symbols of x and y it consumes.
struct LatticeArc {
  StateId src = kNoState;
  Label mark = -1;
  int nx = 0;
  int ny = 0;
  StateId dst = kNoState;
  bool operator==(const LatticeArc&) const = default;
};

// Sequence of arc indices starting at the initial state.
using LatticePath = std::vector<int>;

struct Progress {
  int nx = 0;
  int ny = 0;
  bool operator==(const Progress&) const = default;
};

// Acyclic single-mark machine over the alignments of one string pair. The
// constructor validates structure (ranges, acyclicity, path-independent
// progress that ends at (|x|, |y|) on finals); the canonical properties are
// checked separately by check_canonical.
class Lattice {
 public:
  Lattice() = default;
  Lattice(SymbolTable input, SymbolTable output, SymbolTable marks,
          LabelString x, LabelString y, int num_states, StateId initial,
          std::vector<bool> finals, std::vector<LatticeArc> arcs);

  int num_states() const { return static_cast<int>(out_.size()); }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  StateId initial() const { return initial_; }
  bool is_final(StateId s) const { return finals_.at(s); }
  const std::vector<bool>& finals() const { return finals_; }
  const LatticeArc& arc(int i) const { return arcs_.at(i); }
  const std::vector<LatticeArc>& arcs() const { return arcs_; }
  const std::vector<int>& out_arcs(StateId s) const { return out_.at(s); }
  // Out-arc of s carrying `mark`, or -1.
  int find_arc(StateId s, Label mark) const;

  // Sinks first: every arc goes from a later to an earlier entry.
  const std::vector<StateId>& reverse_topo() const { return reverse_topo_; }
  // Symbols of x and y consumed on any path from the initial state to s.
  Progress progress(StateId s) const { return progress_.at(s); }

  const LabelString& x() const { return x_; }
  const LabelString& y() const { return y_; }
  const SymbolTable& input_symbols() const { return input_; }
  const SymbolTable& output_symbols() const { return output_; }
  const SymbolTable& mark_symbols() const { return marks_; }

  bool operator==(const Lattice& other) const;

 private:
  SymbolTable input_;
  SymbolTable output_;
  SymbolTable marks_;
  LabelString x_;
  LabelString y_;
  StateId initial_ = kNoState;
  std::vector<bool> finals_;
  std::vector<LatticeArc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<StateId> reverse_topo_;
  std::vector<Progress> progress_;
};

struct CanonicalizeOptions {
  std::size_t max_subset_states = 1000000;
  bool minimize = true;
};

struct LatticeBuildStats {
  int composed_states = 0;
  int composed_arcs = 0;
  // After splitting multi-mark arcs, before determinization.
  int split_states = 0;
  int split_arcs = 0;
  // Determinized, before minimization.
  int determinized_states = 0;
  int determinized_arcs = 0;
  int minimized_states = 0;
  int minimized_arcs = 0;
};

// Determinizes x o T o y over the mark tape with (input, output) progress as
// the residual weight, emitting progress as soon as every continuation agrees
// on it, then minimizes. Throws kCyclicMachine, kAmbiguousMarks (two
// generating paths share a mark string), kEmptyLanguage, or kLimitExceeded
// (subset-state cap).
Lattice canonicalize(const Mfst& t, std::span<const Label> x,
                     std::span<const Label> y,
                     const CanonicalizeOptions& options = {},
                     LatticeBuildStats* stats = nullptr);

// Minimizes an acyclic deterministic lattice by merging states with equal
// (final, {(mark, nx, ny, target class)}) signatures, bottom-up.
Lattice minimize(const Lattice& lattice);

// State reached by the path; throws kInvalidPath.
StateId path_end(const Lattice& lattice, const LatticePath& path);
LatticePath path_from_marks(const Lattice& lattice,
                            std::span<const Label> marks);
LabelString path_marks(const Lattice& lattice, const LatticePath& path);
bool is_complete(const Lattice& lattice, const LatticePath& path);

// The not-yet-aligned suffixes of x and y after `prefix`.
std::pair<LabelString, LabelString> suffixes_at(const Lattice& lattice,
                                                const LatticePath& prefix);

// All complete paths, depth-first in arc order. kLimitExceeded past max_paths.
std::vector<LatticePath> enumerate_lattice_paths(const Lattice& lattice,
                                                 std::size_t max_paths);

struct CanonicalReport {
  bool deterministic = true;
  bool coaccessible = true;
  bool minimal = true;
  bool language_equal = true;
  bool progress_consistent = true;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Property harness: determinism, co-accessibility, minimality (pairwise
// distinct suffix languages), and mark-language equality with x o T o y by
// enumeration. Desk-scale instances only.
CanonicalReport check_canonical(const Lattice& lattice, const Mfst& t,
                                std::span<const Label> x,
                                std::span<const Label> y,
                                std::size_t max_paths = 10000);

// Text format: headers, then `src <TAB> dst <TAB> mark <TAB> nx <TAB> ny`.
void write_lattice(std::ostream& os, const Lattice& lattice);
Lattice read_lattice(std::istream& is);
std::string lattice_to_string(const Lattice& lattice);
Lattice lattice_from_string(const std::string& text);

// Cache key over (T, x, y) contents.
std::string lattice_cache_key(const Mfst& t, std::span<const Label> x,
                              std::span<const Label> y);

}  // namespace nfst

#endif  // NFST_LATTICE_H_
