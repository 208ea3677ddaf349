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

#ifndef NFST_FST_H_
#define NFST_FST_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nfst/common.h"

namespace nfst {

// One arc of a marked transducer. Each tape carries a (possibly empty)
// substring over its alphabet.
struct MfstArc {
  StateId src = kNoState;
  LabelString input;
  LabelString output;
  LabelString marks;
  StateId dst = kNoState;

  bool operator==(const MfstArc&) const = default;
};

// Marked finite-state transducer over (input, output, mark) tapes. State ids
// are dense; arcs keep insertion order, which fixes every traversal order.
class Mfst {
 public:
  Mfst() = default;
  Mfst(SymbolTable input, SymbolTable output, SymbolTable marks);

  StateId add_state();
  void add_states(int n);
  // Validates endpoints and alphabets. Returns the arc index.
  int add_arc(MfstArc arc);
  int add_arc(StateId src, LabelString in, LabelString out, LabelString marks,
              StateId dst);
  void set_initial(StateId s);
  void set_final(StateId s, bool final = true);

  int num_states() const { return static_cast<int>(out_.size()); }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  StateId initial() const { return initial_; }
  bool is_final(StateId s) const { return final_.at(s); }
  std::vector<StateId> finals() const;
  bool empty() const { return num_states() == 0 || initial_ == kNoState; }

  const MfstArc& arc(int index) const { return arcs_.at(index); }
  const std::vector<MfstArc>& arcs() const { return arcs_; }
  // Indices into arcs(), in insertion order.
  const std::vector<int>& out_arcs(StateId s) const { return out_.at(s); }

  const SymbolTable& input_symbols() const { return input_; }
  const SymbolTable& output_symbols() const { return output_; }
  const SymbolTable& mark_symbols() const { return marks_; }

  bool operator==(const Mfst& other) const;

 private:
  SymbolTable input_;
  SymbolTable output_;
  SymbolTable marks_;
  std::vector<MfstArc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<bool> final_;
  StateId initial_ = kNoState;
};

// A generating path: initial state to a final state.
struct GenPath {
  std::vector<int> arcs;
  LabelString x_emitted;
  LabelString y_emitted;
  LabelString marks;
};

// Coordinates of a state of x o T o y.
struct GridState {
  int i = 0;
  StateId q = kNoState;
  int j = 0;
  bool operator==(const GridState&) const = default;
};

struct ComposedPair {
  Mfst fst;
  std::vector<GridState> coords;  // indexed by state id of fst
};

// x o T o y, trimmed. Arcs may carry multi-symbol substrings; they match
// natively against x and y.
ComposedPair compose_with_pair(const Mfst& t, std::span<const Label> x,
                               std::span<const Label> y);

// Splits arcs whose input or output substring is longer than one symbol into
// chains through fresh states. Marks stay on the first arc of a chain.
Mfst normalize_arcs(const Mfst& m);

// Relational composition of A (input of A -> output of A) with B. Matched arc
// pairs carry marks of A followed by marks of B. Epsilon interleavings are
// coordinated by the three-state epsilon-matching filter: between two real
// matches, simultaneous epsilon moves come first, then moves of one side only.
Mfst compose_mfst(const Mfst& a, const Mfst& b);

// Keeps states that are reachable and co-reachable. Surviving states keep
// their relative order. `kept`, when given, receives old ids per new id.
Mfst trim(const Mfst& m, std::vector<StateId>* kept = nullptr);

// Topological order of all states. Throws kCyclicMachine.
std::vector<StateId> topo_order(const Mfst& m);
bool is_acyclic(const Mfst& m);

// Merges states with identical finality and identical multisets of
// (input, output, marks, target-class) arcs, to a fixpoint. The multiset of
// generating paths is preserved label for label.
Mfst merge_equivalent_states(const Mfst& m);

// All generating paths, depth-first in arc insertion order. Throws
// kLimitExceeded if there are more than max_paths (including infinitely many).
std::vector<GenPath> enumerate_paths(const Mfst& m, std::size_t max_paths);

// Text format. One header line per field, then one arc per line:
//   src <TAB> dst <TAB> in <TAB> out <TAB> marks
// with multi-symbol substrings space-separated and <eps> for empty.
void write_mfst(std::ostream& os, const Mfst& m);
Mfst read_mfst(std::istream& is);
std::string mfst_to_string(const Mfst& m);
Mfst mfst_from_string(const std::string& text);

inline constexpr const char* kEpsilonText = "<eps>";

}  // namespace nfst

#endif  // NFST_FST_H_
