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

#include "nfst/lattice.h"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "nfst/datasets.h"
#include "oracles.h"

namespace nfst {
namespace {

// Determinism, co-accessibility and progress totals, checked directly.
void expect_structure(const Lattice& l) {
  std::vector<bool> live(l.num_states(), false);
  for (StateId s : l.reverse_topo()) {
    std::set<Label> seen;
    bool ok = l.is_final(s);
    for (int a : l.out_arcs(s)) {
      EXPECT_TRUE(seen.insert(l.arc(a).mark).second) << "state " << s;
      ok = ok || live[l.arc(a).dst];
    }
    live[s] = ok;
  }
  for (StateId s = 0; s < l.num_states(); ++s) EXPECT_TRUE(live[s]) << s;
  for (const auto& p : test::lattice_paths(l)) {
    int nx = 0, ny = 0;
    for (int a : p) {
      nx += l.arc(a).nx;
      ny += l.arc(a).ny;
    }
    EXPECT_EQ(nx, static_cast<int>(l.x().size()));
    EXPECT_EQ(ny, static_cast<int>(l.y().size()));
  }
}

// Mark-set equality with the brute-force walk of T plus the library's own
// property report.
void expect_oracle(const Mfst& t, const LabelString& x, const LabelString& y) {
  const test::BruteResult brute = test::brute_marks(t, x, y);
  ASSERT_EQ(std::set<LabelString>(brute.marks.begin(), brute.marks.end()).size(),
            brute.marks.size());
  if (brute.marks.empty()) {
    try {
      canonicalize(t, x, y);
      FAIL() << "expected an empty language";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kEmptyLanguage);
    }
    return;
  }
  const Lattice l = canonicalize(t, x, y);
  EXPECT_EQ(test::lattice_marks(l), brute.marks);
  expect_structure(l);
  const CanonicalReport r = check_canonical(l, t, x, y);
  EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
}

struct Topologies {
  SymbolTable in = make_alphabet(2);
  SymbolTable out = make_alphabet(2, true);
  MarkScheme scheme = make_mark_scheme(in, out);
  MarkScheme same_scheme = make_mark_scheme(in, in);
  Mfst di = topology_del_ins(in, out, scheme);
  Mfst dic = topology_del_ins_copy(in, same_scheme);
  Mfst edit = topology_edit(in, out, scheme);
  CipherMachine cipher =
      build_cipher_mfst(make_alphabet(3), make_alphabet(3, true), 2, 4);
};

class OracleTest : public ::testing::TestWithParam<int> {};

TEST_P(OracleTest, HundredRandomInstances) {
  Topologies t;
  Rng rng(100 + GetParam());
  for (int trial = 0; trial < 100; ++trial) {
    const LabelString x = test::random_string(rng, 4, 2);
    const LabelString y = test::random_string(rng, 4, 2);
    switch (GetParam()) {
      case 0: expect_oracle(t.di, x, y); break;
      case 1: expect_oracle(t.dic, x, y); break;
      case 2: expect_oracle(t.edit, x, y); break;
      case 3: {
        const LabelString x3 = test::random_string(rng, 4, 3);
        const LabelString y3 = test::random_string(rng, 4, 3);
        expect_oracle(t.cipher.task, x3, y3);
        break;
      }
      case 4: expect_oracle(test::random_substring_machine(rng, 5), x, y); break;
    }
    if (HasFatalFailure()) return;
  }
}

INSTANTIATE_TEST_SUITE_P(Topologies, OracleTest, ::testing::Range(0, 5));

TEST(Canonicalize, CipherTaskAllBranches) {
  const CipherMachine c =
      build_cipher_mfst(make_alphabet(10), make_alphabet(10, true), 5, 1);
  Rng rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const LabelString x = test::random_string(rng, 4, 10);
    LabelString y = x;
    for (Label& l : y) l = c.perms[trial % 5][l];
    if (!y.empty() && rng.bernoulli(0.5)) y.pop_back();
    expect_oracle(c.task, x, y);
  }
}

TEST(Canonicalize, DeletionInsertionSingletons) {
  Topologies t;
  const Lattice l = canonicalize(t.di, LabelString{0}, LabelString{1});
  std::set<std::string> got;
  for (const auto& m : test::lattice_marks(l)) {
    got.insert(join_labels(l.mark_symbols(), m, ""));
  }
  EXPECT_EQ(got, (std::set<std::string>{"<delete><in:a><insert><out:B>",
                                        "<insert><out:B><delete><in:a>"}));
  for (const LatticeArc& a : l.arcs()) EXPECT_GE(a.mark, 0);
}

TEST(Canonicalize, EmptyPair) {
  Topologies t;
  const Lattice l = canonicalize(t.di, {}, {});
  EXPECT_EQ(l.num_states(), 1);
  EXPECT_EQ(l.num_arcs(), 0);
  EXPECT_TRUE(l.is_final(l.initial()));
  EXPECT_EQ(test::lattice_paths(l).size(), 1u);
}

TEST(Canonicalize, CountsMatchRecurrences) {
  Topologies t;
  for (int m = 0; m <= 4; ++m) {
    for (int n = 0; n <= 4; ++n) {
      const LabelString x(m, 1), y(n, 0);
      const Lattice e = canonicalize(t.edit, x, y);
      EXPECT_EQ(test::lattice_paths(e).size(), test::delannoy(m, n));
      const Lattice d = canonicalize(t.di, x, y);
      EXPECT_EQ(test::lattice_paths(d).size(), test::binomial(m + n, m));
      for (const auto& marks : test::lattice_marks(d)) {
        EXPECT_EQ(marks.size(), 2u * (m + n));
      }
    }
  }
}

TEST(Canonicalize, EditThreeByTwo) {
  Topologies t;
  EXPECT_EQ(test::lattice_paths(canonicalize(t.edit, LabelString{0, 1, 0}, LabelString{1, 1})).size(),
            25u);
}

TEST(Canonicalize, ProgressIsEmittedEarly) {
  // Replacing a by B: <replace> already fixes one symbol of each string.
  Topologies t;
  const Lattice l = canonicalize(t.edit, LabelString{0}, LabelString{1});
  for (int a : l.out_arcs(l.initial())) {
    const LatticeArc& arc = l.arc(a);
    const std::string& name = l.mark_symbols().name(arc.mark);
    if (name == "<replace>") EXPECT_EQ(std::make_pair(arc.nx, arc.ny),
                                       std::make_pair(1, 1));
    if (name == "<delete>") EXPECT_EQ(std::make_pair(arc.nx, arc.ny),
                                      std::make_pair(1, 0));
    if (name == "<insert>") EXPECT_EQ(std::make_pair(arc.nx, arc.ny),
                                      std::make_pair(0, 1));
  }
}

TEST(Canonicalize, Errors) {
  const SymbolTable s({"a"});
  const SymbolTable m({"<m>", "<n>"});
  auto expect_kind = [](const Mfst& t, ErrorKind kind,
                        CanonicalizeOptions opts = {}) {
    try {
      canonicalize(t, LabelString{0}, LabelString{0}, opts);
      FAIL() << error_kind_name(kind);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  Mfst cyclic(s, s, m);
  cyclic.add_state();
  cyclic.set_initial(0);
  cyclic.set_final(0);
  cyclic.add_arc(0, {0}, {0}, {0}, 0);
  cyclic.add_arc(0, {}, {}, {1}, 0);
  expect_kind(cyclic, ErrorKind::kCyclicMachine);

  Mfst ambiguous(s, s, m);
  ambiguous.add_states(2);
  ambiguous.set_initial(0);
  ambiguous.set_final(1);
  ambiguous.add_arc(0, {0}, {0}, {0}, 1);
  ambiguous.add_arc(0, {0}, {0}, {0}, 1);
  expect_kind(ambiguous, ErrorKind::kAmbiguousMarks);

  Mfst empty(s, s, m);
  empty.add_states(2);
  empty.set_initial(0);
  empty.set_final(1);
  empty.add_arc(0, {0}, {}, {0}, 1);
  expect_kind(empty, ErrorKind::kEmptyLanguage);

  Topologies t;
  CanonicalizeOptions tiny;
  tiny.max_subset_states = 3;
  try {
    canonicalize(t.edit, LabelString{0, 1, 0}, LabelString{1, 1}, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLimitExceeded);
  }
}

TEST(Canonicalize, MinimizationShrinksAndRaisesArcRatio) {
  const CipherMachine c =
      build_cipher_mfst(make_alphabet(10), make_alphabet(10, true), 5, 2);
  Topologies t;
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    LabelString x = test::random_string(rng, 5, 10);
    x.push_back(3);
    LabelString y = x;
    for (Label& l : y) l = c.perms[1][l];
    LatticeBuildStats st;
    canonicalize(c.task, x, y, {}, &st);
    EXPECT_LE(st.minimized_states, st.determinized_states);
    EXPECT_GT(static_cast<double>(st.minimized_arcs) / st.minimized_states,
              static_cast<double>(st.determinized_arcs) /
                  st.determinized_states);
  }
}

TEST(Canonicalize, MinimizeIsIdempotent) {
  for (const Lattice& l : test::random_lattices(20, 5, 3)) {
    EXPECT_TRUE(minimize(l) == l);
  }
}

Mfst single_mark_edit(const SymbolTable& in, const SymbolTable& out) {
  Mfst m(in, out, SymbolTable({"<sub>", "<del>", "<ins>"}));
  m.add_state();
  m.set_initial(0);
  m.set_final(0);
  for (Label a = 0; a < in.size(); ++a) {
    for (Label b = 0; b < out.size(); ++b) m.add_arc(0, {a}, {b}, {0}, 0);
  }
  for (Label a = 0; a < in.size(); ++a) m.add_arc(0, {a}, {}, {1}, 0);
  for (Label b = 0; b < out.size(); ++b) m.add_arc(0, {}, {b}, {2}, 0);
  return m;
}

TEST(SuffixesAt, GridScenario) {
  const SymbolTable in({"a", "b", "c", "d", "e"});
  const SymbolTable out({"d", "e", "f", "g"});
  const Mfst t = single_mark_edit(in, out);
  const LabelString x{0, 1, 2, 3, 4}, y{0, 1, 2, 3};
  const Lattice l = canonicalize(t, x, y);
  const auto [xs0, ys0] = suffixes_at(l, {});
  EXPECT_EQ(xs0, x);
  EXPECT_EQ(ys0, y);
  // sub, sub, del reaches cell (3, 2).
  const LatticePath prefix = path_from_marks(l, LabelString{0, 0, 1});
  const auto [xs, ys] = suffixes_at(l, prefix);
  EXPECT_EQ(xs, (LabelString{3, 4}));
  EXPECT_EQ(ys, (LabelString{2, 3}));
  const LatticePath full = path_from_marks(l, LabelString{0, 0, 0, 0, 1});
  EXPECT_TRUE(is_complete(l, full));
  const auto [xe, ye] = suffixes_at(l, full);
  EXPECT_TRUE(xe.empty());
  EXPECT_TRUE(ye.empty());
  EXPECT_THROW(suffixes_at(l, LatticePath{999}), Error);
}

TEST(SuffixesAt, MatchesReplayOnRandomPrefixes) {
  Rng rng(41);
  for (const Lattice& l : test::random_lattices(20, 9, 3)) {
    for (const auto& path : test::lattice_paths(l)) {
      const std::size_t cut = rng.below(path.size() + 1);
      const LatticePath prefix(path.begin(), path.begin() + cut);
      int nx = 0, ny = 0;
      for (int a : prefix) {
        nx += l.arc(a).nx;
        ny += l.arc(a).ny;
      }
      const auto [xs, ys] = suffixes_at(l, prefix);
      EXPECT_EQ(xs, LabelString(l.x().begin() + nx, l.x().end()));
      EXPECT_EQ(ys, LabelString(l.y().begin() + ny, l.y().end()));
    }
  }
}

Lattice with_arcs(const Lattice& l, int num_states,
                  std::vector<bool> finals, std::vector<LatticeArc> arcs) {
  return Lattice(l.input_symbols(), l.output_symbols(), l.mark_symbols(),
                 l.x(), l.y(), num_states, l.initial(), std::move(finals),
                 std::move(arcs));
}

TEST(CheckCanonical, DetectsDuplicateState) {
  Topologies t;
  const Lattice l = canonicalize(t.di, LabelString{0}, LabelString{1});
  // Send one in-arc of the final sink to a fresh copy of it.
  StateId sink = kNoState;
  for (StateId s = 0; s < l.num_states(); ++s) {
    if (l.is_final(s)) sink = s;
  }
  std::vector<LatticeArc> arcs = l.arcs();
  std::vector<bool> finals = l.finals();
  finals.push_back(true);
  for (LatticeArc& a : arcs) {
    if (a.dst == sink) {
      a.dst = l.num_states();
      break;
    }
  }
  const Lattice bad = with_arcs(l, l.num_states() + 1, finals, arcs);
  const CanonicalReport r = check_canonical(bad, t.di, LabelString{0}, LabelString{1});
  EXPECT_FALSE(r.minimal);
  EXPECT_TRUE(r.language_equal);
}

TEST(CheckCanonical, DetectsDeletedArc) {
  Topologies t;
  const Lattice l = canonicalize(t.di, LabelString{0, 1}, LabelString{1});
  std::vector<LatticeArc> arcs = l.arcs();
  // Drop an arc whose source keeps another way out.
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (l.out_arcs(arcs[i].src).size() > 1) {
      arcs.erase(arcs.begin() + i);
      break;
    }
  }
  const Lattice bad = with_arcs(l, l.num_states(), l.finals(), arcs);
  const CanonicalReport r = check_canonical(bad, t.di, LabelString{0, 1}, LabelString{1});
  EXPECT_FALSE(r.language_equal);
}

TEST(Lattice, ConstructorRejectsBadProgress) {
  Topologies t;
  const Lattice l = canonicalize(t.di, LabelString{0}, {});
  std::vector<LatticeArc> arcs = l.arcs();
  arcs[0].nx = 0;
  arcs[0].ny = 0;
  arcs[1].nx = 0;
  EXPECT_THROW(with_arcs(l, l.num_states(), l.finals(), arcs), Error);
}

TEST(Lattice, TextRoundTrip) {
  for (const Lattice& l : test::random_lattices(10, 13, 3)) {
    std::stringstream s;
    write_lattice(s, l);
    const Lattice back = read_lattice(s);
    EXPECT_TRUE(back == l);
  }
}

TEST(Lattice, PathMarksRoundTrip) {
  for (const Lattice& l : test::random_lattices(10, 15, 3)) {
    for (const auto& p : test::lattice_paths(l)) {
      EXPECT_EQ(path_from_marks(l, path_marks(l, p)), p);
    }
    const auto paths = enumerate_lattice_paths(l, 100000);
    EXPECT_EQ(paths, test::lattice_paths(l));
  }
}

}  // namespace
}  // namespace nfst
