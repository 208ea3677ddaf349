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

#include "nfst/fst.h"

#include <gtest/gtest.h>

#include <sstream>

#include "nfst/datasets.h"
#include "oracles.h"

namespace nfst {
namespace {

struct EditFixture {
  SymbolTable in = SymbolTable({"a", "b", "c", "d"});
  SymbolTable out = SymbolTable({"a", "b", "c", "d"});
  MarkScheme scheme = make_mark_scheme(in, out);
  Mfst edit = topology_edit(in, out, scheme);
  Mfst di = topology_del_ins(in, out, scheme);
  LabelString str(const std::string& s) const {
    LabelString r;
    for (char c : s) r.push_back(in.at(std::string(1, c)));
    return r;
  }
};

TEST(ComposeWithPair, EditGridShape) {
  EditFixture f;
  const ComposedPair c = compose_with_pair(f.edit, f.str("abc"), f.str("cd"));
  EXPECT_EQ(c.fst.num_states(), 12);
  EXPECT_EQ(c.coords[c.fst.initial()], (GridState{0, 0, 0}));
  const auto finals = c.fst.finals();
  ASSERT_EQ(finals.size(), 1u);
  EXPECT_EQ(c.coords[finals[0]], (GridState{3, 0, 2}));
  EXPECT_EQ(enumerate_paths(c.fst, 1000).size(), 25u);
}

TEST(ComposeWithPair, EmptyStringsGiveOneEmptyPath) {
  EditFixture f;
  const ComposedPair c = compose_with_pair(f.edit, {}, {});
  EXPECT_EQ(c.fst.num_states(), 1);
  EXPECT_TRUE(c.fst.is_final(c.fst.initial()));
  const auto paths = enumerate_paths(c.fst, 10);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_TRUE(paths[0].marks.empty());
}

TEST(ComposeWithPair, PathCountsMatchRecurrences) {
  EditFixture f;
  for (int m = 0; m <= 4; ++m) {
    for (int n = 0; n <= 4; ++n) {
      const LabelString x(m, 0), y(n, 1);
      const auto edit = enumerate_paths(compose_with_pair(f.edit, x, y).fst,
                                        100000);
      EXPECT_EQ(edit.size(), test::delannoy(m, n)) << m << "," << n;
      const auto di = enumerate_paths(compose_with_pair(f.di, x, y).fst,
                                      100000);
      EXPECT_EQ(di.size(), test::binomial(m + n, m)) << m << "," << n;
      for (const GenPath& p : di) {
        EXPECT_EQ(p.x_emitted, x);
        EXPECT_EQ(p.y_emitted, y);
        EXPECT_EQ(p.marks.size(), 2u * (m + n));
      }
    }
  }
}

TEST(ComposeWithPair, DeletionInsertionInterleavings) {
  EditFixture f;
  const auto paths =
      enumerate_paths(compose_with_pair(f.di, f.str("ab"), f.str("c")).fst, 10);
  EXPECT_EQ(paths.size(), 3u);
}

TEST(ComposeWithPair, MatchesBruteForceOnSubstringMachines) {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Mfst t = test::random_substring_machine(rng, 5);
    const LabelString x = test::random_string(rng, 4, 2);
    const LabelString y = test::random_string(rng, 4, 2);
    const ComposedPair c = compose_with_pair(t, x, y);
    std::multiset<LabelString> got;
    if (!c.fst.empty()) {
      for (const auto& p : enumerate_paths(c.fst, 100000)) got.insert(p.marks);
    }
    EXPECT_EQ(got, test::brute_marks(t, x, y).marks) << trial;
  }
}

Mfst chain(int n) {
  SymbolTable s({"a"});
  Mfst m(s, s, s);
  m.add_states(n);
  m.set_initial(0);
  m.set_final(n - 1);
  for (int i = 0; i + 1 < n; ++i) m.add_arc(i, {0}, {0}, {0}, i + 1);
  return m;
}

TEST(TopoOrder, Chain) {
  EXPECT_EQ(topo_order(chain(3)), (std::vector<StateId>{0, 1, 2}));
}

TEST(TopoOrder, SelfLoopIsCyclic) {
  Mfst m = chain(2);
  m.add_arc(1, {0}, {}, {}, 1);
  EXPECT_FALSE(is_acyclic(m));
  try {
    topo_order(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCyclicMachine);
  }
}

TEST(TopoOrder, RandomDagsRespectArcs) {
  Rng rng(3);
  const SymbolTable s({"a", "b"});
  for (int trial = 0; trial < 50; ++trial) {
    const Mfst m = test::random_dag(rng, 12, 30, s, s, s);
    const auto order = topo_order(m);
    std::vector<int> pos(m.num_states());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const MfstArc& a : m.arcs()) EXPECT_LT(pos[a.src], pos[a.dst]);
  }
}

TEST(Trim, RemovesDanglingState) {
  Mfst m = chain(3);
  const StateId dead = m.add_state();
  m.add_arc(1, {0}, {0}, {0}, dead);
  const Mfst t = trim(m);
  EXPECT_EQ(t.num_states(), 3);
  EXPECT_EQ(test::mfst_triples(t), test::mfst_triples(m));
}

TEST(Trim, UsefulMachineIsFixpoint) {
  const Mfst m = chain(4);
  EXPECT_TRUE(trim(m) == m);
}

TEST(Trim, RandomMachinesKeepPathsAndAreIdempotent) {
  Rng rng(5);
  const SymbolTable s({"a", "b"});
  for (int trial = 0; trial < 40; ++trial) {
    Mfst m = test::random_dag(rng, 30, 45, s, s, s);
    // Unreachable and dead-end extras.
    const StateId u = m.add_state();
    m.add_arc(u, {0}, {1}, {}, 5);
    const StateId d = m.add_state();
    m.add_arc(3, {1}, {}, {0}, d);
    const Mfst t = trim(m);
    EXPECT_EQ(test::mfst_triples(t), test::mfst_triples(m));
    EXPECT_TRUE(trim(t) == t);
  }
}

TEST(EnumeratePaths, SingleStateNoArcs) {
  SymbolTable s({"a"});
  Mfst m(s, s, s);
  m.add_state();
  m.set_initial(0);
  m.set_final(0);
  const auto paths = enumerate_paths(m, 5);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_TRUE(paths[0].arcs.empty());
}

TEST(EnumeratePaths, LimitExceeded) {
  EditFixture f;
  const Mfst c = compose_with_pair(f.edit, f.str("abc"), f.str("cd")).fst;
  try {
    enumerate_paths(c, 24);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLimitExceeded);
  }
}

// Joins enumerated paths of A and B on A's output = B's input, keeping the
// marks of each side apart.
struct JoinKey {
  LabelString x, y, a_marks, b_marks;
  auto operator<=>(const JoinKey&) const = default;
};

TEST(ComposeMfst, MatchesRelationalJoin) {
  Rng rng(17);
  const SymbolTable s({"a", "b"});
  const SymbolTable ma({"<a0>", "<a1>"});
  const SymbolTable mb({"<b0>", "<b1>"});
  int checked = 0;
  for (int trial = 0; checked < 40 && trial < 400; ++trial) {
    const Mfst a = test::random_dag(rng, 4, 5, s, s, ma);
    const Mfst b = test::random_dag(rng, 4, 5, s, s, mb);
    const auto pa = test::mfst_triples(a);
    const auto pb = test::mfst_triples(b);
    if (pa.size() > 20 || pb.size() > 20) continue;
    std::multiset<JoinKey> expected;
    for (const auto& u : pa) {
      for (const auto& v : pb) {
        if (u.y == v.x) expected.insert({u.x, v.y, u.marks, v.marks});
      }
    }
    const Mfst c = compose_mfst(a, b);
    std::multiset<JoinKey> got;
    for (const auto& t : test::mfst_triples(c)) {
      JoinKey k{t.x, t.y, {}, {}};
      for (Label l : t.marks) {
        const std::string& name = c.mark_symbols().name(l);
        if (name[1] == 'a') {
          k.a_marks.push_back(ma.at(name));
        } else {
          k.b_marks.push_back(mb.at(name));
        }
      }
      got.insert(k);
    }
    EXPECT_EQ(got, expected) << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 40);
}

TEST(ComposeMfst, MatchedPairsCarryMarksInOrder) {
  const SymbolTable s({"a", "b"});
  const SymbolTable ma({"<x>"}), mb({"<y>"});
  Mfst a(s, s, ma), b(s, s, mb);
  a.add_states(2);
  a.set_initial(0);
  a.set_final(1);
  a.add_arc(0, {0}, {1}, {0}, 1);
  b.add_states(2);
  b.set_initial(0);
  b.set_final(1);
  b.add_arc(0, {1}, {}, {0}, 1);
  const Mfst c = compose_mfst(a, b);
  const auto paths = enumerate_paths(c, 10);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(join_labels(c.mark_symbols(), paths[0].marks), "<x> <y>");
  EXPECT_EQ(paths[0].x_emitted, LabelString{0});
  EXPECT_TRUE(paths[0].y_emitted.empty());
}

TEST(ComposeMfst, IdentityOnLeftPreservesRelation) {
  Rng rng(23);
  const SymbolTable s({"a", "b"});
  const SymbolTable mb({"<b0>", "<b1>"});
  Mfst id(s, s, SymbolTable());
  id.add_state();
  id.set_initial(0);
  id.set_final(0);
  for (Label l = 0; l < s.size(); ++l) id.add_arc(0, {l}, {l}, {}, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mfst b = test::random_dag(rng, 5, 7, s, s, mb);
    const Mfst c = compose_mfst(id, b);
    std::multiset<test::Triple> got;
    for (auto t : test::mfst_triples(c)) {
      for (Label& l : t.marks) l = mb.at(c.mark_symbols().name(l));
      got.insert(t);
    }
    EXPECT_EQ(got, test::mfst_triples(b)) << trial;
  }
}

TEST(ComposeMfst, AlphabetMismatch) {
  const SymbolTable s({"a"}), t({"b"});
  Mfst a(s, s, s), b(t, t, t);
  try {
    compose_mfst(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAlphabetMismatch);
  }
}

TEST(NormalizeArcs, SplitsSubstringsAndKeepsRelation) {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Mfst t = test::random_substring_machine(rng, 4);
    const Mfst n = normalize_arcs(t);
    for (const MfstArc& a : n.arcs()) {
      EXPECT_LE(a.input.size(), 1u);
      EXPECT_LE(a.output.size(), 1u);
    }
    const LabelString x = test::random_string(rng, 3, 2);
    const LabelString y = test::random_string(rng, 3, 2);
    EXPECT_EQ(test::brute_marks(n, x, y).marks,
              test::brute_marks(t, x, y).marks);
  }
}

TEST(MergeEquivalentStates, PreservesPaths) {
  Rng rng(31);
  const SymbolTable s({"a", "b"});
  for (int trial = 0; trial < 30; ++trial) {
    const Mfst m = test::random_dag(rng, 8, 14, s, s, s, 0.5);
    const Mfst merged = merge_equivalent_states(m);
    EXPECT_LE(merged.num_states(), m.num_states());
    EXPECT_EQ(test::mfst_triples(merged), test::mfst_triples(m));
  }
}

TEST(MfstText, RoundTripIsExact) {
  const CipherMachine c =
      build_cipher_mfst(make_alphabet(4), make_alphabet(4, true), 3, 9);
  for (const Mfst* m : {&c.stage, &c.task}) {
    const std::string text = mfst_to_string(*m);
    const Mfst back = mfst_from_string(text);
    EXPECT_TRUE(back == *m);
    EXPECT_EQ(mfst_to_string(back), text);
  }
}

TEST(MfstText, RejectsGarbage) {
  try {
    mfst_from_string("not a machine\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
}

TEST(Mfst, ValidatesArcs) {
  const SymbolTable s({"a"});
  Mfst m(s, s, s);
  m.add_state();
  EXPECT_THROW(m.add_arc(0, {0}, {0}, {0}, 3), Error);
  EXPECT_THROW(m.add_arc(0, {4}, {0}, {0}, 0), Error);
}

}  // namespace
}  // namespace nfst
