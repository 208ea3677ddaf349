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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "nfst/datasets.h"
#include "oracles.h"

namespace nfst {
namespace {

const SamplerKind kAllKinds[] = {SamplerKind::kSwa, SamplerKind::kSws,
                                 SamplerKind::kSwp, SamplerKind::kNolook};

Sampler make(SamplerKind kind, const Lattice& l, std::uint64_t seed,
             int dim = 4) {
  Rng rng(seed);
  return Sampler(SamplerConfig{kind, l.mark_symbols().size(),
                               l.input_symbols().size(),
                               l.output_symbols().size(), dim},
                 rng);
}

struct Machines {
  SymbolTable in = make_alphabet(2);
  SymbolTable out = make_alphabet(2, true);
  MarkScheme scheme = make_mark_scheme(in, out);
  Mfst edit = topology_edit(in, out, scheme);
  Mfst di = topology_del_ins(in, out, scheme);
};

const Machines& machines() {
  static const Machines m;
  return m;
}

int num_choices(const Lattice& l, StateId s) {
  return static_cast<int>(l.out_arcs(s).size()) + (l.is_final(s) ? 1 : 0);
}

// Every prefix of every complete path, with the state it ends at.
std::vector<LatticePath> all_prefixes(const Lattice& l) {
  std::set<LatticePath> seen;
  for (const LatticePath& p : test::lattice_paths(l)) {
    for (std::size_t k = 0; k <= p.size(); ++k) {
      seen.insert(LatticePath(p.begin(), p.begin() + k));
    }
  }
  return {seen.begin(), seen.end()};
}

class KindTest : public ::testing::TestWithParam<SamplerKind> {};

TEST_P(KindTest, NormalizedOverEnumeratedPaths) {
  const auto lattices = test::random_lattices(50, 21, 3);
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const Lattice& l = lattices[i];
    const Sampler s = make(GetParam(), l, 100 + i);
    const auto paths = test::lattice_paths(l);
    double total = 0.0;
    for (double lp : s.path_logprobs(l, paths)) {
      EXPECT_TRUE(std::isfinite(lp));
      total += std::exp(lp);
    }
    EXPECT_NEAR(total, 1.0, 1e-9) << "lattice " << i;
  }
}

TEST_P(KindTest, StepDistributionsNormalized) {
  const auto lattices = test::random_lattices(10, 22, 3);
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const Lattice& l = lattices[i];
    const Sampler s = make(GetParam(), l, 200 + i);
    for (const LatticePath& prefix : all_prefixes(l)) {
      const auto d = s.next_dist(l, prefix);
      const StateId st = path_end(l, prefix);
      ASSERT_EQ(static_cast<int>(d.size()), num_choices(l, st));
      double sum = 0.0;
      for (double p : d) {
        EXPECT_GT(p, 0.0);
        sum += p;
      }
      if (!d.empty()) EXPECT_NEAR(sum, 1.0, 1e-12);
      if (d.size() == 1) EXPECT_EQ(d[0], 1.0);
    }
  }
}

TEST_P(KindTest, SinglePathHasLogProbZero) {
  const Lattice l = canonicalize(machines().di, LabelString{0}, {});
  ASSERT_EQ(test::lattice_paths(l).size(), 1u);
  const Sampler s = make(GetParam(), l, 3);
  EXPECT_EQ(s.path_logprob(l, test::lattice_paths(l)[0]), 0.0);
  Rng rng(4);
  EXPECT_EQ(s.sample(l, rng).log_q, 0.0);
}

TEST_P(KindTest, SampleRoundTrip) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1, 1});
  const Sampler s = make(GetParam(), l, 5);
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const SampleDraw d = s.sample(l, rng);
    EXPECT_EQ(d.marks, path_marks(l, d.path));
    EXPECT_EQ(s.path_logprob(l, d.path), d.log_q);
  }
}

TEST_P(KindTest, FrequenciesMatchOnThreePathLattice) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0}, LabelString{1});
  const auto paths = test::lattice_paths(l);
  ASSERT_EQ(paths.size(), 3u);
  const Sampler s = make(GetParam(), l, 7);
  const int n = 100000;
  std::map<LatticePath, int> counts;
  Rng rng(8);
  for (const SampleDraw& d : s.sample_many(l, n, rng)) ++counts[d.path];
  for (const LatticePath& p : paths) {
    const double prob = std::exp(s.path_logprob(l, p));
    const double sigma = std::sqrt(prob * (1.0 - prob) / n);
    EXPECT_NEAR(static_cast<double>(counts[p]) / n, prob, 3.0 * sigma);
  }
}

TEST_P(KindTest, GradCheck) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1});
  Sampler s = make(GetParam(), l, 9);
  const LatticePath path = test::lattice_paths(l)[2];
  auto plain = [&](nn::Tape& t) {
    const RunOptions o;
    return s.path_logprob(t, s.prepare(t, l, o), path, o);
  };
  auto r = nn::grad_check(plain, s.params().pointers());
  EXPECT_GT(r.checked, 0);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  auto noisy = [&](nn::Tape& t) {
    Rng mask(10);
    RunOptions o;
    o.train = true;
    o.dropout = 0.25;
    o.rng = &mask;
    o.label_smoothing = 0.1;
    return s.path_logprob(t, s.prepare(t, l, o), path, o);
  };
  r = nn::grad_check(noisy, s.params().pointers());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST_P(KindTest, CheckpointRoundTrip) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{1}, LabelString{0, 1});
  const Sampler s = make(GetParam(), l, 11);
  const nn::Checkpoint ck = sampler_checkpoint(s, "scorer", 11, "cfg");
  const Sampler back = sampler_from_checkpoint(ck);
  EXPECT_EQ(back.kind(), s.kind());
  EXPECT_EQ(back.digest(), s.digest());
  for (const LatticePath& p : test::lattice_paths(l)) {
    EXPECT_EQ(back.path_logprob(l, p), s.path_logprob(l, p));
  }
}

INSTANTIATE_TEST_SUITE_P(
    All, KindTest, ::testing::ValuesIn(kAllKinds),
    [](const auto& info) { return to_string(info.param); });

TEST(Samplers, ZeroOutputLayerIsUniform) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1});
  for (SamplerKind kind :
       {SamplerKind::kSwa, SamplerKind::kSws, SamplerKind::kNolook}) {
    Sampler s = make(kind, l, 12);
    for (nn::Tensor* t : s.params().pointers()) {
      if (t->name.rfind("sampler.out", 0) == 0) t->value.setZero();
    }
    for (const LatticePath& prefix : all_prefixes(l)) {
      const auto d = s.next_dist(l, prefix);
      for (double p : d) EXPECT_NEAR(p, 1.0 / d.size(), 1e-15);
    }
  }
}

TEST(Samplers, HistoryKindsDependOnPrefix) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1, 0});
  for (SamplerKind kind : kAllKinds) {
    const Sampler s = make(kind, l, 13);
    std::map<StateId, std::vector<LatticePath>> by_state;
    for (const LatticePath& p : all_prefixes(l)) {
      by_state[path_end(l, p)].push_back(p);
    }
    int pairs = 0;
    double max_diff = 0.0;
    for (const auto& [st, prefixes] : by_state) {
      if (prefixes.size() < 2 || num_choices(l, st) < 2) continue;
      const auto ref = s.next_dist(l, prefixes[0]);
      for (std::size_t k = 1; k < prefixes.size(); ++k) {
        const auto d = s.next_dist(l, prefixes[k]);
        for (std::size_t i = 0; i < d.size(); ++i) {
          max_diff = std::max(max_diff, std::abs(d[i] - ref[i]));
        }
        ++pairs;
      }
    }
    ASSERT_GT(pairs, 0);
    if (kind == SamplerKind::kSwp) {
      EXPECT_EQ(max_diff, 0.0);
    } else {
      EXPECT_GT(max_diff, 1e-6) << to_string(kind);
    }
  }
}

TEST(Samplers, NolookReadsOnlyMarksAndChoices) {
  const Lattice a =
      canonicalize(machines().edit, LabelString{0}, LabelString{1});
  const Lattice b =
      canonicalize(machines().edit, LabelString{1, 0}, LabelString{1, 1});
  const Sampler s = make(SamplerKind::kNolook, a, 14);
  auto by_mark = [](const Lattice& l, StateId st, const std::vector<double>& d) {
    std::map<Label, double> m;
    for (std::size_t i = 0; i < l.out_arcs(st).size(); ++i) {
      m[l.arc(l.out_arcs(st)[i]).mark] = d[i];
    }
    if (l.is_final(st)) m[-1] = d.back();
    return m;
  };
  int matches = 0;
  for (const LatticePath& pa : all_prefixes(a)) {
    for (const LatticePath& pb : all_prefixes(b)) {
      if (path_marks(a, pa) != path_marks(b, pb)) continue;
      const StateId sa = path_end(a, pa), sb = path_end(b, pb);
      const auto ma = by_mark(a, sa, s.next_dist(a, pa));
      const auto mb = by_mark(b, sb, s.next_dist(b, pb));
      bool same_set = ma.size() == mb.size();
      for (const auto& [m, p] : ma) same_set = same_set && mb.count(m);
      if (!same_set) continue;
      for (const auto& [m, p] : ma) EXPECT_NEAR(p, mb.at(m), 1e-15);
      ++matches;
    }
  }
  EXPECT_GT(matches, 0);
}

TEST(Samplers, SwsSuffixEncodingsMatchFromScratch) {
  const Lattice full =
      canonicalize(machines().edit, LabelString{0, 1, 1}, LabelString{1, 0});
  const Lattice tail =
      canonicalize(machines().edit, LabelString{1, 1}, LabelString{0});
  const Sampler s = make(SamplerKind::kSws, full, 15);
  nn::Tape t(false);
  const LatticeContext cf = s.prepare(t, full, {});
  const LatticeContext ct = s.prepare(t, tail, {});
  for (int k = 0; k <= 2; ++k) {
    EXPECT_EQ(t.value(cf.enc_x[k + 1]), t.value(ct.enc_x[k]));
  }
  for (int k = 0; k <= 1; ++k) {
    EXPECT_EQ(t.value(cf.enc_y[k + 1]), t.value(ct.enc_y[k]));
  }
}

Lattice chain_lattice() {
  const SymbolTable marks({"<m0>", "<m1>"});
  return Lattice(SymbolTable(), SymbolTable(), marks, {}, {}, 3, 0,
                 {false, false, true}, {{0, 0, 0, 0, 1}, {1, 1, 0, 0, 2}});
}

TEST(Swp, ChainBackwardWeights) {
  const Lattice l = chain_lattice();
  const std::vector<double> log_w{std::log(2.0), std::log(3.0)};
  const SwpTables tb = swp_tables_from_log_weights(l, log_w);
  EXPECT_NEAR(tb.beta(0), 6.0, 1e-12);
  EXPECT_NEAR(tb.beta(1), 3.0, 1e-12);
  EXPECT_NEAR(tb.beta(2), 1.0, 1e-12);
  EXPECT_NEAR(tb.weight(0), 2.0, 1e-12);
  EXPECT_EQ(swp_next_dist(tb, l, 0), std::vector<double>{1.0});
}

TEST(Swp, TwoArcTransitions) {
  const SymbolTable marks({"<m0>", "<m1>"});
  const Lattice l(SymbolTable(), SymbolTable(), marks, {}, {}, 2, 0,
                  {false, true}, {{0, 0, 0, 0, 1}, {0, 1, 0, 0, 1}});
  const std::vector<double> log_w{0.0, std::log(3.0)};
  const SwpTables tb = swp_tables_from_log_weights(l, log_w);
  const auto d = swp_next_dist(tb, l, 0);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0], 0.25, 1e-15);
  EXPECT_NEAR(d[1], 0.75, 1e-15);
}

TEST(Swp, BackwardWeightsMatchSuffixEnumeration) {
  const auto lattices = test::random_lattices(50, 23, 3);
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const Lattice& l = lattices[i];
    const Sampler s = make(SamplerKind::kSwp, l, 300 + i, 6);
    const SwpTables tb = swp_precompute(s, l);
    std::vector<double> w(l.num_arcs());
    for (int a = 0; a < l.num_arcs(); ++a) w[a] = tb.weight(a);
    for (StateId st = 0; st < l.num_states(); ++st) {
      const double oracle = test::suffix_weight(l, w, st);
      EXPECT_NEAR(tb.beta(st) / oracle, 1.0, 1e-9);
      double sum = tb.stop[st];
      for (int a : l.out_arcs(st)) sum += tb.transition[a];
      EXPECT_NEAR(sum, 1.0, 1e-9);
      if (l.is_final(st)) EXPECT_NEAR(tb.stop[st], 1.0 / oracle, 1e-9);
    }
    double total = 0.0;
    for (const LatticePath& p : test::lattice_paths(l)) {
      double q = tb.stop[path_end(l, p)];
      for (int a : p) q *= tb.transition[a];
      total += q;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Swp, TablesAgreeWithSamplerSteps) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1, 0});
  const Sampler s = make(SamplerKind::kSwp, l, 16);
  const SwpTables tb = swp_precompute(s, l);
  const SwpTables again = swp_tables_from_log_weights(l, tb.log_weights);
  for (const LatticePath& prefix : all_prefixes(l)) {
    const StateId st = path_end(l, prefix);
    const auto d = s.next_dist(l, prefix);
    const auto e = swp_next_dist(tb, l, st);
    const auto f = swp_next_dist(again, l, st);
    ASSERT_EQ(d.size(), e.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_NEAR(d[i], e[i], 1e-12);
      EXPECT_NEAR(f[i], e[i], 1e-12);
    }
  }
}

TEST(Swp, ScaleInvariantOnFixedLengthLattices) {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const Lattice l = canonicalize(machines().di, test::random_string(rng, 3, 2),
                                   test::random_string(rng, 3, 2));
    std::vector<double> log_w(l.num_arcs());
    for (double& v : log_w) v = rng.uniform(-2.0, 2.0);
    const SwpTables base = swp_tables_from_log_weights(l, log_w);
    for (double c : {0.01, 0.5, 7.0, 1e3}) {
      std::vector<double> scaled = log_w;
      for (double& v : scaled) v += std::log(c);
      const SwpTables tb = swp_tables_from_log_weights(l, scaled);
      for (int a = 0; a < l.num_arcs(); ++a) {
        EXPECT_NEAR(std::log(tb.transition[a]), std::log(base.transition[a]),
                    1e-12);
      }
    }
  }
}

TEST(Swp, ScalingChangesMixedLengthLattices) {
  // Paths of length 2 and 4 from the same state reweight under scaling.
  const Lattice l =
      canonicalize(machines().edit, LabelString{0}, LabelString{1});
  const std::vector<double> zeros(l.num_arcs(), 0.0);
  std::vector<double> doubled(l.num_arcs(), std::log(2.0));
  const SwpTables a = swp_tables_from_log_weights(l, zeros);
  const SwpTables b = swp_tables_from_log_weights(l, doubled);
  double max_diff = 0.0;
  for (int i = 0; i < l.num_arcs(); ++i) {
    max_diff = std::max(max_diff, std::abs(a.transition[i] - b.transition[i]));
  }
  EXPECT_GT(max_diff, 1e-3);
}

TEST(Samplers, WeighAddsScorerTerms) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0}, LabelString{1});
  const Sampler s = make(SamplerKind::kSwp, l, 18);
  Rng rng(19);
  const Scorer scorer(ScorerConfig{l.mark_symbols().size(), 3, 4, 1}, rng);
  const SampleDraw d = s.sample(l, rng);
  const WeightedSample w = weigh(scorer, d);
  EXPECT_EQ(w.log_ptilde, scorer.score_marks(d.marks));
  EXPECT_NEAR(w.weight, std::exp(w.log_ptilde - w.log_q), 1e-15);
}

TEST(Samplers, KindNames) {
  for (SamplerKind k : kAllKinds) {
    EXPECT_EQ(sampler_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(sampler_kind_from_string("beam"), Error);
}

}  // namespace
}  // namespace nfst
