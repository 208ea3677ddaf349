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

#include "nfst/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "nfst/datasets.h"
#include "oracles.h"

namespace nfst {
namespace {

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

Sampler make_sampler(SamplerKind kind, const Lattice& l, std::uint64_t seed,
                     int dim = 4) {
  Rng rng(seed);
  return Sampler(SamplerConfig{kind, l.mark_symbols().size(),
                               l.input_symbols().size(),
                               l.output_symbols().size(), dim},
                 rng);
}

Scorer make_scorer(const Lattice& l, std::uint64_t seed) {
  Rng rng(seed);
  return Scorer(ScorerConfig{l.mark_symbols().size(), 3, 4, 1}, rng);
}

void zero(nn::ParamSet& ps, const std::string& prefix) {
  for (nn::Tensor* t : ps.pointers()) {
    if (t->name.rfind(prefix, 0) == 0) t->value.setZero();
  }
}

// SWP whose arc weights are all 1 / (|marks| + 1), which is the exact
// posterior of an all-zero scorer.
Sampler posterior_swp(const Lattice& l) {
  Sampler s = make_sampler(SamplerKind::kSwp, l, 1, 4);
  zero(s.params(), "sampler.swp.u");
  const double log_w = -std::log(l.mark_symbols().size() + 1.0);
  for (nn::Tensor* t : s.params().pointers()) {
    if (t->name == "sampler.swp.w") t->value.setConstant(2.0 * log_w / 4.0);
  }
  return s;
}

TEST(DedupEss, UnitCases) {
  using L = std::vector<LabelString>;
  const L four{{0}, {1}, {2}, {3}};
  EXPECT_EQ(dedup_ess(four, std::vector<double>{1, 1, 1, 1}), 4.0);
  const L three{{0}, {1}, {2}};
  EXPECT_EQ(dedup_ess(three, std::vector<double>{1, 0, 0}), 1.0);
  EXPECT_NEAR(dedup_ess(three, std::vector<double>{2, 1, 1}), 16.0 / 6.0,
              1e-15);
  const L merged{{0}, {1}, {1}};
  EXPECT_EQ(dedup_ess(merged, std::vector<double>{2, 1, 1}), 2.0);
}

TEST(DedupEss, ZeroWeightsThrow) {
  const std::vector<LabelString> m{{0}, {1}};
  try {
    dedup_ess(m, std::vector<double>{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

TEST(DedupEss, NeverExceedsDistinctStrings) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedSample> s(8);
    std::set<LabelString> distinct;
    for (auto& w : s) {
      w.marks = {rng.uniform_int(0, 2)};
      w.weight = rng.uniform(0.01, 1.0);
      distinct.insert(w.marks);
    }
    const double ess = dedup_ess(s);
    EXPECT_GE(ess, 1.0 - 1e-12);
    EXPECT_LE(ess, distinct.size() + 1e-12);
  }
}

TEST(PartialKl, UniformProposalClosedForm) {
  // Three one-arc paths; a zeroed nolook sampler is uniform over them.
  const SymbolTable marks({"<m0>", "<m1>", "<m2>"});
  const Lattice l(SymbolTable(), SymbolTable(), marks, {}, {}, 2, 0,
                  {false, true},
                  {{0, 0, 0, 0, 1}, {0, 1, 0, 0, 1}, {0, 2, 0, 0, 1}});
  Sampler q = make_sampler(SamplerKind::kNolook, l, 3);
  zero(q.params(), "sampler.out");
  ExactPosterior post;
  for (int a = 0; a < 3; ++a) {
    post.entries.push_back({{a}, {a}, std::log(0.1), 1.0 / 3.0});
  }
  post.log_mass = std::log(0.3);
  EXPECT_NEAR(exact_partial_kl(q, l, post), std::log(10.0 / 3.0), 1e-12);
  EXPECT_NEAR(exact_partial_kl(q, l, post), 1.2040, 5e-5);
  EXPECT_NEAR(exact_exclusive_kl(q, l, post), 0.0, 1e-12);
}

TEST(PartialKl, ExactPosteriorGivesNegLogMass) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1});
  Scorer scorer = make_scorer(l, 4);
  zero(scorer.params(), "");
  const ExactPosterior post = exact_posterior(scorer, l);
  const Sampler q = posterior_swp(l);
  EXPECT_NEAR(exact_partial_kl(q, l, post), -post.log_mass, 1e-9);
  EXPECT_NEAR(exact_inclusive_kl(q, l, post), 0.0, 1e-9);
  // Every draw has the same importance ratio.
  Rng rng(5);
  const std::vector<Lattice> data{l};
  const Estimate e = partial_kl(q, scorer, data, 32, rng);
  EXPECT_NEAR(e.value, -post.log_mass, 1e-9);
  EXPECT_NEAR(e.std_error, 0.0, 1e-9);
}

TEST(PartialKl, GibbsInequality) {
  const auto lattices = test::random_lattices(30, 6, 3);
  const SamplerKind kinds[] = {SamplerKind::kSwa, SamplerKind::kSws,
                               SamplerKind::kSwp, SamplerKind::kNolook};
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    const Lattice& l = lattices[i];
    const Scorer scorer = make_scorer(l, 50 + i);
    const ExactPosterior post = exact_posterior(scorer, l);
    for (SamplerKind k : kinds) {
      const Sampler q = make_sampler(k, l, 80 + i);
      const double excl = exact_exclusive_kl(q, l, post);
      EXPECT_GE(excl, -1e-9);
      EXPECT_GE(exact_inclusive_kl(q, l, post), -1e-9);
      EXPECT_NEAR(exact_partial_kl(q, l, post) + post.log_mass, excl, 1e-12);
    }
  }
}

TEST(PartialKl, MonteCarloMatchesEnumeration) {
  const Lattice l =
      canonicalize(machines().edit, LabelString{0, 1}, LabelString{1, 1});
  const Scorer scorer = make_scorer(l, 7);
  const Sampler q = make_sampler(SamplerKind::kSwa, l, 8);
  const ExactPosterior post = exact_posterior(scorer, l);
  Rng rng(9);
  const std::vector<Lattice> data{l};
  const Estimate e = partial_kl(q, scorer, data, 20000, rng);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_NEAR(e.value, exact_partial_kl(q, l, post), 3.0 * e.std_error);
}

TEST(MarkLength, FixedOnDeletionInsertion) {
  for (int m = 0; m <= 4; ++m) {
    for (int n = 0; n <= 4; ++n) {
      if (m + n == 0) continue;
      LabelString x(m, 0), y(n, 1);
      for (int i = 0; i < m; i += 2) x[i] = 1;
      const Lattice l = canonicalize(machines().di, x, y);
      for (const auto& marks : test::lattice_marks(l)) {
        ASSERT_EQ(static_cast<int>(marks.size()), 2 * (m + n));
      }
      const Scorer scorer = make_scorer(l, 10 + m * 5 + n);
      const Sampler q = make_sampler(SamplerKind::kSws, l, 11);
      Rng rng(12);
      const std::vector<Lattice> data{l};
      const Estimate e = expected_mark_length(q, scorer, data, 16, rng);
      EXPECT_DOUBLE_EQ(e.value, 2.0 * (m + n));
      EXPECT_EQ(e.std_error, 0.0);
    }
  }
}

TEST(MarkLength, SinglePath) {
  const Lattice l = canonicalize(machines().di, LabelString{0, 1}, {});
  const Scorer scorer = make_scorer(l, 13);
  const Sampler q = make_sampler(SamplerKind::kNolook, l, 14);
  Rng rng(15);
  const std::vector<Lattice> data{l};
  EXPECT_EQ(expected_mark_length(q, scorer, data, 4, rng).value,
            static_cast<double>(
                path_marks(l, test::lattice_paths(l)[0]).size()));
}

TEST(MarkLength, CipherMatchesPosterior) {
  const SymbolTable in = make_alphabet(3), out = make_alphabet(3, true);
  const CipherMachine c = build_cipher_mfst(in, out, 2, 16);
  const Lattice l = canonicalize(c.task, LabelString{0, 2}, LabelString{1});
  const Scorer scorer = make_scorer(l, 17);
  const ExactPosterior post = exact_posterior(scorer, l);
  double exact = 0.0;
  for (const auto& e : post.entries) exact += e.prob * e.marks.size();
  const Sampler q = make_sampler(SamplerKind::kSwp, l, 18);
  Rng rng(19);
  const std::vector<Lattice> data{l};
  const Estimate e = expected_mark_length(q, scorer, data, 20000, rng);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_NEAR(e.value, exact, 3.0 * e.std_error);
}

TEST(ExactPosterior, Properties) {
  const Lattice single = canonicalize(machines().di, LabelString{1}, {});
  const ExactPosterior one = exact_posterior(make_scorer(single, 20), single);
  ASSERT_EQ(one.entries.size(), 1u);
  EXPECT_EQ(one.entries[0].prob, 1.0);

  const Lattice l =
      canonicalize(machines().di, LabelString{0, 1}, LabelString{1});
  Scorer flat = make_scorer(l, 21);
  zero(flat.params(), "");
  const ExactPosterior uniform = exact_posterior(flat, l);
  ASSERT_EQ(uniform.entries.size(), 3u);
  for (const auto& e : uniform.entries) EXPECT_NEAR(e.prob, 1.0 / 3.0, 1e-15);

  const Lattice big =
      canonicalize(machines().edit, LabelString{0, 1, 1}, LabelString{1, 0});
  const ExactPosterior p = exact_posterior(make_scorer(big, 22), big);
  double sum = 0.0;
  for (const auto& e : p.entries) sum += e.prob;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(p.log_mass, std::log(grammatical_mass(make_scorer(big, 22), big)),
              1e-12);
  EXPECT_THROW(exact_posterior(make_scorer(big, 22), big, 3), Error);
}

TEST(Evaluate, ReportAndDigests) {
  const auto lattices = test::random_lattices(6, 23, 2);
  std::vector<Lattice> data;
  for (const auto& l : lattices) {
    if (l.mark_symbols().size() == lattices[0].mark_symbols().size()) {
      data.push_back(l);
    }
  }
  const Scorer scorer = make_scorer(data[0], 24);
  const Sampler a = make_sampler(SamplerKind::kSwp, data[0], 25);
  const Sampler b = make_sampler(SamplerKind::kNolook, data[0], 26);
  Rng rng(27);
  std::vector<EvalReport> reports{evaluate(a, scorer, data, 8, rng),
                                  evaluate(b, scorer, data, 8, rng)};
  const EvalReport& r = reports[0];
  EXPECT_EQ(r.sampler_kind, "swp");
  EXPECT_EQ(r.scorer_digest, scorer.digest());
  EXPECT_EQ(r.sampler_digest, a.digest());
  EXPECT_EQ(r.n_examples, static_cast<int>(data.size()));
  EXPECT_EQ(r.n_samples, 8);
  ASSERT_EQ(r.rows.size(), data.size());
  double mean = 0.0;
  for (const auto& row : r.rows) {
    EXPECT_GE(row.dedup_ess, 1.0 - 1e-12);
    EXPECT_LE(row.dedup_ess, 8.0);
    mean += row.partial_kl;
  }
  EXPECT_NEAR(r.partial_kl, mean / data.size(), 1e-12);
  EXPECT_NO_THROW(require_same_scorer(reports));

  std::ostringstream tsv;
  write_report_tsv(tsv, r);
  std::istringstream lines(tsv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("# sampler=swp", 0), 0u);
  std::getline(lines, line);
  EXPECT_EQ(line, "index\tx_len\ty_len\tpartial_kl\tmark_length\tdedup_ess");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(data.size()));

  std::ostringstream summary;
  write_summary(summary, reports);
  EXPECT_NE(summary.str().find("\nnolook\t"), std::string::npos);

  reports[1].scorer_digest = "other";
  try {
    require_same_scorer(reports);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDigestMismatch);
  }
  std::ostringstream sink;
  EXPECT_THROW(write_summary(sink, reports), Error);
}

}  // namespace
}  // namespace nfst
