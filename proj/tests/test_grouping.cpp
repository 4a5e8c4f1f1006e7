//---------------------------------------------------------------------------
// Tests for the multiscale clustering of sparse binary windows: the frozen
// hand-worked example, merge arithmetic, dust absorption, provisional
// marking, chi, the collapsed word, thinning, genealogy identities, and the
// Monte Carlo decay surrogate.
//---------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "seqlab/grouping.hpp"
#include "seqlab/hierarchy.hpp"
#include "seqlab/stats.hpp"
#include "seqlab/weighted_word.hpp"

using namespace seqlab;

namespace {
Bits bits_with_ones(std::int64_t n, const std::vector<std::int64_t>& ones) {
  Bits b(static_cast<std::size_t>(n), 0);
  for (std::int64_t p : ones) b[static_cast<std::size_t>(p - 1)] = 1;
  return b;
}
}  // namespace

TEST(Build, FrozenFourPointExample) {
  ClusterForest f = build_forest(bits_with_ones(40, {5, 6, 9, 30}), 3);
  EXPECT_EQ(forest_invariant_violation(f), std::nullopt);
  ASSERT_EQ(f.final_partition.size(), 3u);
  const ClusterNode& a = f.node(f.final_partition[0]);
  const ClusterNode& b = f.node(f.final_partition[1]);
  const ClusterNode& c = f.node(f.final_partition[2]);
  EXPECT_EQ(a.mass, 2);
  EXPECT_EQ(a.level, 1);
  EXPECT_EQ(f.members_of(a.id), (std::vector<std::int64_t>{5, 6}));
  EXPECT_EQ(b.mass, 1);
  EXPECT_EQ(b.level, 0);
  EXPECT_EQ(b.alpha, 9);
  EXPECT_EQ(c.mass, 1);
  EXPECT_EQ(c.alpha, 30);
  EXPECT_FALSE(a.provisional || b.provisional || c.provisional);

  ChiResult ch = chi(f);
  EXPECT_TRUE(ch.determined);
  EXPECT_EQ(ch.chi, 2);  // the mass-2 cluster starts at 5 < 3^2

  EXPECT_EQ(kappa(f, 5), 1);
  EXPECT_EQ(kappa(f, 6), 1);
  EXPECT_EQ(kappa(f, 9), 0);
  EXPECT_EQ(kappa(f, 30), 0);
  EXPECT_THROW(kappa(f, 7), usage_error);
  EXPECT_THROW(kappa(f, 20), usage_error);

  WeightedWord psi = psi_from_xi(f);
  EXPECT_EQ(psi.length(), 39);  // one diameter squeezed out of 40
  EXPECT_EQ(psi.w[4], 2);
  EXPECT_EQ(psi.w[7], 1);
  EXPECT_EQ(psi.w[28], 1);
  std::int64_t nonzeros = 0;
  for (auto v : psi.w) nonzeros += v > 0;
  EXPECT_EQ(nonzeros, 3);
}

TEST(Build, EmptyAndErrors) {
  ClusterForest f = build_forest(Bits(20, 0), 3);
  EXPECT_TRUE(f.final_partition.empty());
  EXPECT_TRUE(chi(f).determined);
  EXPECT_EQ(chi(f).chi, 0);
  EXPECT_EQ(psi_from_xi(f).length(), 20);
  EXPECT_EQ(forest_invariant_violation(f), std::nullopt);
  EXPECT_THROW(build_forest(Bits(5, 0), 2), usage_error);
}

TEST(Build, TwoMassThreeClustersMergeAtLevelThree) {
  // triples at 10-12 and 30-32: distance 18 is >= 3^2 (no level-2 merge)
  // but < 3^3, so they merge at level 3 with mass 3 + 3 - 2*(2-1) = 4
  ClusterForest f =
      build_forest(bits_with_ones(300, {10, 11, 12, 30, 31, 32}), 3);
  EXPECT_EQ(forest_invariant_violation(f), std::nullopt);
  ASSERT_EQ(f.final_partition.size(), 1u);
  const ClusterNode& root = f.node(f.final_partition[0]);
  EXPECT_EQ(root.level, 3);
  EXPECT_EQ(root.mass, 4);
  EXPECT_EQ(root.alpha, 10);
  EXPECT_EQ(root.omega, 32);
  ASSERT_EQ(root.constituents.size(), 2u);
  EXPECT_EQ(f.node(root.constituents[0]).mass, 3);
  EXPECT_EQ(f.node(root.constituents[1]).mass, 3);
  EXPECT_EQ(kappa(f, 10), 3);
  EXPECT_EQ(kappa(f, 31), 3);

  GenealogyTree t = genealogy(f, root.id);
  EXPECT_EQ(t.root_mass, 4);
  EXPECT_EQ(t.leaf_masses, (std::vector<std::int64_t>{3, 3}));
  ASSERT_EQ(t.branch_levels.size(), 1u);
  EXPECT_EQ(t.branch_levels[0], 3);
  EXPECT_EQ(t.branch_degrees[0], 2);
  EXPECT_EQ(t.mass_identity_lhs(), 4);  // 3 + 3 - (2-1)(3-1)
  EXPECT_TRUE(t.degree_identity());
}

TEST(Build, DustIsAbsorbedIntoTheMergedSpan) {
  // pairs at {39,40} and {46,47} with an isolated point 43 between them;
  // level 2 merges the pairs (distance 6 < 9) and absorbs 43 as dust
  ClusterForest f =
      build_forest(bits_with_ones(400, {39, 40, 43, 46, 47}), 3);
  EXPECT_EQ(forest_invariant_violation(f), std::nullopt);
  ASSERT_EQ(f.final_partition.size(), 1u);
  const ClusterNode& root = f.node(f.final_partition[0]);
  EXPECT_EQ(root.level, 2);
  EXPECT_EQ(root.mass, 3);  // 2 + 2 - 1*(2-1)
  EXPECT_EQ(root.member_count(), 5);
  ASSERT_EQ(root.constituents.size(), 2u);  // the dust point is no child
  EXPECT_EQ(kappa(f, 43), 2);               // but it lives in the span

  // thinning removes exactly the four intra-span zeros
  EXPECT_EQ(thin_deletions(f),
            (std::vector<std::int64_t>{41, 42, 44, 45}));
  ASSERT_TRUE(chi(f).determined);
  ASSERT_EQ(chi(f).chi, 0);  // alpha 39 >= 3^3
  Bits thin = thin_xi(bits_with_ones(400, {39, 40, 43, 46, 47}), f);
  EXPECT_EQ(thin.size(), 396u);
  for (std::int64_t p = 39; p <= 43; ++p)
    EXPECT_EQ(thin[static_cast<std::size_t>(p - 1)], 1);
  EXPECT_EQ(thin[37], 0);
  EXPECT_EQ(thin[43], 0);

  WeightedWord psi = psi_from_xi(f);
  WeightedWord enc = encode(thin);
  EXPECT_TRUE(preceq_M(psi, enc, 3));
  EXPECT_EQ(psi.w[38], 3);
  EXPECT_EQ(enc.w[38], 5);  // solid run of all five members
}

TEST(Build, ThinningExamples) {
  // contiguous cluster: nothing to delete
  ClusterForest f1 = build_forest(bits_with_ones(100, {10, 11}), 3);
  EXPECT_TRUE(thin_deletions(f1).empty());
  EXPECT_EQ(thin_xi(bits_with_ones(100, {10, 11}), f1),
            bits_with_ones(100, {10, 11}));
  // members {10, 12}: the zero at 11 goes
  ClusterForest f2 = build_forest(bits_with_ones(100, {10, 12}), 3);
  EXPECT_EQ(thin_deletions(f2), (std::vector<std::int64_t>{11}));
  Bits t2 = thin_xi(bits_with_ones(100, {10, 12}), f2);
  EXPECT_EQ(t2.size(), 99u);
  EXPECT_EQ(t2[9], 1);
  EXPECT_EQ(t2[10], 1);
  EXPECT_EQ(t2[11], 0);
  // chi must be zero for thinning: a cluster hugging the origin blocks it
  ClusterForest f3 = build_forest(bits_with_ones(100, {2, 3}), 3);
  ASSERT_EQ(chi(f3).chi, 2);
  EXPECT_THROW(thin_xi(bits_with_ones(100, {2, 3}), f3), usage_error);
}

TEST(Provisional, EdgeAndTransitiveMarking) {
  // a point near the right edge is provisional; a chain within M^{mass+1}
  // propagates leftward; distant clusters stay stable
  ClusterForest f = build_forest(bits_with_ones(30, {10, 25, 29}), 3);
  ASSERT_EQ(f.final_partition.size(), 3u);
  EXPECT_FALSE(f.node(f.final_partition[0]).provisional);  // 25-10=15 >= 9
  EXPECT_TRUE(f.node(f.final_partition[1]).provisional);   // 29-25=4 < 9
  EXPECT_TRUE(f.node(f.final_partition[2]).provisional);   // 29+9 > 30

  // chi determination: a provisional cluster near the origin blocks it
  ClusterForest g1 = build_forest(bits_with_ones(10, {8}), 3);
  EXPECT_TRUE(g1.node(g1.final_partition[0]).provisional);
  EXPECT_FALSE(chi(g1).determined);  // 8 < 3^2
  ClusterForest g2 = build_forest(bits_with_ones(20, {19}), 3);
  EXPECT_TRUE(g2.node(g2.final_partition[0]).provisional);
  EXPECT_TRUE(chi(g2).determined);  // 19 >= 3^2: no merge can start before 9
  EXPECT_EQ(chi(g2).chi, 0);

  // psi consumes only the stable prefix
  WeightedWord psi = psi_from_xi(f);
  EXPECT_EQ(psi.length(), 24);  // cut just before the provisional at 25
  EXPECT_EQ(psi.w[9], 1);
}

TEST(Preceq, TwoSidedBound) {
  WeightedWord a{{0, 2, 0, 0, 1}};
  EXPECT_TRUE(preceq_M(a, a, 3));
  EXPECT_FALSE(preceq_M(WeightedWord{{0, 2}}, WeightedWord{{0, 1}}, 3));
  EXPECT_FALSE(preceq_M(WeightedWord{{0, 1}}, WeightedWord{{0, 4}}, 3));
  EXPECT_TRUE(preceq_M(WeightedWord{{0, 1}}, WeightedWord{{0, 3}}, 3));
  EXPECT_FALSE(preceq_M(WeightedWord{{0, 1}}, WeightedWord{{1, 1}}, 3));
  EXPECT_TRUE(preceq_M(WeightedWord{{0, 2, 0}}, WeightedWord{{0, 6, 0, 9}}, 3));
  EXPECT_THROW(preceq_M(a, a, 2), usage_error);
}

TEST(Forest, InvariantsHoldOnRandomSamples) {
  for (int it = 0; it < 200; ++it) {
    double p = it % 2 == 0 ? 0.02 : 0.05;
    Bits xi = sample_bernoulli(2000, p, 52000 + static_cast<std::uint64_t>(it));
    ClusterForest f = build_forest(xi, 3);
    auto bad = forest_invariant_violation(f);
    ASSERT_EQ(bad, std::nullopt) << "it=" << it << ": " << *bad;
    for (std::int64_t id : f.final_partition) {
      const ClusterNode& c = f.node(id);
      ASSERT_LE(c.mass, c.member_count());
      ASSERT_EQ(kappa(f, c.alpha), c.level);
    }
  }
}

TEST(Forest, GenealogyIdentitiesOnRandomSamples) {
  int trees = 0, branched = 0;
  for (int it = 0; it < 200; ++it) {
    Bits xi = sample_bernoulli(1500, 0.06, 97000 + static_cast<std::uint64_t>(it));
    ClusterForest f = build_forest(xi, 3);
    for (std::int64_t id : f.final_partition) {
      GenealogyTree t = genealogy(f, id);
      ASSERT_EQ(t.mass_identity_lhs(), t.root_mass);
      ASSERT_TRUE(t.degree_identity());
      ++trees;
      branched += !t.branch_levels.empty();
    }
  }
  EXPECT_GT(trees, 2000);
  EXPECT_GT(branched, 20);  // higher-level merges actually occurred
}

TEST(Psi, SpacedAndDominatedWhenChiIsZero) {
  int used = 0;
  for (int it = 0; used < 150; ++it) {
    ASSERT_LT(it, 3000);
    Bits xi = sample_bernoulli(3000, 0.02, 31000 + static_cast<std::uint64_t>(it));
    ClusterForest f = build_forest(xi, 3);
    ChiResult c = chi(f);
    if (!c.determined || c.chi != 0) continue;
    WeightedWord psi = psi_from_xi(f);
    ASSERT_TRUE(is_M_spaced(psi, 3).ok) << "it=" << it;
    WeightedWord enc = encode(thin_xi(xi, f));
    ASSERT_TRUE(preceq_M(psi, enc, 3)) << "it=" << it;
    ++used;
  }
  EXPECT_EQ(used, 150);
}

TEST(ZeroPrefix, ErasingThroughTheViolatorRestoresChiZero) {
  EXPECT_EQ(zero_prefix(bits_with_ones(6, {2, 5}), 0),
            bits_with_ones(6, {2, 5}));
  EXPECT_EQ(zero_prefix(bits_with_ones(6, {2, 5}), 3),
            bits_with_ones(6, {5}));
  EXPECT_EQ(zero_prefix(Bits(4, 0), 9), Bits(4, 0));
  EXPECT_THROW(zero_prefix(Bits(4, 0), -1), usage_error);

  int used = 0;
  for (int it = 0; used < 60; ++it) {
    ASSERT_LT(it, 5000);
    Bits xi = sample_bernoulli(2500, 0.05, 77000 + static_cast<std::uint64_t>(it));
    ClusterForest f = build_forest(xi, 3);
    ChiResult c = chi(f);
    if (!c.determined || c.chi == 0) continue;
    // the largest-mass violator is unique: two equal-mass violators would
    // contradict the separation invariant
    const ClusterNode* star = nullptr;
    for (std::int64_t id : f.final_partition) {
      const ClusterNode& cl = f.node(id);
      if (cl.provisional || cl.mass != c.chi) continue;
      if (cl.alpha < detail::pow_sat(f.M, cl.mass)) {
        ASSERT_EQ(star, nullptr) << "it=" << it;
        star = &cl;
      }
    }
    ASSERT_NE(star, nullptr);
    ClusterForest g = build_forest(zero_prefix(xi, star->omega), 3);
    ChiResult c2 = chi(g);
    ASSERT_TRUE(c2.determined) << "it=" << it;
    ASSERT_EQ(c2.chi, 0) << "it=" << it;
    ++used;
  }
  EXPECT_EQ(used, 60);
}

TEST(MonteCarlo, MassStartFrequenciesDecayGeometrically) {
  const std::int64_t n = 2000;
  const double p = 0.02;
  const int N = 400;
  std::map<std::int64_t, std::int64_t> count;
  int conditioned = 0;
  for (int it = 0; it < N; ++it) {
    Bits xi = sample_bernoulli(n, p, 12000 + static_cast<std::uint64_t>(it));
    ClusterForest f = build_forest(xi, 3);
    if (!chi(f).determined) continue;
    ++conditioned;
    for (std::int64_t id : f.final_partition) {
      const ClusterNode& c = f.node(id);
      if (!c.provisional) ++count[c.mass];
    }
  }
  ASSERT_GT(conditioned, N / 2);
  std::vector<double> freq;
  for (std::int64_t k = 1; count.count(k) && count[k] >= 5; ++k)
    freq.push_back(static_cast<double>(count[k]) /
                   (static_cast<double>(conditioned) * static_cast<double>(n)));
  ASSERT_GE(freq.size(), 3u);  // masses 1..3 all observed
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    xs.push_back(static_cast<double>(i + 1));
    ys.push_back(std::log(freq[i]));
  }
  LineFit fit = ols_fit(xs, ys);
  EXPECT_LT(fit.slope_hi95, 0.0) << "slope=" << fit.slope;
}
