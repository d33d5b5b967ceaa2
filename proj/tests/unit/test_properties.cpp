#include <gtest/gtest.h>

#include "properties.hpp"

namespace {

constexpr std::size_t kCases = 1000;

void expect_holds(const props::Outcome& out) {
    EXPECT_EQ(out.cases, kCases);
    EXPECT_EQ(out.failures, 0u) << out.first_failure;
}

}  // namespace

TEST(Properties, PosteriorDistanceBound) { expect_holds(props::posterior_distance_bound(kCases, 11)); }

TEST(Properties, FoldStratification) { expect_holds(props::fold_stratification(kCases, 12)); }

TEST(Properties, InertiaNeverIncreases) { expect_holds(props::inertia_monotonicity(kCases, 13)); }

TEST(Properties, ProbabilitiesNormalize) { expect_holds(props::probability_normalization(kCases, 14)); }

TEST(Properties, PureClustersUseMajorityVote) { expect_holds(props::pure_cluster_majority_vote(kCases, 15)); }

TEST(Properties, LocalModelsBeatEmptySelection) { expect_holds(props::local_model_beats_null(kCases, 16)); }

TEST(Properties, GreedyDiscretizationNeverBeatsExhaustive) {
    const auto out = props::discretization_vs_exhaustive(200, 17);
    EXPECT_EQ(out.below_optimum, 0u);
    EXPECT_GE(out.optimal * 100, out.cases * 95);
}

TEST(Properties, GreedyGroupingNeverBeatsExhaustive) {
    const auto out = props::grouping_vs_exhaustive(200, 18);
    EXPECT_EQ(out.below_optimum, 0u);
    EXPECT_GE(out.optimal * 100, out.cases * 95);
}

TEST(Properties, AucMatchesAllPairs) { EXPECT_LE(props::auc_max_deviation(100, 50, 19), 1e-12); }
