#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pkm/baseline.hpp"

using namespace pkm;

TEST(RankNormalize, FiveDistinctValues) {
    const auto r = rank_normalize(std::vector<double>{10, 20, 30, 40, 50}, 100);
    const std::vector<double> expected{0.20, 0.40, 0.60, 0.80, 1.00};
    ASSERT_EQ(r.size(), expected.size());
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], expected[i], 1e-15);
}

TEST(RankNormalize, ConstantFeatureMapsToOneValue) {
    const auto r = rank_normalize(std::vector<double>{7, 7, 7, 7});
    for (double v : r) EXPECT_EQ(v, r.front());
}

TEST(RankNormalize, DefaultsAndErrors) {
    EXPECT_EQ(kDefaultRankBuckets, 100u);
    EXPECT_EQ(RankNormalizer(std::vector<double>{1.0}).buckets(), 100u);
    EXPECT_ANY_THROW(rank_normalize(std::vector<double>{}));
    EXPECT_ANY_THROW(rank_normalize(std::vector<double>{1.0}, 0));
}

TEST(RankNormalize, MonotoneAndBounded) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> v(0, 30);
    std::vector<double> train(300);
    for (auto& x : train) x = v(rng);
    const RankNormalizer rn(train, 100);
    double prev = -1.0;
    for (double x = -5.0; x <= 35.0; x += 0.25) {
        const double y = rn.transform(x);
        EXPECT_GE(y, prev);
        EXPECT_GE(y, 0.01);
        EXPECT_LE(y, 1.0);
        prev = y;
    }
    EXPECT_DOUBLE_EQ(rn.transform(std::nullopt), 0.5);
}

TEST(BasicGrouping, FewerTokensThanGroups) {
    const std::vector<std::optional<std::string>> v{"a", "b", "c", "a"};
    const auto enc = bgb_encode(v, 10);
    ASSERT_EQ(enc.size(), 4u);
    for (const auto& row : enc) {
        EXPECT_EQ(row.size(), 3u);
        EXPECT_DOUBLE_EQ(std::accumulate(row.begin(), row.end(), 0.0), 1.0);
    }
    EXPECT_EQ(enc[0], enc[3]);
    EXPECT_NE(enc[0], enc[1]);
}

TEST(BasicGrouping, HundredEquifrequentTokens) {
    std::vector<std::optional<std::string>> v;
    for (int t = 0; t < 100; ++t) {
        for (int k = 0; k < 3; ++k) v.emplace_back("t" + std::to_string(t));
    }
    const BasicGrouping g(v, 10);
    EXPECT_EQ(g.num_groups(), 10u);
    std::map<std::size_t, int> sizes;
    for (const auto& [token, group] : g.group_of()) ++sizes[group];
    ASSERT_EQ(sizes.size(), 10u);
    for (const auto& [group, n] : sizes) EXPECT_EQ(n, 10);
}

TEST(BasicGrouping, UnseenTokenIsAllZeros) {
    const BasicGrouping g(std::vector<std::optional<std::string>>{"a", "b"}, kDefaultBasicGroups);
    EXPECT_EQ(kDefaultBasicGroups, 10u);
    const auto row = g.one_hot(std::string("zzz"));
    EXPECT_EQ(std::accumulate(row.begin(), row.end(), 0.0), 0.0);
}

TEST(BaselineEncoder, MixedSchema) {
    const Schema schema({{"x", FeatureKind::Numeric}, {"c", FeatureKind::Categorical}}, "y");
    const std::vector<Instance> rows{{1.0, std::string("u")}, {2.0, std::string("v")}, {3.0, std::string("u")},
                                     {Value{}, std::string("w")}};
    const auto data = Dataset::from_rows(with_class_labels(schema, {"p", "q"}), rows, {0, 1, 0, 1});
    const auto enc = fit_baseline_encoder(data);
    EXPECT_EQ(enc.encoded_size(), 1u + 3u);
    const auto X = encode_dataset(enc, data);
    EXPECT_EQ(X.rows(), 4u);
    EXPECT_DOUBLE_EQ(X(3, 0), 0.5);  // Missing numeric
}
