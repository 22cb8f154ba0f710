#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "test_util.hpp"

using namespace caco;

TEST(Rng, SameSeedSameStream) {
    Rng a(5), b(5), c(6);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs |= x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformMomentsMatch) {
    Rng rng(1);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    // mean 1/2, variance 1/12; 5 standard errors.
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}

TEST(Rng, NormalMomentsMatch) {
    Rng rng(2);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, IndexIsUniformOverSmallRanges) {
    Rng rng(3);
    const std::size_t k = 7;
    const int n = 70000;
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) ++counts[rng.index(k)];
    // Pearson chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / k;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 22.46);
    EXPECT_THROW(rng.index(0), Error);
}

TEST(Rng, ShuffleIsAPermutation) {
    Rng rng(4);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    auto shuffled = v;
    rng.shuffle(shuffled);
    EXPECT_NE(shuffled, v);
    std::sort(shuffled.begin(), shuffled.end());
    EXPECT_EQ(shuffled, v);
}

TEST(Rng, SampleWithoutReplacementIsDistinct) {
    Rng rng(5);
    auto s = rng.sample_without_replacement(100, 30);
    EXPECT_EQ(s.size(), 30u);
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 30u);
    for (auto i : s) EXPECT_LT(i, 100u);
    EXPECT_THROW(rng.sample_without_replacement(3, 4), Error);
}

TEST(Rng, SampleWithoutReplacementCoversEveryIndexEqually) {
    Rng rng(6);
    std::vector<int> hits(10, 0);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t)
        for (auto i : rng.sample_without_replacement(10, 3)) ++hits[i];
    // Each index is drawn with probability 3/10 per trial.
    for (int h : hits) EXPECT_NEAR(h / static_cast<double>(trials), 0.3, 0.015);
}
