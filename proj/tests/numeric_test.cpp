#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "rarequant/numeric.hpp"
#include "rarequant/random.hpp"

namespace rarequant {
namespace {

TEST(PairwiseSum, MatchesExactSumOfIntegers) {
    std::vector<double> v(1001);
    std::iota(v.begin(), v.end(), 0.0);
    EXPECT_EQ(pairwise_sum(v), 500500.0);
    EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(PairwiseSum, BeatsNaiveSummationOnManySmallTerms) {
    std::vector<double> v(1 << 20, 0.1);
    const double exact = 0.1 * static_cast<double>(v.size());
    EXPECT_NEAR(pairwise_sum(v), exact, 1e-9);
}

TEST(Sigmoid, StableAtExtremes) {
    EXPECT_EQ(sigmoid(0.0), 0.5);
    EXPECT_NEAR(sigmoid(std::log(3.0)), 0.75, 1e-15);
    EXPECT_EQ(sigmoid(-1000.0), 0.0);
    EXPECT_EQ(sigmoid(1000.0), 1.0);
    EXPECT_NEAR(log1p_exp(1000.0), 1000.0, 1e-12);
    EXPECT_NEAR(log1p_exp(0.0), std::log(2.0), 1e-15);
}

TEST(Fnv1a64, KnownVectors) {
    // Published FNV-1a test vectors.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Rng, Xoshiro256StarStarIsDeterministicPerSeed) {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        if (i == 0) EXPECT_NE(x, c());
    }
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    Rng rng(7);
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto v = rng.below(5);
        ASSERT_LT(v, 5u);
        ++seen[v];
    }
    for (const int count : seen) EXPECT_NEAR(count, 2000, 200);
}

TEST(Rng, PoissonMeanAndVariance) {
    Rng rng(11);
    const double mean = 40.0;
    double s = 0.0, s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(rng.poisson(mean));
        s += k;
        s2 += k * k;
    }
    const double m = s / n;
    EXPECT_NEAR(m, mean, 0.3);
    EXPECT_NEAR(s2 / n - m * m, mean, 2.0);
}

}  // namespace
}  // namespace rarequant
