#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rarequant/error.hpp"
#include "rarequant/features.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, SplitsOnNonAlphanumerics) {
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_EQ(tokenize("Online  PLATFORM!"), (Tokens{"online", "platform"}));
    EXPECT_EQ(tokenize("b2b-market"), (Tokens{"b2b", "market"}));
    EXPECT_EQ(tokenize("a I 9"), (Tokens{"a", "i", "9"}));
    EXPECT_EQ(tokenize("  ...\t\n"), Tokens{});
}

TEST(Tokenize, HandlesNonAsciiLetters) {
    EXPECT_EQ(tokenize("Caf\xc3\x89 \xe2\x80\x94 Stra\xc3\x9f" "e"), (Tokens{"caf\xc3\xa9", "stra\xc3\x9f" "e"}));
    // Greek capital sigma lowercases; the em dash above is a separator.
    EXPECT_EQ(tokenize("\xce\xa3\xce\xb1"), (Tokens{"\xcf\x83\xce\xb1"}));
    // A stray continuation byte separates.
    EXPECT_EQ(tokenize("ab\x80" "cd"), (Tokens{"ab", "cd"}));
}

TEST(VectorizerConfigTest, RequiresPowerOfTwo) {
    EXPECT_THROW((VectorizerConfig{1, true}).validate(), ConfigError);
    EXPECT_THROW((VectorizerConfig{100, true}).validate(), ConfigError);
    EXPECT_NO_THROW((VectorizerConfig{2, true}).validate());
    EXPECT_NO_THROW(VectorizerConfig{}.validate());
}

TEST(Vectorize, EmptyTextGivesEmptyVector) {
    const auto v = vectorize("", VectorizerConfig{});
    EXPECT_TRUE(v.empty());
    EXPECT_EQ(v.dim, 65536u);
    EXPECT_EQ(v.norm(), 0.0);
}

TEST(Vectorize, RepeatedWordIsOneUnitEntry) {
    const auto v = vectorize("platform platform", VectorizerConfig{65536, false});
    ASSERT_EQ(v.entries.size(), 1u);
    EXPECT_EQ(v.entries[0].index, fnv1a64("platform") % 65536);
    EXPECT_DOUBLE_EQ(v.entries[0].value, 1.0);
}

TEST(Vectorize, TwoDistinctWordsShareWeightEqually) {
    ASSERT_NE(fnv1a64("a") % 65536, fnv1a64("b") % 65536);
    const auto v = vectorize("a b", VectorizerConfig{});
    ASSERT_EQ(v.entries.size(), 2u);
    for (const auto& e : v.entries) EXPECT_NEAR(e.value, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Vectorize, SublinearTermFrequency) {
    // tf 3 becomes 1 + ln 3 against 1 for the single occurrence.
    const auto v = vectorize("x x x y", VectorizerConfig{});
    ASSERT_EQ(v.entries.size(), 2u);
    const auto& ex = v.entries[0].index == feature_index("x", 65536) ? v.entries[0] : v.entries[1];
    const auto& ey = &ex == &v.entries[0] ? v.entries[1] : v.entries[0];
    EXPECT_NEAR(ex.value / ey.value, 1.0 + std::log(3.0), 1e-12);

    const auto raw = vectorize("x x x y", VectorizerConfig{65536, false});
    const auto& rx = raw.entries[0].index == feature_index("x", 65536) ? raw.entries[0] : raw.entries[1];
    EXPECT_NEAR(rx.value, 3.0 / std::sqrt(10.0), 1e-15);
}

TEST(Vectorize, CollisionsAccumulateAtSmallDim) {
    const auto v = vectorize("a b c d e f g", VectorizerConfig{2, false});
    EXPECT_LE(v.entries.size(), 2u);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}

std::string random_text(std::mt19937_64& gen, std::vector<std::string>* words_out = nullptr) {
    static const std::vector<std::string> pieces = {"alpha", "Beta", "gamma9", "x", "\xc3\xa9t\xc3\xa9", "42",
                                                    "na\xc3\xafve", "Z", "delta", "\xd0\x9c\xd0\xb8\xd1\x80"};
    static const std::vector<std::string> seps = {" ", "  ", "-", ", ", "!\n", "\t", "/"};
    std::string text;
    const auto n = gen() % 40;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& w = pieces[gen() % pieces.size()];
        if (words_out) words_out->push_back(w);
        text += w;
        text += seps[gen() % seps.size()];
    }
    return text;
}

TEST(VectorizeProperty, IndicesSortedBelowDimAndUnitNorm) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t dim = std::size_t{1} << (1 + gen() % 17);
        std::string text = random_text(gen);
        // Sprinkle in random bytes, including malformed UTF-8.
        for (int k = 0; k < 5; ++k) text.push_back(static_cast<char>(gen() & 0xff));
        const auto v = vectorize(text, VectorizerConfig{dim, trial % 2 == 0});
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            EXPECT_LT(v.entries[i].index, dim);
            EXPECT_GT(v.entries[i].value, 0.0);
            if (i) EXPECT_LT(v.entries[i - 1].index, v.entries[i].index);
        }
        if (!v.empty()) EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    }
}

TEST(VectorizeProperty, WordOrderDoesNotMatter) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> words;
        random_text(gen, &words);
        std::string forward, shuffled;
        for (const auto& w : words) forward += w + " ";
        std::shuffle(words.begin(), words.end(), gen);
        for (const auto& w : words) shuffled += w + " ";
        EXPECT_EQ(vectorize(forward, VectorizerConfig{}), vectorize(shuffled, VectorizerConfig{}));
    }
}

TEST(VectorizeProperty, Deterministic) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto text = random_text(gen);
        EXPECT_EQ(vectorize(text, VectorizerConfig{}), vectorize(text, VectorizerConfig{}));
    }
}

}  // namespace
}  // namespace rarequant
