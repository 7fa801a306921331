#include "aigiqa/synthetic.hpp"
#include "aigiqa/zero_shot.hpp"
#include "error_code.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aigiqa;

TEST(Cosine, BasicCases) {
    Vector x(2);
    Vector t(2);
    x << 1, 0;
    t << 1, 1;
    EXPECT_NEAR(cosine_similarity(x, t), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(cosine_similarity(t, t), 1.0, 1e-15);
    Vector o(2);
    o << 0, 3;
    EXPECT_NEAR(cosine_similarity(x, o), 0.0, 1e-15);
}

TEST(Cosine, Errors) {
    Vector z = Vector::Zero(3);
    Vector a = Vector::Ones(3);
    Vector b = Vector::Ones(4);
    EXPECT_EQ(code_of([&] { cosine_similarity(z, a); }), ErrorCode::ZeroVector);
    EXPECT_EQ(code_of([&] { cosine_similarity(a, b); }), ErrorCode::WidthMismatch);
}

TEST(AntonymScore, Values) {
    EXPECT_EQ(antonym_score(0.3, 0.3), 0.5);
    EXPECT_EQ(antonym_score(-0.9, -0.9), 0.5);
    EXPECT_NEAR(antonym_score(1.0, 0.0), std::exp(1.0) / (std::exp(1.0) + 1.0), 1e-15);
    EXPECT_NEAR(antonym_score(1.0, 0.0), 0.73106, 1e-5);
    EXPECT_NEAR(antonym_score(0.2, 0.7) + antonym_score(0.7, 0.2), 1.0, 1e-15);
}

TEST(AntonymScore, StrictlyInsideUnitIntervalOverCosineRange) {
    for (double s1 = -1.0; s1 <= 1.0; s1 += 0.25) {
        for (double s2 = -1.0; s2 <= 1.0; s2 += 0.25) {
            const double s = antonym_score(s1, s2);
            EXPECT_GT(s, 0.0);
            EXPECT_LT(s, 1.0);
        }
    }
}

TEST(PromptPair, Validation) {
    EXPECT_NO_THROW(AntonymPromptPair{}.validate());
    EXPECT_EQ(AntonymPromptPair{}.positive, "Good photo.");
    EXPECT_EQ(AntonymPromptPair{}.negative, "Bad photo.");
    EXPECT_EQ(code_of([] { AntonymPromptPair{"", "Bad photo."}.validate(); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { AntonymPromptPair{"x", "x"}.validate(); }), ErrorCode::InvalidConfig);
}

TEST(ZeroShot, IdenticalPromptFeaturesGiveHalf) {
    const auto x = oracle::random_features(1, 16, 3)[0];
    const auto t = oracle::random_features(1, 16, 4)[0];
    EXPECT_EQ(zero_shot_quality(x, t, t), 0.5);
}

TEST(ZeroShot, ScaleInvariantInImageFeature) {
    const auto f = oracle::random_features(3, 32, 11);
    const double base = zero_shot_quality(f[0], f[1], f[2]);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
        const Vector scaled = f[0] * c;
        EXPECT_NEAR(zero_shot_quality(scaled, f[1], f[2]), base, 1e-12);
    }
}

TEST(ZeroShot, AntisymmetricOnStubImages) {
    const auto enc = make_encoder("ViT-B/16", {true, ""});
    const AntonymPromptPair pair;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PixelTensor img = random_pixel_tensor(seed);
        const double s = zero_shot_quality(img, pair, *enc);
        const double r = zero_shot_quality(img, pair.swapped(), *enc);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 1.0);
        EXPECT_NEAR(s + r, 1.0, 1e-12);
    }
}

TEST(ZeroShot, SamePromptTwiceGivesHalf) {
    const auto enc = make_encoder("ViT-B/32", {true, ""});
    const double s = zero_shot_quality(random_pixel_tensor(1), AntonymPromptPair{"Good photo.", "good   PHOTO ."}, *enc);
    EXPECT_EQ(s, 0.5);
}

TEST(ZeroShot, WrongResolutionIsRejected) {
    const auto enc = make_encoder("ViT-B/16", {true, ""});
    EXPECT_EQ(code_of([&] { zero_shot_quality(random_pixel_tensor(1, 112), AntonymPromptPair{}, *enc); }),
              ErrorCode::ShapeMismatch);
}
