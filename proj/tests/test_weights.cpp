#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aztec/dynamics.hpp"
#include "aztec/weights.hpp"

using namespace aztec;

namespace {

WeightField constant(Rational a, Rational b) {
    return WeightField::periodic({1, 1}, [&](long, long) { return std::make_pair(a, b); });
}

RawEdgeWeights random_raw(std::mt19937_64& rng, Window w) {
    RawEdgeWeights r(w);
    for (long i = w.i0; i <= w.i1; ++i)
        for (long j = w.j0; j <= w.j1; ++j)
            r.set(i, j, {random_rational(rng), random_rational(rng), random_rational(rng), random_rational(rng)});
    return r;
}

}  // namespace

TEST(Weights, FacesOfConstantFields) {
    auto ones = faces_from_weights(constant(1, 1));
    for (auto& [k, v] : ones.faces()) EXPECT_EQ(v, Rational(1)) << k.first;
    auto f = faces_from_weights(constant(2, 1));
    EXPECT_EQ(f(0, 0), Rational(2));
    EXPECT_EQ(f(1, 0), Rational(1, 2));
    EXPECT_EQ(f(6, -3), Rational(2));
}

TEST(Weights, RejectsBadInput) {
    EXPECT_THROW(constant(0, 1), ConfigError);
    EXPECT_THROW(WeightField::uniform({0, 2, 0, 0}), ExtentError);
    EXPECT_THROW(constant(1, 1).restrict({0, 1, 0, 1}).a(5, 0), ExtentError);
    FaceField f;
    EXPECT_THROW(f.set(0, 0, Rational(-1)), ConfigError);
}

TEST(Weights, ReconstructionFromFaces) {
    Window w{0, 3, 0, 3};
    auto ones = weights_from_faces(faces_from_weights(WeightField::uniform(w)), w);
    EXPECT_EQ(ones, WeightField::uniform(w));

    // a different seed in one column is a gauge change
    auto f = faces_from_weights(WeightField::uniform(w));
    auto g = weights_from_faces(f, w, [](long c) { return Rational(c == 2 ? 3 : 1); });
    EXPECT_EQ(g.a(2, 1), Rational(3));
    EXPECT_EQ(faces_from_weights(g), f);

    std::mt19937_64 rng(1);
    for (int t = 0; t < 5; ++t) {
        auto x = random_window_field(rng, w);
        auto fx = faces_from_weights(x);
        EXPECT_EQ(faces_from_weights(weights_from_faces(fx, w)), fx);
    }
    EXPECT_THROW(weights_from_faces(f, {0, 3, 0, 0}), ExtentError);
}

TEST(Weights, PeriodicReconstruction) {
    auto x = WeightField::periodic({2, 2}, [](long i, long j) {
        static const long A[2][2] = {{1, 2}, {3, 1}}, B[2][2] = {{2, 5}, {1, 4}};
        return std::make_pair(Rational(A[i][j]), Rational(B[i][j]));
    });
    auto f = faces_from_weights(x);
    auto y = weights_from_faces_periodic(f);
    EXPECT_TRUE(y.is_periodic());
    EXPECT_EQ(faces_from_weights(y), f);
}

TEST(Weights, GaugeNormalize) {
    Window w{0, 3, 0, 3};
    std::mt19937_64 rng(2);
    auto x = random_window_field(rng, w);
    EXPECT_EQ(gauge_normalize(RawEdgeWeights::from_weights(x, w)), x);

    auto raw = random_raw(rng, w);
    auto base = gauge_normalize(raw);
    // the last column's even faces need whites outside the window
    auto fb = faces_from_weights(base), fr = faces_from_raw(raw);
    for (auto& [key, v] : fr.faces()) EXPECT_EQ(fb(key.first, key.second), v);
    raw.scale_black(1, 2, 5);
    EXPECT_EQ(gauge_normalize(raw), base);
    raw.scale_white(2, 2, Rational(1, 7));
    EXPECT_EQ(gauge_normalize(raw), base);
}

TEST(Weights, GaugeKeepsPeriodicFaces) {
    // raw weights with periods (q, p) = (2, 2), materialized on a window
    std::mt19937_64 rng(3);
    BlackEdges cell[2][2];
    for (auto& row : cell)
        for (auto& e : row) e = {random_rational(rng), random_rational(rng), random_rational(rng), random_rational(rng)};
    Window w{0, 5, 0, 5};
    RawEdgeWeights raw(w);
    for (long i = w.i0; i <= w.i1; ++i)
        for (long j = w.j0; j <= w.j1; ++j) raw.set(i, j, cell[i % 2][j % 2]);
    auto f = faces_from_weights(gauge_normalize(raw));
    auto interior = faces_from_raw(raw);
    long compared = 0;
    for (auto& [key, v] : interior.faces()) {
        auto [k, j] = key;
        EXPECT_EQ(f(k, j), v);
        if (interior.has(k + 4, j)) {
            EXPECT_EQ(f(k + 4, j), v);
            ++compared;
        }
        if (interior.has(k, j + 2)) {
            EXPECT_EQ(f(k, j + 2), v);
            ++compared;
        }
    }
    EXPECT_GT(compared, 50);
}

TEST(Weights, AssumptionExamples) {
    auto ok = check_assumption(constant(1, 2), 0, 0);
    ASSERT_TRUE(ok.ok);
    EXPECT_DOUBLE_EQ(ok.rho, 0.5);
    EXPECT_EQ(ok.delta1, Rational(3));
    EXPECT_EQ(ok.delta2, Rational(3));

    auto bad = check_assumption(constant(2, 1), 0, 0);
    EXPECT_FALSE(bad.ok);
    EXPECT_NE(bad.violation.find("column 0"), std::string::npos);

    auto two = WeightField::periodic({1, 2}, [](long, long j) {
        return std::make_pair(Rational(j == 0 ? 1 : 3), Rational(2));
    });
    auto r = check_assumption(two, 0, 0);
    ASSERT_TRUE(r.ok);
    EXPECT_NEAR(r.rho, std::sqrt(0.75), 1e-15);
}

TEST(Weights, HatMapKeepsAssumption) {
    std::mt19937_64 rng(4);
    int checked = 0;
    for (int t = 0; t < 40 && checked < 10; ++t) {
        auto w = random_periodic_field(rng, {2, 3});
        auto before = check_assumption(w, 0, 1);
        if (!before.ok) continue;
        auto after = check_assumption(hat_map(w), 0, 1);
        ASSERT_TRUE(after.ok);
        EXPECT_NEAR(after.rho, before.rho, 1e-14);
        ++checked;
    }
    EXPECT_EQ(checked, 10);
}
