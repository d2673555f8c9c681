#include <gtest/gtest.h>

#include <random>

#include "aztec/boundary_inverse.hpp"
#include "aztec/dynamics.hpp"

using namespace aztec;

namespace {

WeightField field_for(std::mt19937_64& rng, long n) { return random_window_field(rng, {0, n, 0, std::max(n - 1, 1L)}); }

ExactMatrix direct_kinv(const WeightField& w, long n) { return exact_inverse(kasteleyn_aztec(build_aztec(n, w)).K); }

}  // namespace

TEST(BoundaryInverse, SizeOne) {
    auto w = WeightField::periodic({1, 1}, [](long, long) { return std::make_pair(Rational(2), Rational(5)); });
    auto W = w_inverse_recurrence(w, 1);
    EXPECT_EQ(W(0, 0), Rational(1, 7));
}

TEST(BoundaryInverse, UniformSizeTwo) {
    auto w = WeightField::periodic({1, 1}, [](long, long) { return std::make_pair(Rational(1), Rational(1)); });
    auto W = w_inverse_recurrence(w, 2);
    EXPECT_EQ(W, inverse(lgv_matrix(build_aztec(2, w))));
    // path counts [[2, 2], [2, 6]]
    EXPECT_EQ(W(0, 0), Rational(3, 4));
    EXPECT_EQ(W(0, 1), Rational(-1, 4));
    EXPECT_EQ(W(1, 0), Rational(-1, 4));
    EXPECT_EQ(W(1, 1), Rational(1, 4));
}

TEST(BoundaryInverse, MatchesInverseOfPathMatrix) {
    std::mt19937_64 rng(11);
    for (long n = 1; n <= 4; ++n)
        for (int t = 0; t < 3; ++t) {
            auto w = field_for(rng, n);
            EXPECT_EQ(w_inverse_recurrence(w, n), inverse(lgv_matrix(build_aztec(n, w)))) << "n=" << n;
        }
}

TEST(BoundaryInverse, MatchesKasteleynInverseWithPhase) {
    std::mt19937_64 rng(12);
    for (long n = 1; n <= 4; ++n) {
        auto w = field_for(rng, n);
        auto W = w_inverse_recurrence(w, n);
        auto Kinv = direct_kinv(w, n);
        for (long i = 1; i <= n; ++i)
            for (long j = 1; j <= n; ++j)
                EXPECT_EQ(Kinv(std::size_t(i - 1), std::size_t(j - 1)),
                          boundary_inverse_phase(i, j) * GaussianRational(W(std::size_t(i - 1), std::size_t(j - 1))));
    }
}

TEST(BoundaryInverse, EveryLevelMatchesItsOwnDiamond) {
    std::mt19937_64 rng(13);
    const long n = 4;
    auto w = field_for(rng, n);
    auto rec = run_boundary_recurrence(RawEdgeWeights::from_weights(w, aztec_black_window(n)), n);
    ASSERT_EQ(rec.frames.size(), std::size_t(n));
    for (const auto& f : rec.frames) {
        auto Kinv = exact_inverse(kasteleyn_aztec(build_aztec(f.size, f.raw)).K);
        for (std::size_t i = 0; i < std::size_t(f.size); ++i)
            for (std::size_t j = 0; j < std::size_t(f.size); ++j)
                EXPECT_EQ(axis_abs(Kinv(i, j)), f.R(i, j)) << "size " << f.size;
    }
}

TEST(BoundaryInverse, PartitionFunctionChain) {
    std::mt19937_64 rng(14);
    const long n = 3;
    auto w = field_for(rng, n);
    auto rec = run_boundary_recurrence(RawEdgeWeights::from_weights(w, aztec_black_window(n)), n);
    Rational below = 1;
    for (auto it = rec.frames.rbegin(); it != rec.frames.rend(); ++it) {
        Rational Z = partition_function(enumerate_tilings(build_aztec(it->size, it->raw)));
        EXPECT_EQ(Z, it->delta_product * below) << "size " << it->size;
        below = Z;
    }
}

TEST(BoundaryInverse, FacesFollowTheShuffle) {
    std::mt19937_64 rng(15);
    const long n = 5;
    auto raw = RawEdgeWeights::from_weights(field_for(rng, n), aztec_black_window(n));
    FaceField F = faces_from_raw(raw), G = faces_from_raw(shuffle_down(raw, n));
    // the shuffle moves faces up a row; the Aztec boundary cuts off the rest
    long compared = 0;
    for (auto& [key, v] : G.faces()) {
        auto [k, j] = key;
        Rational want;
        try {
            want = k % 2 == 0 ? detail::shuffled_even(F, k / 2, j + 1) : Rational(1 / F(k + 1, j + 1));
        } catch (const ExtentError&) {
            continue;
        }
        EXPECT_EQ(v, want) << k << "," << j;
        ++compared;
    }
    EXPECT_GT(compared, 20);
}

TEST(BoundaryInverse, FullInverse) {
    std::mt19937_64 rng(16);
    for (long n : {1, 2, 3}) {
        auto w = field_for(rng, n);
        EXPECT_EQ(full_inverse_by_recurrence(w, n), direct_kinv(w, n)) << "n=" << n;
    }
}

TEST(BoundaryInverse, CornerBlockWithoutBoundary) {
    std::mt19937_64 rng(17);
    const long n = 3;
    auto w = field_for(rng, n);
    auto k = kasteleyn_aztec(build_aztec(n, w));
    auto X = propagate_full_inverse(k, RationalMatrix(n, n), false);
    auto s = schur_blocks(k);
    const std::size_t m = s.split;
    for (std::size_t i = 0; i < s.Dinv.rows(); ++i)
        for (std::size_t j = 0; j < s.Dinv.cols(); ++j) EXPECT_EQ(X(m + i, m + j), s.Dinv(i, j));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) EXPECT_TRUE(X(i, j).is_zero());
}

TEST(BoundaryInverse, RejectsWrongBoundary) {
    std::mt19937_64 rng(18);
    const long n = 3;
    auto w = field_for(rng, n);
    auto k = kasteleyn_aztec(build_aztec(n, w));
    auto W = w_inverse_recurrence(w, n);
    W(0, 1) = -W(0, 1);
    EXPECT_THROW(propagate_full_inverse(k, W), MathError);
    EXPECT_THROW(propagate_full_inverse(k, RationalMatrix(2, 2)), ConfigError);
}

TEST(BoundaryInverse, ShuffleDownNeedsSizeTwo) {
    auto raw = RawEdgeWeights::from_weights(
        WeightField::periodic({1, 1}, [](long, long) { return std::make_pair(Rational(1), Rational(1)); }),
        aztec_black_window(1));
    EXPECT_THROW(shuffle_down(raw, 1), ConfigError);
}
