#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aztec/factorization.hpp"

using namespace aztec;

namespace {

WeightField two_periodic() {
    // column 0: a = (1,2), b = (3,3); column 1: a = (2,1), b = (3,4)
    return WeightField::periodic({2, 2}, [](long i, long j) {
        static const long A[2][2] = {{1, 2}, {2, 1}}, B[2][2] = {{3, 3}, {3, 4}};
        return std::make_pair(Rational(A[i][j]), Rational(B[i][j]));
    });
}

// L U (or U L) against G on the part of the window where both are exact.
void expect_reproduces_G(const TransitionFamily& f, const Factorization& fac) {
    const Interval w = fac.window;
    auto G = product_G(f, {w.lo - f.n, w.hi}).restrict(w, w);
    auto P = fac.order == FactorOrder::LU ? fac.L * fac.U : fac.U * fac.L;
    for (long i = w.lo; i <= w.hi; ++i)
        for (long j = w.lo; j <= w.hi; ++j) {
            if (!P.certified(i, j)) continue;
            EXPECT_EQ(P(i, j), G.exact(i, j)) << "(" << i << "," << j << ")";
        }
}

long certified_count(const WindowedOperator& X) {
    long c = 0;
    for (long i = X.rows().lo; i <= X.rows().hi; ++i)
        for (long j = X.cols().lo; j <= X.cols().hi; ++j) c += X.certified(i, j);
    return c;
}

}  // namespace

TEST(Factorization, SizeOneConstantWeights) {
    TransitionFamily f{1, WeightField::periodic({1, 1}, [](long, long) { return std::make_pair(Rational(2), Rational(3)); })};
    Interval w{-4, 3};
    auto lu = lu_decompose(f, w);
    // U1 = M_0^{(1)} S^{-1}: b/(a+b) on the diagonal and a/(a+b) above it
    for (long i = -4; i <= 3; ++i)
        for (long j = -4; j <= 3; ++j) {
            Rational want = j == i ? Rational(3, 5) : j == i + 1 ? Rational(2, 5) : Rational(0);
            EXPECT_EQ(lu.U(i, j), want);
        }
    expect_reproduces_G(f, lu);
}

TEST(Factorization, UniformLUOnWindow) {
    TransitionFamily f{2, WeightField::periodic({1, 1}, [](long, long) { return std::make_pair(Rational(1), Rational(1)); })};
    auto lu = lu_decompose(f, {-6, 2});
    expect_reproduces_G(f, lu);
    for (long i = -6; i <= 2; ++i) EXPECT_GT(lu.L(i, i), 0);
}

TEST(Factorization, RandomLUAndUL) {
    std::mt19937_64 rng(1);
    for (long n = 1; n <= 3; ++n)
        for (int t = 0; t < 3; ++t) {
            Interval w{-7, 4};
            TransitionFamily f{n, random_window_field(rng, {0, n, -25, 15})};
            auto lu = lu_decompose(f, w);
            auto ul = ul_decompose(f, w);
            EXPECT_TRUE(lu.L.verify_structure());
            EXPECT_TRUE(lu.U.verify_structure());
            EXPECT_TRUE(ul.L.verify_structure());
            EXPECT_TRUE(ul.U.verify_structure());
            EXPECT_EQ(lu.L.structure(), Structure::Lower);
            EXPECT_EQ(lu.U.structure(), Structure::Upper);
            EXPECT_EQ(ul.L.structure(), Structure::Lower);
            EXPECT_EQ(ul.U.structure(), Structure::Upper);
            expect_reproduces_G(f, lu);
            expect_reproduces_G(f, ul);
            // U has n subdiagonals' worth of reach below, so only the first n columns stay uncertified
            EXPECT_EQ(certified_count(lu.L * lu.U), w.size() * (w.size() - n));
            EXPECT_GT(certified_count(ul.U * ul.L), 0);
        }
}

TEST(Factorization, L2IsLowerTriangularEntrywise) {
    std::mt19937_64 rng(2);
    TransitionFamily f{3, random_window_field(rng, {0, 3, -25, 15})};
    auto ul = ul_decompose(f, {-6, 3});
    for (long i = -6; i <= 3; ++i)
        for (long j = i + 1; j <= 3; ++j) EXPECT_EQ(ul.L(i, j), Rational(0));
}

TEST(Factorization, ConstantWeightsFixedBeforeBoundary) {
    TransitionFamily f{3, WeightField::periodic({1, 1}, [](long, long) { return std::make_pair(Rational(2), Rational(5)); })};
    auto ul = ul_decompose(f, {-4, 2});
    // stage 1: columns 2.. keep (2, 5); the boundary column is normalized
    const auto& s1 = ul.stages[1];
    EXPECT_EQ(s1.a(2, 0), Rational(2));
    EXPECT_EQ(s1.b(2, 0), Rational(5));
    EXPECT_EQ(s1.a(1, 0), Rational(2, 7));
    auto lu = lu_decompose(f, {-4, 2});
    EXPECT_EQ(lu.stages[1].a(0, 0), Rational(2));
    EXPECT_EQ(lu.stages[1].a(2, 0), Rational(2, 7));
}

TEST(Factorization, StageHistoryMatchesHatMap) {
    std::mt19937_64 rng(3);
    const long n = 3;
    auto w = random_window_field(rng, {0, n, -25, 15});
    TransitionFamily f{n, w};
    auto lu = lu_decompose(f, {-5, 3});
    WeightField h = w;
    for (long j = 1; j <= n; ++j) {
        h = hat_map(h);
        const auto& s = lu.stages[std::size_t(j)];
        const Window& x = s.window_extent();
        for (long i = 0; i < n - j; ++i)
            for (long k = x.j0; k <= x.j1; ++k) {
                EXPECT_EQ(s.a(i, k), h.a(i, k));
                EXPECT_EQ(s.b(i, k), h.b(i, k));
            }
    }
}

TEST(Factorization, InverseFactors) {
    std::mt19937_64 rng(4);
    for (long n = 1; n <= 4; ++n) {
        TransitionFamily f{n, random_window_field(rng, {0, n, -30, 15})};
        Interval w{-8, 3};
        auto lu = lu_decompose(f, w);
        auto inv = invert_factors(lu);
        EXPECT_TRUE(equal_on(inv.Lambda * lu.L, WindowedOperator::identity(w), w, w));
        EXPECT_TRUE(equal_on(lu.U * inv.Upsilon, WindowedOperator::identity(w), w, w));
        EXPECT_LE(measured_bandwidth(inv.Lambda), n);
        auto ul = ul_decompose(f, w);
        EXPECT_LE(measured_bandwidth(invert_factors(ul).Lambda), n);
    }
}

TEST(Factorization, UpsilonDecays) {
    TransitionFamily f{2, two_periodic()};
    auto as = check_assumption(f.w, 0, 1);
    ASSERT_TRUE(as.ok);
    auto inv = invert_factors(lu_decompose(f, {-40, 1}));
    // log max_i |Upsilon(i, i+d)| against d, past the transient of the first diagonals
    std::vector<double> xs, ys;
    for (long d = 10; d <= 28; ++d) {
        double m = 0;
        for (long i = -40; i + d <= 1; ++i) m = std::max(m, std::abs(to_double(inv.Upsilon.exact(i, i + d))));
        xs.push_back(double(d));
        ys.push_back(std::log(m));
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    double r2 = sxy * sxy / (sxx * syy);
    EXPECT_GE(r2, 0.99);
    double rate = std::exp(sxy / sxx);
    EXPECT_LE(rate, as.rho * 1.05);
    EXPECT_GE(rate, as.rho / 2);
    // R rho^d with the measured constant bounds every diagonal
    double R = LimitKernel::upsilon_envelope(f, as.rho);
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_LE(ys[k], std::log(R) + xs[k] * std::log(as.rho) + 1e-9);
}

TEST(Factorization, ApproximateInverseSmall) {
    TransitionFamily f{2, two_periodic()};
    auto a = approximate_w_inverse(f, 2);
    ASSERT_TRUE(a.error_vs_exact.has_value());
    auto b = approximate_w_inverse(f, 8);
    EXPECT_LT(*b.error_vs_exact, *a.error_vs_exact);
    EXPECT_LT(b.residual, a.residual);
    // W is G22 with both index orders reversed
    auto W = extract_W(product_V(f, em_window(2, 2)), 2, 2);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(W(r, s), a.G22(3 - r, 3 - s));
}

TEST(Factorization, ApproximateInverseConverges) {
    TransitionFamily f{2, two_periodic()};
    std::vector<long> ps{4, 6, 8, 10, 12};
    std::vector<double> res;
    for (long p : ps) res.push_back(approximate_w_inverse(f, p, false).residual);
    for (std::size_t k = 1; k < res.size(); ++k) EXPECT_LT(res[k], res[k - 1]);
    double r = fit_geometric_rate(ps, res);
    double rho = check_assumption(f.w, 0, 1).rho;
    EXPECT_GE(r, rho / 2);
    EXPECT_LE(r, 2 * rho);
}

TEST(Factorization, LimitKernelRejectsLowHeights) {
    TransitionFamily f{2, two_periodic()};
    EXPECT_THROW(limit_kernel(f, {0, -2, 1, 0}, 1e-12), ConfigError);
}

TEST(Factorization, LimitKernelMatchesLargeP) {
    auto w = WeightField::periodic({2, 2}, [](long i, long j) {
        static const long A[2][2] = {{1, 1}, {1, 2}}, B[2][2] = {{4, 5}, {6, 7}};
        return std::make_pair(Rational(A[i][j]), Rational(B[i][j]));
    });
    TransitionFamily f{2, w};
    LimitKernel K(f, 1e-12, -1, 1);
    auto E = em_kernel_finite(f, 20);
    for (long m1 : {0, 1, 3})
        for (long m2 : {1, 2, 4})
            for (long x1 : {-1, 0, 1})
                for (long x2 : {-1, 1}) {
                    KernelQuery q{m1, x1, m2, x2};
                    double lim = to_double(K(q).value), fin = to_double(E(q));
                    EXPECT_NEAR(lim, fin, 1e-10) << m1 << " " << x1 << " " << m2 << " " << x2;
                }
}
