#include <gtest/gtest.h>

#include <random>

#include "aztec/periodic.hpp"

using namespace aztec;

namespace {

WeightField two_periodic_fast() {
    // column 0: a = (1,1), b = (4,5); column 1: a = (1,2), b = (6,7)
    return WeightField::periodic({2, 2}, [](long i, long j) {
        static const long A[2][2] = {{1, 1}, {1, 2}}, B[2][2] = {{4, 5}, {6, 7}};
        return std::make_pair(Rational(A[i][j]), Rational(B[i][j]));
    });
}

// Max |quadrature - exact| over the block window.
double deviation(const QuadratureResult& q, const RationalMatrix& exact) {
    double m = 0;
    for (std::size_t i = 0; i < exact.rows(); ++i)
        for (std::size_t j = 0; j < exact.cols(); ++j) m = std::max(m, std::abs(q.value(i, j) - exact(i, j).get_d()));
    return m;
}

Interval plain(Interval blocks, long p) { return {p * blocks.lo, p * blocks.hi + p - 1}; }

}  // namespace

TEST(Periodic, ScalarPhi) {
    auto s = symbol_phi({Rational(2)}, {Rational(3)});
    Complex z(1.5, 0.5);
    EXPECT_NEAR(std::abs(s.evaluate(z)(0, 0) - (2.0 + 3.0 / z)), 0, 1e-15);
}

TEST(Periodic, PhiDeterminantRoot) {
    // s phi s^{-1}... written for column i = 0: det(phi s^{-1}) = z prod a - prod b, up to sign
    auto phi = symbol_phi({1, 1}, {2, 2});
    auto shifted = phi * symbol_s(2, -1);
    auto det = [&](Complex z) {
        auto m = shifted.evaluate(z);
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    };
    EXPECT_NEAR(std::abs(det(4.0)), 0, 1e-12);
    EXPECT_GT(std::abs(det(2.0)), 0.5);
    // linear: the second difference vanishes
    EXPECT_NEAR(std::abs(det(1.0) - 2.0 * det(2.0) + det(3.0)), 0, 1e-12);
}

TEST(Periodic, QuadratureMatchesOperators) {
    std::mt19937_64 rng(1);
    const long p = 3;
    auto w = random_periodic_field(rng, {1, p});
    std::vector<Rational> a, b;
    for (long r = 0; r < p; ++r) {
        a.push_back(w.a(0, r));
        b.push_back(w.b(0, r));
    }
    Interval blocks{-3, 2};
    Interval x = plain(blocks, p);
    auto Phi = phi_operator([&](long j) { return w.a(0, j); }, [&](long j) { return w.b(0, j); }, x);
    auto Psi = psi_operator(x);
    auto S = WindowedOperator::shift(x, x, 1);
    auto qphi = toeplitz_entries(symbol_phi(a, b), blocks, blocks);
    auto qpsi = toeplitz_entries(symbol_psi(p), blocks, blocks);
    auto qs = toeplitz_entries(symbol_s(p), blocks, blocks);
    EXPECT_LT(deviation(qphi, Phi.data()), 1e-12);
    EXPECT_LT(deviation(qpsi, Psi.data()), 1e-12);
    EXPECT_LT(deviation(qs, S.data()), 1e-12);
    EXPECT_LT(qpsi.accuracy, 1e-12);
    // exact expansions agree with the operators too
    EXPECT_EQ(toeplitz_exact(symbol_psi(p), x, x), Psi.data());
    EXPECT_EQ(toeplitz_exact(symbol_phi(a, b), x, x), Phi.data());
}

TEST(Periodic, ScalarPsiIsGeometricSeries) {
    auto q = toeplitz_entries(symbol_psi(1), {0, 0}, {-6, 2});
    for (long k = -6; k <= 2; ++k) EXPECT_NEAR(std::abs(q.value(0, std::size_t(k + 6)) - (k <= 0 ? 1.0 : 0.0)), 0, 1e-12);
}

TEST(Periodic, ShiftCommutesWithPsi) {
    for (long p : {1, 2, 4}) {
        auto lhs = symbol_s(p) * symbol_psi(p);
        auto rhs = symbol_psi(p) * symbol_s(p);
        EXPECT_TRUE(lhs == rhs);
        MatrixSymbol zinv(p);
        for (long r = 0; r < p; ++r) zinv.add(-1, std::size_t(r), std::size_t(r), 1);
        EXPECT_TRUE(symbol_s(p, p) == zinv);
        Complex z(0.3, 1.7);
        auto d = lhs.evaluate(z) - rhs.evaluate(z);
        EXPECT_LT(max_abs(d), 1e-14);
    }
}

TEST(Periodic, Multiplicativity) {
    std::mt19937_64 rng(2);
    const long p = 2;
    auto w = random_periodic_field(rng, {2, p});
    TransitionFamily f{2, w};
    auto syms = transition_symbols(f);
    Interval blocks{-4, 1};
    Interval x = plain(blocks, p);
    // windowed products are exact on rows/cols away from the lower window edge
    Interval big{x.lo - 12, x.hi};
    for (long from = 0; from < 4; ++from)
        for (long to = from + 1; to <= 4; ++to) {
            auto prod = symbol_product(syms, from, to, p);
            WindowedOperator P = WindowedOperator::identity(big);
            for (long m = from; m < to; ++m) {
                if (m == 3) P = P * WindowedOperator::from_function(big, big, -2, kUnbounded, [](long, long) { return Rational(1); });
                else P = P * f.op(m, big);
            }
            auto exact = P.restrict(x, x);
            ASSERT_TRUE(exact.all_certified());
            EXPECT_EQ(toeplitz_exact(prod, x, x), exact.data());
            auto q = toeplitz_entries(prod, blocks, blocks);
            EXPECT_LT(deviation(q, exact.data()), 1e-10) << from << " " << to;
        }
}

TEST(Periodic, QuadratureDecayAboveDiagonal) {
    // phi s^{-1} inverted: entries above the diagonal decay like r*^{-d}, r* = 4
    auto A = symbol_phi({1, 1}, {2, 2}) * symbol_s(2, -1);
    // the inverse is not a Laurent polynomial; integrate it directly
    QuadratureOptions opt;
    auto eval = [&](long N) {
        auto zs = detail::circle(1.0, N);
        ComplexMatrix out(1, 12);
        for (auto& z : zs) {
            auto m = inverse(A.evaluate(z));
            for (long d = 0; d < 12; ++d) out(0, std::size_t(d)) += m(0, 0) * std::pow(z, -double(d)) / double(N);
        }
        return out;
    };
    auto q = detail::doubling(opt, eval);
    for (long d = 4; d < 11; ++d) {
        double ratio = std::abs(q.value(0, std::size_t(d + 1))) / std::abs(q.value(0, std::size_t(d)));
        EXPECT_NEAR(ratio, 0.25, 1e-9);
    }
}

TEST(Periodic, ScalarWienerHopfIsReordering) {
    auto w = WeightField::periodic({2, 1}, [](long i, long) {
        return i == 0 ? std::make_pair(Rational(1), Rational(3)) : std::make_pair(Rational(2), Rational(5));
    });
    TransitionFamily f{2, w};
    auto wh = wiener_hopf_from_dynamics(f);
    EXPECT_TRUE(wh.plus * wh.minus == wh.eta);
    EXPECT_TRUE(wh.tilde_minus * wh.tilde_plus == wh.eta);
    EXPECT_LT(wh.sampled_error, 1e-12);
    // p = 1: every factor commutes; plus is the product of (a z + b) up to constants;
    // with p = 1 the roots sit at z = -b/a = -3 and -5/2
    Complex r1 = wh.plus.evaluate(Complex(-3.0))(0, 0), r2 = wh.plus.evaluate(Complex(-2.5))(0, 0);
    EXPECT_NEAR(std::abs(r1), 0, 1e-12);
    EXPECT_NEAR(std::abs(r2), 0, 1e-12);
}

TEST(Periodic, TwoPeriodicWienerHopf) {
    auto f = TransitionFamily{2, two_periodic_fast()};
    auto wh = wiener_hopf_from_dynamics(f);
    EXPECT_LT(wh.sampled_error, 1e-10);
    EXPECT_EQ(wh.tilde_plus.min_power(), 0);
    EXPECT_EQ(wh.plus.min_power(), 0);
    EXPECT_LE(wh.minus.max_power(), 0);
    EXPECT_LE(wh.tilde_minus.max_power(), 0);
    // minus factors tend to the identity
    EXPECT_EQ(wh.minus.coefficient(0), RationalMatrix::identity(2));
    EXPECT_EQ(wh.tilde_minus.coefficient(0), RationalMatrix::identity(2));
    // det of the plus factors vanishes at the det phi roots 20 and 21
    for (double r : {20.0, 21.0}) {
        EXPECT_NEAR(std::abs(determinant(wh.plus.evaluate(r))), 0, 1e-6);
        EXPECT_NEAR(std::abs(determinant(wh.tilde_plus.evaluate(r))), 0, 1e-6);
    }
    EXPECT_DOUBLE_EQ(wh.r_star, 20.0);
}

TEST(Periodic, RandomWienerHopf) {
    std::mt19937_64 rng(3);
    int done = 0;
    for (int t = 0; t < 40 && done < 5; ++t) {
        auto w = random_periodic_field(rng, {2, 2});
        if (!check_assumption(w, 0, 1).ok) continue;
        ++done;
        auto wh = wiener_hopf_from_dynamics(TransitionFamily{2, w});
        EXPECT_LT(wh.sampled_error, 1e-9);
    }
    EXPECT_GT(done, 0);
}

TEST(Periodic, RejectsFailingAssumption) {
    auto w = WeightField::periodic({1, 2}, [](long, long) { return std::make_pair(Rational(3), Rational(1)); });
    EXPECT_THROW(wiener_hopf_from_dynamics(TransitionFamily{1, w}), MathError);
}

TEST(Periodic, IndicatorOnlyForIncreasingTimes) {
    auto f = TransitionFamily{2, two_periodic_fast()};
    auto wh = wiener_hopf_from_dynamics(f);
    auto syms = transition_symbols(f);
    QuadratureOptions opt;
    opt.epsilon = wh.epsilon;
    for (auto [m1, m2] : {std::pair{2L, 2L}, {3L, 1L}, {1L, 3L}, {0L, 4L}})
        for (auto mode : {KernelMode::Top, KernelMode::Bottom}) {
            BlockKernelQuery q{m1, -1, m2, 0};
            auto k = appendix_b_kernel(syms, wh, q, mode, opt);
            auto c = appendix_b_correction(syms, wh, q, mode, opt);
            EXPECT_LT(k.accuracy, 1e-10);
            RationalMatrix ind(2, 2);
            if (m1 < m2) ind = toeplitz_exact(symbol_product(syms, m1, m2, 2), {-2, -1}, {0, 1});
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t s = 0; s < 2; ++s)
                    EXPECT_NEAR(std::abs(k.value(r, s) - (c.value(r, s) - ind(r, s).get_d())), 0, 1e-12);
        }
}

TEST(Periodic, TopKernelMatchesFiniteN) {
    auto f = TransitionFamily{2, two_periodic_fast()};
    auto wh = wiener_hopf_from_dynamics(f);
    auto syms = transition_symbols(f);
    QuadratureOptions opt;
    opt.epsilon = wh.epsilon;
    auto E = block_toeplitz_finite(f, 8);
    double worst = 0;
    for (long m1 : {0, 1, 2, 4})
        for (long m2 : {0, 1, 3, 4})
            for (long y1 : {-2, -1})
                for (long y2 : {-2, -1}) {
                    auto k = appendix_b_kernel(syms, wh, {m1, y1, m2, y2}, KernelMode::Top, opt);
                    for (long j1 = 0; j1 < 2; ++j1)
                        for (long j2 = 0; j2 < 2; ++j2) {
                            double fin = to_double(E({m1, 2 * y1 + j1, m2, 2 * y2 + j2}));
                            Complex lim = k.value(std::size_t(j1), std::size_t(j2));
                            EXPECT_LT(std::abs(lim.imag()), 1e-12);
                            worst = std::max(worst, std::abs(lim - fin));
                        }
                }
    EXPECT_LT(worst, 1e-6);
    std::printf("top kernel vs N = 8: %.3g\n", worst);
}

TEST(Periodic, BottomKernelMatchesFiniteN) {
    auto f = TransitionFamily{2, two_periodic_fast()};
    auto wh = wiener_hopf_from_dynamics(f);
    auto syms = transition_symbols(f);
    QuadratureOptions opt;
    opt.epsilon = wh.epsilon;
    const long N = 8, P = 2 * N;
    auto E = block_toeplitz_finite(f, N);
    double worst = 0;
    for (long m1 : {0, 1, 3})
        for (long m2 : {1, 2, 4})
            for (long y1 : {-1, 0, 1})
                for (long y2 : {-1, 0}) {
                    auto k = appendix_b_kernel(syms, wh, {m1, y1, m2, y2}, KernelMode::Bottom, opt);
                    for (long j1 = 0; j1 < 2; ++j1)
                        for (long j2 = 0; j2 < 2; ++j2) {
                            double fin = to_double(E({m1, -P + 2 * y1 + j1, m2, -P + 2 * y2 + j2}));
                            worst = std::max(worst, std::abs(k.value(std::size_t(j1), std::size_t(j2)) - fin));
                        }
                }
    EXPECT_LT(worst, 1e-6);
    std::printf("bottom kernel vs N = 8: %.3g\n", worst);
}

// Same process seen from the tower: heights shift by n for times before the last.
TEST(Periodic, TopKernelMatchesLimitKernel) {
    auto f = TransitionFamily{2, two_periodic_fast()};
    auto wh = wiener_hopf_from_dynamics(f);
    auto syms = transition_symbols(f);
    QuadratureOptions opt;
    opt.epsilon = wh.epsilon;
    LimitKernel L(f, 1e-12, -1, 3);
    for (long m1 : {0, 1, 3})
        for (long m2 : {0, 2, 3})
            for (long x1 : {-1, 0, 1})
                for (long x2 : {-1, 1}) {
                    const long a = x1 - 2, b = x2 - 2;
                    auto k = appendix_b_kernel(syms, wh, {m1, floor_div(a, 2), m2, floor_div(b, 2)}, KernelMode::Top, opt);
                    Complex v = k.value(std::size_t(floor_mod(a, 2)), std::size_t(floor_mod(b, 2)));
                    EXPECT_NEAR(v.real(), to_double(L({m1, x1, m2, x2}).value), 1e-9);
                }
}

TEST(Periodic, NonToeplitzFactorIsReported) {
    Interval w{-8, 7};
    auto D = WindowedOperator::diagonal(w, [](long j) { return Rational(j == 3 ? 2 : 1); });
    EXPECT_THROW(detail::read_toeplitz_symbol(D, 2, 0, 0, 2, "test factor"), MathError);
    auto I = WindowedOperator::diagonal(w, [](long) { return Rational(1); });
    EXPECT_TRUE(detail::read_toeplitz_symbol(I, 2, 0, 0, 2, "test factor") == MatrixSymbol::identity(2));
}
