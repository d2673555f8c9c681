#include <gtest/gtest.h>

#include <random>

#include "aztec/graphs.hpp"
#include "aztec/kasteleyn.hpp"
#include "aztec/numerics.hpp"

using namespace aztec;

namespace {

const GaussianRational I = GaussianRational::i_unit();

GaussianRational random_gaussian(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-6, 6), den(1, 4);
    GaussianRational z{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
    z.re.canonicalize();
    z.im.canonicalize();
    return z;
}

ExactMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
    ExactMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = random_gaussian(rng);
    return m;
}

ExactMatrix two_by_two(GaussianRational a, GaussianRational b, GaussianRational c, GaussianRational d) {
    ExactMatrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

}  // namespace

TEST(Numerics, RationalParsingAndPrinting) {
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_EQ(to_string(Rational(3, 1)), "3");
    EXPECT_EQ(to_string(parse_rational("-2/6")), "-1/3");
    EXPECT_THROW(parse_rational("x/2"), ConfigError);
    EXPECT_THROW(parse_rational("1/0"), ConfigError);
}

TEST(Numerics, GaussianArithmetic) {
    EXPECT_EQ(I * I, GaussianRational(-1));
    EXPECT_EQ(GaussianRational::i_pow(-1), -I);
    EXPECT_EQ(GaussianRational::i_pow(7), -I);
    GaussianRational z(Rational(1, 2), Rational(-3, 4));
    EXPECT_EQ(z * (GaussianRational(1) / z), GaussianRational(1));
    EXPECT_EQ(z.norm2(), Rational(13, 16));
}

TEST(Numerics, DeterminantExamples) {
    EXPECT_EQ(exact_det(ExactMatrix(0, 0)), GaussianRational(1));
    EXPECT_EQ(exact_det(two_by_two(I, 1, 1, I)), GaussianRational(-2));
    auto w = WeightField::uniform({0, 2, 0, 1});
    EXPECT_EQ(axis_abs(exact_det(kasteleyn_aztec(build_aztec(2, w)).K)), Rational(8));
    EXPECT_THROW(exact_det(ExactMatrix(2, 3)), MathError);
}

TEST(Numerics, InverseExamples) {
    EXPECT_EQ(exact_inverse(ExactMatrix::identity(4)), ExactMatrix::identity(4));
    GaussianRational h(Rational(1, 2));
    EXPECT_EQ(exact_inverse(two_by_two(I, 1, 1, I)), two_by_two(-I * h, h, h, -I * h));
    ExactMatrix S(3, 3);
    S(0, 0) = 1;
    S(1, 1) = 2;
    EXPECT_THROW(exact_inverse(S), SingularError);
}

TEST(Numerics, UnitUpperTriangularInverse) {
    std::mt19937_64 rng(3);
    ExactMatrix U = ExactMatrix::identity(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) U(i, j) = random_gaussian(rng);
    ExactMatrix X = exact_inverse(U);
    EXPECT_TRUE(is_triangular(X, Triangle::Upper));
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(X(i, i), GaussianRational(1));
}

TEST(Numerics, RandomInverseAndDetMultiplicativity) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
        ExactMatrix A = random_matrix(rng, 4), B = random_matrix(rng, 4);
        EXPECT_EQ(exact_det(A * B), exact_det(A) * exact_det(B));
        if (exact_det(A).is_zero()) continue;
        ExactMatrix X = exact_inverse(A);
        EXPECT_EQ(A * X, ExactMatrix::identity(4));
        EXPECT_EQ(X * A, ExactMatrix::identity(4));
    }
}

TEST(Numerics, TriangularInverse) {
    EXPECT_EQ(triangular_inverse(ExactMatrix(1, 1, GaussianRational(Rational(3))), Triangle::Lower)(0, 0),
              GaussianRational(Rational(1, 3)));
    RationalMatrix L(2, 2);
    L(0, 0) = 1;
    L(1, 0) = -1;
    L(1, 1) = 1;
    RationalMatrix want(2, 2);
    want(0, 0) = 1;
    want(1, 0) = 1;
    want(1, 1) = 1;
    EXPECT_EQ(triangular_inverse(L, Triangle::Lower), want);
    EXPECT_THROW(triangular_inverse(L, Triangle::Upper), MathError);
    RationalMatrix Z(2, 2);
    Z(0, 0) = 1;
    Z(0, 1) = 5;
    EXPECT_THROW(triangular_inverse(Z, Triangle::Upper), SingularError);

    std::mt19937_64 rng(5);
    for (Triangle t : {Triangle::Lower, Triangle::Upper}) {
        ExactMatrix M(5, 5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                bool inside = t == Triangle::Lower ? j <= i : j >= i;
                if (inside) M(i, j) = random_gaussian(rng);
            }
        for (std::size_t i = 0; i < 5; ++i)
            if (M(i, i).is_zero()) M(i, i) = 1;
        ExactMatrix X = triangular_inverse(M, t);
        EXPECT_TRUE(is_triangular(X, t));
        EXPECT_EQ(X, exact_inverse(M));
    }
}

TEST(Numerics, KasteleynDBlockInverse) {
    std::mt19937_64 rng(6);
    auto w = random_window_field(rng, {0, 3, 0, 2});
    auto k = kasteleyn_aztec(build_aztec(3, w));
    auto s = schur_blocks(k);
    EXPECT_EQ(s.D * s.Dinv, ExactMatrix::identity(s.D.rows()));
    EXPECT_EQ(k.K * inverse_kasteleyn_via_blocks(s), ExactMatrix::identity(k.K.rows()));
}

TEST(Numerics, FloatingDeterminant) {
    ComplexMatrix m(2, 2);
    m(0, 0) = Complex(0, 1);
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = Complex(0, 1);
    EXPECT_NEAR(std::abs(determinant(m) - Complex(-2, 0)), 0.0, 1e-15);
}
