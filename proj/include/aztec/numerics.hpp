#pragma once

// Exact scalars and dense linear algebra.
//
// Rational is GMP's mpq_class, which canonicalizes after every operation.
// GaussianRational adds the imaginary unit needed by Kasteleyn signs.
// Matrix<T> is a plain row-major container; elimination routines are
// templated so the same code serves Rational, GaussianRational and
// std::complex<double> (the last one only inside the periodic module).

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace aztec {

using Rational = mpq_class;
using Complex = std::complex<double>;

inline std::string to_string(const Rational& q) {
    // mpq_class::get_str already prints "p" when the denominator is 1
    return q.get_str();
}

inline Rational parse_rational(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw ConfigError("not a rational number: '" + s + "'");
    if (q.get_den() == 0) throw ConfigError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() : re(0), im(0) {}
    GaussianRational(Rational r) : re(std::move(r)), im(0) {}  // NOLINT(implicit)
    GaussianRational(long r) : re(r), im(0) {}                 // NOLINT(implicit)
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GaussianRational i_unit() { return {Rational(0), Rational(1)}; }

    // i^k for any integer k
    static GaussianRational i_pow(long k) {
        switch (((k % 4) + 4) % 4) {
            case 0: return {Rational(1), Rational(0)};
            case 1: return {Rational(0), Rational(1)};
            case 2: return {Rational(-1), Rational(0)};
            default: return {Rational(0), Rational(-1)};
        }
    }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    Rational norm2() const { return re * re + im * im; }
    GaussianRational conj() const { return {re, -im}; }

    GaussianRational operator-() const { return {-re, -im}; }
    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        if (sgn(im) == 0 && sgn(o.im) == 0) {
            re *= o.re;
            return *this;
        }
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw SingularError("division by zero Gaussian rational");
        if (sgn(o.im) == 0) {
            re /= o.re;
            im /= o.re;
            return *this;
        }
        Rational d = o.norm2();
        Rational r = (re * o.re + im * o.im) / d;
        Rational i = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    Complex to_complex() const { return {re.get_d(), im.get_d()}; }
};

inline std::string to_string(const GaussianRational& z) {
    if (z.is_real()) return to_string(z.re);
    if (sgn(z.re) == 0) return to_string(z.im) + "i";
    std::string im = to_string(z.im);
    if (im[0] != '-') im = "+" + im;
    return to_string(z.re) + im + "i";
}

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << to_string(z); }

// ---------------------------------------------------------------------------
// scalar traits used by the elimination routines

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
    static double magnitude(const Rational& x) { return std::abs(x.get_d()); }
};

template <>
struct ScalarTraits<GaussianRational> {
    static constexpr bool exact = true;
    static bool is_zero(const GaussianRational& x) { return x.is_zero(); }
    static double magnitude(const GaussianRational& x) { return std::abs(x.to_complex()); }
};

template <>
struct ScalarTraits<Complex> {
    static constexpr bool exact = false;
    static bool is_zero(const Complex& x) { return x == Complex(0.0, 0.0); }
    static double magnitude(const Complex& x) { return std::abs(x); }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static bool is_zero(double x) { return x == 0.0; }
    static double magnitude(double x) { return std::abs(x); }
};

// ---------------------------------------------------------------------------

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), data_(r * c, T(0)) {}
    Matrix(std::size_t r, std::size_t c, const T& fill) : rows_(r), cols_(c), data_(r * c, fill) {}

    static Matrix identity(std::size_t k) {
        Matrix m(k, k);
        for (std::size_t i = 0; i < k; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("Matrix::block out of range");
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    template <class F>
    auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
        Matrix<decltype(f(std::declval<const T&>()))> out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    Matrix operator-() const {
        Matrix m(*this);
        for (auto& x : m.data_) x = -x;
        return m;
    }
    Matrix& operator*=(const T& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw MathError("matrix product: dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (ScalarTraits<T>::is_zero(aik)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!ScalarTraits<T>::is_zero(b(k, j))) c(i, j) += aik * b(k, j);
            }
        return c;
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw MathError("matrix sum: dimension mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using ExactMatrix = Matrix<GaussianRational>;
using RationalMatrix = Matrix<Rational>;
using ComplexMatrix = Matrix<Complex>;

inline ExactMatrix to_exact(const RationalMatrix& m) {
    return m.map([](const Rational& q) { return GaussianRational(q); });
}

inline ComplexMatrix to_complex(const ExactMatrix& m) {
    return m.map([](const GaussianRational& z) { return z.to_complex(); });
}

inline ComplexMatrix to_complex(const RationalMatrix& m) {
    return m.map([](const Rational& q) { return Complex(q.get_d(), 0.0); });
}

template <class T>
double max_abs(const Matrix<T>& m) {
    double best = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, ScalarTraits<T>::magnitude(m(i, j)));
    return best;
}

// ---------------------------------------------------------------------------
// elimination

namespace detail {

// Exact scalars pivot on the first nonzero entry (row-major scan of the
// remaining block); floating scalars pivot on the largest magnitude.
template <class T>
bool find_pivot(const Matrix<T>& a, std::size_t k, bool full, std::size_t& pr, std::size_t& pc) {
    const std::size_t n = a.rows();
    double best = -1;
    bool found = false;
    const std::size_t clast = full ? n : k + 1;
    for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < clast; ++j) {
            if (ScalarTraits<T>::is_zero(a(i, j))) continue;
            if constexpr (ScalarTraits<T>::exact) {
                pr = i;
                pc = j;
                return true;
            } else {
                double m = ScalarTraits<T>::magnitude(a(i, j));
                if (m > best) {
                    best = m;
                    pr = i;
                    pc = j;
                    found = true;
                }
            }
        }
    return found;
}

template <class T>
void swap_rows(Matrix<T>& a, std::size_t r1, std::size_t r2) {
    if (r1 == r2) return;
    for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r1, j), a(r2, j));
}

template <class T>
void swap_cols(Matrix<T>& a, std::size_t c1, std::size_t c2) {
    if (c1 == c2) return;
    for (std::size_t i = 0; i < a.rows(); ++i) std::swap(a(i, c1), a(i, c2));
}

}  // namespace detail

template <class T>
T determinant(Matrix<T> a) {
    if (!a.square()) throw MathError("determinant of a non-square matrix");
    const std::size_t n = a.rows();
    T det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        if (!detail::find_pivot(a, k, true, pr, pc)) return T(0);
        if (pr != k) {
            detail::swap_rows(a, pr, k);
            det = -det;
        }
        if (pc != k) {
            detail::swap_cols(a, pc, k);
            det = -det;
        }
        const T piv = a(k, k);
        det *= piv;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (ScalarTraits<T>::is_zero(a(i, k))) continue;
            T f = a(i, k) / piv;
            for (std::size_t j = k + 1; j < n; ++j)
                if (!ScalarTraits<T>::is_zero(a(k, j))) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

// Gauss-Jordan inverse with row pivoting.
template <class T>
Matrix<T> inverse(Matrix<T> a) {
    if (!a.square()) throw MathError("inverse of a non-square matrix");
    const std::size_t n = a.rows();
    Matrix<T> inv = Matrix<T>::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        if (!detail::find_pivot(a, k, false, pr, pc))
            throw SingularError("singular matrix (determinant 0), no pivot in column " + std::to_string(k));
        detail::swap_rows(a, pr, k);
        detail::swap_rows(inv, pr, k);
        const T piv = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            if (!ScalarTraits<T>::is_zero(a(k, j))) a(k, j) /= piv;
            if (!ScalarTraits<T>::is_zero(inv(k, j))) inv(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || ScalarTraits<T>::is_zero(a(i, k))) continue;
            T f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                if (!ScalarTraits<T>::is_zero(a(k, j))) a(i, j) -= f * a(k, j);
                if (!ScalarTraits<T>::is_zero(inv(k, j))) inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

enum class Triangle { Lower, Upper };

template <class T>
bool is_triangular(const Matrix<T>& m, Triangle t) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            bool outside = (t == Triangle::Lower) ? (j > i) : (j < i);
            if (outside && !ScalarTraits<T>::is_zero(m(i, j))) return false;
        }
    return true;
}

// Back/forward substitution, column by column of the identity.
template <class T>
Matrix<T> triangular_inverse(const Matrix<T>& m, Triangle t) {
    if (!m.square()) throw MathError("triangular_inverse of a non-square matrix");
    if (!is_triangular(m, t)) throw MathError("triangular_inverse: matrix is not triangular in the stated orientation");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i)
        if (ScalarTraits<T>::is_zero(m(i, i)))
            throw SingularError("triangular_inverse: zero diagonal entry at index " + std::to_string(i));
    Matrix<T> x(n, n);
    if (t == Triangle::Lower) {
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t i = c; i < n; ++i) {
                T s = (i == c) ? T(1) : T(0);
                for (std::size_t k = c; k < i; ++k)
                    if (!ScalarTraits<T>::is_zero(m(i, k)) && !ScalarTraits<T>::is_zero(x(k, c))) s -= m(i, k) * x(k, c);
                x(i, c) = s / m(i, i);
            }
        }
    } else {
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t ii = c + 1; ii-- > 0;) {
                T s = (ii == c) ? T(1) : T(0);
                for (std::size_t k = ii + 1; k <= c; ++k)
                    if (!ScalarTraits<T>::is_zero(m(ii, k)) && !ScalarTraits<T>::is_zero(x(k, c))) s -= m(ii, k) * x(k, c);
                x(ii, c) = s / m(ii, ii);
            }
        }
    }
    return x;
}

inline GaussianRational exact_det(const ExactMatrix& m) { return determinant(m); }
inline ExactMatrix exact_inverse(const ExactMatrix& m) {
    if (!m.square()) throw MathError("inverse of a non-square matrix");
    return inverse(m);
}

}  // namespace aztec
