#pragma once

// LU and UL decompositions of G = V S^{-n} by iterated refactorization,
// their triangular inverses, the approximate inverse of the finite block
// G_22 (indices -p..n-1), and the p -> infinity kernel built from them.
//
// LU: stage j = 1..n pushes M^{(j-1)}_{2i} Psi -> X_i Psi M^{(j)}_{2i} X_{i+1}^{-1}
// through the columns i = 0..n-j, with X_{n-j+1} = I at the boundary:
//     L1 = X_0^{(0)} Psi X_0^{(1)} Psi ... X_0^{(n-1)} Psi
//     U1 = M_0^{(n)} M_2^{(n-1)} ... M_{2(n-1)}^{(1)} S^{-n}
// UL: stage j = 1..n-1 pushes Psi M^{[j-1]}_{2i} -> Y_{i-1}^{-1} M^{[j]}_{2i} Psi Y_i
// through i = j..n-1 with Y_{j-1} = I:
//     U2 = M_0^{[0]} M_2^{[1]} ... M_{2n-2}^{[n-1]} S^{-n}
//     L2 = S^n Psi Y_{n-1}^{[n-2]} Psi ... Y_{n-1}^{[0]} Psi S^{-n}

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "transitions.hpp"

namespace aztec {

enum class FactorOrder { LU, UL };

struct Factorization {
    FactorOrder order = FactorOrder::LU;
    long n = 0;
    Interval window;
    WindowedOperator L, U;
    std::vector<WeightField> stages;         // stage parameters; stages[0] is the input
    std::vector<WindowedOperator> diagonal;  // X_0^{(j)} (LU) or Y_{n-1}^{[j]} (UL)
};

namespace detail {

// Rows of weights needed so that every factor is exact on [lo - n, hi].
inline Window stage_rows(long n, Interval win, long c0, long c1) { return {c0, c1, win.lo - 2 * n - 2, win.hi + n + 2}; }

inline WindowedOperator even_op(const WeightField& w, long i, Interval e) {
    return WindowedOperator::phi(e, [&](long k) { return w.a(i, k); }, [&](long k) { return w.b(i, k); });
}

// S^n X S^{-n}: (i,j) -> X(i-n, j-n)
inline WindowedOperator conjugate_shift(const WindowedOperator& X, long n) {
    return X.shift_times(n).times_inverse_shift(n);
}

}  // namespace detail

inline Factorization lu_decompose(const TransitionFamily& f, Interval win) {
    const long n = f.n;
    if (n < 1) throw ConfigError("factorization needs n >= 1");
    const Interval ext{win.lo - n, win.hi};
    Factorization out;
    out.order = FactorOrder::LU;
    out.n = n;
    out.window = win;
    Window rows = detail::stage_rows(n, win, 0, n - 1);
    out.stages.push_back(f.w.restrict(rows));
    for (long j = 1; j <= n; ++j) {
        const WeightField& P = out.stages.back();
        const Window& x = P.window_extent();
        const long last = n - j;
        out.diagonal.push_back(WindowedOperator::diagonal(ext, [&](long k) { return Rational(P.a(0, k) + P.b(0, k)); }));
        Window nx{0, last, x.j0 + 1, x.j1};
        out.stages.push_back(WeightField::window(nx, [&](long i, long k) {
            auto s = [&](long c, long r) { return Rational(P.a(c, r) + P.b(c, r)); };
            if (i < last)
                return std::make_pair(Rational(P.a(i, k) * s(i + 1, k) / s(i, k)),
                                      Rational(P.b(i, k - 1) * s(i + 1, k - 1) / s(i, k - 1)));
            return std::make_pair(Rational(P.a(i, k) / s(i, k)), Rational(P.b(i, k - 1) / s(i, k - 1)));
        }));
    }
    auto psi = WindowedOperator::psi(ext);
    WindowedOperator L = WindowedOperator::identity(ext);
    for (long j = 0; j < n; ++j) L = L * out.diagonal[std::size_t(j)] * psi;
    WindowedOperator M = WindowedOperator::identity(ext);
    for (long i = 0; i < n; ++i) M = M * detail::even_op(out.stages[std::size_t(n - i)], i, ext);
    out.L = L.restrict(win, win);
    out.U = M.times_inverse_shift(n).restrict(win, win);
    return out;
}

inline Factorization ul_decompose(const TransitionFamily& f, Interval win) {
    const long n = f.n;
    if (n < 1) throw ConfigError("factorization needs n >= 1");
    const Interval ext{win.lo - n, win.hi};
    Factorization out;
    out.order = FactorOrder::UL;
    out.n = n;
    out.window = win;
    Window rows = detail::stage_rows(n, win, 0, n - 1);
    out.stages.push_back(f.w.restrict(rows));
    for (long j = 1; j <= n - 1; ++j) {
        const WeightField& P = out.stages.back();
        const Window& x = P.window_extent();
        out.diagonal.push_back(
            WindowedOperator::diagonal(ext, [&](long k) { return Rational(P.a(n - 1, k) + P.b(n - 1, k + 1)); }));
        Window nx{j, n - 1, x.j0, x.j1 - 1};
        out.stages.push_back(WeightField::window(nx, [&](long i, long k) {
            Rational den = P.a(i, k) + P.b(i, k + 1);
            Rational r = (i == j) ? Rational(1 / den) : Rational((P.a(i - 1, k) + P.b(i - 1, k + 1)) / den);
            return std::make_pair(Rational(P.a(i, k) * r), Rational(P.b(i, k + 1) * r));
        }));
    }
    // L2 is S^n X S^{-n}; X is needed on [lo - n, hi - n]
    const Interval inner{win.lo - n, win.hi - n};
    auto psi_in = WindowedOperator::psi(inner);
    WindowedOperator X = psi_in;
    for (long j = n - 2; j >= 0; --j)
        X = X * out.diagonal[std::size_t(j)].restrict(inner, inner) * psi_in;
    WindowedOperator M = WindowedOperator::identity(ext);
    for (long i = 0; i < n; ++i) M = M * detail::even_op(out.stages[std::size_t(i)], i, ext);
    out.L = detail::conjugate_shift(X, n);
    out.U = M.times_inverse_shift(n).restrict(win, win);
    return out;
}

struct FactorInverses {
    WindowedOperator Lambda, Upsilon;  // L^{-1}, U^{-1} on the factorization window
};

// Both factors are triangular, so their inverses restricted to the window
// only involve window entries and are exact.
inline FactorInverses invert_factors(const Factorization& fac) {
    return {fac.L.triangular_inverse(), fac.U.triangular_inverse()};
}

// Largest |i - j| with a nonzero entry.
inline long measured_bandwidth(const WindowedOperator& X) {
    long bw = 0;
    for (long i = X.rows().lo; i <= X.rows().hi; ++i)
        for (long j = X.cols().lo; j <= X.cols().hi; ++j)
            if (sgn(X(i, j)) != 0) bw = std::max(bw, std::labs(i - j));
    return bw;
}

// ---------------------------------------------------------------------------
// approximate inverse of G_22

struct ApproxInverse {
    long n = 0, p = 0;
    RationalMatrix G22;        // rows/cols -p..n-1
    RationalMatrix estimate;   // Upsilon1_22 Lambda1_22 - Lambda2_21 Upsilon2_12
    double residual = 0;       // max |G22 * estimate - I|
    double rho = 0;
    std::optional<double> error_vs_exact;  // max |estimate - G22^{-1}| when computed
};

inline ApproxInverse approximate_w_inverse(const TransitionFamily& f, long p, bool compare_exact = true) {
    const long n = f.n;
    AssumptionReport as = check_assumption(f.w, 0, n - 1);
    if (!as.ok) throw MathError("decay assumption fails: " + as.violation);
    // Lambda2 is banded of width n, so the 21-block only reaches n columns below -p.
    const Interval win{-p - n - 1, n - 1};
    Factorization lu = lu_decompose(f, win), ul = ul_decompose(f, win);
    FactorInverses i1 = invert_factors(lu), i2 = invert_factors(ul);
    if (measured_bandwidth(i2.Lambda) > n) throw MathError("inverse of L2 is wider than n");
    WindowedOperator G = product_G(f, {win.lo - n, win.hi}).restrict(win, win);

    const std::size_t N = std::size_t(n + p);
    ApproxInverse out;
    out.n = n;
    out.p = p;
    out.rho = as.rho;
    out.G22 = RationalMatrix(N, N);
    out.estimate = RationalMatrix(N, N);
    for (long u = -p; u <= n - 1; ++u)
        for (long v = -p; v <= n - 1; ++v) {
            out.G22(std::size_t(u + p), std::size_t(v + p)) = G.exact(u, v);
            Rational s = 0;
            for (long k = std::max(u, v); k <= n - 1; ++k) s += i1.Upsilon.exact(u, k) * i1.Lambda.exact(k, v);
            for (long k = win.lo; k < -p; ++k) s -= i2.Lambda.exact(u, k) * i2.Upsilon.exact(k, v);
            out.estimate(std::size_t(u + p), std::size_t(v + p)) = s;
        }
    RationalMatrix R = out.G22 * out.estimate;
    for (std::size_t i = 0; i < N; ++i) R(i, i) -= 1;
    out.residual = max_abs(R);
    if (compare_exact) {
        RationalMatrix ex = inverse(out.G22);
        out.error_vs_exact = max_abs(RationalMatrix(ex - out.estimate));
    }
    return out;
}

// Least-squares fit of log(residual) = log C + 2 log p + p log r; returns r.
inline double fit_geometric_rate(const std::vector<long>& ps, const std::vector<double>& residuals) {
    if (ps.size() != residuals.size() || ps.size() < 2) throw ConfigError("rate fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = double(ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        if (residuals[k] <= 0) throw MathError("rate fit needs positive residuals");
        double x = double(ps[k]), y = std::log(residuals[k]) - 2 * std::log(x);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::exp(slope);
}

// ---------------------------------------------------------------------------
// kernel in the p -> infinity limit
//
//   K(m1,x1; m2,x2) = -[m1 < m2] (M_{m1} ... M_{m2-1})(x1,x2)
//                     + sum_{l >= 1} (A S^{-n} Upsilon)(x1, n-l) (Lambda B)(n-l, x2)
// with A = M_{m1} ... M_{2n-1}, B = M_0 ... M_{m2-1} and Lambda, Upsilon
// from the LU decomposition. Lambda is banded and B lower triangular, so the
// l-sum stops at n - l = x2. The sum inside A S^{-n} Upsilon runs over all
// rows below; it is cut T rows down, where R^2 rho^T / (1 - rho) < tol and
// R is the larger of the assumption constant and the measured envelope of
// Upsilon.

struct LimitKernelValue {
    Rational value;
    long truncation = 0;
};

class LimitKernel {
public:
    LimitKernel(const TransitionFamily& f, double tol, long x_min, long x_max) : f_(f), tol_(tol) {
        const long n = f.n;
        if (x_min < -1) throw ConfigError("limit kernel is only defined for heights >= -1");
        AssumptionReport as = check_assumption(f.w, 0, n - 1);
        if (!as.ok) throw MathError("decay assumption fails: " + as.violation);
        if (!(as.rho < 1)) throw MathError("decay rate rho = " + std::to_string(as.rho) + " is not below 1");
        rho_ = as.rho;
        R_ = std::max(as.R, upsilon_envelope(f, as.rho));
        double T = std::ceil(std::log(tol * (1 - as.rho) / (R_ * R_)) / std::log(as.rho));
        if (!std::isfinite(T) || T > 4096) throw MathError("tail envelope does not reach tolerance");
        T_ = std::max(1L, long(T));
        hi_ = std::max(n - 1, x_max);
        win_ = {x_min - T_, hi_};
        Factorization lu = lu_decompose(f, win_);
        FactorInverses inv = invert_factors(lu);
        Lambda_ = inv.Lambda;
        Upsilon_ = inv.Upsilon;
        ext_ = {win_.lo - n, hi_};
        for (long m = 0; m <= f.length(); ++m) {
            suffix_.push_back(f.product(m, f.length(), ext_));
            prefix_.push_back(f.product(0, m, ext_));
        }
        x_min_ = x_min;
        x_max_ = x_max;
    }

    long truncation() const { return T_; }
    double rho() const { return rho_; }
    double envelope_constant() const { return R_; }

    // max |Upsilon(i,j)| / rho^{j-i} over a short window: the constant in
    // the decay bound for U^{-1}, which can be far above the one for a/b.
    static double upsilon_envelope(const TransitionFamily& f, double rho) {
        const long n = f.n;
        Interval w{-n - 40, n - 1};
        WindowedOperator Y = lu_decompose(f, w).U.triangular_inverse();
        double R = 0;
        for (long i = w.lo; i <= w.hi; ++i)
            for (long j = i; j <= w.hi; ++j)
                R = std::max(R, std::abs(to_double(Y.exact(i, j))) / std::pow(rho, double(j - i)));
        return R;
    }

    LimitKernelValue operator()(const KernelQuery& q) const {
        const long n = f_.n;
        if (q.x1 < -1 || q.x2 < -1) throw ConfigError("limit kernel is only defined for heights >= -1");
        if (q.x1 < x_min_ || q.x1 > x_max_ || q.x2 < x_min_ || q.x2 > x_max_)
            throw ExtentError("query height outside the range this kernel was built for");
        if (q.m1 < 0 || q.m1 > f_.length() || q.m2 < 0 || q.m2 > f_.length())
            throw ConfigError("kernel time index out of range");
        const WindowedOperator& A = suffix_[std::size_t(q.m1)];
        const WindowedOperator& B = prefix_[std::size_t(q.m2)];
        Rational total = 0;
        for (long k = q.x2; k <= n - 1; ++k) {
            // (Lambda B)(k, x2), Lambda banded of width n
            Rational right = 0;
            for (long v = std::max(k - n, q.x2); v <= k; ++v) right += Lambda_.exact(k, v) * B.exact(v, q.x2);
            if (sgn(right) == 0) continue;
            // (A S^{-n} Upsilon)(x1, k) = sum_u A(x1, u - n) Upsilon(u, k)
            Rational left = 0;
            for (long u = std::max(win_.lo, k - T_); u <= std::min(k, q.x1 + n); ++u)
                left += A.exact(q.x1, u - n) * Upsilon_.exact(u, k);
            total += left * right;
        }
        if (q.m1 < q.m2) total -= f_.product(q.m1, q.m2, ext_).exact(q.x1, q.x2);
        return {total, T_};
    }

private:
    TransitionFamily f_;
    double tol_;
    double rho_ = 0, R_ = 0;
    long T_ = 0, hi_ = 0, x_min_ = 0, x_max_ = 0;
    Interval win_, ext_;
    WindowedOperator Lambda_, Upsilon_;
    std::vector<WindowedOperator> suffix_, prefix_;
};

inline LimitKernelValue limit_kernel(const TransitionFamily& f, const KernelQuery& q, double tol) {
    LimitKernel K(f, tol, std::min(q.x1, q.x2), std::max(q.x1, q.x2));
    return K(q);
}

}  // namespace aztec
