#pragma once

// Vertically periodic weights: matrix symbols, block Toeplitz entries by
// contour quadrature, Wiener-Hopf factors read off the refactorization, and
// the N -> infinity kernels of the block Toeplitz path process.
//
// Block convention: M(A)_{p j + r, p k + s} = [z^{k-j}] A_{r s}(z), r, s = 0..p-1,
// where the expansion is the one valid just outside the unit circle.
// With that convention
//     phi(z): a_r on the diagonal, b_r at (r, r-1), b_0 / z at (0, p-1)
//     psi(z): (1 - 1/z)^{-1} times ones on and below the diagonal, 1/z above
//     s(z):   ones at (r, r-1), 1/z at (0, p-1)
// and G = V S^{-n} has symbol eta = phi_0 psi phi_1 psi ... phi_{n-1} psi s^{-n}.

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "factorization.hpp"
#include "transitions.hpp"

namespace aztec {

// ---------------------------------------------------------------------------
// symbols

namespace detail {

inline Rational binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
}

inline bool is_zero_matrix(const RationalMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (sgn(m(i, j)) != 0) return false;
    return true;
}

}  // namespace detail

// numerator(z) / (1 - 1/z)^psi_power, numerator a finite Laurent polynomial
// with p x p rational coefficients.
class MatrixSymbol {
public:
    MatrixSymbol() = default;
    explicit MatrixSymbol(long p, long psi_power = 0) : p_(p), psi_power_(psi_power) {
        if (p < 1) throw ConfigError("symbol block size must be positive");
        if (psi_power < 0) throw ConfigError("negative denominator power");
    }

    static MatrixSymbol constant(const RationalMatrix& c) {
        MatrixSymbol s(long(c.rows()));
        s.coeffs_[0] = c;
        s.trim();
        return s;
    }
    static MatrixSymbol identity(long p) { return constant(RationalMatrix::identity(std::size_t(p))); }

    long p() const { return p_; }
    long psi_power() const { return psi_power_; }
    const std::map<long, RationalMatrix>& numerator() const { return coeffs_; }

    void add(long k, std::size_t r, std::size_t s, const Rational& v) {
        auto it = coeffs_.try_emplace(k, std::size_t(p_), std::size_t(p_)).first;
        it->second(r, s) += v;
    }

    long min_power() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
    long max_power() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

    ComplexMatrix evaluate(Complex z) const {
        ComplexMatrix out(static_cast<std::size_t>(p_), static_cast<std::size_t>(p_));
        for (auto& [k, c] : coeffs_) {
            Complex zk = std::pow(z, double(k));
            for (std::size_t r = 0; r < std::size_t(p_); ++r)
                for (std::size_t s = 0; s < std::size_t(p_); ++s)
                    if (sgn(c(r, s)) != 0) out(r, s) += c(r, s).get_d() * zk;
        }
        if (psi_power_ > 0) out *= std::pow(1.0 / (1.0 - 1.0 / z), double(psi_power_));
        return out;
    }

    // Block Toeplitz coefficient [z^d] of the expansion valid for |z| > 1.
    RationalMatrix coefficient(long d) const {
        RationalMatrix out(static_cast<std::size_t>(p_), static_cast<std::size_t>(p_));
        if (psi_power_ == 0) {
            auto it = coeffs_.find(d);
            if (it != coeffs_.end()) out = it->second;
            return out;
        }
        // (1 - 1/z)^{-m} = sum_{t >= 0} C(t + m - 1, m - 1) z^{-t}
        for (auto& [k, c] : coeffs_) {
            if (k < d) continue;
            out += RationalMatrix(c) *= detail::binomial(k - d + psi_power_ - 1, psi_power_ - 1);
        }
        return out;
    }

    friend MatrixSymbol operator*(const MatrixSymbol& x, const MatrixSymbol& y) {
        if (x.p_ != y.p_) throw ConfigError("symbol block sizes differ");
        MatrixSymbol out(x.p_, x.psi_power_ + y.psi_power_);
        for (auto& [k1, c1] : x.coeffs_)
            for (auto& [k2, c2] : y.coeffs_) {
                auto it = out.coeffs_.try_emplace(k1 + k2, std::size_t(x.p_), std::size_t(x.p_)).first;
                it->second += c1 * c2;
            }
        out.trim();
        return out;
    }

    MatrixSymbol times_constant_left(const RationalMatrix& c) const {
        MatrixSymbol out(*this);
        for (auto& [k, m] : out.coeffs_) m = c * m;
        out.trim();
        return out;
    }
    MatrixSymbol times_constant_right(const RationalMatrix& c) const {
        MatrixSymbol out(*this);
        for (auto& [k, m] : out.coeffs_) m = m * c;
        out.trim();
        return out;
    }

    // Equality as rational functions: cross-multiply the denominators.
    friend bool operator==(const MatrixSymbol& x, const MatrixSymbol& y) {
        if (x.p_ != y.p_) return false;
        if (x.psi_power_ == y.psi_power_) return x.coeffs_ == y.coeffs_;
        const long m = std::max(x.psi_power_, y.psi_power_);
        return x.with_psi_power(m).coeffs_ == y.with_psi_power(m).coeffs_;
    }

    // Same function written over (1 - 1/z)^m, m >= psi_power.
    MatrixSymbol with_psi_power(long m) const {
        if (m < psi_power_) throw ConfigError("cannot lower the denominator power");
        MatrixSymbol f(p_);
        for (long t = 0; t <= m - psi_power_; ++t) {
            Rational c = detail::binomial(m - psi_power_, t);
            if (t % 2 == 1) c = -c;
            f.coeffs_[-t] = RationalMatrix::identity(std::size_t(p_)) *= c;
        }
        MatrixSymbol out = *this * f;
        out.psi_power_ = m;
        return out;
    }

private:
    void trim() {
        for (auto it = coeffs_.begin(); it != coeffs_.end();)
            it = detail::is_zero_matrix(it->second) ? coeffs_.erase(it) : std::next(it);
    }

    long p_ = 1;
    long psi_power_ = 0;
    std::map<long, RationalMatrix> coeffs_;
};

inline MatrixSymbol symbol_phi(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    if (a.size() != b.size() || a.empty()) throw ConfigError("phi needs one a and one b per row of the period");
    const long p = long(a.size());
    MatrixSymbol s(p);
    for (long r = 0; r < p; ++r) {
        if (sgn(a[std::size_t(r)]) <= 0 || sgn(b[std::size_t(r)]) <= 0) throw ConfigError("phi needs positive weights");
        s.add(0, std::size_t(r), std::size_t(r), a[std::size_t(r)]);
        if (r > 0) s.add(0, std::size_t(r), std::size_t(r - 1), b[std::size_t(r)]);
    }
    s.add(-1, 0, std::size_t(p - 1), b[0]);
    return s;
}

inline MatrixSymbol symbol_psi(long p) {
    MatrixSymbol s(p, 1);
    for (long r = 0; r < p; ++r)
        for (long c = 0; c < p; ++c) s.add(c <= r ? 0 : -1, std::size_t(r), std::size_t(c), 1);
    return s;
}

// s^k for any integer k; s^p = z^{-1} I.
inline MatrixSymbol symbol_s(long p, long k = 1) {
    MatrixSymbol s(p), si(p);
    for (long r = 1; r < p; ++r) {
        s.add(0, std::size_t(r), std::size_t(r - 1), 1);
        si.add(0, std::size_t(r - 1), std::size_t(r), 1);
    }
    s.add(-1, 0, std::size_t(p - 1), 1);
    si.add(1, std::size_t(p - 1), 0, 1);
    MatrixSymbol out = MatrixSymbol::identity(p);
    for (long t = 0; t < std::labs(k); ++t) out = out * (k > 0 ? s : si);
    return out;
}

// A_0 .. A_{2n-1} with A_{2i} = phi_i, A_{2i+1} = psi, and the last one psi s^{-n}
// so that the full product is eta.
inline std::vector<MatrixSymbol> transition_symbols(const TransitionFamily& f) {
    if (!f.w.is_periodic()) throw ConfigError("matrix symbols need vertically periodic weights");
    const long p = f.w.periodicity()->p;
    std::vector<MatrixSymbol> out;
    for (long i = 0; i < f.n; ++i) {
        std::vector<Rational> a, b;
        for (long r = 0; r < p; ++r) {
            a.push_back(f.w.a(i, r));
            b.push_back(f.w.b(i, r));
        }
        out.push_back(symbol_phi(a, b));
        out.push_back(i + 1 < f.n ? symbol_psi(p) : symbol_psi(p) * symbol_s(p, -f.n));
    }
    return out;
}

inline MatrixSymbol symbol_product(const std::vector<MatrixSymbol>& syms, long from, long to, long p) {
    MatrixSymbol acc = MatrixSymbol::identity(p);
    for (long k = from; k < to; ++k) acc = acc * syms[std::size_t(k)];
    return acc;
}

inline MatrixSymbol symbol_eta(const TransitionFamily& f) {
    auto syms = transition_symbols(f);
    return symbol_product(syms, 0, long(syms.size()), f.w.periodicity()->p);
}

// Exact block Toeplitz matrix of a symbol on rows and cols (plain indices).
inline RationalMatrix toeplitz_exact(const MatrixSymbol& A, Interval rows, Interval cols) {
    const long p = A.p();
    RationalMatrix out(std::size_t(rows.size()), std::size_t(cols.size()));
    std::map<long, RationalMatrix> cache;
    for (long x = rows.lo; x <= rows.hi; ++x)
        for (long y = cols.lo; y <= cols.hi; ++y) {
            long d = floor_div(y, p) - floor_div(x, p);
            auto it = cache.find(d);
            if (it == cache.end()) it = cache.emplace(d, A.coefficient(d)).first;
            out(std::size_t(x - rows.lo), std::size_t(y - cols.lo)) =
                it->second(std::size_t(floor_mod(x, p)), std::size_t(floor_mod(y, p)));
        }
    return out;
}

// ---------------------------------------------------------------------------
// contour quadrature

struct QuadratureOptions {
    double epsilon = 0.5;      // contour radius 1 + epsilon
    long nodes = 64;           // starting node count, a power of two
    long max_nodes = 1 << 16;
    double tol = 1e-13;        // node-doubling agreement required
};

struct QuadratureResult {
    ComplexMatrix value;
    long nodes = 0;         // node count of the returned value
    double accuracy = 0;    // relative change under the last doubling
};

namespace detail {

inline bool power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

inline std::vector<Complex> circle(double radius, long N) {
    std::vector<Complex> z(static_cast<std::size_t>(N));
    for (long k = 0; k < N; ++k) z[std::size_t(k)] = std::polar(radius, 2 * std::numbers::pi * double(k) / double(N));
    return z;
}

// Repeats eval(N) with doubled N until two successive values agree to tol
// (relative to the largest entry). Once the change stops shrinking it is at
// the round-off floor: accepted below 1e-10, reported as a failure above.
template <class Eval>
QuadratureResult doubling(const QuadratureOptions& opt, Eval&& eval) {
    if (!power_of_two(opt.nodes)) throw ConfigError("node count must be a power of two");
    if (!(opt.epsilon > 0)) throw ConfigError("contour offset epsilon must be positive");
    long N = opt.nodes;
    ComplexMatrix prev = eval(N);
    double last = std::numeric_limits<double>::infinity();
    while (2 * N <= opt.max_nodes) {
        N *= 2;
        ComplexMatrix cur = eval(N);
        const double scale = std::max(1.0, max_abs(cur));
        const double diff = max_abs(ComplexMatrix(cur - prev)) / scale;
        if (diff < opt.tol) return {cur, N, diff};
        if (diff >= last && N > 4 * opt.nodes) {
            if (diff < 1e-10) return {cur, N, diff};
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3g", diff);
            throw MathError(std::string("contour quadrature does not converge: relative change ") + buf + " at " +
                            std::to_string(N) + " nodes");
        }
        last = diff;
        prev = std::move(cur);
    }
    throw MathError("contour quadrature did not reach tolerance within " + std::to_string(opt.max_nodes) + " nodes");
}

}  // namespace detail

// Block Toeplitz entries M(A)_{p j + r, p k + s} for block rows j in jr and
// block cols k in kr, by the trapezoid rule on |z| = 1 + epsilon.
inline QuadratureResult toeplitz_entries(const MatrixSymbol& A, Interval jr, Interval kr, const QuadratureOptions& opt = {}) {
    const long p = A.p();
    const long dlo = kr.lo - jr.hi, dhi = kr.hi - jr.lo;
    auto eval = [&](long N) {
        auto zs = detail::circle(1 + opt.epsilon, N);
        std::vector<ComplexMatrix> c(std::size_t(dhi - dlo + 1), ComplexMatrix(std::size_t(p), std::size_t(p)));
        for (const Complex& z : zs) {
            ComplexMatrix v = A.evaluate(z);
            Complex zi = 1.0 / z, w = std::pow(zi, double(dlo));
            for (long d = dlo; d <= dhi; ++d, w *= zi) {
                ComplexMatrix t = v;
                t *= w;
                c[std::size_t(d - dlo)] += t;
            }
        }
        ComplexMatrix out(std::size_t(p * jr.size()), std::size_t(p * kr.size()));
        for (long j = jr.lo; j <= jr.hi; ++j)
            for (long k = kr.lo; k <= kr.hi; ++k)
                for (long r = 0; r < p; ++r)
                    for (long s = 0; s < p; ++s)
                        out(std::size_t(p * (j - jr.lo) + r), std::size_t(p * (k - kr.lo) + s)) =
                            c[std::size_t(k - j - dlo)](std::size_t(r), std::size_t(s)) / double(N);
        return out;
    };
    return detail::doubling(opt, eval);
}

// ---------------------------------------------------------------------------
// Wiener-Hopf factors from the refactorization

struct WienerHopfPair {
    long p = 0, n = 0;
    double epsilon = 0;       // contour offset used for the checks
    double r_star = 0;        // smallest root modulus of det phi, > 1
    MatrixSymbol eta;
    MatrixSymbol plus, minus;              // eta = plus minus   (UL order)
    MatrixSymbol tilde_minus, tilde_plus;  // eta = tilde_minus tilde_plus   (LU order)
    double sampled_error = 0;  // max |eta - factor products| over the sample points
};

namespace detail {

// Symbol whose block Toeplitz matrix is X, read from block row 0 and then
// checked against every certified entry of X. Lower factors carry
// `psi_power` factors of psi; X (I - S^p)^{psi_power} is banded.
inline MatrixSymbol read_toeplitz_symbol(const WindowedOperator& X, long p, long psi_power, long dlo, long dhi,
                                         const std::string& name) {
    const Interval rows = X.rows(), cols = X.cols();
    MatrixSymbol out(p, psi_power);
    for (long d = dlo; d <= dhi; ++d)
        for (long r = 0; r < p; ++r)
            for (long s = 0; s < p; ++s) {
                const long y = p * d + s;
                Rational v = 0;
                for (long t = 0; t <= psi_power; ++t) {
                    const long yy = y + t * p;
                    if (!X.in_band(r, yy)) continue;
                    Rational c = binomial(psi_power, t);
                    v += (t % 2 ? -c : c) * X.exact(r, yy);
                }
                if (sgn(v) != 0) out.add(d, std::size_t(r), std::size_t(s), v);
            }
    RationalMatrix T = toeplitz_exact(out, rows, cols);
    for (long x = rows.lo; x <= rows.hi; ++x)
        for (long y = cols.lo; y <= cols.hi; ++y) {
            if (!X.certified(x, y)) continue;
            if (T(std::size_t(x - rows.lo), std::size_t(y - cols.lo)) != X.exact(x, y))
                throw MathError(name + " is not block Toeplitz with period " + std::to_string(p) + ": entry (" +
                                std::to_string(x) + "," + std::to_string(y) + ")");
        }
    return out;
}

// Winding number of det A(z) around 0 along |z| = radius.
inline long det_winding(const MatrixSymbol& A, double radius, long samples = 2048) {
    auto zs = circle(radius, samples);
    double total = 0;
    Complex prev = determinant(A.evaluate(zs.back()));
    for (const Complex& z : zs) {
        Complex cur = determinant(A.evaluate(z));
        if (std::abs(cur) == 0) throw MathError("determinant vanishes on the contour");
        total += std::arg(cur / prev);
        prev = cur;
    }
    return std::lround(total / (2 * std::numbers::pi));
}

}  // namespace detail

// Smallest modulus among the roots z = prod b / prod a of det phi_i.
inline double smallest_outer_root(const TransitionFamily& f) {
    const long p = f.w.periodicity()->p;
    double r = std::numeric_limits<double>::infinity();
    for (long i = 0; i < f.n; ++i) {
        Rational pa = 1, pb = 1;
        for (long k = 0; k < p; ++k) {
            pa *= f.w.a(i, k);
            pb *= f.w.b(i, k);
        }
        r = std::min(r, Rational(pb / pa).get_d());
    }
    return r;
}

// Half the gap to the nearest outer root, capped at 1/2 to keep the
// trapezoid sums well conditioned when that root is far out.
inline double default_epsilon(const TransitionFamily& f) {
    double r = smallest_outer_root(f);
    if (!(r > 1)) throw MathError("det phi has a root inside the closed unit disk");
    return std::min((r - 1) / 2, 0.5);
}

inline WienerHopfPair wiener_hopf_from_dynamics(const TransitionFamily& f, long samples = 64) {
    if (!f.w.is_periodic()) throw ConfigError("Wiener-Hopf factors need vertically periodic weights");
    const long n = f.n, p = f.w.periodicity()->p;
    AssumptionReport as = check_assumption(f.w, 0, n - 1);
    if (!as.ok) throw MathError("decay assumption fails: " + as.violation);
    WienerHopfPair out;
    out.p = p;
    out.n = n;
    out.r_star = smallest_outer_root(f);
    out.epsilon = default_epsilon(f);
    out.eta = symbol_eta(f);

    const long B = n / p + 3;  // block reach of the banded parts, with margin
    const Interval win{-p * (3 * B + 2), p * (3 * B + 2) - 1};
    Factorization lu = lu_decompose(f, win), ul = ul_decompose(f, win);
    out.tilde_minus = detail::read_toeplitz_symbol(lu.L, p, n, -B, 0, "L factor of the LU decomposition");
    out.tilde_plus = detail::read_toeplitz_symbol(lu.U, p, 0, 0, B, "U factor of the LU decomposition");
    out.minus = detail::read_toeplitz_symbol(ul.L, p, n, -B, 0, "L factor of the UL decomposition");
    out.plus = detail::read_toeplitz_symbol(ul.U, p, 0, 0, B, "U factor of the UL decomposition");

    // minus factors -> I at infinity; the value there is the z^0 numerator coefficient
    RationalMatrix C1 = out.tilde_minus.coefficient(0), C2 = out.minus.coefficient(0);
    RationalMatrix C1i = inverse(C1), C2i = inverse(C2);
    out.tilde_minus = out.tilde_minus.times_constant_right(C1i);
    out.tilde_plus = out.tilde_plus.times_constant_left(C1);
    out.minus = out.minus.times_constant_left(C2i);
    out.plus = out.plus.times_constant_right(C2);

    if (!(out.tilde_minus * out.tilde_plus == out.eta)) throw MathError("LU factor symbols do not multiply to eta");
    if (!(out.plus * out.minus == out.eta)) throw MathError("UL factor symbols do not multiply to eta");

    const double R = 1 + out.epsilon;
    for (const Complex& z : detail::circle(R, samples)) {
        ComplexMatrix e = out.eta.evaluate(z);
        out.sampled_error = std::max(out.sampled_error, max_abs(ComplexMatrix(e - out.plus.evaluate(z) * out.minus.evaluate(z))));
        out.sampled_error =
            std::max(out.sampled_error, max_abs(ComplexMatrix(e - out.tilde_minus.evaluate(z) * out.tilde_plus.evaluate(z))));
    }
    // plus factors are polynomials in z: no roots of det on or inside |z| = 1.
    // minus factors are analytic outside with invertible limit: no roots outside 1 + epsilon.
    if (detail::det_winding(out.plus, 1.0) != 0 || detail::det_winding(out.tilde_plus, 1.0) != 0)
        throw MathError("plus factor has a determinant root inside the unit disk");
    if (detail::det_winding(out.minus, R) != 0 || detail::det_winding(out.tilde_minus, R) != 0)
        throw MathError("minus factor has a determinant root outside the unit circle");
    return out;
}

// ---------------------------------------------------------------------------
// N -> infinity kernels near the top and bottom of the block Toeplitz process
//
// The finite process: pN paths through A_0 .. A_{2n-1}, starting and ending
// at heights -1 .. -pN. Near the top (heights p y + j) and the bottom
// (heights -pN + p y + j) the kernel converges to
//     -[m1 < m2] M(A_{m1} ... A_{m2-1})_{y1,y2} + double contour integral
// with inner factors tilde_plus^{-1}(w) tilde_minus^{-1}(z) at the top and
// minus^{-1}(w) plus^{-1}(z) at the bottom.

enum class KernelMode { Top, Bottom };

struct BlockKernelQuery {
    long m1, y1, m2, y2;
};

// The double contour integral alone.
inline QuadratureResult appendix_b_correction(const std::vector<MatrixSymbol>& syms, const WienerHopfPair& wh,
                                              const BlockKernelQuery& q, KernelMode mode, const QuadratureOptions& opt) {
    const long K = long(syms.size()), p = wh.p;
    if (q.m1 < 0 || q.m1 > K || q.m2 < 0 || q.m2 > K) throw ConfigError("kernel time index out of range");
    if (1 + opt.epsilon >= wh.r_star) throw ConfigError("contour radius reaches a root of det phi");
    const MatrixSymbol left = symbol_product(syms, q.m1, K, p), right = symbol_product(syms, 0, q.m2, p);
    const bool top = mode == KernelMode::Top;
    const MatrixSymbol& inner_w = top ? wh.tilde_plus : wh.minus;
    const MatrixSymbol& inner_z = top ? wh.tilde_minus : wh.plus;
    // top: 1 < |w| < |z|; bottom: 1 < |z| < |w|
    const double rw = top ? 1 + opt.epsilon / 2 : 1 + opt.epsilon;
    const double rz = top ? 1 + opt.epsilon : 1 + opt.epsilon / 2;

    auto eval = [&](long N) {
        auto ws = detail::circle(rw, N), zs = detail::circle(rz, N);
        std::vector<ComplexMatrix> Bz;
        for (const Complex& z : zs) {
            ComplexMatrix b = inverse(inner_z.evaluate(z)) * right.evaluate(z);
            b *= std::pow(z, -double(q.y2));
            Bz.push_back(std::move(b));
        }
        ComplexMatrix acc(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
        for (const Complex& w : ws) {
            ComplexMatrix inner(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
            for (std::size_t l = 0; l < zs.size(); ++l) {
                ComplexMatrix t = Bz[l];
                t *= 1.0 / (zs[l] - w);
                inner += t;
            }
            ComplexMatrix a = left.evaluate(w) * inverse(inner_w.evaluate(w));
            a *= std::pow(w, double(q.y1 + 1));
            acc += a * inner;
        }
        acc *= Complex(top ? 1.0 : -1.0) / (double(N) * double(N));
        return acc;
    };
    return detail::doubling(opt, eval);
}

inline QuadratureResult appendix_b_kernel(const std::vector<MatrixSymbol>& syms, const WienerHopfPair& wh,
                                          const BlockKernelQuery& q, KernelMode mode, const QuadratureOptions& opt) {
    QuadratureResult res = appendix_b_correction(syms, wh, q, mode, opt);
    const long p = wh.p;
    if (q.m1 < q.m2) {
        QuadratureResult ind = toeplitz_entries(symbol_product(syms, q.m1, q.m2, p), {q.y1, q.y1}, {q.y2, q.y2}, opt);
        res.value -= ind.value;
        res.accuracy = std::max(res.accuracy, ind.accuracy);
    }
    return res;
}

// The finite process behind the limits: N blocks of paths, exact.
inline EMKernel block_toeplitz_finite(const TransitionFamily& f, long N, Interval extra = {0, -1}) {
    if (!f.w.is_periodic()) throw ConfigError("the block Toeplitz process needs vertically periodic weights");
    const long p = f.w.periodicity()->p, P = p * N;
    Interval win{-P - f.n - 2, 1};
    if (extra.size() > 0) win = {std::min(win.lo, extra.lo), std::max(win.hi, extra.hi)};
    std::vector<WindowedOperator> ops;
    for (long m = 0; m + 1 < f.length(); ++m) ops.push_back(f.op(m, win));
    // Psi S^{-n}: ones where x - y >= -n
    ops.push_back(WindowedOperator::from_function(win, win, -f.n, kUnbounded, [](long, long) { return Rational(1); }));
    std::vector<long> ends;
    for (long r = 1; r <= P; ++r) ends.push_back(-r);
    return EMKernel(std::move(ops), ends, ends);
}

}  // namespace aztec
