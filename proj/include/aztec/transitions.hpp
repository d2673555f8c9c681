#pragma once

// Windowed pieces of doubly infinite Z x Z operators.
//
// A WindowedOperator stores the entries of an infinite matrix on a
// rectangle rows x cols together with its band: entry (i,j) can only be
// nonzero when min_diff <= i - j <= max_diff. Each stored entry carries a
// certification bit saying whether it equals the entry of the infinite
// operator. Products certify an entry when every index of the inner sum
// that can contribute lies inside the shared window and all operand
// entries it touches are certified.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "weights.hpp"

namespace aztec {

inline constexpr long kUnbounded = std::numeric_limits<long>::max() / 4;

inline long band_add(long a, long b) {
    if (a >= kUnbounded || b >= kUnbounded) return kUnbounded;
    if (a <= -kUnbounded || b <= -kUnbounded) return -kUnbounded;
    return a + b;
}

struct Interval {
    long lo = 0, hi = -1;  // inclusive
    long size() const { return hi >= lo ? hi - lo + 1 : 0; }
    bool contains(long x) const { return x >= lo && x <= hi; }
    bool contains(const Interval& o) const { return o.size() == 0 || (o.lo >= lo && o.hi <= hi); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

enum class Structure { Lower, Upper, Banded, General };

class WindowedOperator {
public:
    WindowedOperator() = default;
    WindowedOperator(Interval rows, Interval cols, long min_diff = -kUnbounded, long max_diff = kUnbounded)
        : rows_(rows), cols_(cols), min_diff_(min_diff), max_diff_(max_diff),
          data_(std::size_t(rows.size()), std::size_t(cols.size())),
          cert_(std::size_t(rows.size() * cols.size()), true) {}

    const Interval& rows() const { return rows_; }
    const Interval& cols() const { return cols_; }
    long min_diff() const { return min_diff_; }
    long max_diff() const { return max_diff_; }

    Structure structure() const {
        if (min_diff_ >= 0) return Structure::Lower;
        if (max_diff_ <= 0) return Structure::Upper;
        if (min_diff_ > -kUnbounded && max_diff_ < kUnbounded) return Structure::Banded;
        return Structure::General;
    }

    bool in_band(long i, long j) const { return i - j >= min_diff_ && i - j <= max_diff_; }
    bool in_window(long i, long j) const { return rows_.contains(i) && cols_.contains(j); }

    const Rational& operator()(long i, long j) const { return data_(idx_r(i), idx_c(j)); }
    Rational& at(long i, long j) { return data_(idx_r(i), idx_c(j)); }
    bool certified(long i, long j) const { return cert_[flat(i, j)]; }
    void set_certified(long i, long j, bool c) { cert_[flat(i, j)] = c; }

    // Value of the entry, which must be certified (or outside the band).
    Rational exact(long i, long j) const {
        if (!in_band(i, j)) return 0;
        if (!in_window(i, j))
            throw ExtentError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside window rows [" +
                              std::to_string(rows_.lo) + "," + std::to_string(rows_.hi) + "] cols [" +
                              std::to_string(cols_.lo) + "," + std::to_string(cols_.hi) + "]");
        if (!certified(i, j))
            throw ExtentError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not certified on this window");
        return (*this)(i, j);
    }

    bool all_certified() const { return std::all_of(cert_.begin(), cert_.end(), [](bool b) { return b; }); }

    // Structure tags are promises; this checks them against the entries.
    bool verify_structure() const {
        for (long i = rows_.lo; i <= rows_.hi; ++i)
            for (long j = cols_.lo; j <= cols_.hi; ++j)
                if (!in_band(i, j) && sgn((*this)(i, j)) != 0) return false;
        return true;
    }

    template <class F>
    static WindowedOperator from_function(Interval rows, Interval cols, long min_diff, long max_diff, F&& f) {
        WindowedOperator op(rows, cols, min_diff, max_diff);
        for (long i = rows.lo; i <= rows.hi; ++i)
            for (long j = cols.lo; j <= cols.hi; ++j)
                if (op.in_band(i, j)) op.at(i, j) = f(i, j);
        return op;
    }

    static WindowedOperator identity(Interval w) {
        return from_function(w, w, 0, 0, [](long, long) { return Rational(1); });
    }

    // S^m, with S_{ij} = 1 iff i = j + 1.
    static WindowedOperator shift(Interval rows, Interval cols, long m) {
        return from_function(rows, cols, m, m, [](long, long) { return Rational(1); });
    }

    static WindowedOperator diagonal(Interval w, const std::function<Rational(long)>& d) {
        return from_function(w, w, 0, 0, [&](long i, long) { return d(i); });
    }

    // D(a) + D(b) S: a_j on the diagonal and b_j at (j, j-1).
    static WindowedOperator phi(Interval w, const std::function<Rational(long)>& a, const std::function<Rational(long)>& b) {
        return from_function(w, w, 0, 1, [&](long i, long j) { return i == j ? a(i) : b(i); });
    }

    // Lower-triangular all-ones.
    static WindowedOperator psi(Interval w) {
        return from_function(w, w, 0, kUnbounded, [](long, long) { return Rational(1); });
    }

    // I - S
    static WindowedOperator psi_inverse(Interval w) {
        return from_function(w, w, 0, 1, [](long i, long j) { return Rational(i == j ? 1 : -1); });
    }

    friend WindowedOperator operator*(const WindowedOperator& A, const WindowedOperator& B) {
        WindowedOperator C(A.rows_, B.cols_, band_add(A.min_diff_, B.min_diff_), band_add(A.max_diff_, B.max_diff_));
        const Interval inner = intersect(A.cols_, B.rows_);
        for (long i = C.rows_.lo; i <= C.rows_.hi; ++i)
            for (long k = C.cols_.lo; k <= C.cols_.hi; ++k) {
                if (!C.in_band(i, k)) continue;
                // indices j where A(i,j) B(j,k) may be nonzero in the infinite product
                long jlo = std::max(A.max_diff_ >= kUnbounded ? -kUnbounded : i - A.max_diff_,
                                    B.min_diff_ <= -kUnbounded ? -kUnbounded : k + B.min_diff_);
                long jhi = std::min(A.min_diff_ <= -kUnbounded ? kUnbounded : i - A.min_diff_,
                                    B.max_diff_ >= kUnbounded ? kUnbounded : k + B.max_diff_);
                if (jlo > jhi) continue;  // structurally zero, certified
                bool cert = inner.contains(Interval{jlo, jhi});
                Interval run = intersect(inner, {jlo, jhi});
                Rational s = 0;
                for (long j = run.lo; j <= run.hi; ++j) {
                    const Rational& x = A(i, j);
                    const Rational& y = B(j, k);
                    if (cert && (!A.certified(i, j) || !B.certified(j, k))) cert = false;
                    if (sgn(x) == 0 || sgn(y) == 0) continue;
                    s += x * y;
                }
                C.at(i, k) = s;
                C.set_certified(i, k, cert);
            }
        return C;
    }

    // Sub-window; certification is kept.
    WindowedOperator restrict(Interval rows, Interval cols) const {
        if (!rows_.contains(rows) || !cols_.contains(cols)) throw ExtentError("restrict outside the stored window");
        WindowedOperator out(rows, cols, min_diff_, max_diff_);
        for (long i = rows.lo; i <= rows.hi; ++i)
            for (long j = cols.lo; j <= cols.hi; ++j) {
                out.at(i, j) = (*this)(i, j);
                out.set_certified(i, j, certified(i, j));
            }
        return out;
    }

    // (X S^{-m})(i,j) = X(i, j - m): a column relabelling.
    WindowedOperator times_inverse_shift(long m) const {
        WindowedOperator out({rows_.lo, rows_.hi}, {cols_.lo + m, cols_.hi + m}, band_add(min_diff_, -m),
                             band_add(max_diff_, -m));
        for (long i = rows_.lo; i <= rows_.hi; ++i)
            for (long j = cols_.lo; j <= cols_.hi; ++j) {
                out.at(i, j + m) = (*this)(i, j);
                out.set_certified(i, j + m, certified(i, j));
            }
        return out;
    }

    // (S^{m} X)(i,j) = X(i - m, j): a row relabelling.
    WindowedOperator shift_times(long m) const {
        WindowedOperator out({rows_.lo + m, rows_.hi + m}, cols_, band_add(min_diff_, m), band_add(max_diff_, m));
        for (long i = rows_.lo; i <= rows_.hi; ++i)
            for (long j = cols_.lo; j <= cols_.hi; ++j) {
                out.at(i + m, j) = (*this)(i, j);
                out.set_certified(i + m, j, certified(i, j));
            }
        return out;
    }

    // Inverse of a triangular operator on a square window. For a lower
    // (upper) triangular infinite matrix the inverse entries on the window
    // only involve window entries, so they are exact wherever the inputs are.
    WindowedOperator triangular_inverse() const {
        if (!(rows_ == cols_)) throw ExtentError("triangular inverse needs a square window");
        Structure st = structure();
        if (st != Structure::Lower && st != Structure::Upper)
            throw MathError("triangular inverse of an operator that is not triangular");
        if (!all_certified()) throw ExtentError("triangular inverse of a partially certified window");
        const std::size_t N = std::size_t(rows_.size());
        RationalMatrix inv = aztec::triangular_inverse(data_, st == Structure::Lower ? Triangle::Lower : Triangle::Upper);
        WindowedOperator out(rows_, cols_, st == Structure::Lower ? 0 : -kUnbounded, st == Structure::Lower ? kUnbounded : 0);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c) out.data_(r, c) = inv(r, c);
        return out;
    }

    // Certified entries equal on the common window of both operators.
    friend bool equal_on(const WindowedOperator& X, const WindowedOperator& Y, Interval rows, Interval cols,
                         std::string* witness = nullptr) {
        for (long i = rows.lo; i <= rows.hi; ++i)
            for (long j = cols.lo; j <= cols.hi; ++j) {
                Rational x = X.exact(i, j), y = Y.exact(i, j);
                if (x != y) {
                    if (witness)
                        *witness = "(" + std::to_string(i) + "," + std::to_string(j) + "): " + to_string(x) + " vs " + to_string(y);
                    return false;
                }
            }
        return true;
    }

    const RationalMatrix& data() const { return data_; }

private:
    std::size_t idx_r(long i) const {
        if (!rows_.contains(i)) throw ExtentError("row " + std::to_string(i) + " outside window");
        return std::size_t(i - rows_.lo);
    }
    std::size_t idx_c(long j) const {
        if (!cols_.contains(j)) throw ExtentError("column " + std::to_string(j) + " outside window");
        return std::size_t(j - cols_.lo);
    }
    std::size_t flat(long i, long j) const { return idx_r(i) * std::size_t(cols_.size()) + idx_c(j); }

    Interval rows_{0, -1}, cols_{0, -1};
    long min_diff_ = -kUnbounded, max_diff_ = kUnbounded;
    RationalMatrix data_;
    std::vector<bool> cert_;
};

// ---------------------------------------------------------------------------
// the transition family M_0, Psi, M_2, Psi, ..., M_{2n-2}, Psi

struct TransitionFamily {
    long n = 0;
    WeightField w;

    long length() const { return 2 * n; }

    // M_m on the square window w.
    WindowedOperator op(long m, Interval win) const {
        if (m < 0 || m >= 2 * n) throw ConfigError("transition index " + std::to_string(m) + " out of range");
        if (m % 2 == 1) return WindowedOperator::psi(win);
        const long i = m / 2;
        return WindowedOperator::phi(win, [&](long j) { return w.a(i, j); }, [&](long j) { return w.b(i, j); });
    }

    // M_{from} ... M_{to-1}; the identity when from == to.
    WindowedOperator product(long from, long to, Interval win) const {
        WindowedOperator acc = WindowedOperator::identity(win);
        for (long m = from; m < to; ++m) acc = acc * op(m, win);
        return acc;
    }
};

inline WindowedOperator phi_operator(const std::function<Rational(long)>& a, const std::function<Rational(long)>& b,
                                     Interval win) {
    return WindowedOperator::phi(win, a, b);
}

inline WindowedOperator psi_operator(Interval win) { return WindowedOperator::psi(win); }

// Window certifying every entry that W needs.
inline Interval em_window(long n, long p) { return {-(n + p) - 1, n}; }

inline WindowedOperator product_V(const TransitionFamily& f, Interval win) { return f.product(0, f.length(), win); }

// G = V S^{-n}
inline WindowedOperator product_G(const TransitionFamily& f, Interval win) {
    return product_V(f, win).times_inverse_shift(f.n);
}

// W_{rs} = V(n - r, -s), r, s = 1..n+p.
inline RationalMatrix extract_W(const WindowedOperator& V, long n, long p) {
    RationalMatrix W(std::size_t(n + p), std::size_t(n + p));
    for (long r = 1; r <= n + p; ++r)
        for (long s = 1; s <= n + p; ++s) W(std::size_t(r - 1), std::size_t(s - 1)) = V.exact(n - r, -s);
    return W;
}

// Unit upper-triangular all-ones matrix: W = W_DR U relates the path matrix
// of transition-graph paths to the DR path matrix of the tower.
inline RationalMatrix cumulative_columns(std::size_t N) {
    RationalMatrix U(N, N);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t s = r; s < N; ++s) U(r, s) = 1;
    return U;
}

// ---------------------------------------------------------------------------
// Eynard-Mehta kernel for paths T_0 ... T_{K-1} from heights starts[r] at
// time 0 to heights ends[s] at time K:
//
//   K(m1,x1; m2,x2) = -[m1 < m2] (T_{m1} ... T_{m2-1})(x1,x2)
//                    + sum_{r,s} (T_{m1} ... T_{K-1})(x1, e_s) Winv_{s,r} (T_0 ... T_{m2-1})(s_r, x2)
//
// with W_{rs} = (T_0 ... T_{K-1})(s_r, e_s).

struct KernelQuery {
    long m1, x1, m2, x2;
};

class EMKernel {
public:
    EMKernel(std::vector<WindowedOperator> ops, std::vector<long> starts, std::vector<long> ends)
        : ops_(std::move(ops)), starts_(std::move(starts)), ends_(std::move(ends)) {
        if (starts_.size() != ends_.size()) throw ConfigError("start and end counts differ");
        if (ops_.empty()) throw ConfigError("empty transition list");
        win_ = ops_.front().rows();
        const std::size_t K = ops_.size();
        prefix_.reserve(K + 1);
        prefix_.push_back(WindowedOperator::identity(win_));
        for (std::size_t m = 0; m < K; ++m) prefix_.push_back(prefix_.back() * ops_[m]);
        suffix_.assign(K + 1, WindowedOperator());
        suffix_[K] = WindowedOperator::identity(win_);
        for (std::size_t m = K; m-- > 0;) suffix_[m] = ops_[m] * suffix_[m + 1];
        const std::size_t N = starts_.size();
        W_ = RationalMatrix(N, N);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t s = 0; s < N; ++s) W_(r, s) = prefix_[K].exact(starts_[r], ends_[s]);
        Winv_ = inverse(W_);
    }

    const RationalMatrix& W() const { return W_; }
    const RationalMatrix& W_inverse() const { return Winv_; }
    long length() const { return long(ops_.size()); }

    // T_{from} ... T_{to-1}
    WindowedOperator segment(long from, long to) const {
        WindowedOperator acc = WindowedOperator::identity(win_);
        for (long m = from; m < to; ++m) acc = acc * ops_[std::size_t(m)];
        return acc;
    }

    Rational correction(const KernelQuery& q) const {
        check(q);
        Rational s = 0;
        const std::size_t N = starts_.size();
        for (std::size_t a = 0; a < N; ++a) {
            Rational left = suffix_[std::size_t(q.m1)].exact(q.x1, ends_[a]);
            if (sgn(left) == 0) continue;
            for (std::size_t r = 0; r < N; ++r) {
                if (sgn(Winv_(a, r)) == 0) continue;
                s += left * Winv_(a, r) * prefix_[std::size_t(q.m2)].exact(starts_[r], q.x2);
            }
        }
        return s;
    }

    Rational operator()(const KernelQuery& q) const {
        Rational k = correction(q);
        if (q.m1 < q.m2) k -= segment(q.m1, q.m2).exact(q.x1, q.x2);
        return k;
    }

    // The indicator term written as -[m1 > m2] (T_{m2+1} ... T_{m1})(x1,x2);
    // kept to compare the two conventions. Needs m1 < length().
    Rational literal_variant(const KernelQuery& q) const {
        if (q.m1 >= length()) throw ConfigError("literal variant needs m1 < " + std::to_string(length()));
        Rational k = correction(q);
        if (q.m1 > q.m2) k -= segment(q.m2 + 1, q.m1 + 1).exact(q.x1, q.x2);
        return k;
    }

    Interval window() const { return win_; }

private:
    void check(const KernelQuery& q) const {
        const long K = long(ops_.size());
        if (q.m1 < 0 || q.m1 > K || q.m2 < 0 || q.m2 > K) throw ConfigError("kernel time index out of range");
        if (!win_.contains(q.x1) || !win_.contains(q.x2)) throw ExtentError("kernel height outside the certified window");
    }

    std::vector<WindowedOperator> ops_;
    std::vector<long> starts_, ends_;
    Interval win_;
    std::vector<WindowedOperator> prefix_, suffix_;
    RationalMatrix W_, Winv_;
};

// Kernel of the tower path process: starts n - r, ends -s, r, s = 1..n+p.
inline EMKernel em_kernel_finite(const TransitionFamily& f, long p, Interval extra = {0, -1}) {
    Interval win = em_window(f.n, p);
    if (extra.size() > 0) win = {std::min(win.lo, extra.lo), std::max(win.hi, extra.hi)};
    std::vector<WindowedOperator> ops;
    for (long m = 0; m < f.length(); ++m) ops.push_back(f.op(m, win));
    std::vector<long> starts, ends;
    for (long r = 1; r <= f.n + p; ++r) {
        starts.push_back(f.n - r);
        ends.push_back(-r);
    }
    return EMKernel(std::move(ops), std::move(starts), std::move(ends));
}

inline Rational em_kernel_finite(const TransitionFamily& f, long p, const KernelQuery& q) {
    Interval extra{std::min(q.x1, q.x2) - 1, std::max(q.x1, q.x2) + 1};
    return em_kernel_finite(f, p, extra)(q);
}

}  // namespace aztec
