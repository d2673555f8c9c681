#pragma once

// Boundary entries of the inverse Kasteleyn matrix of the Aztec diamond by
// shuffling down one size at a time, and the rest of K^{-1} from the Schur
// blocks.
//
// Even face (i,j), 0 <= i,j <= n-1, sits between black (i,j) on the west and
// black (i+1,j) on the east. Its edges clockwise from north-east are
//     r1 = east.nw, r2 = east.sw, r3 = west.se, r4 = west.ne,  Delta = r1 r3 + r2 r4.
// A square move on every even face, contraction and removal of the pendant
// edges leaves an Aztec diamond of size n-1 whose black (i,k) has
//     ne = r4(i,k+1)/Delta(i,k+1), nw = r1(i,k+1)/Delta(i,k+1),
//     se = r3(i,k)/Delta(i,k),     sw = r2(i,k)/Delta(i,k)
// and Z_n = prod Delta * Z_{n-1}. With R_n(i,j) = |K_n^{-1}((2i-1,0),(0,2j-1))|,
//     R_n(i,j) = sum_{k,l in {0,1}} c_l(j) d_k(i) R_{n-1}(i-k, j-l) + [(i,j) = (1,1)] r1(0,0)/Delta(0,0)
//     c_l(j) = r1(0,j-1)^l r2(0,j-1)^{1-l} / Delta(0,j-1)
//     d_k(i) = r1(i-1,0)^k r4(i-1,0)^{1-k} / Delta(i-1,0)
// and the signed boundary inverse is W^{-1}(i,j) = (-1)^{i+j} R_n(i,j), the
// inverse of the DR path matrix. On the Kasteleyn side
//     K^{-1}(white i, black j) = i^{1-i-j} W^{-1}(i,j),
// and the rest of K^{-1} follows from the Schur blocks.

#include <vector>

#include "kasteleyn.hpp"
#include "weights.hpp"

namespace aztec {

struct FaceEdges {
    Rational r1, r2, r3, r4;
    Rational delta() const { return r1 * r3 + r2 * r4; }
};

inline Window aztec_black_window(long n) { return {0, n, 0, n - 1}; }

inline FaceEdges face_edges(const RawEdgeWeights& r, long i, long j) {
    const BlackEdges &west = r.at(i, j), &east = r.at(i + 1, j);
    return {east.nw, east.sw, west.se, west.ne};
}

// Raw weights of the size n-1 diamond left by one shuffle of size n.
inline RawEdgeWeights shuffle_down(const RawEdgeWeights& r, long n) {
    if (n < 2) throw ConfigError("shuffling down needs size >= 2");
    RawEdgeWeights out(aztec_black_window(n - 1));
    for (long i = 0; i <= n - 1; ++i)
        for (long k = 0; k <= n - 2; ++k) {
            FaceEdges up = face_edges(r, i, k + 1), lo = face_edges(r, i, k);
            Rational du = up.delta(), dl = lo.delta();
            out.set(i, k, {up.r1 / du, lo.r2 / dl, up.r4 / du, lo.r3 / dl});
        }
    return out;
}

struct RecurrenceFrame {
    long size = 0;
    RawEdgeWeights raw;
    FaceField faces;
    Rational delta_product;  // prod Delta over the even faces; Z_size = delta_product * Z_{size-1}
    RationalMatrix R;        // R(i-1, j-1) = |K^{-1}((2i-1,0),(0,2j-1))|
};

struct BoundaryRecurrence {
    std::vector<RecurrenceFrame> frames;  // frames[k] has size n - k
    RationalMatrix W_inverse;             // signed, size n
};

inline BoundaryRecurrence run_boundary_recurrence(const RawEdgeWeights& top, long n) {
    if (n < 1) throw ConfigError("Aztec diamond size must be >= 1");
    BoundaryRecurrence out;
    RawEdgeWeights cur = top;
    for (long s = n; s >= 1; --s) {
        RecurrenceFrame f;
        f.size = s;
        f.raw = cur;
        f.faces = faces_from_raw(cur);
        f.delta_product = 1;
        for (long i = 0; i < s; ++i)
            for (long j = 0; j < s; ++j) {
                Rational d = face_edges(cur, i, j).delta();
                if (sgn(d) <= 0) throw MathError("square move with non-positive Delta");
                f.delta_product *= d;
            }
        out.frames.push_back(std::move(f));
        if (s > 1) cur = shuffle_down(cur, s);
    }
    // bottom-up over the frames
    RationalMatrix prev;  // R_{s-1}
    for (auto it = out.frames.rbegin(); it != out.frames.rend(); ++it) {
        const long s = it->size;
        const RawEdgeWeights& r = it->raw;
        auto R_prev = [&](long i, long j) -> Rational {
            if (i < 1 || j < 1 || i > s - 1 || j > s - 1) return 0;
            return prev(std::size_t(i - 1), std::size_t(j - 1));
        };
        RationalMatrix R(static_cast<std::size_t>(s), static_cast<std::size_t>(s));
        for (long i = 1; i <= s; ++i)
            for (long j = 1; j <= s; ++j) {
                FaceEdges cj = face_edges(r, 0, j - 1), di = face_edges(r, i - 1, 0);
                Rational v = 0;
                for (long k = 0; k <= 1; ++k)
                    for (long l = 0; l <= 1; ++l) {
                        Rational x = R_prev(i - k, j - l);
                        if (sgn(x) == 0) continue;
                        Rational c = (l ? cj.r1 : cj.r2) / cj.delta();
                        Rational d = (k ? di.r1 : di.r4) / di.delta();
                        v += c * d * x;
                    }
                if (i == 1 && j == 1) {
                    FaceEdges e = face_edges(r, 0, 0);
                    v += e.r1 / e.delta();
                }
                R(std::size_t(i - 1), std::size_t(j - 1)) = v;
            }
        it->R = R;
        prev = std::move(R);
    }
    out.W_inverse = RationalMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i)
        for (long j = 1; j <= n; ++j) {
            const Rational& x = out.frames.front().R(std::size_t(i - 1), std::size_t(j - 1));
            out.W_inverse(std::size_t(i - 1), std::size_t(j - 1)) = (i + j) % 2 == 0 ? x : Rational(-x);
        }
    return out;
}

inline RationalMatrix w_inverse_recurrence(const WeightField& w, long n) {
    return run_boundary_recurrence(RawEdgeWeights::from_weights(w, aztec_black_window(n)), n).W_inverse;
}

// Boundary block of K^{-1}, indexed (white, black), from the signed W^{-1}.
inline GaussianRational boundary_inverse_phase(long i, long j) { return GaussianRational::i_pow(1 - i - j); }

inline ExactMatrix boundary_kinv(const RationalMatrix& Winv) {
    ExactMatrix T(Winv.rows(), Winv.cols());
    for (std::size_t i = 0; i < Winv.rows(); ++i)
        for (std::size_t j = 0; j < Winv.cols(); ++j)
            T(i, j) = boundary_inverse_phase(long(i) + 1, long(j) + 1) * GaussianRational(Winv(i, j));
    return T;
}

// Whole K^{-1} from W^{-1}. With check set, a W^{-1} that does not invert
// the Schur complement is rejected instead of being propagated.
inline ExactMatrix propagate_full_inverse(const KasteleynMatrix& k, const RationalMatrix& Winv, bool check = true) {
    if (k.graph.kind != GraphKind::Aztec) throw ConfigError("propagate_full_inverse needs an Aztec graph");
    const std::size_t n = std::size_t(k.graph.n);
    if (Winv.rows() != n || Winv.cols() != n)
        throw ConfigError("W^{-1} must be " + std::to_string(n) + "x" + std::to_string(n));
    SchurBlocks s = schur_blocks(k);
    ExactMatrix T = boundary_kinv(Winv);
    if (check && !(T * s.tildeW == ExactMatrix::identity(n)))
        throw MathError("W^{-1} does not invert the Schur complement of K");
    return assemble_inverse(s, T);
}

inline ExactMatrix full_inverse_by_recurrence(const WeightField& w, long n) {
    return propagate_full_inverse(kasteleyn_aztec(build_aztec(n, w)), w_inverse_recurrence(w, n));
}

}  // namespace aztec
