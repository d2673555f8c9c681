#pragma once

// Two dynamics on the same weights: the domino shuffle acting on face
// weights, and refactorization of transition matrices acting on (a, b).
//
// Forward (hat) map:
//     a^_{i,j} = a_{i,j} (a+b)_{i+1,j} / (a+b)_{i,j}
//     b^_{i,j} = b_{i,j-1} (a+b)_{i+1,j-1} / (a+b)_{i,j-1}
// Reverse (check) map, with R_{i,j} = (a_{i-1,j} + b_{i-1,j+1}) / (a_{i,j} + b_{i,j+1}):
//     a'_{i,j} = a_{i,j} R_{i,j},  b'_{i,j} = b_{i,j+1} R_{i,j}
//
// On a windowed field [i0,i1] x [j0,j1] the hat map lands on
// [i0,i1-1] x [j0+1,j1] and the check map on [i0+1,i1] x [j0,j1-1]; a
// shuffle of the corresponding face field lands on the same window as the
// hat map. Periodic fields keep their periods.

#include <array>
#include <optional>
#include <string>

#include "transitions.hpp"
#include "weights.hpp"

namespace aztec {

// ---------------------------------------------------------------------------
// square move

struct SquareMove {
    Rational center;
    std::array<Rational, 4> neighbors;  // ne, se, sw, nw
};

// Square move on one even face of weight F with neighbors (ne, se, sw, nw).
// The face comes back with the opposite parity, so a second move must be
// fed the neighbors rotated one step: (se, sw, nw, ne).
inline SquareMove square_move_local(const Rational& F, const std::array<Rational, 4>& nb) {
    if (sgn(F) <= 0) throw ConfigError("face weight must be positive");
    for (auto& x : nb)
        if (sgn(x) <= 0) throw ConfigError("face weight must be positive");
    Rational up = 1 + F, down = 1 + 1 / F;
    return {1 / F, {nb[0] * up, nb[1] / down, nb[2] * up, nb[3] / down}};
}

// Edge-weight form, edges labelled clockwise from NE.
inline std::array<Rational, 4> square_move_edges(const Rational& a, const Rational& b, const Rational& c,
                                                 const Rational& d) {
    Rational delta = a * c + b * d;
    if (sgn(delta) == 0) throw MathError("square move with a*c + b*d = 0");
    return {c / delta, d / delta, a / delta, b / delta};
}

// ---------------------------------------------------------------------------
// shuffle on face weights

struct ShuffleState {
    FaceField faces;
    std::optional<Window> window;  // underlying weight window, absent when periodic
    long generation = 0;

    static ShuffleState from_weights(const WeightField& w) {
        ShuffleState s{faces_from_weights(w), std::nullopt, 0};
        if (!w.is_periodic()) s.window = w.window_extent();
        return s;
    }
};

namespace detail {

inline Rational shuffled_even(const FaceField& F, long i, long j) {
    return F(2 * i + 1, j - 1) * (1 + F(2 * i + 2, j)) / (1 + 1 / F(2 * i + 2, j - 1)) * (1 + F(2 * i, j - 1)) /
           (1 + 1 / F(2 * i, j));
}

}  // namespace detail

// Square move on every even face, contraction, and the (-1,+1) shift:
//     F^_{2i+1,j} = 1 / F_{2i+2,j}
//     F^_{2i,j}   = F_{2i+1,j-1} (1+F_{2i+2,j}) / (1+1/F_{2i+2,j-1}) (1+F_{2i,j-1}) / (1+1/F_{2i,j})
inline ShuffleState shuffle_step(const ShuffleState& s) {
    const FaceField& F = s.faces;
    if (F.is_periodic()) {
        const Periodic per = *F.periodicity();
        FaceField out(per);
        for (long i = 0; i < per.q; ++i)
            for (long j = 0; j < per.p; ++j) {
                out.set(2 * i + 1, j, 1 / F(2 * i + 2, j));
                out.set(2 * i, j, detail::shuffled_even(F, i, j));
            }
        return {out, std::nullopt, s.generation + 1};
    }
    if (!s.window) throw ConfigError("windowed shuffle state without a window");
    const Window& x = *s.window;
    Window nx{x.i0, x.i1 - 1, x.j0 + 1, x.j1};
    if (nx.width() < 1 || nx.height() < 2)
        throw ExtentError("face window [" + std::to_string(x.i0) + "," + std::to_string(x.i1) + "]x[" +
                          std::to_string(x.j0) + "," + std::to_string(x.j1) + "] is exhausted");
    FaceField out;
    for (long i = nx.i0; i <= nx.i1; ++i)
        for (long j = nx.j0; j <= nx.j1; ++j) {
            out.set(2 * i, j, detail::shuffled_even(F, i, j));
            if (i < nx.i1 && j < nx.j1) out.set(2 * i + 1, j, 1 / F(2 * i + 2, j));
        }
    return {out, nx, s.generation + 1};
}

// Smallest t in [1, max_steps] with shuffle^t(s) == s, if any.
inline std::optional<long> shuffle_period(const ShuffleState& s, long max_steps) {
    if (!s.faces.is_periodic()) throw ConfigError("orbit periods need a periodic face field");
    ShuffleState cur = s;
    for (long t = 1; t <= max_steps; ++t) {
        cur = shuffle_step(cur);
        if (cur.faces == s.faces) return t;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// refactorization maps on (a, b)

struct ParamState {
    WeightField w;
    long generation = 0;
};

inline WeightField hat_map(const WeightField& w) {
    auto f = [&](long i, long j) {
        auto s = [&](long x, long y) { return Rational(w.a(x, y) + w.b(x, y)); };
        return std::make_pair(Rational(w.a(i, j) * s(i + 1, j) / s(i, j)),
                              Rational(w.b(i, j - 1) * s(i + 1, j - 1) / s(i, j - 1)));
    };
    if (w.is_periodic()) return WeightField::periodic(*w.periodicity(), f);
    const Window& x = w.window_extent();
    Window nx{x.i0, x.i1 - 1, x.j0 + 1, x.j1};
    if (nx.width() < 1 || nx.height() < 2) throw ExtentError("weight window is exhausted by the forward map");
    return WeightField::window(nx, f);
}

inline WeightField check_map(const WeightField& w) {
    auto f = [&](long i, long j) {
        Rational r = (w.a(i - 1, j) + w.b(i - 1, j + 1)) / (w.a(i, j) + w.b(i, j + 1));
        return std::make_pair(Rational(w.a(i, j) * r), Rational(w.b(i, j + 1) * r));
    };
    if (w.is_periodic()) return WeightField::periodic(*w.periodicity(), f);
    const Window& x = w.window_extent();
    Window nx{x.i0 + 1, x.i1, x.j0, x.j1 - 1};
    if (nx.width() < 1 || nx.height() < 2) throw ExtentError("weight window is exhausted by the reverse map");
    return WeightField::window(nx, f);
}

inline ParamState hat_step(const ParamState& s) { return {hat_map(s.w), s.generation + 1}; }
inline ParamState check_step(const ParamState& s) { return {check_map(s.w), s.generation + 1}; }

// ---------------------------------------------------------------------------
// operator identities on a window

struct OperatorIdentity {
    WindowedOperator lhs, rhs;
};

inline WindowedOperator even_transition(const WeightField& w, long i, Interval win) {
    return WindowedOperator::phi(win, [&](long j) { return w.a(i, j); }, [&](long j) { return w.b(i, j); });
}

// M_{2i} Psi  versus  X_i Psi M^_{2i} X_{i+1}^{-1},  X_i = D(a_i + b_i).
inline OperatorIdentity forward_identity(const WeightField& w, long i, Interval win) {
    WeightField h = hat_map(w);
    auto X = [&](long c, bool inv) {
        return WindowedOperator::diagonal(win, [&, c, inv](long j) {
            Rational s = w.a(c, j) + w.b(c, j);
            return inv ? Rational(1 / s) : s;
        });
    };
    auto psi = WindowedOperator::psi(win);
    return {even_transition(w, i, win) * psi, X(i, false) * psi * even_transition(h, i, win) * X(i + 1, true)};
}

// Psi M_{2i}  versus  Y_{i-1}^{-1} M'_{2i} Psi Y_i,  Y_i(k) = a_{i,k} + b_{i,k+1}.
inline OperatorIdentity reverse_identity(const WeightField& w, long i, Interval win) {
    WeightField c = check_map(w);
    auto Y = [&](long col, bool inv) {
        return WindowedOperator::diagonal(win, [&, col, inv](long k) {
            Rational s = w.a(col, k) + w.b(col, k + 1);
            return inv ? Rational(1 / s) : s;
        });
    };
    auto psi = WindowedOperator::psi(win);
    return {psi * even_transition(w, i, win), Y(i - 1, true) * even_transition(c, i, win) * psi * Y(i, false)};
}

// ---------------------------------------------------------------------------
// lockstep comparison of the two dynamics

struct EquivalenceReport {
    bool ok = true;
    long generations = 0;  // generations compared
    std::string witness;   // first mismatch
};

inline std::string face_mismatch(const FaceField& x, const FaceField& y) {
    for (auto& [k, v] : x.faces()) {
        auto it = y.faces().find(k);
        if (it == y.faces().end())
            return "face (" + std::to_string(k.first) + "," + std::to_string(k.second) + ") missing on one side";
        if (it->second != v)
            return "face (" + std::to_string(k.first) + "," + std::to_string(k.second) + "): " + to_string(v) + " vs " +
                   to_string(it->second);
    }
    if (x.size() != y.size()) return "face supports differ";
    return {};
}

inline EquivalenceReport equivalence_report(const WeightField& w, long steps) {
    EquivalenceReport rep;
    ShuffleState s = ShuffleState::from_weights(w);
    ParamState ps{w, 0};
    for (long g = 1; g <= steps; ++g) {
        s = shuffle_step(s);
        ps = hat_step(ps);
        std::string m = face_mismatch(s.faces, faces_from_weights(ps.w));
        rep.generations = g;
        if (!m.empty()) {
            rep.ok = false;
            rep.witness = "generation " + std::to_string(g) + ": " + m;
            return rep;
        }
    }
    return rep;
}

}  // namespace aztec
