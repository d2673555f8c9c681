#pragma once

// Edge weights a_{i,j}, b_{i,j} on the black vertices (2i, 2j+1) and the
// face weights they induce.
//
// Convention: the two west edges of every black vertex carry weight 1, the
// north-east edge carries a_{i,j} and the south-east edge b_{i,j}. Face
// weights are the gauge invariants
//     F_{2i,j}   = a_{i,j} / b_{i,j}                (even faces)
//     F_{2i+1,j} = b_{i+1,j+1} / a_{i+1,j}          (odd faces)

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"

namespace aztec {

inline long floor_mod(long x, long m) { return ((x % m) + m) % m; }
inline long floor_div(long x, long m) { return (x - floor_mod(x, m)) / m; }

struct Window {
    long i0, i1, j0, j1;  // inclusive
    bool contains(long i, long j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
    long width() const { return i1 - i0 + 1; }
    long height() const { return j1 - j0 + 1; }
};

struct Periodic {
    long q;  // horizontal period
    long p;  // vertical period
};

class WeightField {
public:
    using Key = std::pair<long, long>;

    WeightField() = default;

    template <class F>
    static WeightField window(Window w, F&& ab) {
        if (w.width() < 1 || w.height() < 2)
            throw ExtentError("weight window must have at least one column and height >= 2");
        WeightField f;
        f.window_ = w;
        for (long i = w.i0; i <= w.i1; ++i)
            for (long j = w.j0; j <= w.j1; ++j) f.set(i, j, ab(i, j));
        return f;
    }

    template <class F>
    static WeightField periodic(Periodic per, F&& ab) {
        if (per.q < 1 || per.p < 1) throw ConfigError("periods must be positive");
        WeightField f;
        f.periodic_ = per;
        for (long i = 0; i < per.q; ++i)
            for (long j = 0; j < per.p; ++j) f.set(i, j, ab(i, j));
        return f;
    }

    static WeightField uniform(Window w, const Rational& a = 1, const Rational& b = 1) {
        return window(w, [&](long, long) { return std::make_pair(a, b); });
    }

    bool is_periodic() const { return periodic_.has_value(); }
    const std::optional<Periodic>& periodicity() const { return periodic_; }
    const Window& window_extent() const { return window_; }

    bool has(long i, long j) const {
        if (periodic_) return true;
        return window_.contains(i, j);
    }

    const Rational& a(long i, long j) const { return at(i, j).first; }
    const Rational& b(long i, long j) const { return at(i, j).second; }

    const std::pair<Rational, Rational>& at(long i, long j) const {
        Key k = reduce(i, j);
        auto it = ab_.find(k);
        if (it == ab_.end())
            throw ExtentError("weight (" + std::to_string(i) + "," + std::to_string(j) + ") outside the weight window");
        return it->second;
    }

    // Restrict or expand to a window. Periodic fields can be materialized on
    // any window; windowed fields only on sub-windows.
    WeightField restrict(Window w) const {
        return window(w, [&](long i, long j) { return at(i, j); });
    }

    const std::map<Key, std::pair<Rational, Rational>>& raw() const { return ab_; }

    friend bool operator==(const WeightField& x, const WeightField& y) {
        if (x.is_periodic() != y.is_periodic()) return false;
        if (x.is_periodic()) {
            if (x.periodic_->q != y.periodic_->q || x.periodic_->p != y.periodic_->p) return false;
        } else {
            const Window &u = x.window_, &v = y.window_;
            if (u.i0 != v.i0 || u.i1 != v.i1 || u.j0 != v.j0 || u.j1 != v.j1) return false;
        }
        return x.ab_ == y.ab_;
    }

private:
    void set(long i, long j, std::pair<Rational, Rational> v) {
        if (sgn(v.first) <= 0 || sgn(v.second) <= 0)
            throw ConfigError("weights must be strictly positive at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        ab_[{i, j}] = std::move(v);
    }
    Key reduce(long i, long j) const {
        if (periodic_) return {floor_mod(i, periodic_->q), floor_mod(j, periodic_->p)};
        return {i, j};
    }

    Window window_{0, 0, 0, 1};
    std::optional<Periodic> periodic_;
    std::map<Key, std::pair<Rational, Rational>> ab_;
};

// Face weights keyed by (k, j); k even for even faces, odd for odd faces.
// A periodic field repeats with period 2q in k and p in j.
class FaceField {
public:
    using Key = std::pair<long, long>;

    FaceField() = default;
    explicit FaceField(std::optional<Periodic> per) : periodic_(per) {}

    bool is_periodic() const { return periodic_.has_value(); }
    const std::optional<Periodic>& periodicity() const { return periodic_; }

    void set(long k, long j, Rational v) {
        if (sgn(v) <= 0) throw ConfigError("face weights must be strictly positive");
        F_[reduce(k, j)] = std::move(v);
    }
    bool has(long k, long j) const { return F_.count(reduce(k, j)) > 0; }
    const Rational& operator()(long k, long j) const {
        auto it = F_.find(reduce(k, j));
        if (it == F_.end())
            throw ExtentError("face (" + std::to_string(k) + "," + std::to_string(j) + ") not in face field");
        return it->second;
    }
    const std::map<Key, Rational>& faces() const { return F_; }
    std::size_t size() const { return F_.size(); }

    friend bool operator==(const FaceField& x, const FaceField& y) { return x.F_ == y.F_; }
    friend bool operator!=(const FaceField& x, const FaceField& y) { return !(x == y); }

    // Shift all keys by (dk, dj); used to line up shuffled fields.
    FaceField shifted(long dk, long dj) const {
        FaceField out(periodic_);
        for (auto& [key, v] : F_) out.F_[out.reduce(key.first + dk, key.second + dj)] = v;
        return out;
    }

private:
    Key reduce(long k, long j) const {
        if (periodic_) return {floor_mod(k, 2 * periodic_->q), floor_mod(j, periodic_->p)};
        return {k, j};
    }

    std::optional<Periodic> periodic_;
    std::map<Key, Rational> F_;
};

inline FaceField faces_from_weights(const WeightField& w) {
    if (w.is_periodic()) {
        const Periodic per = *w.periodicity();
        FaceField f(per);
        for (long i = 0; i < per.q; ++i)
            for (long j = 0; j < per.p; ++j) {
                f.set(2 * i, j, w.a(i, j) / w.b(i, j));
                f.set(2 * i + 1, j, w.b(i + 1, j + 1) / w.a(i + 1, j));
            }
        return f;
    }
    const Window& x = w.window_extent();
    FaceField f;
    for (long i = x.i0; i <= x.i1; ++i)
        for (long j = x.j0; j <= x.j1; ++j) {
            f.set(2 * i, j, w.a(i, j) / w.b(i, j));
            if (i < x.i1 && j < x.j1) f.set(2 * i + 1, j, w.b(i + 1, j + 1) / w.a(i + 1, j));
        }
    return f;
}

// Rebuild weights from faces column by column:
//     a_{c,j}   = F_{2c,j} b_{c,j}
//     b_{c,j+1} = F_{2c-1,j} a_{c,j}
// starting from b_{c,j0} = seed(c). The leftmost window column has no odd
// face to its left, so its b's are all set to the seed.
template <class Seed>
WeightField weights_from_faces(const FaceField& f, Window target, Seed&& seed) {
    if (target.height() < 2) throw ExtentError("reconstruction window needs height >= 2");
    std::map<std::pair<long, long>, std::pair<Rational, Rational>> ab;
    for (long c = target.i0; c <= target.i1; ++c) {
        Rational b = seed(c);
        if (sgn(b) <= 0) throw ConfigError("seed values must be positive");
        for (long j = target.j0; j <= target.j1; ++j) {
            Rational a = f(2 * c, j) * b;
            ab[{c, j}] = {a, b};
            if (j == target.j1) break;
            b = (c == target.i0) ? Rational(seed(c)) : Rational(f(2 * c - 1, j) * a);
        }
    }
    return WeightField::window(target, [&](long i, long j) { return ab.at({i, j}); });
}

inline WeightField weights_from_faces(const FaceField& f, Window target) {
    return weights_from_faces(f, target, [](long) { return Rational(1); });
}

// Periodic reconstruction. A column closes up only when the product of its
// face pairs over one vertical period is 1; otherwise no periodic gauge with
// unit west edges exists and the obstruction is reported.
template <class Seed>
WeightField weights_from_faces_periodic(const FaceField& f, Seed&& seed) {
    if (!f.is_periodic()) throw ConfigError("periodic reconstruction needs a periodic face field");
    const Periodic per = *f.periodicity();
    std::map<std::pair<long, long>, std::pair<Rational, Rational>> ab;
    for (long c = 0; c < per.q; ++c) {
        Rational b = seed(c);
        Rational loop = 1;
        for (long j = 0; j < per.p; ++j) {
            Rational a = f(2 * c, j) * b;
            ab[{c, j}] = {a, b};
            loop *= f(2 * c - 1, j) * f(2 * c, j);
            b = f(2 * c - 1, j) * a;
        }
        if (loop != 1)
            throw MathError("face field has no periodic unit-west-edge gauge: column " + std::to_string(c) +
                            " has face-pair product " + to_string(loop) + " over one period");
    }
    return WeightField::periodic(per, [&](long i, long j) { return ab.at({i, j}); });
}

inline WeightField weights_from_faces_periodic(const FaceField& f) {
    return weights_from_faces_periodic(f, [](long) { return Rational(1); });
}

// ---------------------------------------------------------------------------
// raw edge weights and gauge normalization

struct BlackEdges {
    Rational nw, sw, ne, se;
};

class RawEdgeWeights {
public:
    RawEdgeWeights() = default;
    explicit RawEdgeWeights(Window w) : window_(w) {}

    void set(long i, long j, BlackEdges e) {
        if (!window_.contains(i, j)) throw ExtentError("raw edge outside window");
        if (sgn(e.nw) <= 0 || sgn(e.sw) <= 0 || sgn(e.ne) <= 0 || sgn(e.se) <= 0)
            throw ConfigError("raw edge weights must be positive");
        e_[{i, j}] = std::move(e);
    }
    const BlackEdges& at(long i, long j) const {
        auto it = e_.find({i, j});
        if (it == e_.end()) throw ExtentError("raw edge weights missing at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        return it->second;
    }
    BlackEdges& mut(long i, long j) { return e_.at({i, j}); }
    const Window& window() const { return window_; }

    static RawEdgeWeights from_weights(const WeightField& w, Window win) {
        RawEdgeWeights r(win);
        for (long i = win.i0; i <= win.i1; ++i)
            for (long j = win.j0; j <= win.j1; ++j) r.set(i, j, {1, 1, w.a(i, j), w.b(i, j)});
        return r;
    }

    // Multiply the four edges of black (i,j) by g.
    void scale_black(long i, long j, const Rational& g) {
        auto& e = mut(i, j);
        e.nw *= g;
        e.sw *= g;
        e.ne *= g;
        e.se *= g;
    }

    // Multiply the edges at the white vertex (2i-1, 2k), which touches
    // nw of (i,k-1), sw of (i,k), ne of (i-1,k-1) and se of (i-1,k).
    void scale_white(long i, long k, const Rational& g) {
        auto hit = [&](long bi, long bj, Rational BlackEdges::*edge) {
            if (window_.contains(bi, bj)) mut(bi, bj).*edge *= g;
        };
        hit(i, k - 1, &BlackEdges::nw);
        hit(i, k, &BlackEdges::sw);
        hit(i - 1, k - 1, &BlackEdges::ne);
        hit(i - 1, k, &BlackEdges::se);
    }

private:
    Window window_{0, 0, 0, 1};
    std::map<std::pair<long, long>, BlackEdges> e_;
};

inline FaceField faces_from_raw(const RawEdgeWeights& r) {
    const Window& x = r.window();
    FaceField f;
    for (long i = x.i0; i < x.i1; ++i)
        for (long j = x.j0; j <= x.j1; ++j) {
            const auto &w = r.at(i, j), &e = r.at(i + 1, j);
            f.set(2 * i, j, w.ne * e.sw / (w.se * e.nw));
            if (j < x.j1) {
                const auto &s = r.at(i + 1, j), &n = r.at(i + 1, j + 1);
                f.set(2 * i + 1, j, n.se * s.nw / (n.sw * s.ne));
            }
        }
    return f;
}

// Sweep columns left to right and rows bottom to top. At black (i,j) rescale
// the black so its south-west edge is 1, then rescale the white above-left
// of it so the north-west edge is 1. Whites at x = 2i-1 are only shared with
// column i-1 through its east edges, which stay free.
inline WeightField gauge_normalize(const RawEdgeWeights& raw) {
    RawEdgeWeights r = raw;
    const Window& x = r.window();
    for (long i = x.i0; i <= x.i1; ++i)
        for (long j = x.j0; j <= x.j1; ++j) {
            r.scale_black(i, j, 1 / Rational(r.at(i, j).sw));
            r.scale_white(i, j + 1, 1 / Rational(r.at(i, j).nw));
        }
    return WeightField::window(x, [&](long i, long j) { return std::make_pair(r.at(i, j).ne, r.at(i, j).se); });
}

// ---------------------------------------------------------------------------
// decay assumption

struct AssumptionReport {
    bool ok = true;
    double R = 0;
    double rho = 0;
    Rational delta1, delta2;
    std::string violation;  // witness when !ok
};

// Periodic fields: the exact criterion prod_j a/b < 1 per column and
// rho = max_i (prod)^{1/p}. Windowed fields: the finite sup over the window
// as an estimate of the same two constants.
inline AssumptionReport check_assumption(const WeightField& w, long col_lo, long col_hi) {
    AssumptionReport rep;
    bool first = true;
    auto track_delta = [&](const Rational& s) {
        if (first) {
            rep.delta1 = rep.delta2 = s;
            first = false;
        } else {
            if (s < rep.delta1) rep.delta1 = s;
            if (s > rep.delta2) rep.delta2 = s;
        }
    };

    if (w.is_periodic()) {
        const long p = w.periodicity()->p;
        double rho = 0;
        for (long i = col_lo; i <= col_hi; ++i) {
            Rational prod = 1;
            for (long j = 0; j < p; ++j) {
                prod *= w.a(i, j) / w.b(i, j);
                track_delta(w.a(i, j) + w.b(i, j));
            }
            if (prod >= 1) {
                rep.ok = false;
                std::ostringstream os;
                os << "column " << i << ": product of a/b over one period is " << to_string(prod) << " >= 1";
                rep.violation = os.str();
                return rep;
            }
            rho = std::max(rho, std::pow(prod.get_d(), 1.0 / double(p)));
        }
        double R = 1;
        for (long i = col_lo; i <= col_hi; ++i)
            for (long j = 0; j < p; ++j) {
                double part = 1;
                for (long r = 1; r <= p; ++r) {
                    part *= Rational(w.a(i, j + r - 1) / w.b(i, j + r - 1)).get_d();
                    R = std::max(R, part / std::pow(rho, double(r)));
                }
            }
        rep.rho = rho;
        rep.R = R;
        return rep;
    }

    const Window& x = w.window_extent();
    double rho = 0;
    for (long i = col_lo; i <= col_hi; ++i) {
        for (long j = x.j0; j <= x.j1; ++j) track_delta(w.a(i, j) + w.b(i, j));
        // full-height product gives the per-step rate estimate
        Rational prod = 1;
        for (long j = x.j0; j <= x.j1; ++j) prod *= w.a(i, j) / w.b(i, j);
        if (prod >= 1) {
            rep.ok = false;
            std::ostringstream os;
            os << "column " << i << ": product of a/b over rows " << x.j0 << ".." << x.j1 << " is "
               << to_string(prod) << " >= 1";
            rep.violation = os.str();
            return rep;
        }
        rho = std::max(rho, std::pow(prod.get_d(), 1.0 / double(x.height())));
    }
    double R = 1;
    for (long i = col_lo; i <= col_hi; ++i)
        for (long j = x.j0; j <= x.j1; ++j) {
            double part = 1;
            for (long k = 1; j + k - 1 <= x.j1; ++k) {
                part *= Rational(w.a(i, j + k - 1) / w.b(i, j + k - 1)).get_d();
                R = std::max(R, part / std::pow(rho, double(k)));
            }
        }
    rep.rho = rho;
    rep.R = R;
    return rep;
}

// ---------------------------------------------------------------------------
// random fields for property tests

inline Rational random_rational(std::mt19937_64& rng, long max_num = 5, long max_den = 3) {
    std::uniform_int_distribution<long> num(1, max_num), den(1, max_den);
    long p = num(rng), q = den(rng);
    Rational r(p, q);
    r.canonicalize();
    return r;
}

inline WeightField random_window_field(std::mt19937_64& rng, Window w, long max_num = 5, long max_den = 3) {
    return WeightField::window(w, [&](long, long) {
        Rational a = random_rational(rng, max_num, max_den);
        Rational b = random_rational(rng, max_num, max_den);
        return std::make_pair(a, b);
    });
}

inline WeightField random_periodic_field(std::mt19937_64& rng, Periodic per, long max_num = 5, long max_den = 3) {
    return WeightField::periodic(per, [&](long, long) {
        Rational a = random_rational(rng, max_num, max_den);
        Rational b = random_rational(rng, max_num, max_den);
        return std::make_pair(a, b);
    });
}

}  // namespace aztec
