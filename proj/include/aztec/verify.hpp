#pragma once

// Executable acceptance checks. Each criterion returns a pass flag and a
// one-line detail; the acceptance binary and `aztec_cli verify` print them.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "boundary_inverse.hpp"
#include "dynamics.hpp"
#include "factorization.hpp"
#include "kasteleyn.hpp"
#include "periodic.hpp"

namespace aztec {

struct Check {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

namespace detail {

// Counts checks and keeps the first failure for the detail line.
struct Tally {
    long checked = 0, failed = 0;
    std::string first;
    void expect(bool ok, const std::string& what) {
        ++checked;
        if (ok) return;
        if (failed == 0) first = what;
        ++failed;
    }
    bool ok() const { return failed == 0 && checked > 0; }
    std::string summary() const {
        std::ostringstream os;
        os << checked << " checks";
        if (failed) os << ", " << failed << " failed, first: " << first;
        return os.str();
    }
};

inline Check timed(int id, std::string name, const std::function<std::pair<bool, std::string>()>& body) {
    Check c{id, std::move(name), false, {}, 0};
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto [ok, detail] = body();
        c.pass = ok;
        c.detail = std::move(detail);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

inline WeightField aztec_field(std::mt19937_64& rng, long n) { return random_window_field(rng, {0, n, 0, std::max(n, 1L)}); }

inline WeightField fixed_two_periodic() {
    // column 0: a = (1,1), b = (4,5); column 1: a = (1,2), b = (6,7)
    return WeightField::periodic({2, 2}, [](long i, long j) {
        static const long A[2][2] = {{1, 1}, {1, 2}}, B[2][2] = {{4, 5}, {6, 7}};
        return std::make_pair(Rational(A[i][j]), Rational(B[i][j]));
    });
}

inline WeightField slow_two_periodic() {
    // column 0: a = (1,2), b = (3,3); column 1: a = (2,1), b = (3,4)
    return WeightField::periodic({2, 2}, [](long i, long j) {
        static const long A[2][2] = {{1, 2}, {2, 1}}, B[2][2] = {{3, 3}, {3, 4}};
        return std::make_pair(Rational(A[i][j]), Rational(B[i][j]));
    });
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

}  // namespace detail

// |det K| is the partition function; the phase of det K against (-1)^floor((n+1)/2).
inline Check criterion_kasteleyn_count(std::uint64_t seed) {
    return detail::timed(1, "Kasteleyn determinant counts tilings, sign (-1)^floor((n+1)/2)", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally mag;
        for (long n = 1; n <= 3; ++n)
            for (int t = 0; t < 10; ++t) {
                auto g = build_aztec(n, detail::aztec_field(rng, n));
                auto d = exact_det(kasteleyn_aztec(g).K);
                mag.expect(axis_abs(d) == partition_function(enumerate_tilings(g)), "|det K| n=" + std::to_string(n));
            }
        std::string sign_detail;
        bool sign_ok = true;
        for (long n = 1; n <= 4; ++n) {
            auto d = exact_det(kasteleyn_aztec(build_aztec(n, WeightField::uniform({0, n, 0, n}))).K);
            auto ph = axis_phase(d);
            bool ok = ph && *ph == aztec_sign_formula(n);
            sign_ok = sign_ok && ok;
            sign_detail += " n=" + std::to_string(n) + ":" + (ph ? to_string(*ph) : "?") + (ok ? "" : "(want " + to_string(aztec_sign_formula(n)) + ")");
        }
        return std::make_pair(mag.ok() && sign_ok, "magnitude " + mag.summary() + "; phase" + sign_detail);
    });
}

inline Check criterion_aztec_bridge(std::uint64_t seed) {
    return detail::timed(2, "Schur complement bridge on the Aztec diamond", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        for (long n = 1; n <= 3; ++n)
            for (int rep = 0; rep < 3; ++rep) {
                auto g = build_aztec(n, detail::aztec_field(rng, n));
                auto s = schur_blocks(kasteleyn_aztec(g));
                auto W = lgv_matrix(g);
                for (long i = 1; i <= n; ++i)
                    for (long j = 1; j <= n; ++j) {
                        const auto& x = s.tildeW(std::size_t(i - 1), std::size_t(j - 1));
                        const auto& w = W(std::size_t(i - 1), std::size_t(j - 1));
                        t.expect(axis_abs(x) == w, "|tildeW| n=" + std::to_string(n));
                        t.expect(x == aztec_bridge_phase(i, j) * GaussianRational(w), "phase n=" + std::to_string(n));
                    }
                t.expect(axis_abs(exact_det(s.tildeW)) == determinant(W), "det n=" + std::to_string(n));
            }
        return std::make_pair(t.ok(), t.summary());
    });
}

inline Check criterion_tower_bridge(std::uint64_t seed) {
    return detail::timed(3, "Schur complement bridge on the tower", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        for (auto [n, p] : {std::pair{2L, 1L}, {2L, 2L}, {3L, 1L}}) {
            auto g = build_tower(n, p, random_window_field(rng, {0, n, -n - p - 1, n}));
            auto k = kasteleyn_tower(g);
            auto s = schur_blocks(k);
            std::string tag = " (n,p)=(" + std::to_string(n) + "," + std::to_string(p) + ")";
            t.expect(axis_abs(exact_det(s.tildeW)) == axis_abs(exact_det(k.K)), "det" + tag);
            auto W = lgv_matrix(g);
            for (long r = 1; r <= n + p; ++r)
                for (long c = 1; c <= n + p; ++c)
                    t.expect(GaussianRational(W(std::size_t(r - 1), std::size_t(c - 1))) ==
                                 tower_bridge_factor(n, r, c) * s.tildeW(std::size_t(r - 1), std::size_t(c - 1)),
                             "entry" + tag);
        }
        return std::make_pair(t.ok(), t.summary());
    });
}

inline Check criterion_shuffle_equals_hat(std::uint64_t seed) {
    return detail::timed(4, "domino shuffle equals the hat map on faces", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        for (int rep = 0; rep < 10; ++rep) {
            auto r = equivalence_report(random_window_field(rng, {0, 7, -3, 6}), 5);
            t.expect(r.ok && r.generations == 5, "windowed: " + r.witness);
        }
        for (int rep = 0; rep < 10; ++rep) {
            auto r = equivalence_report(random_periodic_field(rng, {2, 2}), 6);
            t.expect(r.ok && r.generations == 6, "two-periodic: " + r.witness);
        }
        return std::make_pair(t.ok(), t.summary() + " (10 windowed x 5 gens, 10 two-periodic x 6 gens)");
    });
}

inline Check criterion_operator_identities(std::uint64_t seed) {
    return detail::timed(5, "forward and reverse operator identities on [-6,6]", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        Interval win{-6, 6};
        for (int rep = 0; rep < 5; ++rep) {
            auto w = random_window_field(rng, {0, 3, -8, 8});
            for (long i = 0; i <= 1; ++i) {
                auto id = forward_identity(w, i, win);
                std::string why;
                t.expect(equal_on(id.lhs, id.rhs, win, win, &why), "forward " + why);
            }
            for (long i = 1; i <= 2; ++i) {
                auto id = reverse_identity(w, i, win);
                std::string why;
                t.expect(equal_on(id.lhs, id.rhs, win, win, &why), "reverse " + why);
            }
        }
        return std::make_pair(t.ok(), t.summary());
    });
}

inline Check criterion_factorization(std::uint64_t seed) {
    return detail::timed(6, "L1 U1 = U2 L2 = G on certified windows", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        long entries = 0;
        for (long n = 1; n <= 3; ++n)
            for (int rep = 0; rep < 3; ++rep) {
                Interval w{-7, 4};
                TransitionFamily f{n, random_window_field(rng, {0, n, -25, 15})};
                auto G = product_G(f, {w.lo - n, w.hi}).restrict(w, w);
                for (const Factorization& fac : {lu_decompose(f, w), ul_decompose(f, w)}) {
                    auto P = fac.order == FactorOrder::LU ? fac.L * fac.U : fac.U * fac.L;
                    long here = 0;
                    for (long i = w.lo; i <= w.hi; ++i)
                        for (long j = w.lo; j <= w.hi; ++j) {
                            if (!P.certified(i, j)) continue;
                            ++here;
                            t.expect(P(i, j) == G.exact(i, j), "n=" + std::to_string(n));
                        }
                    t.expect(here > 0, "no certified entries");
                    entries += here;
                }
            }
        return std::make_pair(t.ok(), t.summary() + " over " + std::to_string(entries) + " certified entries");
    });
}

inline Check criterion_approximate_inverse() {
    return detail::timed(7, "approximate inverse residual decays at rate ~ rho", [&] {
        TransitionFamily f{2, detail::slow_two_periodic()};
        std::vector<long> ps{4, 6, 8, 10, 12};
        std::vector<double> res;
        for (long p : ps) res.push_back(approximate_w_inverse(f, p, false).residual);
        bool decreasing = true;
        for (std::size_t k = 1; k < res.size(); ++k) decreasing = decreasing && res[k] < res[k - 1];
        double r = fit_geometric_rate(ps, res);
        double rho = check_assumption(f.w, 0, 1).rho;
        bool ok = decreasing && r >= rho / 2 && r <= 2 * rho;
        std::string d = "residuals";
        for (double x : res) d += " " + detail::fmt(x);
        d += "; fitted rate " + detail::fmt(r) + ", rho " + detail::fmt(rho);
        return std::make_pair(ok, d);
    });
}

inline Check criterion_limit_kernel() {
    return detail::timed(8, "limit kernel against the finite kernel at p = 20", [&] {
        TransitionFamily f{2, detail::fixed_two_periodic()};
        LimitKernel K(f, 1e-12, -1, 1);
        auto E = em_kernel_finite(f, 20);
        double worst = 0;
        long queries = 0;
        for (long m1 : {0, 1, 3})
            for (long m2 : {1, 2, 4})
                for (long x1 : {-1, 0, 1})
                    for (long x2 : {-1, 1}) {
                        KernelQuery q{m1, x1, m2, x2};
                        worst = std::max(worst, std::abs(to_double(K(q).value) - to_double(E(q))));
                        ++queries;
                    }
        return std::make_pair(worst < 1e-10 && queries >= 20,
                              std::to_string(queries) + " queries, max difference " + detail::fmt(worst));
    });
}

inline Check criterion_determinantal(std::uint64_t seed) {
    return detail::timed(9, "determinantal probabilities against enumeration", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        const long n = 2, p = 1;
        auto wf = random_window_field(rng, {0, n, -n - p - 4, n + 2});
        TransitionFamily f{n, wf};
        auto K = em_kernel_finite(f, p);
        auto cs = enumerate_point_configurations(n, p, wf);
        Rational Z = 0;
        for (auto& c : cs) Z += c.weight;
        t.expect(Z == determinant(K.W()), "det W is not the path partition function");
        for (auto& c : cs) {
            std::vector<std::pair<long, long>> pts;
            for (long m = 0; m <= 2 * n; ++m)
                for (long x : c.points[std::size_t(m)]) pts.push_back({m, x});
            RationalMatrix M(pts.size(), pts.size());
            for (std::size_t a = 0; a < pts.size(); ++a)
                for (std::size_t b = 0; b < pts.size(); ++b)
                    M(a, b) = K({pts[a].first, pts[a].second, pts[b].first, pts[b].second});
            t.expect(determinant(M) == c.weight / Z, "path system probability");
        }
        const long systems = long(cs.size());
        for (long m = 1; m <= 2; ++m) {
            auto g = build_aztec(m, detail::aztec_field(rng, m));
            auto k = kasteleyn_aztec(g);
            auto inv = exact_inverse(k.K);
            auto ts = enumerate_tilings(g);
            Rational Zt = partition_function(ts);
            for (auto& tl : ts) {
                std::vector<EdgeRef> es;
                for (std::size_t b = 0; b < tl.tiling.match.size(); ++b) es.push_back({b, tl.tiling.match[b]});
                t.expect(edge_probabilities(k, inv, es) == tl.weight / Zt, "tiling probability");
            }
            for (const Edge& e : g.edges) {
                Rational want = 0;
                for (auto& tl : ts)
                    if (tl.tiling.match[e.black] == e.white) want += tl.weight;
                t.expect(edge_probabilities(k, inv, {{e.black, e.white}}) == want / Zt, "edge probability");
            }
        }
        return std::make_pair(t.ok(), t.summary() + " (" + std::to_string(systems) + " path systems)");
    });
}

inline Check criterion_boundary_recurrence(std::uint64_t seed) {
    return detail::timed(10, "boundary recurrence against direct inverses", [&] {
        std::mt19937_64 rng(seed);
        detail::Tally t;
        for (long n = 1; n <= 4; ++n)
            for (int rep = 0; rep < 2; ++rep) {
                auto w = detail::aztec_field(rng, n);
                auto g = build_aztec(n, w);
                auto W = w_inverse_recurrence(w, n);
                t.expect(W == inverse(lgv_matrix(g)), "W^{-1} n=" + std::to_string(n));
                auto Kinv = exact_inverse(kasteleyn_aztec(g).K);
                for (long i = 1; i <= n; ++i)
                    for (long j = 1; j <= n; ++j)
                        t.expect(Kinv(std::size_t(i - 1), std::size_t(j - 1)) ==
                                     boundary_inverse_phase(i, j) * GaussianRational(W(std::size_t(i - 1), std::size_t(j - 1))),
                                 "K^{-1} boundary n=" + std::to_string(n));
            }
        for (long n = 1; n <= 3; ++n) {
            auto w = detail::aztec_field(rng, n);
            auto rec = run_boundary_recurrence(RawEdgeWeights::from_weights(w, aztec_black_window(n)), n);
            Rational below = 1;
            for (auto it = rec.frames.rbegin(); it != rec.frames.rend(); ++it) {
                Rational Z = partition_function(enumerate_tilings(build_aztec(it->size, it->raw)));
                t.expect(Z == it->delta_product * below, "Z chain size " + std::to_string(it->size));
                below = Z;
            }
        }
        return std::make_pair(t.ok(), t.summary());
    });
}

inline Check criterion_block_toeplitz(std::uint64_t seed) {
    return detail::timed(11, "block Toeplitz quadrature, multiplicativity, top kernel", [&] {
        std::mt19937_64 rng(seed);
        const long p = 3;
        auto w = random_periodic_field(rng, {1, p});
        std::vector<Rational> a, b;
        for (long r = 0; r < p; ++r) {
            a.push_back(w.a(0, r));
            b.push_back(w.b(0, r));
        }
        auto dev = [](const QuadratureResult& q, const RationalMatrix& ex) {
            double m = 0;
            for (std::size_t i = 0; i < ex.rows(); ++i)
                for (std::size_t j = 0; j < ex.cols(); ++j) m = std::max(m, std::abs(q.value(i, j) - ex(i, j).get_d()));
            return m;
        };
        Interval blocks{-3, 2};
        Interval x{p * blocks.lo, p * blocks.hi + p - 1};
        auto Phi = phi_operator([&](long j) { return w.a(0, j); }, [&](long j) { return w.b(0, j); }, x);
        double quad = std::max({dev(toeplitz_entries(symbol_phi(a, b), blocks, blocks), Phi.data()),
                                dev(toeplitz_entries(symbol_psi(p), blocks, blocks), psi_operator(x).data()),
                                dev(toeplitz_entries(symbol_s(p), blocks, blocks), WindowedOperator::shift(x, x, 1).data())});

        // products of consecutive transition symbols against windowed operator products
        const long q = 2;
        TransitionFamily f2{2, random_periodic_field(rng, {2, q})};
        auto syms = transition_symbols(f2);
        Interval mb{-4, 1};
        Interval mx{q * mb.lo, q * mb.hi + q - 1};
        Interval big{mx.lo - 12, mx.hi};
        double mult = 0;
        for (long from = 0; from < 4; ++from)
            for (long to = from + 1; to <= 4; ++to) {
                WindowedOperator P = WindowedOperator::identity(big);
                for (long m = from; m < to; ++m) {
                    if (m == 3) P = P * WindowedOperator::from_function(big, big, -2, kUnbounded, [](long, long) { return Rational(1); });
                    else P = P * f2.op(m, big);
                }
                mult = std::max(mult, dev(toeplitz_entries(symbol_product(syms, from, to, q), mb, mb), P.restrict(mx, mx).data()));
            }

        TransitionFamily f{2, detail::fixed_two_periodic()};
        auto wh = wiener_hopf_from_dynamics(f);
        auto fs = transition_symbols(f);
        QuadratureOptions opt;
        opt.epsilon = wh.epsilon;
        auto E = block_toeplitz_finite(f, 8);
        double kern = 0;
        for (long m1 : {0, 1, 2, 4})
            for (long m2 : {0, 1, 3, 4})
                for (long y1 : {-2, -1})
                    for (long y2 : {-2, -1}) {
                        auto k = appendix_b_kernel(fs, wh, {m1, y1, m2, y2}, KernelMode::Top, opt);
                        for (long j1 = 0; j1 < 2; ++j1)
                            for (long j2 = 0; j2 < 2; ++j2)
                                kern = std::max(kern, std::abs(k.value(std::size_t(j1), std::size_t(j2)) -
                                                               to_double(E({m1, 2 * y1 + j1, m2, 2 * y2 + j2}))));
                    }
        bool ok = quad < 1e-12 && mult < 1e-10 && kern < 1e-6;
        return std::make_pair(ok, "quadrature " + detail::fmt(quad) + ", products " + detail::fmt(mult) +
                                      ", top kernel vs N=8 " + detail::fmt(kern));
    });
}

inline Check criterion_uniform_sanity() {
    return detail::timed(12, "uniform weights give det W = 2^{n(n+1)/2}", [&] {
        detail::Tally t;
        for (long n = 1; n <= 4; ++n) {
            auto g = build_aztec(n, WeightField::uniform({0, n, 0, n}));
            Rational want(1L << (n * (n + 1) / 2));
            t.expect(determinant(lgv_matrix(g)) == want, "LGV n=" + std::to_string(n));
            if (n <= 3) t.expect(partition_function(enumerate_tilings(g)) == want, "enumeration n=" + std::to_string(n));
        }
        return std::make_pair(t.ok(), t.summary());
    });
}

inline std::vector<Check> run_acceptance(std::uint64_t seed) {
    return {criterion_kasteleyn_count(seed),     criterion_aztec_bridge(seed + 1),
            criterion_tower_bridge(seed + 2),    criterion_shuffle_equals_hat(seed + 3),
            criterion_operator_identities(seed + 4), criterion_factorization(seed + 5),
            criterion_approximate_inverse(),     criterion_limit_kernel(),
            criterion_determinantal(seed + 6),   criterion_boundary_recurrence(seed + 7),
            criterion_block_toeplitz(seed + 8),  criterion_uniform_sanity()};
}

// Equivalence checks at one Aztec size with one seeded weight field.
inline std::vector<Check> verify_size(long n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("verify needs n >= 1");
    std::mt19937_64 rng(seed);
    const auto w = detail::aztec_field(rng, n);
    const auto g = build_aztec(n, w);
    const auto k = kasteleyn_aztec(g);
    const bool enumerable = n <= 4;
    std::vector<Check> out;
    out.push_back(detail::timed(1, "|det K| equals det W (LGV)", [&] {
        return std::make_pair(axis_abs(exact_det(k.K)) == determinant(lgv_matrix(g)), std::string("n=") + std::to_string(n));
    }));
    if (enumerable)
        out.push_back(detail::timed(2, "|det K| equals the enumerated partition function", [&] {
            return std::make_pair(axis_abs(exact_det(k.K)) == partition_function(enumerate_tilings(g)), std::string("n=") + std::to_string(n));
        }));
    out.push_back(detail::timed(3, "tildeW = i^{i+j-1} W entrywise", [&] {
        auto s = schur_blocks(k);
        auto W = lgv_matrix(g);
        detail::Tally t;
        for (long i = 1; i <= n; ++i)
            for (long j = 1; j <= n; ++j)
                t.expect(s.tildeW(std::size_t(i - 1), std::size_t(j - 1)) ==
                             aztec_bridge_phase(i, j) * GaussianRational(W(std::size_t(i - 1), std::size_t(j - 1))),
                         "entry");
        return std::make_pair(t.ok(), t.summary());
    }));
    out.push_back(detail::timed(4, "block inverse equals direct inverse", [&] {
        return std::make_pair(inverse_kasteleyn_via_blocks(schur_blocks(k)) == exact_inverse(k.K), std::string("exact"));
    }));
    out.push_back(detail::timed(5, "boundary recurrence equals W^{-1} and propagates to K^{-1}", [&] {
        auto W = w_inverse_recurrence(w, n);
        bool ok = W == inverse(lgv_matrix(g)) && propagate_full_inverse(k, W) == exact_inverse(k.K);
        return std::make_pair(ok, std::string("exact"));
    }));
    out.push_back(detail::timed(6, "shuffle equals hat map for 5 generations", [&] {
        auto r = equivalence_report(random_window_field(rng, {0, n + 5, -3, n + 4}), 5);
        return std::make_pair(r.ok, r.ok ? std::string("5 generations") : r.witness);
    }));
    out.push_back(detail::timed(7, "LU and UL reproduce G", [&] {
        TransitionFamily f{n, random_window_field(rng, {0, n, -25, 15})};
        Interval win{-7, 4};
        auto G = product_G(f, {win.lo - n, win.hi}).restrict(win, win);
        detail::Tally t;
        for (const Factorization& fac : {lu_decompose(f, win), ul_decompose(f, win)}) {
            auto P = fac.order == FactorOrder::LU ? fac.L * fac.U : fac.U * fac.L;
            for (long i = win.lo; i <= win.hi; ++i)
                for (long j = win.lo; j <= win.hi; ++j)
                    if (P.certified(i, j)) t.expect(P(i, j) == G.exact(i, j), "entry");
        }
        return std::make_pair(t.ok(), t.summary());
    }));
    return out;
}

}  // namespace aztec
