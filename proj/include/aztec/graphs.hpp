#pragma once

// Aztec diamond and tower Aztec diamond graphs with their vertex orderings,
// DR lattice paths, and brute-force enumeration oracles.
//
// Black vertices sit at (2i, 2j+1), white vertices at (2i-1, 2j). Every black
// has up to four neighbours: NW (-1,+1) and SW (-1,-1) with weight 1, NE
// (+1,+1) with weight a_{i,j} and SE (+1,-1) with weight b_{i,j}.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "weights.hpp"

namespace aztec {

struct Pt {
    long x = 0, y = 0;
    auto operator<=>(const Pt&) const = default;
};

inline std::string to_string(const Pt& p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

enum class GraphKind { Aztec, Tower };

struct Edge {
    std::size_t black;
    std::size_t white;
    Pt dir;  // white - black
    Rational weight;
};

// Both graph families share one representation. Vertex vectors are stored
// in the ordering of the graph, so index k holds the vertex with label k+1.
struct DimerGraph {
    GraphKind kind = GraphKind::Aztec;
    long n = 0;
    long p = 0;
    std::vector<Pt> whites, blacks;
    std::map<Pt, std::size_t> white_index, black_index;
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> black_edges;  // edge ids, sorted by white index

    std::size_t size() const { return whites.size(); }
    // Number of boundary vertices on each side of the Schur split.
    std::size_t split() const { return std::size_t(kind == GraphKind::Aztec ? n : n + p); }

    bool is_white(Pt v) const { return white_index.count(v) > 0; }
    bool is_black(Pt v) const { return black_index.count(v) > 0; }

    // Edge id joining black b and white w, or -1.
    long edge_between(std::size_t b, std::size_t w) const {
        for (std::size_t e : black_edges[b])
            if (edges[e].white == w) return long(e);
        return -1;
    }
};

// 1-based orderings, written exactly as the coordinate formulas.
inline Pt aztec_white(long n, long i) {
    if (i <= n) return {2 * i - 1, 0};
    return {2 * ((i - 1) % n) + 1, 2 * n + 2 - 2 * ((i - 1) / n)};
}

inline Pt aztec_black(long n, long i) {
    if (i <= n) return {0, 2 * i - 1};
    return {2 * ((i - 1) % n) + 2, 2 * n + 1 - 2 * ((i - 1) / n)};
}

inline Pt tower_white(long n, long p, long i) {
    if (i <= n + p) return {2 * n - 1, 2 - 2 * i};
    if (i <= 2 * n + p + n * n - 1) {
        long t = i - (n + p + 1);
        return {2 * (t % n) + 1, 2 * n - 2 * (t / n)};
    }
    long t = i - (n * n + p + 2 * n);
    return {2 * (t % (n - 1)) + 1, -2 - 2 * (t / (n - 1))};
}

inline Pt tower_black(long n, long p, long i) {
    if (i <= n + p) return {0, 2 * n + 1 - 2 * i};
    if (i <= n + p + n * n) {
        long t = i - (n + p + 1);
        return {2 * (t % n) + 2, 2 * n - 2 * (t / n) - 1};
    }
    long t = i - (n * n + n + p + 1);
    return {2 * (t % (n - 1)) + 2, -2 * (t / (n - 1)) - 1};
}

namespace detail {

inline const Pt kNW{-1, 1}, kSW{-1, -1}, kNE{1, 1}, kSE{1, -1};

inline long black_col(Pt b) { return b.x / 2; }
inline long black_row(Pt b) { return (b.y - 1) / 2; }

// Weight of the edge from black b in direction d. Only east edges need
// the weight field; missing weights for an existing edge are an extent error.
inline Rational edge_weight(const WeightField& w, Pt b, Pt d) {
    if (d.x < 0) return 1;
    long i = black_col(b), j = black_row(b);
    if (!w.has(i, j))
        throw ExtentError("weight field does not cover (" + std::to_string(i) + "," + std::to_string(j) +
                          ") needed by black vertex " + to_string(b));
    return d.y > 0 ? w.a(i, j) : w.b(i, j);
}

inline DimerGraph assemble(GraphKind kind, long n, long p, std::vector<Pt> whites, std::vector<Pt> blacks,
                           const std::function<Rational(Pt, Pt)>& weight) {
    DimerGraph g;
    g.kind = kind;
    g.n = n;
    g.p = p;
    g.whites = std::move(whites);
    g.blacks = std::move(blacks);
    for (std::size_t k = 0; k < g.whites.size(); ++k)
        if (!g.white_index.emplace(g.whites[k], k).second) throw MathError("duplicate white vertex in ordering");
    for (std::size_t k = 0; k < g.blacks.size(); ++k)
        if (!g.black_index.emplace(g.blacks[k], k).second) throw MathError("duplicate black vertex in ordering");
    g.black_edges.resize(g.blacks.size());
    for (std::size_t bi = 0; bi < g.blacks.size(); ++bi) {
        Pt b = g.blacks[bi];
        for (Pt d : {kNW, kSW, kNE, kSE}) {
            auto it = g.white_index.find({b.x + d.x, b.y + d.y});
            if (it == g.white_index.end()) continue;
            g.black_edges[bi].push_back(g.edges.size());
            g.edges.push_back({bi, it->second, d, weight(b, d)});
        }
        std::sort(g.black_edges[bi].begin(), g.black_edges[bi].end(),
                  [&](std::size_t e, std::size_t f) { return g.edges[e].white < g.edges[f].white; });
    }
    return g;
}

}  // namespace detail

inline DimerGraph build_aztec(long n, const WeightField& w) {
    if (n < 1) throw ConfigError("Aztec diamond size must be >= 1");
    std::vector<Pt> whites, blacks;
    for (long i = 1; i <= n * (n + 1); ++i) {
        whites.push_back(aztec_white(n, i));
        blacks.push_back(aztec_black(n, i));
    }
    return detail::assemble(GraphKind::Aztec, n, 0, std::move(whites), std::move(blacks),
                            [&](Pt b, Pt d) { return detail::edge_weight(w, b, d); });
}

// Aztec diamond with all four edge weights given per black vertex.
inline DimerGraph build_aztec(long n, const RawEdgeWeights& r) {
    if (n < 1) throw ConfigError("Aztec diamond size must be >= 1");
    std::vector<Pt> whites, blacks;
    for (long i = 1; i <= n * (n + 1); ++i) {
        whites.push_back(aztec_white(n, i));
        blacks.push_back(aztec_black(n, i));
    }
    return detail::assemble(GraphKind::Aztec, n, 0, std::move(whites), std::move(blacks), [&](Pt b, Pt d) {
        const BlackEdges& e = r.at(detail::black_col(b), detail::black_row(b));
        if (d == detail::kNW) return e.nw;
        if (d == detail::kSW) return e.sw;
        return d == detail::kNE ? e.ne : e.se;
    });
}

// The tower is taken as the induced subgraph on its vertex set: every
// diagonal adjacency between its white and black vertices is an edge.
inline DimerGraph build_tower(long n, long p, const WeightField& w) {
    if (n < 1) throw ConfigError("tower size must be >= 1");
    if (p < 0) throw ConfigError("corridor size must be >= 0");
    std::vector<Pt> whites, blacks;
    for (long i = 1; i <= n * (2 * n + p); ++i) {
        whites.push_back(tower_white(n, p, i));
        blacks.push_back(tower_black(n, p, i));
    }
    return detail::assemble(GraphKind::Tower, n, p, std::move(whites), std::move(blacks),
                            [&](Pt b, Pt d) { return detail::edge_weight(w, b, d); });
}

// ---------------------------------------------------------------------------
// tilings

struct Tiling {
    std::vector<std::size_t> match;  // black index -> white index
    friend bool operator==(const Tiling&, const Tiling&) = default;
    friend auto operator<=>(const Tiling&, const Tiling&) = default;
};

struct WeightedTiling {
    Tiling tiling;
    Rational weight;
};

inline Rational tiling_weight(const DimerGraph& g, const Tiling& t) {
    Rational w = 1;
    for (std::size_t b = 0; b < t.match.size(); ++b) {
        long e = g.edge_between(b, t.match[b]);
        if (e < 0) throw MathError("tiling uses a non-edge at black " + to_string(g.blacks[b]));
        w *= g.edges[std::size_t(e)].weight;
    }
    return w;
}

inline void validate_tiling(const DimerGraph& g, const Tiling& t) {
    if (t.match.size() != g.blacks.size()) throw MathError("tiling does not cover every black vertex");
    std::vector<bool> seen(g.whites.size(), false);
    for (std::size_t b = 0; b < t.match.size(); ++b) {
        if (t.match[b] >= g.whites.size() || seen[t.match[b]])
            throw MathError("tiling is not a bijection onto white vertices");
        seen[t.match[b]] = true;
        if (g.edge_between(b, t.match[b]) < 0) throw MathError("tiling uses a non-edge at black " + to_string(g.blacks[b]));
    }
}

// Bregman's bound on the number of perfect matchings.
inline double matching_bound(const DimerGraph& g) {
    double lg = 0;
    for (auto& es : g.black_edges) {
        double d = double(es.size());
        if (d == 0) return 0;
        lg += std::lgamma(d + 1) / d;
    }
    return std::exp(lg);
}

inline constexpr double kDefaultEnumerationLimit = double(1 << 24);

// All perfect matchings in lexicographic order of the match vector.
inline std::vector<WeightedTiling> enumerate_tilings(const DimerGraph& g, double limit = kDefaultEnumerationLimit) {
    const double bound = matching_bound(g);
    if (bound > limit) {
        std::ostringstream os;
        os << "enumeration refused: up to " << bound << " matchings exceeds the limit " << limit;
        throw CapacityError(os.str());
    }
    std::vector<WeightedTiling> out;
    const std::size_t N = g.blacks.size();
    std::vector<std::size_t> match(N);
    std::vector<bool> used(g.whites.size(), false);
    std::vector<Rational> partial(N + 1);
    partial[0] = 1;

    std::function<void(std::size_t)> rec = [&](std::size_t b) {
        if (b == N) {
            out.push_back({Tiling{match}, partial[N]});
            return;
        }
        for (std::size_t e : g.black_edges[b]) {
            std::size_t wi = g.edges[e].white;
            if (used[wi]) continue;
            used[wi] = true;
            match[b] = wi;
            partial[b + 1] = partial[b] * g.edges[e].weight;
            rec(b + 1);
            used[wi] = false;
        }
    };
    rec(0);
    return out;
}

inline Rational partition_function(const std::vector<WeightedTiling>& ts) {
    Rational z = 0;
    for (auto& t : ts) z += t.weight;
    return z;
}

// ---------------------------------------------------------------------------
// DR paths

// A DR step leaves a black vertex according to its dimer: SE gives a
// diagonal step (+2,-2) of weight b, NE a horizontal step (+2,0) of weight a,
// SW a down step (0,-2) of weight 1. NW dimers give no step.
struct DRStep {
    Pt to;
    Rational weight;
};

inline std::vector<DRStep> dr_steps(const DimerGraph& g, Pt v) {
    std::vector<DRStep> out;
    auto it = g.black_index.find(v);
    if (it == g.black_index.end()) return out;
    for (std::size_t e : g.black_edges[it->second]) {
        const Edge& ed = g.edges[e];
        if (ed.dir == detail::kSE) out.push_back({{v.x + 2, v.y - 2}, ed.weight});
        else if (ed.dir == detail::kNE) out.push_back({{v.x + 2, v.y}, ed.weight});
        else if (ed.dir == detail::kSW) out.push_back({{v.x, v.y - 2}, ed.weight});
    }
    return out;
}

// Weighted number of DR paths from start to end, by memoized recursion over
// the acyclic step graph (every step raises x - y).
inline Rational count_paths_dr(const DimerGraph& g, Pt start, Pt end) {
    std::map<Pt, Rational> memo;
    std::function<Rational(Pt)> go = [&](Pt v) -> Rational {
        if (v == end) return 1;
        if (v.x > end.x || v.y < end.y) return 0;
        auto it = memo.find(v);
        if (it != memo.end()) return it->second;
        Rational s = 0;
        for (auto& st : dr_steps(g, v)) s += st.weight * go(st.to);
        memo.emplace(v, s);
        return s;
    };
    return go(start);
}

inline std::vector<Pt> dr_starts(const DimerGraph& g) {
    std::vector<Pt> s;
    if (g.kind == GraphKind::Aztec)
        for (long i = 1; i <= g.n; ++i) s.push_back({0, 2 * i - 1});
    else
        for (long r = 1; r <= g.n + g.p; ++r) s.push_back({0, 2 * g.n + 1 - 2 * r});
    return s;
}

inline std::vector<Pt> dr_ends(const DimerGraph& g) {
    std::vector<Pt> s;
    if (g.kind == GraphKind::Aztec)
        for (long j = 1; j <= g.n; ++j) s.push_back({2 * j, -1});
    else
        for (long r = 1; r <= g.n + g.p; ++r) s.push_back({2 * g.n, 1 - 2 * r});
    return s;
}

// LGV matrix of DR path counts between the boundary starts and ends.
inline RationalMatrix lgv_matrix(const DimerGraph& g) {
    auto s = dr_starts(g), e = dr_ends(g);
    RationalMatrix W(s.size(), e.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < e.size(); ++j) W(i, j) = count_paths_dr(g, s[i], e[j]);
    return W;
}

struct Path {
    std::vector<Pt> vertices;
    Rational weight = 1;
};

struct PathSystem {
    std::vector<Path> paths;
    Rational weight() const {
        Rational w = 1;
        for (auto& p : paths) w *= p.weight;
        return w;
    }
};

// DR paths of a tiling. Each path starts at a boundary start and follows the
// step dictated by the dimer at every black vertex it visits.
inline PathSystem tiling_to_paths(const DimerGraph& g, const Tiling& t) {
    validate_tiling(g, t);
    PathSystem ps;
    std::set<Pt> ends;
    for (Pt e : dr_ends(g)) ends.insert(e);
    std::set<Pt> visited;
    for (Pt s : dr_starts(g)) {
        Path path;
        Pt v = s;
        path.vertices.push_back(v);
        while (!ends.count(v)) {
            auto it = g.black_index.find(v);
            if (it == g.black_index.end()) throw MathError("DR path left the graph at " + to_string(v));
            std::size_t b = it->second;
            const Edge& ed = g.edges[std::size_t(g.edge_between(b, t.match[b]))];
            Pt next;
            if (ed.dir == detail::kSE) next = {v.x + 2, v.y - 2};
            else if (ed.dir == detail::kNE) next = {v.x + 2, v.y};
            else if (ed.dir == detail::kSW) next = {v.x, v.y - 2};
            else throw MathError("DR path stuck at " + to_string(v) + " (north-west dimer)");
            path.weight *= ed.weight;
            v = next;
            path.vertices.push_back(v);
        }
        for (Pt x : path.vertices)
            if (!visited.insert(x).second) throw MathError("DR paths intersect at " + to_string(x));
        ps.paths.push_back(std::move(path));
    }
    return ps;
}

// ---------------------------------------------------------------------------
// paths on the transition graph
//
// Heights on the transition graph are integers; column 2i+1 is reached from
// column 2i at the same height (weight a_{i,h}) or one lower (weight b_{i,h}),
// and column 2i+2 is reached horizontally with any number of unit down steps
// afterwards. A path system is recorded by the lowest vertex of each path in
// each column: points[c][k] for column c and path k (top path first).

struct PointConfiguration {
    std::vector<std::vector<long>> points;  // (2n+1) columns x (n+p) paths
    Rational weight;
};

inline Rational transition_weight(const WeightField& w, long i, long from, long to) {
    if (to == from) return w.a(i, from);
    if (to == from - 1) return w.b(i, from);
    return 0;
}

// Lowest points of the path system attached to a tower tiling.
inline PointConfiguration tiling_to_points(const DimerGraph& g, const Tiling& t, const WeightField& w) {
    if (g.kind != GraphKind::Tower) throw ConfigError("transition-graph points are defined for tower tilings");
    PathSystem dr = tiling_to_paths(g, t);
    const long cols = 2 * g.n + 1;
    PointConfiguration pc;
    pc.points.assign(std::size_t(cols), std::vector<long>(dr.paths.size()));
    pc.weight = 1;
    for (std::size_t k = 0; k < dr.paths.size(); ++k) {
        std::vector<long> low(std::size_t(cols), 0);
        std::vector<bool> seen(std::size_t(cols), false);
        auto visit = [&](long c, long h) {
            if (!seen[std::size_t(c)] || h < low[std::size_t(c)]) low[std::size_t(c)] = h;
            seen[std::size_t(c)] = true;
        };
        const auto& vs = dr.paths[k].vertices;
        visit(0, (vs[0].y - 1) / 2);
        for (std::size_t s = 1; s < vs.size(); ++s) {
            Pt a = vs[s - 1], b = vs[s];
            long ha = (a.y - 1) / 2, hb = (b.y - 1) / 2;
            long c = a.x;  // even column of the black vertex
            if (b.x == a.x) {
                visit(c, hb);  // down step inside the even column
            } else {
                visit(c + 1, hb);
                visit(c + 2, hb);
                pc.weight *= transition_weight(w, c / 2, ha, hb);
            }
        }
        for (long c = 0; c < cols; ++c) {
            if (!seen[std::size_t(c)]) throw MathError("path does not visit every column");
            pc.points[std::size_t(c)][k] = low[std::size_t(c)];
        }
    }
    return pc;
}

// Independent enumeration of non-intersecting path systems on the
// transition graph from (0, n-k) to (2n, -k), k = 1..n+p.
inline std::vector<PointConfiguration> enumerate_point_configurations(long n, long p, const WeightField& w,
                                                                      std::size_t limit = 1u << 22) {
    const long N = n + p, cols = 2 * n + 1;
    std::vector<PointConfiguration> out;
    auto pts = std::vector<std::vector<long>>(std::size_t(cols), std::vector<long>(std::size_t(N)));
    for (long k = 1; k <= N; ++k) pts[0][std::size_t(k - 1)] = n - k;

    // Assign column c path by path, from the top path down.
    std::function<void(long, long, Rational)> rec = [&](long c, long k, Rational wt) {
        if (c == cols) {
            if (out.size() >= limit) throw CapacityError("path-system enumeration exceeded its limit");
            out.push_back({pts, wt});
            return;
        }
        if (k == N) {
            rec(c + 1, 0, wt);
            return;
        }
        auto& cur = pts[std::size_t(c)];
        const auto& prev = pts[std::size_t(c - 1)];
        const long floor_h = -(k + 1);  // path k+1 ends at height -(k+1)
        if (c % 2 == 1) {
            // odd column: same height or one lower; points strictly decreasing
            for (long d = 0; d <= 1; ++d) {
                long h = prev[std::size_t(k)] - d;
                if (h < floor_h) continue;
                if (k > 0 && h >= cur[std::size_t(k - 1)]) continue;
                Rational t = transition_weight(w, (c - 1) / 2, prev[std::size_t(k)], h);
                cur[std::size_t(k)] = h;
                rec(c, k + 1, wt * t);
            }
        } else {
            // even column: drop from the arrival height. The vertical segment
            // [h, arrival] must lie strictly below the previous path's segment.
            const long arrive = prev[std::size_t(k)];
            if (k > 0 && arrive >= cur[std::size_t(k - 1)]) return;
            const long lo = floor_h, hi = (c == cols - 1) ? floor_h : arrive;
            if (arrive < floor_h) return;
            for (long h = hi; h >= lo; --h) {
                cur[std::size_t(k)] = h;
                rec(c, k + 1, wt);
            }
        }
    };
    rec(1, 0, Rational(1));
    return out;
}

// ---------------------------------------------------------------------------
// export

inline std::string to_dot(const DimerGraph& g) {
    std::ostringstream os;
    os << "graph G {\n";
    for (std::size_t k = 0; k < g.whites.size(); ++k)
        os << "  w" << k + 1 << " [label=\"w" << k + 1 << " " << to_string(g.whites[k]) << "\", pos=\""
           << g.whites[k].x << "," << g.whites[k].y << "!\"];\n";
    for (std::size_t k = 0; k < g.blacks.size(); ++k)
        os << "  b" << k + 1 << " [label=\"b" << k + 1 << " " << to_string(g.blacks[k]) << "\", pos=\""
           << g.blacks[k].x << "," << g.blacks[k].y << "!\", style=filled];\n";
    for (auto& e : g.edges)
        os << "  b" << e.black + 1 << " -- w" << e.white + 1 << " [label=\"" << to_string(e.weight) << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace aztec
