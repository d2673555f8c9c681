// aztec_cli: batch front end. One subcommand per run; the output document is
// {"manifest": ..., "result": ...} as JSON or flattened CSV.
//
// Exit codes: 0 ok, 2 config, 3 math, 4 capacity, 5 I/O. Errors go to
// stderr as {"error": {"kind", "exit_code", "message"}}.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aztec/aztec.hpp"

using namespace aztec;

namespace {

struct RunConfig {
    std::string command;
    long n = 2;
    long p = 0;
    std::string weights_path;
    std::string periodic;  // "qxp"
    bool uniform = false;
    std::uint64_t seed = 1;
    double tol = 1e-12;
    double epsilon = 0;  // 0: half the gap to the nearest root of det phi, capped at 1/2
    long nodes = 64;
    std::string out;
    std::string format = "json";
    bool floating = false;
    std::vector<std::string> queries;
    // subcommand specific
    long steps = 4;
    std::string face;
    std::string mode = "top";
    long blocks = 0;
    std::string range = "-2:1";
    bool acceptance = false;
    bool full = false;
    bool no_inverse = false;
};

// Computations are single threaded; the variable is validated and echoed.
std::optional<long> requested_threads() {
    const char* v = std::getenv("AZTEC_THREADS");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    long t = std::strtol(v, &end, 10);
    if (*end != '\0' || t < 1) throw ConfigError(std::string("AZTEC_THREADS must be a positive integer, got '") + v + "'");
    return t;
}

std::vector<long> parse_longs(const std::string& s, char sep, std::size_t count, const std::string& what) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (part.empty() || used != part.size()) throw ConfigError("bad " + what + " '" + s + "'");
        out.push_back(v);
    }
    if (out.size() != count) throw ConfigError("bad " + what + " '" + s + "'");
    return out;
}

std::optional<Periodic> parse_periodic(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto v = parse_longs(s, 'x', 2, "--periodic (want qxp)");
    if (v[0] < 1 || v[1] < 1) throw ConfigError("--periodic periods must be positive");
    return Periodic{v[0], v[1]};
}

std::vector<KernelQuery> parse_queries(const RunConfig& cfg) {
    std::vector<KernelQuery> qs;
    for (const auto& s : cfg.queries) {
        auto v = parse_longs(s, ',', 4, "--query (want m1,x1,m2,x2)");
        qs.push_back({v[0], v[1], v[2], v[3]});
    }
    return qs;
}

// ---------------------------------------------------------------------------
// weight sources: file, then --uniform, then a seeded random field

struct Weights {
    WeightField field;
    std::string source;
};

Weights make_weights(const RunConfig& cfg, Window win, bool decaying = false) {
    auto per = parse_periodic(cfg.periodic);
    if (!cfg.weights_path.empty()) return {read_weights(cfg.weights_path), "file"};
    if (cfg.uniform) {
        if (per) return {WeightField::periodic(*per, [](long, long) { return std::make_pair(Rational(1), Rational(1)); }), "uniform-periodic"};
        return {WeightField::uniform(win), "uniform-window"};
    }
    std::mt19937_64 rng(cfg.seed);
    if (!decaying) {
        if (per) return {random_periodic_field(rng, *per), "random-periodic"};
        return {random_window_field(rng, win), "random-window"};
    }
    // first draw in the seeded stream that satisfies the decay assumption
    const Periodic use = per.value_or(Periodic{2, 2});
    for (int t = 0; t < 1000; ++t) {
        auto w = random_periodic_field(rng, use);
        if (check_assumption(w, 0, std::max(cfg.n - 1, 0L)).ok) return {w, "random-periodic-decaying"};
    }
    throw MathError("no random field satisfying the decay assumption in 1000 draws");
}

Window aztec_window(long n) { return {0, n, 0, std::max(n, 1L)}; }
Window tower_window(long n, long p) { return {0, n, -n - p - 1, n}; }

void require_n(const RunConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("--n must be >= 1");
    if (cfg.p < 0) throw ConfigError("--p must be >= 0");
}

Json pts(const std::vector<Pt>& v) {
    Json a = Json::array();
    for (const Pt& x : v) a.push_back({x.x, x.y});
    return a;
}

Json symbol_json(const MatrixSymbol& s, const Renderer& r) {
    Json num = Json::object();
    for (auto& [k, c] : s.numerator()) num[std::to_string(k)] = r(c);
    return {{"p", s.p()}, {"psi_power", s.psi_power()}, {"numerator", num}};
}

Json faces_json(const FaceField& f, const Renderer& r) {
    Json a = Json::array();
    for (auto& [key, v] : f.faces()) a.push_back({{"k", key.first}, {"j", key.second}, {"F", r(v)}});
    return a;
}

// ---------------------------------------------------------------------------
// subcommands

Json cmd_kasteleyn(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    const bool tower = cfg.p > 0;
    auto w = make_weights(cfg, tower ? tower_window(cfg.n, cfg.p) : aztec_window(cfg.n));
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    auto g = tower ? build_tower(cfg.n, cfg.p, w.field) : build_aztec(cfg.n, w.field);
    auto k = kasteleyn(g);
    GaussianRational det = exact_det(k.K);
    GaussianRational formula = tower ? tower_sign_formula(cfg.n, cfg.p) : aztec_sign_formula(cfg.n);
    auto phase = axis_phase(det);
    Json res{{"graph", tower ? "tower" : "aztec"},
             {"whites", pts(g.whites)},
             {"blacks", pts(g.blacks)},
             {"K", r(k.K)},
             {"det", r(det)},
             {"abs_det", r(axis_abs(det))},
             {"sign", phase ? r(*phase) : Json()},
             {"sign_formula", r(formula)},
             {"sign_matches_formula", phase && *phase == formula}};
    if (!cfg.no_inverse) res["K_inverse"] = r(exact_inverse(k.K));
    return res;
}

Json cmd_lgv(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    const bool tower = cfg.p > 0;
    auto w = make_weights(cfg, tower ? tower_window(cfg.n, cfg.p) : aztec_window(cfg.n));
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    auto g = tower ? build_tower(cfg.n, cfg.p, w.field) : build_aztec(cfg.n, w.field);
    auto W = lgv_matrix(g);
    return {{"graph", tower ? "tower" : "aztec"},
            {"starts", pts(dr_starts(g))},
            {"ends", pts(dr_ends(g))},
            {"W", r(W)},
            {"det", r(determinant(W))}};
}

Interval query_span(const std::vector<KernelQuery>& qs) {
    if (qs.empty()) return {0, -1};
    long lo = qs[0].x1, hi = qs[0].x1;
    for (auto& q : qs) {
        lo = std::min({lo, q.x1, q.x2});
        hi = std::max({hi, q.x1, q.x2});
    }
    return {lo - 1, hi + 1};
}

Json cmd_kernel_finite(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    auto qs = parse_queries(cfg);
    Interval win = em_window(cfg.n, cfg.p), extra = query_span(qs);
    if (extra.size() > 0) win = {std::min(win.lo, extra.lo), std::max(win.hi, extra.hi)};
    auto w = make_weights(cfg, {0, cfg.n, win.lo - 2, win.hi + 2});
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    TransitionFamily f{cfg.n, w.field};
    auto K = em_kernel_finite(f, cfg.p, extra);
    Json vals = Json::array();
    for (auto& q : qs) vals.push_back({{"m1", q.m1}, {"x1", q.x1}, {"m2", q.m2}, {"x2", q.x2}, {"value", r(K(q))}});
    return {{"W", r(K.W())}, {"det_W", r(determinant(K.W()))}, {"W_inverse", r(K.W_inverse())}, {"kernel", vals}};
}

Json cmd_kernel_limit(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    auto qs = parse_queries(cfg);
    if (qs.empty()) throw ConfigError("kernel-limit needs at least one --query");
    auto w = make_weights(cfg, {0, cfg.n, -cfg.n - 4, cfg.n + 4}, true);
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    TransitionFamily f{cfg.n, w.field};
    Interval span = query_span(qs);
    LimitKernel K(f, cfg.tol, span.lo + 1, span.hi - 1);
    std::optional<EMKernel> E;
    if (cfg.p > 0) E.emplace(em_kernel_finite(f, cfg.p, span));
    Json vals = Json::array();
    for (auto& q : qs) {
        auto v = K(q);
        Json row{{"m1", q.m1}, {"x1", q.x1}, {"m2", q.m2}, {"x2", q.x2}, {"value", r(v.value)}};
        if (E) {
            Rational fin = (*E)(q);
            row["finite_p"] = r(fin);
            row["difference"] = std::abs(to_double(v.value - fin));
        }
        vals.push_back(std::move(row));
    }
    return {{"rho", K.rho()}, {"envelope_constant", K.envelope_constant()}, {"truncation", K.truncation()}, {"kernel", vals}};
}

Json cmd_shuffle(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    if (cfg.steps < 0) throw ConfigError("--steps must be >= 0");
    const long s = cfg.steps;
    auto w = make_weights(cfg, {0, cfg.n + s, -s, cfg.n + s});
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    std::optional<std::vector<long>> face;
    if (!cfg.face.empty()) face = parse_longs(cfg.face, ',', 2, "--face (want k,j)");

    Json orbit = Json::array();
    ShuffleState st = ShuffleState::from_weights(w.field);
    long done = 0;
    std::string stopped;
    for (long g = 0;; ++g) {
        Json gen{{"generation", g}};
        if (face) gen["F"] = st.faces.has((*face)[0], (*face)[1]) ? r(st.faces((*face)[0], (*face)[1])) : Json();
        else gen["faces"] = faces_json(st.faces, r);
        orbit.push_back(std::move(gen));
        done = g;
        if (g == s) break;
        try {
            st = shuffle_step(st);
        } catch (const ExtentError& e) {
            stopped = e.what();
            break;
        }
    }
    auto rep = equivalence_report(w.field, done);
    Json res{{"generations", done}, {"orbit", orbit}, {"hat_map_agrees", rep.ok}};
    if (!rep.ok) res["hat_map_witness"] = rep.witness;
    if (!stopped.empty()) res["stopped"] = "window exhausted: " + stopped;
    if (w.field.is_periodic() && s > 0) {
        auto per = shuffle_period(ShuffleState::from_weights(w.field), s);
        res["period"] = per ? Json(*per) : Json();
    }
    return res;
}

Json checks_json(const std::vector<Check>& cs, long& failed) {
    Json a = Json::array();
    failed = 0;
    for (auto& c : cs) {
        // timings are left out so reruns are byte-identical
        a.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        failed += !c.pass;
    }
    return a;
}

Json cmd_verify(const RunConfig& cfg, const Renderer&, Json& man, long& failed) {
    man["suite"] = cfg.acceptance ? "acceptance" : "size";
    std::vector<Check> cs;
    if (cfg.acceptance) {
        cs = run_acceptance(cfg.seed);
    } else {
        require_n(cfg);
        cs = verify_size(cfg.n, cfg.seed);
        std::mt19937_64 rng(cfg.seed);
        man["weight_source"] = "random-window";
        man["weight_field"] = weights_to_json(random_window_field(rng, aztec_window(cfg.n)));
    }
    Json checks = checks_json(cs, failed);
    return {{"checks", checks}, {"passed", long(cs.size()) - failed}, {"total", cs.size()}, {"all_pass", failed == 0}};
}

Json cmd_toeplitz(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    auto w = make_weights(cfg, {0, cfg.n, -cfg.n - 4, cfg.n + 4}, true);
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    TransitionFamily f{cfg.n, w.field};
    if (!w.field.is_periodic()) throw ConfigError("toeplitz needs periodic weights (--periodic or a periodic file)");
    const long p = w.field.periodicity()->p;
    KernelMode mode;
    if (cfg.mode == "top") mode = KernelMode::Top;
    else if (cfg.mode == "bottom") mode = KernelMode::Bottom;
    else throw ConfigError("--mode must be top or bottom");
    auto rg = parse_longs(cfg.range, ':', 2, "--range (want lo:hi)");

    auto syms = transition_symbols(f);
    auto eta = symbol_eta(f);
    auto wh = wiener_hopf_from_dynamics(f);
    QuadratureOptions opt;
    opt.epsilon = cfg.epsilon > 0 ? cfg.epsilon : wh.epsilon;
    opt.nodes = cfg.nodes;
    opt.tol = cfg.tol;
    man["epsilon_used"] = opt.epsilon;

    Json sj = Json::array();
    for (auto& s : syms) sj.push_back(symbol_json(s, r));
    auto ent = toeplitz_entries(eta, {rg[0], rg[1]}, {rg[0], rg[1]}, opt);
    Json res{{"p", p},
             {"transition_symbols", sj},
             {"eta", symbol_json(eta, r)},
             {"eta_entries", {{"blocks", {rg[0], rg[1]}}, {"value", r(ent.value)}, {"nodes", ent.nodes}, {"accuracy", ent.accuracy}}},
             {"wiener_hopf",
              {{"plus", symbol_json(wh.plus, r)},
               {"minus", symbol_json(wh.minus, r)},
               {"tilde_plus", symbol_json(wh.tilde_plus, r)},
               {"tilde_minus", symbol_json(wh.tilde_minus, r)},
               {"r_star", wh.r_star},
               {"epsilon", wh.epsilon},
               {"sampled_error", wh.sampled_error}}}};

    auto qs = parse_queries(cfg);
    const long P = p * cfg.blocks;
    auto height = [&](long y, long j) { return mode == KernelMode::Top ? p * y + j : -P + p * y + j; };
    std::optional<EMKernel> E;
    if (cfg.blocks > 0 && !qs.empty()) {
        long lo = 0, hi = 0;
        for (auto& q : qs)
            for (long y : {q.x1, q.x2}) {
                lo = std::min(lo, height(y, 0));
                hi = std::max(hi, height(y, p - 1));
            }
        E.emplace(block_toeplitz_finite(f, cfg.blocks, {lo - 1, hi + 1}));
    }
    Json kern = Json::array();
    for (auto& q : qs) {
        auto k = appendix_b_kernel(syms, wh, {q.m1, q.x1, q.m2, q.x2}, mode, opt);
        Json row{{"m1", q.m1}, {"y1", q.x1}, {"m2", q.m2}, {"y2", q.x2}, {"value", r(k.value)}, {"nodes", k.nodes},
                 {"accuracy", k.accuracy}};
        if (E) {
            RationalMatrix fin(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
            double diff = 0;
            for (long j1 = 0; j1 < p; ++j1)
                for (long j2 = 0; j2 < p; ++j2) {
                    Rational v = (*E)({q.m1, height(q.x1, j1), q.m2, height(q.x2, j2)});
                    fin(std::size_t(j1), std::size_t(j2)) = v;
                    diff = std::max(diff, std::abs(k.value(std::size_t(j1), std::size_t(j2)) - to_double(v)));
                }
            row["finite_blocks"] = r(fin);
            row["difference"] = diff;
        }
        kern.push_back(std::move(row));
    }
    res["kernel"] = {{"mode", cfg.mode}, {"values", kern}};
    return res;
}

Json cmd_winv(const RunConfig& cfg, const Renderer& r, Json& man) {
    require_n(cfg);
    auto w = make_weights(cfg, aztec_window(cfg.n));
    man["weight_source"] = w.source;
    man["weight_field"] = weights_to_json(w.field);
    auto rec = run_boundary_recurrence(RawEdgeWeights::from_weights(w.field, aztec_black_window(cfg.n)), cfg.n);
    Json frames = Json::array();
    Rational Z = 1;
    for (auto& fr : rec.frames) {
        frames.push_back({{"size", fr.size}, {"delta_product", r(fr.delta_product)}, {"R", r(fr.R)}});
        Z *= fr.delta_product;
    }
    auto g = build_aztec(cfg.n, w.field);
    Json res{{"frames", frames},
             {"partition_function", r(Z)},
             {"W_inverse", r(rec.W_inverse)},
             {"boundary_K_inverse", r(boundary_kinv(rec.W_inverse))},
             {"matches_lgv_inverse", rec.W_inverse == inverse(lgv_matrix(g))}};
    if (cfg.full) res["K_inverse"] = r(propagate_full_inverse(kasteleyn_aztec(g), rec.W_inverse));
    return res;
}

// ---------------------------------------------------------------------------

Json manifest(const RunConfig& cfg) {
    auto threads = requested_threads();
    return {{"command", cfg.command},
            {"n", cfg.n},
            {"p", cfg.p},
            {"weights", cfg.weights_path.empty() ? Json() : Json(cfg.weights_path)},
            {"periodic", cfg.periodic.empty() ? Json() : Json(cfg.periodic)},
            {"uniform", cfg.uniform},
            {"seed", cfg.seed},
            {"tol", cfg.tol},
            {"epsilon", cfg.epsilon},
            {"nodes", cfg.nodes},
            {"format", cfg.format},
            {"float", cfg.floating},
            {"float_precision", kFloatPrecision},
            {"queries", cfg.queries},
            {"steps", cfg.steps},
            {"face", cfg.face},
            {"mode", cfg.mode},
            {"blocks", cfg.blocks},
            {"range", cfg.range},
            {"acceptance", cfg.acceptance},
            {"full", cfg.full},
            {"no_inverse", cfg.no_inverse},
            {"threads_requested", threads ? Json(*threads) : Json()},
            {"threads_used", 1}};
}

int fail(const char* kind, int code, const std::string& msg) {
    Json e{{"error", {{"kind", kind}, {"exit_code", code}, {"message", msg}}}};
    std::cerr << e.dump() << "\n";
    return code;
}

int run(const RunConfig& cfg) {
    if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("--format must be json or csv");
    if (cfg.nodes < 1 || !detail::power_of_two(cfg.nodes)) throw ConfigError("--nodes must be a power of two");
    if (!(cfg.tol > 0)) throw ConfigError("--tol must be positive");
    if (cfg.epsilon < 0) throw ConfigError("--epsilon must be >= 0");
    Renderer r{cfg.floating};
    Json man = manifest(cfg);
    Json res;
    long failed = 0;
    const std::string& c = cfg.command;
    if (c == "kasteleyn") res = cmd_kasteleyn(cfg, r, man);
    else if (c == "lgv") res = cmd_lgv(cfg, r, man);
    else if (c == "kernel-finite") res = cmd_kernel_finite(cfg, r, man);
    else if (c == "kernel-limit") res = cmd_kernel_limit(cfg, r, man);
    else if (c == "shuffle") res = cmd_shuffle(cfg, r, man);
    else if (c == "verify") res = cmd_verify(cfg, r, man, failed);
    else if (c == "toeplitz") res = cmd_toeplitz(cfg, r, man);
    else if (c == "winv") res = cmd_winv(cfg, r, man);
    else throw ConfigError("unknown command '" + c + "'");

    Json doc{{"manifest", man}, {"result", res}};
    std::string text = cfg.format == "csv" ? to_csv(doc) : to_json_text(doc);
    if (cfg.out.empty()) std::cout << text;
    else write_text(cfg.out, text);
    if (failed > 0) return fail("math", 3, std::to_string(failed) + " check(s) failed; see the report");
    return 0;
}

void add_common(CLI::App* s, RunConfig& cfg) {
    s->add_option("--n", cfg.n, "diamond size / number of columns")->capture_default_str();
    s->add_option("--p", cfg.p, "tower corridor or finite kernel p")->capture_default_str();
    s->add_option("--weights", cfg.weights_path, "weight-field JSON file");
    s->add_option("--periodic", cfg.periodic, "random periodic weights with periods qxp");
    s->add_flag("--uniform", cfg.uniform, "all weights equal to 1");
    s->add_option("--seed", cfg.seed, "seed for random weights")->capture_default_str();
    s->add_option("--tol", cfg.tol, "kernel truncation and quadrature tolerance")->capture_default_str();
    s->add_option("--epsilon", cfg.epsilon, "contour offset, 0 picks it from the symbol")->capture_default_str();
    s->add_option("--nodes", cfg.nodes, "starting quadrature node count")->capture_default_str();
    s->add_option("--out", cfg.out, "output file (default stdout)");
    s->add_option("--format", cfg.format, "json or csv")->capture_default_str();
    s->add_flag("--float", cfg.floating, "render exact values as decimals");
    s->add_option("--query", cfg.queries, "kernel query m1,x1,m2,x2 (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact dimer computations on Aztec diamonds"};
    app.require_subcommand(1);
    RunConfig cfg;
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"kasteleyn", "Kasteleyn matrix, determinant, sign and inverse"},
                        {"lgv", "DR path matrix and its determinant"},
                        {"kernel-finite", "Eynard-Mehta kernel at finite p"},
                        {"kernel-limit", "p -> infinity kernel from the LU factors"},
                        {"shuffle", "domino shuffle orbit of the face weights"},
                        {"verify", "run equivalence checks and report pass/fail"},
                        {"toeplitz", "block Toeplitz symbols, Wiener-Hopf factors and kernels"},
                        {"winv", "boundary recurrence for W^{-1}"}};
    for (const Sub& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        add_common(sc, cfg);
        sc->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
        std::string nm = s.name;
        if (nm == "kasteleyn") sc->add_flag("--no-inverse", cfg.no_inverse, "skip K^{-1}");
        if (nm == "shuffle") {
            sc->add_option("--steps", cfg.steps, "generations")->capture_default_str();
            sc->add_option("--face", cfg.face, "only the trajectory of face k,j");
        }
        if (nm == "verify") sc->add_flag("--acceptance", cfg.acceptance, "run the full acceptance suite");
        if (nm == "toeplitz") {
            sc->add_option("--mode", cfg.mode, "top or bottom")->capture_default_str();
            sc->add_option("--blocks", cfg.blocks, "finite N to compare kernels against, 0 for none")->capture_default_str();
            sc->add_option("--range", cfg.range, "block range lo:hi for symbol entries")->capture_default_str();
        }
        if (nm == "winv") sc->add_flag("--full", cfg.full, "also propagate to the full K^{-1}");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("config", 2, e.what());
    }
    try {
        return run(cfg);
    } catch (const ConfigError& e) {
        return fail("config", 2, e.what());
    } catch (const MathError& e) {
        return fail("math", 3, e.what());
    } catch (const CapacityError& e) {
        return fail("capacity", 4, e.what());
    } catch (const IoError& e) {
        return fail("io", 5, e.what());
    } catch (const std::exception& e) {
        return fail("internal", 1, e.what());
    }
}
