#pragma once

// File formats and rendering.
//
// Weight-field files are JSON:
//   {"extent": {"type": "window", "i0": 0, "j0": -2}, "a": [[...], ...], "b": [[...], ...]}
//   {"extent": {"type": "periodic", "q": 2, "p": 3}, "a": [[...], ...], "b": [[...], ...]}
// with a[j - j0][i - i0] (rows are heights, columns are columns of the
// diamond). Entries are strings "p/q" or integers.
//
// Exact values render as strings; a Gaussian rational is {"re", "im"}.
// With floating output both become JSON numbers printed with up to
// kFloatPrecision significant digits.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "numerics.hpp"
#include "weights.hpp"

namespace aztec {

using Json = nlohmann::json;

inline constexpr int kFloatPrecision = 17;

struct Renderer {
    bool floating = false;

    Json operator()(const Rational& q) const {
        if (floating) return to_double(q);
        return to_string(q);
    }
    Json operator()(const GaussianRational& z) const { return Json{{"re", (*this)(z.re)}, {"im", (*this)(z.im)}}; }
    Json operator()(const Complex& z) const { return Json{{"re", z.real()}, {"im", z.imag()}}; }
    Json operator()(double x) const { return x; }

    template <class T>
    Json operator()(const Matrix<T>& m) const {
        Json rows = Json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < m.cols(); ++j) row.push_back((*this)(m(i, j)));
            rows.push_back(std::move(row));
        }
        return rows;
    }
};

// ---------------------------------------------------------------------------
// weight fields

namespace detail {

inline Rational json_rational(const Json& v, const std::string& where) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw ConfigError(where + ": weights must be \"p/q\" strings or integers");
}

inline long json_long(const Json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) throw ConfigError(std::string("extent needs integer '") + key + "'");
    return obj[key].get<long>();
}

}  // namespace detail

inline Json weights_to_json(const WeightField& w) {
    Json ext;
    long i0, j0, width, height;
    if (w.is_periodic()) {
        const Periodic& per = *w.periodicity();
        ext = {{"type", "periodic"}, {"q", per.q}, {"p", per.p}};
        i0 = 0, j0 = 0, width = per.q, height = per.p;
    } else {
        const Window& win = w.window_extent();
        ext = {{"type", "window"}, {"i0", win.i0}, {"j0", win.j0}};
        i0 = win.i0, j0 = win.j0, width = win.width(), height = win.height();
    }
    Json a = Json::array(), b = Json::array();
    for (long j = j0; j < j0 + height; ++j) {
        Json ra = Json::array(), rb = Json::array();
        for (long i = i0; i < i0 + width; ++i) {
            ra.push_back(to_string(w.a(i, j)));
            rb.push_back(to_string(w.b(i, j)));
        }
        a.push_back(std::move(ra));
        b.push_back(std::move(rb));
    }
    return {{"extent", ext}, {"a", a}, {"b", b}};
}

inline WeightField weights_from_json(const Json& doc) {
    if (!doc.is_object() || !doc.contains("extent") || !doc.contains("a") || !doc.contains("b"))
        throw ConfigError("weight file needs 'extent', 'a' and 'b'");
    const Json& ext = doc["extent"];
    const Json &a = doc["a"], &b = doc["b"];
    if (!a.is_array() || !b.is_array() || a.empty() || a.size() != b.size())
        throw ConfigError("'a' and 'b' must be nonempty arrays of equal height");
    const std::size_t height = a.size(), width = a[0].is_array() ? a[0].size() : 0;
    for (std::size_t r = 0; r < height; ++r)
        if (!a[r].is_array() || !b[r].is_array() || a[r].size() != width || b[r].size() != width || width == 0)
            throw ConfigError("weight rows must all have the same nonzero length");
    std::string type = ext.value("type", "");
    long i0 = 0, j0 = 0;
    if (type == "window") {
        i0 = detail::json_long(ext, "i0");
        j0 = detail::json_long(ext, "j0");
    } else if (type == "periodic") {
        if (detail::json_long(ext, "q") != long(width) || detail::json_long(ext, "p") != long(height))
            throw ConfigError("periodic extent does not match the array shape");
    } else {
        throw ConfigError("extent type must be 'window' or 'periodic'");
    }
    auto ab = [&](long i, long j) {
        const std::size_t r = std::size_t(j - j0), c = std::size_t(i - i0);
        std::string at = "weight (" + std::to_string(i) + "," + std::to_string(j) + ")";
        return std::make_pair(detail::json_rational(a[r][c], at), detail::json_rational(b[r][c], at));
    };
    if (type == "periodic") return WeightField::periodic({long(width), long(height)}, ab);
    return WeightField::window({i0, i0 + long(width) - 1, j0, j0 + long(height) - 1}, ab);
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline WeightField read_weights(const std::string& path) { return weights_from_json(read_json_file(path)); }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// CSV: one line per leaf, "path,row,col,value". Matrices (arrays of arrays
// of scalars) get row and column labels; Gaussian values print as re and im
// columns.

namespace detail {

inline std::string csv_scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

inline bool is_complex_leaf(const Json& v) { return v.is_object() && v.size() == 2 && v.contains("re") && v.contains("im"); }

inline bool is_scalar_leaf(const Json& v) { return v.is_primitive() || is_complex_leaf(v); }

inline void csv_cell(std::ostringstream& os, const std::string& path, const std::string& r, const std::string& c,
                     const Json& v) {
    os << path << ',' << r << ',' << c << ',';
    if (is_complex_leaf(v)) os << csv_scalar(v["re"]) << ',' << csv_scalar(v["im"]);
    else os << csv_scalar(v) << ',';
    os << '\n';
}

inline bool is_matrix(const Json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const Json& row : v) {
        if (!row.is_array()) return false;
        for (const Json& x : row)
            if (!is_scalar_leaf(x)) return false;
    }
    return true;
}

inline void csv_walk(std::ostringstream& os, const std::string& path, const Json& v) {
    if (is_scalar_leaf(v)) {
        csv_cell(os, path, "", "", v);
    } else if (is_matrix(v)) {
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v[i].size(); ++j) csv_cell(os, path, std::to_string(i), std::to_string(j), v[i][j]);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) csv_walk(os, path + "[" + std::to_string(i) + "]", v[i]);
    } else {
        for (auto it = v.begin(); it != v.end(); ++it) csv_walk(os, path.empty() ? it.key() : path + "." + it.key(), *it);
    }
}

}  // namespace detail

inline std::string to_csv(const Json& doc) {
    std::ostringstream os;
    os << "path,row,col,re,im\n";
    detail::csv_walk(os, "", doc);
    return os.str();
}

inline std::string to_json_text(const Json& doc) {
    // nlohmann prints doubles with round-trip precision, at most 17 digits
    return doc.dump(2) + "\n";
}

}  // namespace aztec
