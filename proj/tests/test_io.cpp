#include <gtest/gtest.h>

#include <random>

#include "aztec/io.hpp"

using namespace aztec;

TEST(Io, WindowFieldRoundTrip) {
    std::mt19937_64 rng(1);
    auto w = random_window_field(rng, {-1, 2, -3, 1});
    Json j = weights_to_json(w);
    EXPECT_EQ(j["extent"]["type"], "window");
    EXPECT_EQ(j["a"].size(), 5u);     // heights
    EXPECT_EQ(j["a"][0].size(), 4u);  // columns
    EXPECT_EQ(weights_from_json(Json::parse(j.dump())), w);
}

TEST(Io, PeriodicFieldRoundTrip) {
    std::mt19937_64 rng(2);
    auto w = random_periodic_field(rng, {2, 3});
    EXPECT_EQ(weights_from_json(weights_to_json(w)), w);
}

TEST(Io, ReadsIntegersAndFractions) {
    auto w = weights_from_json(Json::parse(R"({"extent": {"type": "window", "i0": 0, "j0": 5},
                                               "a": [[1, "2/4"], [3, 4]], "b": [["1/3", 1], [1, 1]]})"));
    EXPECT_EQ(w.a(1, 5), Rational(1, 2));
    EXPECT_EQ(w.b(0, 5), Rational(1, 3));
    EXPECT_EQ(w.a(0, 6), Rational(3));
    EXPECT_EQ(w.window_extent().j1, 6);
}

TEST(Io, RejectsMalformedFields) {
    EXPECT_THROW(weights_from_json(Json::parse(R"({"a": [[1]], "b": [[1]]})")), ConfigError);
    EXPECT_THROW(weights_from_json(Json::parse(R"({"extent": {"type": "periodic", "q": 2, "p": 1}, "a": [[1]], "b": [[1]]})")),
                 ConfigError);
    EXPECT_THROW(weights_from_json(Json::parse(R"({"extent": {"type": "periodic", "q": 2, "p": 1}, "a": [[1, 1]], "b": [[1]]})")),
                 ConfigError);
    EXPECT_THROW(weights_from_json(Json::parse(R"({"extent": {"type": "periodic", "q": 1, "p": 1}, "a": [[0]], "b": [[1]]})")),
                 ConfigError);
    EXPECT_THROW(weights_from_json(Json::parse(R"({"extent": {"type": "periodic", "q": 1, "p": 1}, "a": [[1.5]], "b": [[1]]})")),
                 ConfigError);
}

TEST(Io, MissingFileIsAnIoError) {
    try {
        read_weights("/nonexistent/weights.json");
        FAIL() << "no exception";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/weights.json"), std::string::npos);
    }
}

TEST(Io, RenderExactAndFloat) {
    Renderer exact{false}, fl{true};
    EXPECT_EQ(exact(Rational(-3, 4)), Json("-3/4"));
    EXPECT_EQ(fl(Rational(-3, 4)), Json(-0.75));
    GaussianRational z(Rational(1, 2), Rational(-1));
    EXPECT_EQ(exact(z), Json({{"re", "1/2"}, {"im", "-1"}}));
    RationalMatrix m(1, 2);
    m(0, 1) = 5;
    EXPECT_EQ(exact(m), Json::parse(R"([["0", "5"]])"));
}

TEST(Io, CsvLabelsMatrixCells) {
    Renderer r{false};
    ExactMatrix K(1, 2);
    K(0, 0) = GaussianRational(Rational(0), Rational(1));
    K(0, 1) = 1;
    Json doc{{"result", {{"K", r(K)}, {"det", "7"}}}};
    EXPECT_EQ(to_csv(doc), "path,row,col,re,im\n"
                           "result.K,0,0,0,1\n"
                           "result.K,0,1,1,0\n"
                           "result.det,,,7,\n");
}
