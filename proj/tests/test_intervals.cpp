#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "quniq/error.hpp"
#include "quniq/intervals.hpp"

using namespace quniq;

TEST_CASE("normalization merges touching pieces") {
    const IntervalSet s({{3, 4}, {0, 1}, {1, 2}, {2.5, 3.5}, {7, 7}});
    REQUIRE(s.size() == 3);
    CHECK(s.intervals()[0] == Interval{0, 2});
    CHECK(s.intervals()[1] == Interval{2.5, 4});
    CHECK(s.intervals()[2] == Interval{7, 7});
    CHECK(s.measure() == 3.5);
    CHECK(s.contains(7.0));
    CHECK(s.contains(2.0));
    CHECK(!s.contains(2.2));
    CHECK(s.measure_in(1.5, 3.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(IntervalSet({{2, 1}}), Error);
}

TEST_CASE("set operations") {
    const IntervalSet a({{0, 2}, {4, 6}});
    const IntervalSet b({{1, 5}});
    const auto both = a.intersect(b);
    REQUIRE(both.size() == 2);
    CHECK(both.intervals()[0] == Interval{1, 2});
    CHECK(both.intervals()[1] == Interval{4, 5});
    CHECK(a.intersect(2.0, 4.0).measure() == 0.0);
    CHECK(a.translated(-1.0).intervals()[0] == Interval{-1, 1});
    CHECK(Interval{2, 4}.dilate(3.0) == Interval{0, 6});
}

TEST_CASE("parsing") {
    const auto s = IntervalSet::parse("# comment\n3 4\n\n  0 1   # trailing\n");
    CHECK(s.size() == 2);
    CHECK(IntervalSet::parse(s.to_text()).intervals() == s.intervals());
    CHECK(IntervalSet::parse("").empty());

    try {
        IntervalSet::parse("0 1\n2\n");
        FAIL("expected PARSE_ERROR");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(IntervalSet::parse("0 1 2\n"), Error);
    CHECK_THROWS_AS(IntervalSet::parse("a b\n"), Error);
    CHECK_THROWS_AS(IntervalSet::parse("2 1\n"), Error);

    // full precision survives a round-trip
    const IntervalSet third({{1.0 / 3.0, 2.0 / 3.0}});
    CHECK(IntervalSet::parse(third.to_text()).intervals()[0] == third.intervals()[0]);
}

TEST_CASE("Cantor sets") {
    const int digits[] = {0, 2};
    const auto k1 = cantor_set(3, digits, 1, 1.0);
    REQUIRE(k1.size() == 2);
    CHECK(k1.intervals()[0].hi == doctest::Approx(1.0 / 3.0));
    CHECK(k1.intervals()[1].lo == doctest::Approx(2.0 / 3.0));
    const auto k2 = cantor_set(3, digits, 2, 1.0);
    CHECK(k2.size() == 4);
    for (const auto& j : k2.intervals()) CHECK(j.length() == doctest::Approx(1.0 / 9.0));
    for (int k = 0; k <= 8; ++k) {
        CHECK(cantor_set(3, digits, k, 5.0).measure() == doctest::Approx(5.0 * std::pow(2.0 / 3.0, k)).epsilon(1e-12));
    }
    // adjacent digits merge into longer pieces
    const int run[] = {0, 1};
    CHECK(cantor_set(3, run, 2, 9.0).size() == 2);

    const auto idx = cantor_indices(3, digits, 2);
    CHECK(idx == std::vector<std::int64_t>{0, 2, 6, 8});
    const int bad[] = {0, 3};
    CHECK_THROWS_AS(cantor_set(3, bad, 1, 1.0), Error);
    CHECK_THROWS_AS(cantor_set(2, digits, 1, 1.0), Error);
}

TEST_CASE("minimum window measure matches brute force") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Interval> pieces;
        double x = 0.0;
        for (int i = 0; i < 8; ++i) {
            x += u(gen) * 2.0;
            const double len = u(gen);
            pieces.push_back({x, x + len});
            x += len;
        }
        const IntervalSet s(pieces);
        const double width = 0.5 + 2.0 * u(gen);
        const double exact = s.min_window_measure(width, 0.0, x);
        double brute = 1e300;
        for (int i = 0; i <= 20000; ++i) {
            const double a = (x - width) * i / 20000.0;
            brute = std::min(brute, s.measure_in(a, a + width));
        }
        CHECK(exact <= brute + 1e-12);
        CHECK(exact >= brute - 1e-3);  // the scan only samples the windows
    }
}
