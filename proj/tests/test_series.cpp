#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "rocp/series.hpp"

using rocp::Err;
using rocp::Error;
using rocp::ScoreRecord;
using rocp::SplitSpec;

namespace {

std::vector<ScoreRecord> make_records(std::size_t n) {
    std::vector<ScoreRecord> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({i + 1, 1, static_cast<double>(i), {}});
    return out;
}

}  // namespace

TEST_CASE("validate_series accepts well-formed input") {
    const auto ts = rocp::validate_series({1.0, 2.0, 3.0});
    REQUIRE(ts.size() == 3);
    REQUIRE(ts.values == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("validate_series rejects empty input") {
    try {
        rocp::validate_series(std::vector<double>{});
        FAIL("expected EmptySeries");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::EmptySeries);
    }
}

TEST_CASE("validate_series reports the contaminated position") {
    try {
        rocp::validate_series({1.0, std::numeric_limits<double>::quiet_NaN()});
        FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::NonFiniteValue);
        REQUIRE(e.index() == 2);  // 1-based
    }
    try {
        rocp::validate_series({std::numeric_limits<double>::infinity()});
        FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::NonFiniteValue);
        REQUIRE(e.index() == 1);
    }
}

TEST_CASE("validate_series checks timestamp monotonicity") {
    REQUIRE_NOTHROW(rocp::validate_series({1.0, 2.0}, {}, {}, std::vector<double>{0.0, 1.0}));
    try {
        rocp::validate_series({1.0, 2.0, 3.0}, {}, {}, std::vector<double>{0.0, 2.0, 2.0});
        FAIL("expected NonMonotoneTimestamps");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::NonMonotoneTimestamps);
        REQUIRE(e.index() == 3);
    }
}

TEST_CASE("validate_series is idempotent") {
    const auto ts = rocp::validate_series({4.0, 5.0, 6.0}, "abc", "Daily",
                                          std::vector<double>{1.0, 2.0, 3.0});
    const auto again = rocp::validate_series(ts);
    REQUIRE(again.values == ts.values);
    REQUIRE(again.id == ts.id);
    REQUIRE(again.freq_tag == ts.freq_tag);
    REQUIRE(again.timestamps == ts.timestamps);
}

TEST_CASE("split_scores uses the floor convention and keeps folds ordered") {
    const auto [cal, val] = rocp::split_scores(make_records(100), SplitSpec{0.6, 0.4});
    REQUIRE(cal.size() == 60);
    REQUIRE(val.size() == 40);
    REQUIRE(cal.back().origin < val.front().origin);

    const auto [cal7, val3] = rocp::split_scores(make_records(10), SplitSpec{0.7, 0.3});
    REQUIRE(cal7.size() == 7);
    REQUIRE(val3.size() == 3);
}

TEST_CASE("split_scores rejects degenerate folds") {
    try {
        rocp::split_scores(make_records(1), SplitSpec{0.5, 0.5});
        FAIL("expected InsufficientScores");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::InsufficientScores);
    }
}

TEST_CASE("split_scores never interleaves folds") {
    for (std::size_t n : {2u, 3u, 10u, 37u, 101u}) {
        for (double cf : {0.3, 0.5, 0.8}) {
            SplitSpec spec{cf, 1.0 - cf};
            std::vector<ScoreRecord> recs = make_records(n);
            try {
                const auto [cal, val] = rocp::split_scores(recs, spec);
                std::size_t max_cal = 0, min_val = recs.size() + 1;
                for (const auto& r : cal) max_cal = std::max(max_cal, r.origin);
                for (const auto& r : val) min_val = std::min(min_val, r.origin);
                REQUIRE(max_cal < min_val);
            } catch (const Error& e) {
                REQUIRE(e.code() == Err::InsufficientScores);
            }
        }
    }
}
