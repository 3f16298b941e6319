#include <catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "rocp/calibration.hpp"
#include "rocp/rng.hpp"

using rocp::CalibrationSet;
using rocp::Err;
using rocp::Error;
using rocp::ScoreRecord;

namespace {

std::vector<ScoreRecord> records_with_scores(const std::vector<double>& scores,
                                             const std::vector<double>& sigmas = {}) {
    std::vector<ScoreRecord> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        ScoreRecord r{i + 1, 1, scores[i], {}};
        if (!sigmas.empty()) r.sigma = sigmas[i];
        out.push_back(r);
    }
    return out;
}

CalibrationSet cal_of(std::vector<double> scores, bool scaled = false) {
    return CalibrationSet{std::move(scores), scaled};
}

// Independent check of the inf definition: the smallest calibration value
// x such that (count of scores <= x) / m >= level.
double brute_force_quantile(std::vector<double> scores, double level) {
    std::sort(scores.begin(), scores.end());
    const auto m = static_cast<double>(scores.size());
    for (double x : scores) {
        double count = 0;
        for (double s : scores) count += (s <= x) ? 1.0 : 0.0;
        if (count / m >= level) return x;
    }
    return scores.back();
}

}  // namespace

TEST_CASE("take_window keeps the most recent records") {
    const auto recs = records_with_scores({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto cal = rocp::take_window(recs, 3);
    REQUIRE(cal.scores == std::vector<double>{7, 8, 9});
    REQUIRE_FALSE(cal.scaled);

    const auto full = rocp::take_window(recs, 10);
    REQUIRE(full.m() == 10);

    try {
        rocp::take_window(records_with_scores({1, 2, 3, 4, 5}), 6);
        FAIL("expected WindowTooLarge");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::WindowTooLarge);
    }
}

TEST_CASE("scale_window divides elementwise") {
    const auto recs = records_with_scores({2.0, 4.0}, {1.0, 2.0});
    const auto cal = rocp::scale_window(recs, 2);
    REQUIRE(cal.scaled);
    REQUIRE(cal.scores == std::vector<double>{2.0, 2.0});
}

TEST_CASE("scale_window with unit sigmas matches take_window") {
    const auto recs = records_with_scores({3, 1, 4, 1, 5}, {1, 1, 1, 1, 1});
    REQUIRE(rocp::scale_window(recs, 4).scores == rocp::take_window(recs, 4).scores);
}

TEST_CASE("scale_window requires sigma everywhere") {
    auto recs = records_with_scores({1, 2, 3}, {1, 1, 1});
    recs[1].sigma.reset();
    try {
        rocp::scale_window(recs, 3);
        FAIL("expected MissingSigma");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::MissingSigma);
        REQUIRE(e.index() == 2);
    }
}

TEST_CASE("empirical_quantile implements the inf definition") {
    const auto cal = cal_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    REQUIRE(rocp::empirical_quantile(cal, 0.9) == 9.0);
    REQUIRE(rocp::empirical_quantile(cal, 1.0) == 10.0);
    REQUIRE(rocp::empirical_quantile(cal_of({7.5}), 0.37) == 7.5);
    // ceil(0.5 * 4) = 2nd order statistic
    REQUIRE(rocp::empirical_quantile(cal_of({4, 3, 2, 1}), 0.5) == 2.0);
}

TEST_CASE("empirical_quantile conforms to a brute-force scan on random sets") {
    rocp::Rng rng(20250809);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 12);
        std::vector<double> scores(m);
        for (auto& s : scores) {
            s = rng.uniform() * 4.0;
            if (rng.uniform() < 0.3) s = std::floor(s);  // force ties
        }
        const double level = rng.uniform() * 0.999 + 0.001;
        const double got = rocp::empirical_quantile(cal_of(scores), level);
        REQUIRE(got == brute_force_quantile(scores, level));
    }
}

TEST_CASE("quantile monotonicity and equivariance") {
    rocp::Rng rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 30);
        std::vector<double> scores(m);
        for (auto& s : scores) s = rng.uniform() * 10.0;
        const double l1 = rng.uniform(0.05, 0.95);
        const double l2 = rng.uniform(l1, 1.0);
        const double q1 = rocp::empirical_quantile(cal_of(scores), l1);
        const double q2 = rocp::empirical_quantile(cal_of(scores), l2);
        REQUIRE(q1 <= q2);

        // scaling all scores by c > 0 scales the quantile by c
        const double c = rng.uniform(0.1, 5.0);
        std::vector<double> scaled = scores;
        for (auto& s : scaled) s *= c;
        REQUIRE(rocp::empirical_quantile(cal_of(scaled), l1) == Catch::Approx(c * q1).epsilon(1e-12));

        // appending a score above the quantile never decreases it
        std::vector<double> extended = scores;
        extended.push_back(q1 + 1.0);
        REQUIRE(rocp::empirical_quantile(cal_of(extended), l1) >= q1);
    }
}

TEST_CASE("rocp_interval is symmetric about the center") {
    const auto cal = cal_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const auto iv = rocp::rocp_interval(0.0, cal, 0.1);
    REQUIRE(iv.lower == -9.0);
    REQUIRE(iv.upper == 9.0);
    REQUIRE(iv.level == Catch::Approx(0.9));

    const auto zero = rocp::rocp_interval(5.0, cal_of({0, 0, 0}), 0.1);
    REQUIRE(zero.lower == 5.0);
    REQUIRE(zero.upper == 5.0);

    const auto half = rocp::rocp_interval(5.0, cal_of({1, 2, 3, 4}), 0.5);
    REQUIRE(half.lower == 3.0);
    REQUIRE(half.upper == 7.0);
}

TEST_CASE("rocp_interval rejects scaled sets") {
    try {
        rocp::rocp_interval(0.0, cal_of({1, 2}, true), 0.1);
        FAIL("expected ScaledSetRequiresSigma");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::ScaledSetRequiresSigma);
    }
}

TEST_CASE("vs_rocp_interval re-inflates by the current volatility") {
    const auto cal = cal_of({2, 2, 2, 2}, true);
    const auto iv = rocp::vs_rocp_interval(0.0, cal, 3.0, 0.1);
    REQUIRE(iv.lower == -6.0);
    REQUIRE(iv.upper == 6.0);

    // sigma_now = 1 matches the plain interval on the same values
    const auto plain = rocp::rocp_interval(1.0, cal_of({2, 2, 2, 2}), 0.1);
    const auto unit = rocp::vs_rocp_interval(1.0, cal, 1.0, 0.1);
    REQUIRE(unit.lower == plain.lower);
    REQUIRE(unit.upper == plain.upper);

    try {
        rocp::vs_rocp_interval(0.0, cal, 0.0, 0.1);
        FAIL("expected NonPositiveSigma");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::NonPositiveSigma);
    }
    try {
        rocp::vs_rocp_interval(0.0, cal_of({2, 2}), 1.0, 0.1);
        FAIL("expected SchemeMismatch");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::SchemeMismatch);
    }
}

TEST_CASE("exchangeable coverage matches the closed form") {
    // For iid continuous scores and a fresh test draw,
    // P(test <= qhat) = ceil((1-alpha) m) / (m+1) exactly.
    rocp::Rng rng(99);
    const std::size_t m = 40;
    const double alpha = 0.1;
    const int trials = 40000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> scores(m);
        for (auto& s : scores) s = std::fabs(rng.normal());
        const double q = rocp::empirical_quantile(cal_of(scores), 1.0 - alpha);
        hits += (std::fabs(rng.normal()) <= q) ? 1 : 0;
    }
    const double expected = std::ceil((1.0 - alpha) * m) / static_cast<double>(m + 1);
    const double p_hat = static_cast<double>(hits) / trials;
    const double se = std::sqrt(expected * (1.0 - expected) / trials);
    REQUIRE(std::fabs(p_hat - expected) <= 3.0 * se);
}

TEST_CASE("plus_one option uses the split-conformal rank") {
    const auto cal = cal_of({1, 2, 3, 4, 5, 6, 7, 8, 9});
    // ceil(0.9 * 10) = 9th order statistic of 9 scores
    REQUIRE(rocp::empirical_quantile(cal, 0.9, true) == 9.0);
    REQUIRE(rocp::empirical_quantile(cal, 0.9, false) == 9.0);
    const auto cal4 = cal_of({1, 2, 3, 4});
    REQUIRE(rocp::empirical_quantile(cal4, 0.5, true) == 3.0);   // ceil(2.5) = 3rd
    REQUIRE(rocp::empirical_quantile(cal4, 0.5, false) == 2.0);  // ceil(2.0) = 2nd
}
