#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rocp/rng.hpp"
#include "rocp/window.hpp"

using rocp::Boundary;
using rocp::Err;
using rocp::Error;
using rocp::MixingRegime;
using rocp::ScoreRecord;

namespace {

std::vector<ScoreRecord> records_of(const std::vector<double>& scores) {
    std::vector<ScoreRecord> out;
    for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({i + 1, 1, scores[i], {}});
    return out;
}

}  // namespace

TEST_CASE("make_grid spans the anchored ratio range") {
    const auto grid = rocp::make_grid(471, 1.0);
    REQUIRE(grid.candidates.size() > 10);
    REQUIRE(grid.candidates.front() == 6);   // 0.1 * 60.5
    REQUIRE(grid.candidates.back() == 242);  // 4.0 * 60.5
    for (std::size_t i = 1; i < grid.candidates.size(); ++i)
        REQUIRE(grid.candidates[i] > grid.candidates[i - 1]);
}

TEST_CASE("make_grid degenerate and clamped cases") {
    // lo = hi = 1 collapses to the anchor itself
    const auto single = rocp::make_grid(1000, 1.0, 2, 1.0, 1.0);
    REQUIRE(single.candidates == std::vector<std::size_t>{100});

    // tiny T clamps at 1 on the low end but stays valid
    const auto tiny = rocp::make_grid(4, 1.0);
    REQUIRE(tiny.candidates.front() == 1);
    REQUIRE(tiny.candidates.size() >= 2);

    try {
        rocp::make_grid(4, 1.0, 1, 0.2, 0.2);
        FAIL("expected DegenerateGrid");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::DegenerateGrid);
    }
}

TEST_CASE("make_grid candidates stay within the ratio bounds") {
    rocp::Rng rng(55);
    for (int rep = 0; rep < 50; ++rep) {
        const auto T = static_cast<std::size_t>(rng.uniform(10.0, 5000.0));
        const double beta = rng.uniform(0.3, 2.0);
        const auto grid = rocp::make_grid(T, beta);
        const double anchor = std::pow(static_cast<double>(T), 2.0 * beta / (2.0 * beta + 1.0));
        REQUIRE(static_cast<double>(grid.candidates.front()) >= std::max(1.0, 0.1 * anchor - 1.0));
        REQUIRE(static_cast<double>(grid.candidates.back()) <= 4.0 * anchor + 1.0);
    }
}

TEST_CASE("select_window breaks ties toward smaller m") {
    // constant scores make every candidate's Winkler identical
    const auto recs = records_of(std::vector<double>(40, 1.0));
    rocp::WindowGrid grid;
    grid.candidates = {5, 10, 20};
    const auto sel = rocp::select_window(recs, grid, 0.1, {0.25, false});
    REQUIRE(sel.m_hat == 5);
    REQUIRE(sel.per_candidate.size() == 3);
    REQUIRE(sel.per_candidate[0].mean_winkler == sel.per_candidate[2].mean_winkler);
    REQUIRE(sel.at_boundary == Boundary::Lower);
}

TEST_CASE("select_window drops candidates exceeding the calibration fold") {
    const auto recs = records_of(std::vector<double>(30, 1.0));
    rocp::WindowGrid grid;
    grid.candidates = {5, 500};
    const auto sel = rocp::select_window(recs, grid, 0.1, {0.3, false});
    REQUIRE(sel.per_candidate.size() == 1);
    REQUIRE(sel.m_hat == 5);

    rocp::WindowGrid none;
    none.candidates = {500};
    try {
        rocp::select_window(recs, none, 0.1, {0.3, false});
        FAIL("expected InsufficientScores");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::InsufficientScores);
    }
}

TEST_CASE("select_window prefers long windows for iid scores") {
    int larger = 0;
    const int n_seeds = 20;
    for (int seed = 0; seed < n_seeds; ++seed) {
        rocp::Rng rng(900 + static_cast<std::uint64_t>(seed));
        std::vector<double> scores(2600);
        for (auto& s : scores) s = std::fabs(rng.normal());
        rocp::WindowGrid grid;
        grid.candidates = {10, 1000};
        const auto sel = rocp::select_window(records_of(scores), grid, 0.1, {0.3, false});
        if (sel.m_hat == 1000) ++larger;
    }
    REQUIRE(larger >= 14);  // ~70% of seeds
}

TEST_CASE("select_window prefers short windows across a variance break") {
    // variance doubles halfway: recent scores carry the relevant scale
    int shorter = 0;
    const int n_seeds = 20;
    const std::size_t n = 2000;
    for (int seed = 0; seed < n_seeds; ++seed) {
        rocp::Rng rng(1700 + static_cast<std::uint64_t>(seed));
        std::vector<double> scores(n);
        for (std::size_t i = 0; i < n; ++i)
            scores[i] = std::fabs(rng.normal()) * (i < n / 2 ? 1.0 : 2.0);
        rocp::WindowGrid grid;
        grid.candidates = {60, 1400};  // within vs beyond the stationary segment
        const auto sel = rocp::select_window(records_of(scores), grid, 0.1, {0.3, false});
        if (sel.m_hat == 60) ++shorter;
    }
    REQUIRE(shorter >= 16);  // >= 80% of seeds
}

TEST_CASE("select_window argmin is invariant to joint rescaling") {
    rocp::Rng rng(31337);
    std::vector<double> scores(800);
    for (auto& s : scores) s = std::fabs(rng.normal()) + 0.1;
    rocp::WindowGrid grid;
    grid.candidates = {20, 60, 180, 500};

    const auto base = rocp::select_window(records_of(scores), grid, 0.1, {0.3, false});
    std::vector<double> scaled = scores;
    for (auto& s : scaled) s *= 7.25;
    const auto after = rocp::select_window(records_of(scaled), grid, 0.1, {0.3, false});
    REQUIRE(base.m_hat == after.m_hat);
    for (std::size_t i = 0; i < base.per_candidate.size(); ++i)
        REQUIRE(after.per_candidate[i].mean_winkler ==
                Catch::Approx(7.25 * base.per_candidate[i].mean_winkler).epsilon(1e-12));
}

TEST_CASE("theoretical_window reproduces the published anchors") {
    REQUIRE(rocp::theoretical_window(471, 1.0, MixingRegime::ShortMemory) ==
            Catch::Approx(60.5).margin(0.1));
    REQUIRE(rocp::theoretical_window(517, 1.0, MixingRegime::ShortMemory) ==
            Catch::Approx(64.4).margin(0.1));
    REQUIRE(rocp::theoretical_window(6216, 1.0, MixingRegime::ShortMemory) ==
            Catch::Approx(338.1).margin(0.1));
    REQUIRE(rocp::theoretical_window(6451, 1.0, MixingRegime::ShortMemory) ==
            Catch::Approx(346.5).margin(0.1));
    REQUIRE(rocp::theoretical_window(7333, 1.0, MixingRegime::ShortMemory) ==
            Catch::Approx(377.4).margin(0.1));
}

TEST_CASE("theoretical_window regimes and guards") {
    // polynomial exponent continuity at a -> 1 approaches the short-memory rule
    const double short_rule = rocp::theoretical_window(5000, 1.0, MixingRegime::ShortMemory);
    const double near = rocp::theoretical_window(5000, 1.0, MixingRegime::Polynomial, 0.999);
    REQUIRE(near == Catch::Approx(short_rule).epsilon(0.01));

    try {
        rocp::theoretical_window(100, 1.0, MixingRegime::Polynomial, 1.5);
        FAIL("expected InvalidExponent");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::InvalidExponent);
    }
    try {
        rocp::theoretical_window(100, 2.0, MixingRegime::BoundaryMixing);
        FAIL("expected InvalidSpec");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::InvalidSpec);
    }

    // monotone in beta for fixed T >= 3
    double prev = 0.0;
    for (double beta : {0.2, 0.5, 1.0, 2.0, 5.0}) {
        const double w = rocp::theoretical_window(300, beta, MixingRegime::ShortMemory);
        REQUIRE(w > prev);
        prev = w;
    }
}

TEST_CASE("tradeoff_curve endpoints and minimiser") {
    // L = 0: strictly decreasing in m
    REQUIRE(rocp::tradeoff_curve(10, 1000, 1.0, 2.0, 0.0) >
            rocp::tradeoff_curve(100, 1000, 1.0, 2.0, 0.0));
    // Gamma = 0: strictly increasing in m
    REQUIRE(rocp::tradeoff_curve(10, 1000, 1.0, 0.0, 2.0) <
            rocp::tradeoff_curve(100, 1000, 1.0, 0.0, 2.0));

    // the discrete argmin matches the calculus stationary point within 1
    rocp::Rng rng(64);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t T = 500 + static_cast<std::size_t>(rng.uniform() * 3000);
        const double beta = rng.uniform(0.5, 2.0);
        const double gamma = rng.uniform(0.5, 3.0);
        const double l = rng.uniform(0.5, 3.0);
        std::size_t best_m = 1;
        double best_v = rocp::tradeoff_curve(1, T, beta, gamma, l);
        for (std::size_t m = 2; m <= T; ++m) {
            const double v = rocp::tradeoff_curve(m, T, beta, gamma, l);
            if (v < best_v) {
                best_v = v;
                best_m = m;
            }
        }
        const double stationary = rocp::tradeoff_minimizer(T, beta, gamma, l);
        REQUIRE(std::fabs(static_cast<double>(best_m) - stationary) <= 1.0);
    }
}

TEST_CASE("coverage_bound term checks") {
    rocp::BoundParams p;
    p.f_bar = p.f_under = 1.0;

    // all nuisance terms off: bound decays toward zero in m
    REQUIRE(rocp::coverage_bound(100000, 200000, 1.0, p) < 0.01);
    REQUIRE(rocp::coverage_bound(10, 200000, 1.0, p) >
            rocp::coverage_bound(10000, 200000, 1.0, p));

    // drift term isolation: III(2m)/III(m) = 2^beta
    for (double beta : {0.5, 1.0, 1.7}) {
        rocp::BoundParams with_l = p;
        with_l.l_drift = 0.8;
        const std::size_t m = 50, T = 100000;
        const double iii_m = rocp::coverage_bound(m, T, beta, with_l) -
                             rocp::coverage_bound(m, T, beta, p);
        const double iii_2m = rocp::coverage_bound(2 * m, T, beta, with_l) -
                              rocp::coverage_bound(2 * m, T, beta, p);
        REQUIRE(iii_2m / iii_m == Catch::Approx(std::pow(2.0, beta)).epsilon(1e-9));
    }

    try {
        rocp::coverage_bound(10, 100, 1.0, rocp::BoundParams{0.5, 1.0, 0, 0, 1, 0, 0});
        FAIL("expected InvalidDensityBounds");
    } catch (const Error& e) {
        REQUIRE(e.code() == Err::InvalidDensityBounds);
    }
}

TEST_CASE("coverage_bound minimiser matches a brute-force scan") {
    rocp::Rng rng(4096);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t T = 400 + static_cast<std::size_t>(rng.uniform() * 4000);
        const double beta = rng.uniform(0.6, 1.8);
        rocp::BoundParams p;
        p.f_under = rng.uniform(0.2, 1.0);
        p.f_bar = p.f_under * rng.uniform(1.0, 3.0);
        p.a_inf = rng.uniform(0.0, 2.0);
        p.l_drift = rng.uniform(0.3, 3.0);
        p.c_star = rng.uniform(0.1, 1.0);

        std::size_t best_m = 2;
        double best_v = rocp::coverage_bound(2, T, beta, p);
        for (std::size_t m = 3; m <= T; ++m) {
            const double v = rocp::coverage_bound(m, T, beta, p);
            if (v < best_v) {
                best_v = v;
                best_m = m;
            }
        }
        REQUIRE(best_m > 2);       // interior
        REQUIRE(best_m + 2 < T);   // unique interior minimum, not an edge artifact
        const std::size_t got = rocp::minimize_coverage_bound(T, beta, p);
        REQUIRE(std::llabs(static_cast<long long>(got) - static_cast<long long>(best_m)) <= 1);
    }
}
