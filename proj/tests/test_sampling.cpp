#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ttsv/sampling.hpp"

using namespace ttsv;

namespace {

TickSeries ticks_at(std::vector<double> times, double T) {
    TickSeries t;
    t.day_length = T;
    t.times = std::move(times);
    for (std::size_t i = 0; i < t.times.size(); ++i) t.log_prices.push_back(static_cast<double>(i + 1));
    return t;
}

std::vector<double> sizes(const TickSeries& t, const SamplingGrid& g) {
    return bin_tick_sums(t.times, std::vector<double>(t.size(), 1.0), g.taus);
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("generalized inverse of accumulators") {
    const Curve id(0.0, 1.0, {0.0, 0.25, 0.5, 0.75, 1.0});
    const auto g = grid_from_accumulated(id, 4);
    CHECK(g.taus == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

    const auto sq = Curve::from_function(0.0, 1.0, 200001, [](double t) { return t * t; });
    CHECK(grid_from_accumulated(sq, 2).taus[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

    // Flat on [0.4, 0.6] at level 0.5: the infimum is 0.4.
    const auto flat = Curve::from_function(0.0, 1.0, 11, [](double t) {
        if (t <= 0.4) return 0.5 * t / 0.4;
        if (t <= 0.6) return 0.5;
        return 0.5 + 0.5 * (t - 0.6) / 0.4;
    });
    CHECK(grid_from_accumulated(flat, 2).taus[1] == doctest::Approx(0.4));

    CHECK_THROWS_AS(grid_from_accumulated(Curve(0.0, 1.0, {0.0, 1.0, 0.5}), 2), std::invalid_argument);
}

TEST_CASE("calendar and intensity grids") {
    const auto g = cts_grid(23400.0, 78);
    for (std::size_t j = 0; j <= 78; ++j) CHECK(g.taus[j] == doctest::Approx(300.0 * j));
    validate_grid(g, 23400.0);

    const auto lam = IntensityCurve::constant(0.0, 23400.0, 391, 0.3);
    const auto it = itts_grid(lam, 78);
    for (std::size_t j = 0; j <= 78; ++j) CHECK(it.taus[j] == doctest::Approx(g.taus[j]).epsilon(1e-12));

    const auto spot = IntensityCurve::from_function(0.0, 23400.0, 391, [](double t) { return 1.0 + std::sin(t / 3000.0) * 0.8; });
    const auto ib = ibts_grid(spot, 26);
    validate_grid(ib, 23400.0);
    const double per = spot.integral() / 26.0;
    for (double x : bin_integrals(spot, ib.taus)) CHECK(std::abs(x - per) <= 1e-9 * spot.integral());

    // Constant varsigma: iBTS on varsigma^2 lambda equals iTTS on lambda.
    const auto lam2 = IntensityCurve::from_function(0.0, 23400.0, 391, [](double t) { return 1.0 + t / 23400.0; });
    const auto s2 = IntensityCurve::constant(0.0, 23400.0, 391, 4.0);
    const auto a = ibts_grid(multiply(s2, lam2), 13).taus;
    const auto b = itts_grid(lam2, 13).taus;
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-9));
}

TEST_CASE("rtts bin sizes") {
    const auto six = ticks_at({1, 2, 3, 4, 5, 6}, 10.0);
    CHECK(rtts_grid(six, 3).taus == std::vector<double>{0.0, 2.0, 4.0, 10.0});
    const auto seven = ticks_at({1, 2, 3, 4, 5, 6, 7}, 10.0);
    CHECK(sizes(seven, rtts_grid(seven, 3)) == std::vector<double>{3, 2, 2});
    const auto all = rtts_grid(seven, 7);
    CHECK(all.taus == std::vector<double>{0, 1, 2, 3, 4, 5, 6, 10});
    for (std::size_t N : {50u, 51u, 77u, 100u}) {
        std::vector<double> t;
        for (std::size_t i = 0; i < N; ++i) t.push_back(0.5 + static_cast<double>(i));
        const auto ts = ticks_at(t, 200.0);
        for (std::size_t M : {3u, 7u, 13u}) {
            const auto s = sizes(ts, rtts_grid(ts, M));
            CHECK(*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()) <= 1.0);
        }
    }
    CHECK_THROWS_AS(rtts_grid(six, 7), std::invalid_argument);
}

TEST_CASE("rbts hand computation and bound") {
    const auto t = ticks_at({1, 2, 3, 4}, 10.0);
    CHECK(rbts_grid(t, std::vector<double>{1, 3, 1, 3}, 2).taus == std::vector<double>{0.0, 2.0, 10.0});
    // Unit tick variance reproduces rTTS.
    const auto seven = ticks_at({1, 2, 3, 4, 5, 6, 7}, 10.0);
    CHECK(rbts_grid(seven, std::vector<double>(7, 1.0), 3).taus == rtts_grid(seven, 3).taus);

    RngStream rng(21, 0);
    std::vector<double> times, w;
    for (int i = 0; i < 400; ++i) {
        times.push_back(i + 0.5);
        w.push_back(0.1 + rng.uniform() * rng.uniform() * 5.0);
    }
    const auto ts = ticks_at(times, 400.0);
    double total = 0.0, wmax = 0.0;
    for (double x : w) {
        total += x;
        wmax = std::max(wmax, x);
    }
    for (std::size_t M : {5u, 17u, 40u}) {
        const auto g = rbts_grid(ts, w, M);
        validate_grid(g, 400.0);
        for (double b : bin_tick_sums(ts.times, w, g.taus)) CHECK(std::abs(b - total / M) <= wmax);
    }
}

TEST_CASE("threshold variants") {
    const auto seven = ticks_at({1, 2, 3, 4, 5, 6, 7}, 10.0);
    CHECK(rtts_threshold_grid(seven, 3).taus == std::vector<double>{0, 3, 6, 10});
    CHECK(rbts_threshold_grid(seven, std::vector<double>(7, 1.0), 2.0).taus == std::vector<double>{0, 2, 4, 6, 10});
}

TEST_CASE("previous-tick resampling") {
    const auto t = ticks_at({1, 2, 3, 4}, 10.0);
    CHECK(previous_tick_resample(t, std::vector<double>{1, 2, 3, 4}) == std::vector<double>{1, 2, 3, 4});
    CHECK(previous_tick_resample(t, std::vector<double>{3.5}) == std::vector<double>{3});
    CHECK(previous_tick_resample(t, std::vector<double>{0.5}, 7.0) == std::vector<double>{7});
    SamplingGrid g;
    g.taus = {0.0, 2.0, 2.5, 10.0};
    CHECK(returns_from_grid(t, g) == std::vector<double>{2.0, 0.0, 2.0});
}

TEST_CASE("coincident boundaries are merged") {
    // Total 13; levels 3.25, 6.5 and 9.75 all fall on the tick at 9.
    const auto t = ticks_at({1, 2, 3, 9}, 10.0);
    const auto g = rbts_grid(t, std::vector<double>{1, 1, 1, 10}, 4);
    validate_grid(g, 10.0);
    CHECK(g.taus == std::vector<double>{0.0, 9.0, 10.0});
    CHECK(g.merged == 2);
    CHECK(g.M() + g.merged == 4);
}

}
