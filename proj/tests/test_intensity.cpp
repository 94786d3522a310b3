#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ttsv/intensity.hpp"
#include "ttsv/sampling.hpp"

using namespace ttsv;

namespace {

double central_mean(const Curve& c, double lo, double hi) {
    double s = 0;
    int n = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double t = c.time_at(k);
        if (t >= lo && t <= hi) {
            s += c.value(k);
            ++n;
        }
    }
    return s / n;
}

}  // namespace

TEST_SUITE("intensity") {

TEST_CASE("single tick gives the kernel itself") {
    TickSeries t;
    t.times = {11700.0, 11700.5};
    t.log_prices = {0.0, 0.0};
    KernelSpec ks;
    ks.n_points = 391;
    ks.bandwidth = 500.0;
    const auto lam = estimate_lambda(t, ks);
    const double h = ks.bandwidth;
    const auto K = [&](double x) { return std::exp(-0.5 * x * x / (h * h)) / (h * std::sqrt(2 * std::numbers::pi)); };
    for (std::size_t k = 0; k < lam.size(); k += 13) {
        const double x = lam.time_at(k);
        CHECK(lam.value(k) == doctest::Approx(std::max(K(x - 11700.0) + K(x - 11700.5), 1e-12)).epsilon(1e-10));
    }
    TickSeries one;
    one.times = {5.0};
    one.log_prices = {0.0};
    CHECK_THROWS(estimate_lambda(one, ks));
}

TEST_CASE("mirror correction preserves mass") {
    RngStream rng(41, 0, Purpose::arrivals);
    TickSeries t;
    for (int i = 0; i < 3000; ++i) t.times.push_back(rng.uniform() * 23400.0);
    std::sort(t.times.begin(), t.times.end());
    t.log_prices.assign(t.times.size(), 0.0);
    KernelSpec ks;
    ks.n_points = 2341;
    CHECK(estimate_lambda(t, ks).integral() == doctest::Approx(3000.0).epsilon(1e-3));
    KernelSpec epa = ks;
    epa.kernel = Kernel::epanechnikov;
    CHECK(estimate_lambda(t, epa).integral() == doctest::Approx(3000.0).epsilon(1e-3));
    // Without reflection each edge loses rho * h / sqrt(2 pi) of mass.
    ks.mirror = false;
    const double lost = 2.0 * 3000.0 / 23400.0 * ks.bandwidth / std::sqrt(2.0 * M_PI);
    CHECK(estimate_lambda(t, ks).integral() == doctest::Approx(3000.0 - lost).epsilon(2e-3));
}

TEST_CASE("homogeneous intensity and constant tick variance are recovered") {
    const double c = 0.4, T = 23400.0, sc = 0.02;
    std::vector<double> lam_mean(391, 0.0), vs_mean(391, 0.0);
    std::size_t pooled = 0;
    int days = 0;
    while (pooled < 100000) {
        RngStream ra(42, days, Purpose::arrivals), rp(42, days, Purpose::prices);
        const auto lam = IntensityCurve::constant(0.0, T, 391, c);
        const auto arr = simulate_arrivals(lam, ra);
        const auto ticks = simulate_prices(arr, IntensityCurve::constant(0.0, T, 391, sc), 0.0, rp);
        const KernelSpec ks;
        const auto l = estimate_lambda(ticks, ks);
        const auto v = estimate_varsigma2(ticks, ks);
        for (std::size_t k = 0; k < 391; ++k) {
            lam_mean[k] += l.value(k);
            vs_mean[k] += v.value(k);
        }
        pooled += ticks.size();
        ++days;
    }
    for (auto& x : lam_mean) x /= days;
    for (auto& x : vs_mean) x /= days;
    CHECK(central_mean(Curve(0.0, T, lam_mean), 0.1 * T, 0.9 * T) == doctest::Approx(c).epsilon(0.05));
    CHECK(central_mean(Curve(0.0, T, vs_mean), 0.1 * T, 0.9 * T) == doctest::Approx(sc * sc).epsilon(0.10));
}

TEST_CASE("zero increments give the floor; product is the spot variance") {
    TickSeries t;
    for (int i = 0; i < 50; ++i) t.times.push_back(100.0 * i + 50.0);
    t.log_prices.assign(50, 1.0);
    const KernelSpec ks;
    const auto v = estimate_varsigma2(t, ks);
    for (double x : v.values()) CHECK(x == 1e-12);
    const auto l = estimate_lambda(t, ks);
    const auto s = multiply(l, v);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s.value(k) == l.value(k) * v.value(k));
}

TEST_CASE("noise-robust adjustment") {
    RngStream rng(43, 0);
    TickSeries t;
    for (int i = 0; i < 5000; ++i) {
        t.times.push_back(4.0 * i + 1.0);
        t.log_prices.push_back(0.01 * rng.normal());
    }
    // Pure i.i.d. noise: autocovariance recovers omega^2 and the adjusted
    // tick variance is near zero.
    CHECK(noise_variance_estimate(t) == doctest::Approx(1e-4).epsilon(0.1));
    KernelSpec ks;
    ks.noise_robust = true;
    const auto v = estimate_varsigma2(t, ks);
    KernelSpec raw;
    const auto w = estimate_varsigma2(t, raw);
    CHECK(central_mean(v, 2000, 21000) < 0.2 * central_mean(w, 2000, 21000));
}

TEST_CASE("rolling averages") {
    const auto c = IntensityCurve::constant(0.0, 1.0, 5, 2.0);
    const auto c3 = IntensityCurve::constant(0.0, 1.0, 5, 6.0);
    const std::vector<IntensityCurve> same{c, c, c};
    CHECK(rolling_average(same, 2).values()[2] == 2.0);
    const std::vector<IntensityCurve> two{c, c3};
    CHECK(rolling_average(two, 1).value(0) == 6.0);
    CHECK(rolling_average(two, 2).value(0) == 4.0);
    CHECK(rolling_average(two, 50).value(0) == 4.0);
    RollingEstimate r(2);
    r.push(c);
    r.push(c3);
    r.push(c3);
    CHECK(r.size() == 2);
    CHECK(r.average().value(3) == 6.0);
}

TEST_CASE("grids from estimated curves satisfy grid invariants") {
    const SimConfig cfg;
    const auto day = simulate_day(cfg, 4);
    const KernelSpec ks;
    const auto l = estimate_lambda(day.ticks_clean, ks);
    const auto v = estimate_varsigma2(day.ticks_clean, ks);
    for (std::size_t M : {13u, 78u, 390u}) {
        validate_grid(itts_grid(l, M), cfg.day_length);
        validate_grid(ibts_grid(multiply(l, v), M), cfg.day_length);
        validate_grid(rbts_grid(day.ticks_clean, v, M), cfg.day_length);
    }
}

}
