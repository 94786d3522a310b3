#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ttsv/estimators.hpp"

using namespace ttsv;

TEST_SUITE("estimators") {

TEST_CASE("realized variance") {
    CHECK(rv(std::vector<double>{0.01, -0.02, 0.005}) == doctest::Approx(5.25e-4).epsilon(1e-12));
    CHECK(rv(std::vector<double>{}) == 0.0);
    CHECK(rv(std::vector<double>{0.3}) == doctest::Approx(0.09));
}

TEST_CASE("pre-averaging constants and edge cases") {
    const auto tri = PreAvgSpec::triangular(10);
    const auto num = PreAvgSpec::from_kernel(tri.g, 10);
    CHECK(num.g2 == doctest::Approx(1.0 / 12.0).epsilon(1e-6));
    CHECK(num.g2p == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(default_window(390) == 20);
    CHECK(default_window(1) == 2);
    CHECK(preavg_rv(std::vector<double>(100, 0.0), tri) == 0.0);
    CHECK_THROWS_AS(preavg_rv(std::vector<double>(15, 0.1), tri), std::invalid_argument);
}

TEST_CASE("pre-averaging removes pure noise on average") {
    const std::size_t M = 390;
    const auto spec = PreAvgSpec::triangular(default_window(M));
    const double omega = 0.01;
    double s = 0, s2 = 0;
    const int reps = 5000;
    for (int k = 0; k < reps; ++k) {
        RngStream rng(31, k, Purpose::noise);
        std::vector<double> v(M + 1), r(M);
        for (double& x : v) x = omega * rng.normal();
        for (std::size_t j = 0; j < M; ++j) r[j] = v[j + 1] - v[j];
        const double e = preavg_rv(r, spec);
        s += e;
        s2 += e * e;
    }
    const double mean = s / reps;
    const double se = std::sqrt((s2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean / se) < 3.0);
}

TEST_CASE("pre-averaging on noiseless returns is close to IV") {
    const std::size_t M = 2340;
    const auto spec = PreAvgSpec::triangular(default_window(M));
    double s = 0;
    const int reps = 2000;
    for (int k = 0; k < reps; ++k) {
        RngStream rng(32, k, Purpose::prices);
        std::vector<double> r(M);
        for (double& x : r) x = rng.normal() / std::sqrt(double(M));
        s += preavg_rv(r, spec);
    }
    // Block edges lose a small share of the signal: negative bias of a few percent.
    CHECK(s / reps == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("conditional MSE closed forms") {
    const std::vector<double> times{1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> c2(8, 0.04);
    const std::vector<double> taus{0.0, 2.5, 3.5, 10.0};
    // Constant varsigma: 2 c^4 sum N_j^2 with N = {2, 1, 5}.
    const MseInputs in{times, c2, nullptr, 0.5, 0.0};
    CHECK(conditional_mse(taus, in, {Conditioning::jump, Target::riv}) ==
          doctest::Approx(2 * 0.04 * 0.04 * (4 + 1 + 25)));
    const double riv = 8 * 0.04;
    CHECK(conditional_mse(taus, in, {Conditioning::jump, Target::iv}) ==
          doctest::Approx(2 * 0.04 * 0.04 * 30 + (riv - 0.5) * (riv - 0.5)));
    // Equal bins: 2 rIV^2 / M.
    const std::vector<double> even{0.0, 2.0, 4.0, 6.0, 10.0};
    CHECK(conditional_mse(even, in, {Conditioning::jump, Target::riv}) == doctest::Approx(2 * riv * riv / 4));

    const auto spot = IntensityCurve::constant(0.0, 10.0, 11, 0.2);
    const MseInputs ci{{}, {}, &spot, 2.0, 0.3};
    CHECK(conditional_mse(even, ci, {Conditioning::intensity, Target::riv}) ==
          doctest::Approx(2 * (0.16 + 0.16 + 0.16 + 0.64) + 2 * 0.3));
    CHECK(conditional_mse(even, ci, {Conditioning::intensity, Target::iv}) ==
          doctest::Approx(2 * (0.16 + 0.16 + 0.16 + 0.64) + 3 * 0.3));
    const MseInputs missing{times, {}, nullptr, 0.5, 0.0};
    CHECK_THROWS_AS(conditional_mse(taus, missing, {Conditioning::jump, Target::riv}), std::invalid_argument);
    CHECK_THROWS_AS(conditional_mse(taus, in, {Conditioning::intensity, Target::riv}), std::invalid_argument);
}

TEST_CASE("asymptotic variance of RV") {
    const auto lam = IntensityCurve::from_function(0.0, 1.0, 1001, [](double u) { return 1.0 + u; });
    const auto vs = IntensityCurve::from_function(0.0, 1.0, 1001, [](double u) { return 2.0 - u; });
    const auto spot = multiply(square(vs), lam);
    const double iv = spot.integral();
    const auto bts = spot.normalized(1.0);
    const AsymptoticInputs in{&bts, nullptr, &lam, &vs, 39.0};
    const auto v = asymptotic_variance_rv(in);
    CHECK(v.v_phi == doctest::Approx(2.0 / 39.0 * iv * iv).epsilon(1e-10));
    CHECK(v.iq == doctest::Approx(multiply(square(vs), spot).integral()));
    CHECK(v.total() == doctest::Approx(v.v_phi + v.iq));

    const auto mu = IntensityCurve::constant(0.0, 1.0, 1001, 2.0);
    const AsymptoticInputs with_mu{&bts, &mu, &lam, &vs, 39.0};
    CHECK(asymptotic_variance_rv(with_mu).v_mu == doctest::Approx(4.0 * multiply(square(vs), square(vs)).integral()));

    const auto one = IntensityCurve::constant(0.0, 1.0, 101, 1.0);
    const auto c2 = IntensityCurve::constant(0.0, 1.0, 101, 2.0);
    const auto flat_vs = IntensityCurve::constant(0.0, 1.0, 101, 0.5);
    const AsymptoticInputs flat{&one, nullptr, &c2, &flat_vs, 10.0};
    CHECK(asymptotic_variance_rv(flat).v_phi == doctest::Approx(2.0 / 10.0 * 0.25));
    const AsymptoticInputs unnormalized{&c2, nullptr, &c2, &flat_vs, 10.0};
    CHECK_THROWS_AS(asymptotic_variance_rv(unnormalized), std::invalid_argument);
}

TEST_CASE("pre-averaging asymptotic variance and optimal frequency") {
    const auto one = IntensityCurve::constant(0.0, 1.0, 101, 1.0);
    const auto spec = PreAvgSpec::triangular(10);
    const AsymptoticInputs in{&one, nullptr, &one, &one, 50.0};
    const auto a = asymptotic_variance_preavg(in, 1.0, 0.0, spec);
    CHECK(a.total() == doctest::Approx(a.eta2_a));
    const auto b = asymptotic_variance_preavg(in, 1.0, 1e-3, spec);
    const auto c = asymptotic_variance_preavg(in, 1.0, 2e-3, spec);
    CHECK(c.eta2_b == doctest::Approx(2 * b.eta2_b));
    CHECK(c.eta2_c == doctest::Approx(4 * b.eta2_c));
    CHECK_THROWS_AS(asymptotic_variance_preavg(in, 0.0, 1e-3, spec), std::invalid_argument);

    const double f1 = optimal_frequency(in, 1.0, 1e-3, spec);
    CHECK(f1 == doctest::Approx(spec.g2 / spec.g2p / 1e-3));
    CHECK(optimal_frequency(in, 1.0, 2e-3, spec) == doctest::Approx(f1 / 2));
    CHECK_THROWS_AS(optimal_frequency(in, 1.0, 0.0, spec), std::invalid_argument);

    // Grid search of delta * eta2_A + eta2_C / delta^3 over f.
    const auto lam = IntensityCurve::from_function(0.0, 1.0, 501, [](double u) { return 1.0 + 3 * u * u; });
    const double delta = 0.7, omega2 = 1e-4;
    const AsymptoticInputs base{&one, nullptr, &lam, &one, 1.0};
    const double fopt = optimal_frequency(base, delta, omega2, spec);
    double best_f = 0, best = 1e300;
    for (double f = fopt / 4; f < fopt * 4; f *= 1.001) {
        AsymptoticInputs x = base;
        x.frequency = f;
        const auto v = asymptotic_variance_preavg(x, delta, omega2, spec);
        const double obj = delta * v.eta2_a + v.eta2_c / (delta * delta * delta);
        if (obj < best) {
            best = obj;
            best_f = f;
        }
    }
    CHECK(best_f == doctest::Approx(fopt).epsilon(2e-3));
}

}
