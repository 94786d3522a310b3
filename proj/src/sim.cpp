#include "ttsv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ttsv {

void TickSeries::validate() const {
    if (log_prices.size() != times.size()) {
        throw std::invalid_argument("tick series: price and time lengths differ");
    }
    if (!true_varsigma.empty() && true_varsigma.size() != times.size()) {
        throw std::invalid_argument("tick series: varsigma and time lengths differ");
    }
    if (!(day_length > 0.0)) throw std::invalid_argument("tick series: day length must be positive");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > day_length) {
            throw std::invalid_argument("tick series: time outside [0, T]");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("tick series: times not strictly increasing");
        }
    }
    for (double s : true_varsigma) {
        if (!(s > 0.0)) throw std::invalid_argument("tick series: non-positive varsigma");
    }
}

OuPath ou_recursion(const OuSpec& spec, double x0, std::span<const double> eps) {
    if (spec.mean_reversion < 0.0 || spec.mean_reversion > 1.0) {
        throw std::invalid_argument("ou: mean reversion must lie in [0, 1]");
    }
    OuPath path;
    path.values.resize(eps.size() + 1);
    path.innovations.assign(eps.begin(), eps.end());
    const double keep = 1.0 - spec.mean_reversion;
    double x = x0;
    path.values[0] = x;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        x = keep * x + spec.innovation_sd * eps[k];
        path.values[k + 1] = x;
    }
    return path;
}

OuPath simulate_ou(const OuSpec& spec, std::size_t n_steps, RngStream& rng) {
    if (n_steps < 1) throw std::invalid_argument("ou: need at least one step");
    std::vector<double> eps(n_steps);
    for (double& e : eps) e = rng.normal();
    return ou_recursion(spec, 0.0, eps);
}

IntensityCurve build_intensity(const IntensityCurve& det, std::span<const double> ou_path,
                               double exp_scale) {
    if (ou_path.size() != det.size()) {
        throw std::invalid_argument("build_intensity: OU path length differs from curve grid");
    }
    std::vector<double> mult(ou_path.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < mult.size(); ++k) {
        mult[k] = std::exp(exp_scale * ou_path[k]);
        sum += mult[k];
    }
    const double mean = sum / static_cast<double>(mult.size());
    std::vector<double> v(mult.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = det.value(k) * mult[k] / mean;
    return IntensityCurve(det.t0(), det.t1(), std::move(v));
}

std::vector<double> simulate_arrivals(const IntensityCurve& lambda, RngStream& rng) {
    const std::vector<double> cum = lambda.cumulative();
    const double total = cum.back();
    const std::uint64_t n = rng.poisson(total);
    std::vector<double> times(n);
    const double h = lambda.step();
    for (auto& t : times) {
        const double y = rng.uniform() * total;
        // First node with cum >= y; y lies on the segment ending there.
        auto it = std::lower_bound(cum.begin() + 1, cum.end(), y);
        if (it == cum.end()) it = cum.end() - 1;
        const auto k = static_cast<std::size_t>(it - cum.begin());
        const double seg = cum[k] - cum[k - 1];
        const double frac = seg > 0.0 ? (y - cum[k - 1]) / seg : 0.0;
        t = lambda.t0() + h * (static_cast<double>(k - 1) + frac);
        t = std::clamp(t, lambda.t0(), lambda.t1());
    }
    std::sort(times.begin(), times.end());
    // Exact ties have probability ~0; keep times strictly increasing.
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) times[i] = std::nextafter(times[i - 1], lambda.t1() + 1.0);
    }
    return times;
}

TickSeries simulate_prices(std::span<const double> arrivals, const IntensityCurve& varsigma,
                           double leverage_rho, RngStream& rng,
                           std::span<const double> varsigma_innovations) {
    if (std::abs(leverage_rho) > 1.0) throw std::invalid_argument("prices: |leverage_rho| > 1");
    if (!std::is_sorted(arrivals.begin(), arrivals.end())) {
        throw std::invalid_argument("prices: arrivals are not sorted");
    }
    const bool leverage = leverage_rho != 0.0;
    if (leverage && varsigma_innovations.size() + 1 != varsigma.size()) {
        throw std::invalid_argument("prices: leverage needs one innovation per Euler step");
    }
    std::vector<double> prefix;
    if (leverage) {
        prefix.resize(varsigma_innovations.size() + 1, 0.0);
        std::partial_sum(varsigma_innovations.begin(), varsigma_innovations.end(), prefix.begin() + 1);
    }

    TickSeries out;
    out.day_length = varsigma.t1();
    out.times.assign(arrivals.begin(), arrivals.end());
    out.log_prices.resize(arrivals.size());
    out.true_varsigma.resize(arrivals.size());
    const double idio = std::sqrt(1.0 - leverage_rho * leverage_rho);
    const double h = varsigma.step();
    const auto last_node = static_cast<std::ptrdiff_t>(varsigma.size()) - 1;
    // Innovation k drives node k + 1; nodes in (t_prev, t] have index
    // floor((t_prev - t0)/h) + 1 ... floor((t - t0)/h).
    auto node_floor = [&](double t) {
        auto j = static_cast<std::ptrdiff_t>(std::floor((t - varsigma.t0()) / h));
        return std::clamp<std::ptrdiff_t>(j, 0, last_node);
    };

    double p = 0.0;
    double t_prev = varsigma.t0();
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        const double s = varsigma(arrivals[i]);
        double u = rng.normal();
        if (leverage) {
            const std::ptrdiff_t lo = node_floor(t_prev);
            const std::ptrdiff_t hi = node_floor(arrivals[i]);
            if (hi > lo) {
                const double agg = (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) /
                                   std::sqrt(static_cast<double>(hi - lo));
                u = leverage_rho * agg + idio * u;
            }
        }
        p += s * u;
        out.log_prices[i] = p;
        out.true_varsigma[i] = s;
        t_prev = arrivals[i];
    }
    return out;
}

double diurnal_multiplier(double t, double day_length, double endpoint_ratio) {
    const double x = std::abs(2.0 * t / day_length - 1.0);
    return 1.0 + (endpoint_ratio - 1.0) * x;
}

TickSeries contaminate(const TickSeries& ticks, const NoiseSpec& spec, RngStream& rng) {
    if (spec.variance < 0.0) throw std::invalid_argument("noise: negative variance");
    if (std::abs(spec.ar) >= 1.0) throw std::invalid_argument("noise: |ar| must be < 1");
    TickSeries out = ticks;
    switch (spec.kind) {
    case NoiseKind::none:
        break;
    case NoiseKind::iid_gaussian: {
        const double sd = std::sqrt(spec.variance);
        for (double& p : out.log_prices) p += sd * rng.normal();
        break;
    }
    case NoiseKind::diurnal_arma: {
        const double phi = spec.ar;
        const double th = spec.ma;
        // Stationary Var(v) per unit innovation variance for ARMA(1,1).
        const double arma_factor = (1.0 + 2.0 * phi * th + th * th) / (1.0 - phi * phi);
        const double mean_mult = 0.5 * (1.0 + spec.endpoint_ratio);
        const double base = spec.variance / (arma_factor * mean_mult);
        // phi * v_0 + th * eps_0 under stationarity, Cov(v_0, eps_0) = sigma_eps^2.
        const double carry_factor = phi * phi * arma_factor + th * th + 2.0 * phi * th;
        double v_prev = 0.0;
        double e_prev = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double sd =
                std::sqrt(base * diurnal_multiplier(out.times[i], out.day_length, spec.endpoint_ratio));
            const double e = sd * rng.normal();
            double v;
            if (i == 0) {
                v = e + std::sqrt(carry_factor) * sd * rng.normal();
            } else {
                v = e + phi * v_prev + th * e_prev;
            }
            out.log_prices[i] += v;
            v_prev = v;
            e_prev = e;
        }
        break;
    }
    }
    return out;
}

namespace {

double lambda_shape(double u) {
    return 1.0 + 1.2 * std::exp(-u / 0.06) + 2.5 * std::exp(-(1.0 - u) / 0.05);
}

double varsigma2_shape(double u) { return 1.0 + 2.0 * std::exp(-u / 0.12); }

constexpr double kMeanTicksPerSecond = 0.25;
constexpr double kMeanTickVariance = 1.2e-4;

}  // namespace

IntensityCurve default_lambda_det(double day_length, std::size_t n_points) {
    auto c = IntensityCurve::from_function(0.0, day_length, n_points,
                                           [&](double t) { return lambda_shape(t / day_length); });
    return c.normalized(kMeanTicksPerSecond * day_length);
}

IntensityCurve default_varsigma_det(double day_length, std::size_t n_points) {
    // Scale varsigma^2 so its lambda-weighted mean equals kMeanTickVariance.
    // The normalization uses a fine reference grid so that the shape does not
    // depend on n_points.
    const std::size_t ref_n = 23401;
    const auto lam = IntensityCurve::from_function(0.0, 1.0, ref_n, lambda_shape);
    const auto s2 = IntensityCurve::from_function(0.0, 1.0, ref_n, varsigma2_shape);
    const double weighted = multiply(lam, s2).integral() / lam.integral();
    const double scale = kMeanTickVariance / weighted;
    return IntensityCurve::from_function(0.0, day_length, n_points, [&](double t) {
        return std::sqrt(scale * varsigma2_shape(t / day_length));
    });
}

SimConfig::SimConfig()
    : lambda_det(default_lambda_det(23400.0, 23401)),
      varsigma_det(default_varsigma_det(23400.0, 23401)) {}

void SimConfig::validate() const {
    if (!(day_length > 0.0)) throw std::invalid_argument("config: T must be positive");
    if (n_steps < 1) throw std::invalid_argument("config: n_grid must be >= 1");
    for (const OuSpec* s : {&lambda_ou, &varsigma_ou}) {
        if (!(s->mean_reversion > 0.0 && s->mean_reversion < 1.0)) {
            throw std::invalid_argument("config: OU mean reversion must lie in (0, 1)");
        }
        if (!(s->exp_scale > 0.0)) throw std::invalid_argument("config: OU exp scale must be positive");
    }
    if (std::abs(leverage_rho) > 1.0) throw std::invalid_argument("config: |leverage_rho| > 1");
    if (noise.variance < 0.0) throw std::invalid_argument("config: noise variance must be >= 0");
    if (std::abs(noise.ar) >= 1.0) throw std::invalid_argument("config: |noise ar| must be < 1");
}

IntensityCurve DayPanel::spot_variance() const {
    return multiply(square(varsigma_curve), lambda_curve);
}

IntensityCurve DayPanel::tick_variance() const { return square(varsigma_curve); }

DayPanel simulate_day(const SimConfig& config, std::uint64_t day_index) {
    return simulate_day(config, day_index, config.noise);
}

DayPanel simulate_day(const SimConfig& config, std::uint64_t day_index, const NoiseSpec& noise) {
    const std::size_t nodes = config.n_steps + 1;
    const auto lam_det = config.lambda_det.size() == nodes && config.lambda_det.t1() == config.day_length
                             ? config.lambda_det
                             : config.lambda_det.resampled(nodes).rescaled_time(0.0, config.day_length);
    const auto vs_det = config.varsigma_det.size() == nodes && config.varsigma_det.t1() == config.day_length
                            ? config.varsigma_det
                            : config.varsigma_det.resampled(nodes).rescaled_time(0.0, config.day_length);

    RngStream rng_lam(config.master_seed, day_index, Purpose::lambda_ou);
    RngStream rng_vs(config.master_seed, day_index, Purpose::varsigma_ou);
    RngStream rng_arr(config.master_seed, day_index, Purpose::arrivals);
    RngStream rng_px(config.master_seed, day_index, Purpose::prices);
    RngStream rng_noise(config.master_seed, day_index, Purpose::noise);

    const OuPath lam_ou = simulate_ou(config.lambda_ou, config.n_steps, rng_lam);
    const OuPath vs_ou = simulate_ou(config.varsigma_ou, config.n_steps, rng_vs);
    IntensityCurve lambda = build_intensity(lam_det, lam_ou.values, config.lambda_ou.exp_scale);
    IntensityCurve varsigma = build_intensity(vs_det, vs_ou.values, config.varsigma_ou.exp_scale);

    const std::vector<double> arrivals = simulate_arrivals(lambda, rng_arr);
    TickSeries clean = simulate_prices(arrivals, varsigma, config.leverage_rho, rng_px,
                                       config.leverage_rho != 0.0 ? std::span<const double>(vs_ou.innovations)
                                                                  : std::span<const double>());
    TickSeries noisy = contaminate(clean, noise, rng_noise);

    const IntensityCurve s2 = square(varsigma);
    const IntensityCurve spot = multiply(s2, lambda);
    const double iv = spot.integral();
    const double iq = multiply(s2, spot).integral();
    double riv = 0.0;
    for (double s : clean.true_varsigma) riv += s * s;

    return DayPanel{std::move(lambda), std::move(varsigma), std::move(clean), std::move(noisy), iv, riv, iq};
}

}  // namespace ttsv
