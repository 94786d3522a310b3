#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ttsv/curve.hpp"
#include "ttsv/rng.hpp"

namespace ttsv {

// Observed transactions of one trading day: strictly increasing arrival
// times in [0, T] with their log-prices and, for simulated data, the tick
// volatility varsigma(t_i) in effect at each arrival.
struct TickSeries {
    std::vector<double> times;
    std::vector<double> log_prices;
    std::vector<double> true_varsigma;  // empty when unknown
    double day_length = 23400.0;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    bool has_varsigma() const { return !true_varsigma.empty(); }

    // Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

struct OuSpec {
    double mean_reversion = 0.0002;  // per Euler step
    double innovation_sd = 1.0;
    double exp_scale = 0.01;         // multiplier inside exp(.)
};

struct OuPath {
    std::vector<double> values;       // n_steps + 1 nodes, values.front() == x0
    std::vector<double> innovations;  // n_steps draws; innovations[k] moves node k to k+1
};

// x_{k+1} = x_k - mean_reversion * x_k + innovation_sd * eps_k.
OuPath ou_recursion(const OuSpec& spec, double x0, std::span<const double> eps);
OuPath simulate_ou(const OuSpec& spec, std::size_t n_steps, RngStream& rng);

// det(t_k) * exp(exp_scale * ou_k) / mean_k exp(exp_scale * ou_k).
IntensityCurve build_intensity(const IntensityCurve& det, std::span<const double> ou_path,
                               double exp_scale);

// Doubly stochastic Poisson arrivals given the intensity path: N(T) from
// Poisson(Lambda(T)), then N(T) sorted draws from Lambda(t)/Lambda(T) with
// Lambda piecewise linear between grid nodes.
std::vector<double> simulate_arrivals(const IntensityCurve& lambda, RngStream& rng);

// Log-prices P(t_i) = P(t_{i-1}) + varsigma(t_i) U_i with P(0) = 0.
// With leverage, U_i has correlation `leverage_rho` with the standardized sum
// of the varsigma-driving innovations whose node falls in (t_{i-1}, t_i].
TickSeries simulate_prices(std::span<const double> arrivals, const IntensityCurve& varsigma,
                           double leverage_rho, RngStream& rng,
                           std::span<const double> varsigma_innovations = {});

enum class NoiseKind { none, iid_gaussian, diurnal_arma };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double variance = 1.2e-4;   // omega^2, the day-average noise variance
    double ar = 0.5;
    double ma = 0.5;
    double endpoint_ratio = 2.0;  // innovation variance at open/close relative to midday
    // Fourth-moment ratio E[v^4] / omega^4; documented for completeness,
    // it does not enter any estimator or variance formula used here.
    double theta = 3.0;
};

// V-shaped diurnal multiplier: endpoint_ratio at 0 and T, 1 at T/2.
double diurnal_multiplier(double t, double day_length, double endpoint_ratio);

TickSeries contaminate(const TickSeries& ticks, const NoiseSpec& spec, RngStream& rng);

struct SimConfig {
    double day_length = 23400.0;
    std::size_t n_steps = 23400;  // Euler steps; curves carry n_steps + 1 nodes
    IntensityCurve lambda_det;
    IntensityCurve varsigma_det;
    OuSpec lambda_ou{0.0002, 1.0, 0.01};
    OuSpec varsigma_ou{0.0002, 1.0, 0.005};
    double leverage_rho = 0.0;
    NoiseSpec noise{};
    std::uint64_t master_seed = 20240601;

    // Defaults use the bundled deterministic shapes.
    SimConfig();
    void validate() const;
};

// Bundled deterministic shapes: trading intensity high at the open, low at
// lunch and highest before the close; tick variance high in the morning and
// decaying. Scaled to about 0.25 ticks per second and an average tick
// variance of 1.2e-4 (percent log-price units).
IntensityCurve default_lambda_det(double day_length, std::size_t n_points);
IntensityCurve default_varsigma_det(double day_length, std::size_t n_points);

struct DayPanel {
    IntensityCurve lambda_curve;
    IntensityCurve varsigma_curve;
    TickSeries ticks_clean;
    TickSeries ticks_noisy;
    double iv = 0.0;   // integral of varsigma^2 lambda
    double riv = 0.0;  // sum of varsigma^2(t_i)
    double iq = 0.0;   // integral of varsigma^4 lambda

    IntensityCurve spot_variance() const;  // varsigma^2 * lambda
    IntensityCurve tick_variance() const;  // varsigma^2
};

// Day `day_index` uses streams keyed by (master_seed, day_index), so the
// result does not depend on which other days are simulated or in what order.
DayPanel simulate_day(const SimConfig& config, std::uint64_t day_index);
DayPanel simulate_day(const SimConfig& config, std::uint64_t day_index, const NoiseSpec& noise);

}  // namespace ttsv
