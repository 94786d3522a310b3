#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "ttsv/curve.hpp"
#include "ttsv/sim.hpp"

namespace ttsv {

enum class Kernel { gaussian, epanechnikov };

struct KernelSpec {
    Kernel kernel = Kernel::gaussian;
    double bandwidth = 23400.0 / 50.0;  // seconds
    bool mirror = true;                  // reflect ticks about 0 and T
    std::size_t n_points = 391;          // output grid, one node per minute
    // Subtract twice a noise-variance estimate from squared increments.
    bool noise_robust = false;

    void validate() const;
};

// K_h(x) for the configured kernel.
double kernel_value(const KernelSpec& spec, double x);

// lambda_hat(t) = sum_i K_h(t - t_i), plus reflected copies -t_i and 2T - t_i
// when mirror is on. Floored at 1e-12. Needs at least 2 ticks.
IntensityCurve estimate_lambda(const TickSeries& ticks, const KernelSpec& spec);

// Nadaraya-Watson smoother of consecutive squared increments
// (P(t_i) - P(t_{i-1}))^2 located at t_i, i >= 2. Floored at 1e-12.
IntensityCurve estimate_varsigma2(const TickSeries& ticks, const KernelSpec& spec);

// Noise variance from the negative first-order autocovariance of tick
// increments, floored at zero.
double noise_variance_estimate(const TickSeries& ticks);

// Pointwise mean of the last `window` curves (all of them if fewer).
IntensityCurve rolling_average(std::span<const IntensityCurve> curves, std::size_t window);

// Running window over day-ordered curves.
class RollingEstimate {
public:
    explicit RollingEstimate(std::size_t window_days);

    void push(IntensityCurve curve);
    bool empty() const { return curves_.empty(); }
    std::size_t size() const { return curves_.size(); }
    IntensityCurve average() const;

private:
    std::size_t window_;
    std::deque<IntensityCurve> curves_;
};

}  // namespace ttsv
