#include "ttsv/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ttsv {

namespace {

constexpr double kFloor = 1e-12;

// Kernel support in units of h; the Gaussian is cut where its mass is < 1e-15.
double support(const KernelSpec& spec) { return spec.kernel == Kernel::gaussian ? 8.0 : 1.0; }

// Kernel weights K_h(x_k - x) at the grid nodes within the support, written
// to `w` with the index of the first node. The Gaussian uses the recurrence
// g_{k+1} = g_k r_k, r_{k+1} = r_k exp(-a^2) with a = step / h, so each call
// costs two exponentials.
std::size_t kernel_weights(const KernelSpec& spec, std::size_t n, double step, double x,
                           std::vector<double>& w) {
    w.clear();
    const double h = spec.bandwidth;
    const double reach = support(spec) * h;
    const auto lo = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::ceil((x - reach) / step)), 0);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor((x + reach) / step)),
                                             static_cast<std::ptrdiff_t>(n) - 1);
    if (hi < lo) return 0;
    if (spec.kernel == Kernel::epanechnikov) {
        for (auto k = lo; k <= hi; ++k) w.push_back(kernel_value(spec, step * static_cast<double>(k) - x));
        return static_cast<std::size_t>(lo);
    }
    const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
    const double a = step / h;
    const double c = std::exp(-a * a);
    double u = (step * static_cast<double>(lo) - x) / h;
    double g = norm * std::exp(-0.5 * u * u);
    double r = std::exp(-u * a - 0.5 * a * a);
    for (auto k = lo; k <= hi; ++k) {
        w.push_back(g);
        g *= r;
        r *= c;
    }
    return static_cast<std::size_t>(lo);
}

// Adds weight * K_h at x and, with mirror on, at its reflections about 0 and T.
void add_point(std::vector<double>& out, const KernelSpec& spec, double T, double step, double x,
               double weight, std::vector<double>& w) {
    const double xs[3] = {x, -x, 2.0 * T - x};
    for (int m = 0; m < (spec.mirror ? 3 : 1); ++m) {
        const std::size_t first = kernel_weights(spec, out.size(), step, xs[m], w);
        for (std::size_t j = 0; j < w.size(); ++j) out[first + j] += weight * w[j];
    }
}

void check(const TickSeries& ticks, const KernelSpec& spec) {
    spec.validate();
    if (ticks.size() < 2) throw std::invalid_argument("kernel estimate: need at least 2 ticks");
}

}  // namespace

void KernelSpec::validate() const {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kernel: bandwidth must be positive");
    if (n_points < 2) throw std::invalid_argument("kernel: need at least 2 output points");
}

double kernel_value(const KernelSpec& spec, double x) {
    const double u = x / spec.bandwidth;
    if (spec.kernel == Kernel::gaussian) {
        return std::exp(-0.5 * u * u) / (spec.bandwidth * std::sqrt(2.0 * std::numbers::pi));
    }
    return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) / spec.bandwidth : 0.0;
}

IntensityCurve estimate_lambda(const TickSeries& ticks, const KernelSpec& spec) {
    check(ticks, spec);
    const double T = ticks.day_length;
    const double step = T / static_cast<double>(spec.n_points - 1);
    std::vector<double> out(spec.n_points, 0.0);
    std::vector<double> w;
    for (double t : ticks.times) add_point(out, spec, T, step, t, 1.0, w);
    for (double& v : out) v = std::max(v, kFloor);
    return IntensityCurve(0.0, T, std::move(out));
}

double noise_variance_estimate(const TickSeries& ticks) {
    const std::size_t n = ticks.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 2; i < n; ++i) {
        const double a = ticks.log_prices[i] - ticks.log_prices[i - 1];
        const double b = ticks.log_prices[i - 1] - ticks.log_prices[i - 2];
        acc += a * b;
    }
    return std::max(0.0, -acc / static_cast<double>(n - 2));
}

IntensityCurve estimate_varsigma2(const TickSeries& ticks, const KernelSpec& spec) {
    check(ticks, spec);
    const double T = ticks.day_length;
    const double step = T / static_cast<double>(spec.n_points - 1);
    const double omega2 = spec.noise_robust ? noise_variance_estimate(ticks) : 0.0;
    std::vector<double> num(spec.n_points, 0.0);
    std::vector<double> den(spec.n_points, 0.0);
    std::vector<double> w;
    for (std::size_t i = 1; i < ticks.size(); ++i) {
        const double d = ticks.log_prices[i] - ticks.log_prices[i - 1];
        const double y = d * d;
        const double t = ticks.times[i];
        const double at[3] = {t, -t, 2.0 * T - t};
        for (int m = 0; m < (spec.mirror ? 3 : 1); ++m) {
            const std::size_t first = kernel_weights(spec, num.size(), step, at[m], w);
            for (std::size_t j = 0; j < w.size(); ++j) {
                num[first + j] += y * w[j];
                den[first + j] += w[j];
            }
        }
    }
    std::vector<double> out(spec.n_points);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = den[k] > 0.0 ? std::max(num[k] / den[k] - 2.0 * omega2, kFloor) : kFloor;
    }
    return IntensityCurve(0.0, T, std::move(out));
}

IntensityCurve rolling_average(std::span<const IntensityCurve> curves, std::size_t window) {
    if (curves.empty()) throw std::invalid_argument("rolling average: no curves");
    if (window < 1) throw std::invalid_argument("rolling average: window must be >= 1");
    const std::size_t first = curves.size() > window ? curves.size() - window : 0;
    const IntensityCurve& ref = curves.back();
    std::vector<double> acc(ref.size(), 0.0);
    for (std::size_t c = first; c < curves.size(); ++c) {
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += curves[c](ref.time_at(k));
    }
    const double n = static_cast<double>(curves.size() - first);
    for (double& v : acc) v /= n;
    return IntensityCurve(ref.t0(), ref.t1(), std::move(acc));
}

RollingEstimate::RollingEstimate(std::size_t window_days) : window_(window_days) {
    if (window_ < 1) throw std::invalid_argument("rolling estimate: window must be >= 1");
}

void RollingEstimate::push(IntensityCurve curve) {
    curves_.push_back(std::move(curve));
    if (curves_.size() > window_) curves_.pop_front();
}

IntensityCurve RollingEstimate::average() const {
    const std::vector<IntensityCurve> v(curves_.begin(), curves_.end());
    return rolling_average(v, window_);
}

}  // namespace ttsv
