#include "ttsv/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ttsv {

Curve::Curve(double t0, double t1, std::vector<double> values)
    : t0_(t0), t1_(t1), values_(std::move(values)) {
    if (!(t1_ > t0_)) throw std::invalid_argument("curve: t1 must exceed t0");
    if (values_.size() < 2) throw std::invalid_argument("curve: need at least 2 grid points");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("curve: non-finite value");
    }
    step_ = (t1_ - t0_) / static_cast<double>(values_.size() - 1);
}

Curve Curve::from_function(double t0, double t1, std::size_t n_points,
                           const std::function<double(double)>& f) {
    if (n_points < 2) throw std::invalid_argument("curve: need at least 2 grid points");
    std::vector<double> v(n_points);
    const double h = (t1 - t0) / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) v[k] = f(t0 + h * static_cast<double>(k));
    return Curve(t0, t1, std::move(v));
}

double Curve::time_at(std::size_t k) const {
    if (k + 1 == values_.size()) return t1_;
    return t0_ + step_ * static_cast<double>(k);
}

double Curve::operator()(double t) const {
    if (t <= t0_) return values_.front();
    if (t >= t1_) return values_.back();
    const double x = (t - t0_) / step_;
    auto k = static_cast<std::size_t>(x);
    if (k >= values_.size() - 1) k = values_.size() - 2;
    const double w = x - static_cast<double>(k);
    return values_[k] + w * (values_[k + 1] - values_[k]);
}

double Curve::integral() const {
    double s = 0.5 * (values_.front() + values_.back());
    for (std::size_t k = 1; k + 1 < values_.size(); ++k) s += values_[k];
    return s * step_;
}

std::vector<double> Curve::cumulative() const {
    std::vector<double> c(values_.size());
    c[0] = 0.0;
    for (std::size_t k = 1; k < values_.size(); ++k) {
        c[k] = c[k - 1] + 0.5 * step_ * (values_[k - 1] + values_[k]);
    }
    return c;
}

Curve Curve::resampled(std::size_t n_points) const {
    return Curve::from_function(t0_, t1_, n_points, [this](double t) { return (*this)(t); });
}

bool Curve::same_grid(const Curve& other) const {
    return t0_ == other.t0_ && t1_ == other.t1_ && values_.size() == other.values_.size();
}

IntensityCurve::IntensityCurve(double t0, double t1, std::vector<double> values)
    : IntensityCurve(Curve(t0, t1, std::move(values))) {}

IntensityCurve::IntensityCurve(Curve c) : Curve(std::move(c)) {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!(values_[k] > 0.0)) {
            throw std::invalid_argument("intensity curve: non-positive value at node " +
                                        std::to_string(k));
        }
    }
}

IntensityCurve IntensityCurve::constant(double t0, double t1, std::size_t n_points, double value) {
    return IntensityCurve(t0, t1, std::vector<double>(n_points, value));
}

IntensityCurve IntensityCurve::from_function(double t0, double t1, std::size_t n_points,
                                             const std::function<double(double)>& f) {
    return IntensityCurve(Curve::from_function(t0, t1, n_points, f));
}

IntensityCurve IntensityCurve::resampled(std::size_t n_points) const {
    return IntensityCurve(Curve::resampled(n_points));
}

IntensityCurve IntensityCurve::normalized(double target) const {
    const double scale = target / integral();
    std::vector<double> v(values_.begin(), values_.end());
    for (double& x : v) x *= scale;
    return IntensityCurve(t0_, t1_, std::move(v));
}

IntensityCurve IntensityCurve::rescaled_time(double new_t0, double new_t1) const {
    return IntensityCurve(new_t0, new_t1, std::vector<double>(values_.begin(), values_.end()));
}

IntensityCurve multiply(const IntensityCurve& a, const IntensityCurve& b) {
    std::vector<double> v(a.size());
    if (a.same_grid(b)) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.value(k) * b.value(k);
    } else {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.value(k) * b(a.time_at(k));
    }
    return IntensityCurve(a.t0(), a.t1(), std::move(v));
}

IntensityCurve square(const IntensityCurve& a) { return multiply(a, a); }

}  // namespace ttsv
