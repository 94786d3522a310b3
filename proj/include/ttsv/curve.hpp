#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ttsv {

// Real function on [t0, t1] stored on a uniform grid and linearly
// interpolated between nodes. Outside [t0, t1] the end values are held.
class Curve {
public:
    Curve(double t0, double t1, std::vector<double> values);

    static Curve from_function(double t0, double t1, std::size_t n_points,
                               const std::function<double(double)>& f);

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    std::size_t size() const { return values_.size(); }
    double step() const { return step_; }
    double time_at(std::size_t k) const;
    std::span<const double> values() const { return values_; }
    double value(std::size_t k) const { return values_[k]; }

    double operator()(double t) const;

    // Trapezoid integral over [t0, t1].
    double integral() const;
    // Trapezoid integral from t0 to every node; front() == 0.
    std::vector<double> cumulative() const;
    double mean() const { return integral() / (t1_ - t0_); }

    // Linear interpolation onto a new uniform grid with n_points nodes.
    Curve resampled(std::size_t n_points) const;
    bool same_grid(const Curve& other) const;

protected:
    double t0_;
    double t1_;
    double step_;
    std::vector<double> values_;
};

// Curve whose values are all strictly positive: trading intensity,
// tick volatility, spot variance or a sampling intensity.
class IntensityCurve : public Curve {
public:
    IntensityCurve(double t0, double t1, std::vector<double> values);
    explicit IntensityCurve(Curve c);

    static IntensityCurve constant(double t0, double t1, std::size_t n_points, double value);
    static IntensityCurve from_function(double t0, double t1, std::size_t n_points,
                                        const std::function<double(double)>& f);

    IntensityCurve resampled(std::size_t n_points) const;
    // Same shape scaled so that the trapezoid integral equals `target`.
    IntensityCurve normalized(double target) const;
    // Same values on the time axis [new_t0, new_t1].
    IntensityCurve rescaled_time(double new_t0, double new_t1) const;
};

// Pointwise product on the grid of `a`; `b` is interpolated when grids differ.
IntensityCurve multiply(const IntensityCurve& a, const IntensityCurve& b);
IntensityCurve square(const IntensityCurve& a);

}  // namespace ttsv
