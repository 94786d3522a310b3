#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ttsv/curve.hpp"
#include "ttsv/sampling.hpp"
#include "ttsv/sim.hpp"

namespace ttsv {

// Realized variance: sum of squared returns.
double rv(std::span<const double> returns);

// Pre-averaging weight function g on [0,1] with g(0) = g(1) = 0 and the
// constants g2 = int g^2 and g2p = int (g')^2.
struct PreAvgSpec {
    std::function<double(double)> g;
    double g2 = 0.0;
    double g2p = 0.0;
    std::size_t H = 2;

    // g(x) = min(x, 1 - x): g2 = 1/12, g2p = 1.
    static PreAvgSpec triangular(std::size_t H);
    // Arbitrary kernel; g2 and g2p by midpoint quadrature on `n` cells.
    static PreAvgSpec from_kernel(std::function<double(double)> g, std::size_t H, std::size_t n = 100000);

    void validate() const;
};

// H = max(2, round(delta * sqrt(M))).
std::size_t default_window(std::size_t M, double delta = 1.0);

// Pre-averaging RV over non-overlapping blocks of H returns.
// Block b (b = 1 .. ceil(M/H) - 1) pre-averages returns (b-1)H + l,
// l = 1 .. H-1, with weights g(l/H). The estimator is
//   (1/g2) sum_b rbar_b^2 - (1/(2 H g2)) sum_{l=1}^{H-1} h(l/H)^2 sum_j r_j^2,
// h(l/H) = g((l+1)/H) - g(l/H). Requires M >= 2H.
double preavg_rv(std::span<const double> returns, const PreAvgSpec& spec);

enum class Conditioning { jump, intensity };
enum class Target { riv, iv };

struct MseSetting {
    Conditioning conditioning = Conditioning::jump;
    Target target = Target::iv;
};

// Quantities the closed-form conditional MSE needs for one day. Jump
// settings need the tick times and tick variances; intensity settings need
// the spot-variance curve and IQ.
struct MseInputs {
    std::span<const double> tick_times;
    std::span<const double> tick_variance;  // varsigma^2(t_i)
    const Curve* spot_variance = nullptr;   // varsigma^2 * lambda
    double iv = 0.0;
    double iq = 0.0;
};

// Exact conditional MSE of RV on `grid`:
//  (i)   jump/rIV:      2 sum rIV_j^2
//  (ii)  jump/IV:       2 sum rIV_j^2 + (rIV - IV)^2
//  (iii) intensity/rIV: 2 sum IV_j^2 + 2 IQ
//  (iv)  intensity/IV:  2 sum IV_j^2 + 3 IQ
double conditional_mse(std::span<const double> taus, const MseInputs& in, MseSetting setting);

// Sum over bins of squared realized IV, the grid-dependent MSE term.
double sum_squared_bin_riv(std::span<const double> tick_times, std::span<const double> tick_variance,
                           std::span<const double> taus);

// Curves on the unit interval [0, 1]. All integrals use the trapezoid rule on
// the grid of `phi`; the other curves are interpolated onto it.
struct AsymptoticInputs {
    const IntensityCurve* phi = nullptr;
    const IntensityCurve* mu = nullptr;  // nullptr means mu == 0
    const IntensityCurve* lambda = nullptr;
    const IntensityCurve* varsigma = nullptr;
    double frequency = 1.0;
};

struct RvAsymptoticVariance {
    double v_phi = 0.0;
    double v_mu = 0.0;
    double iq = 0.0;
    double total() const { return v_phi + v_mu + iq; }
};

// V_phi = (2/f) int s^4 l^2 / phi, V_mu = 2 int s^4 mu, IQ = int s^4 l.
// Throws when |int phi - 1| > 1e-8.
RvAsymptoticVariance asymptotic_variance_rv(const AsymptoticInputs& in);

struct PreAvgAsymptoticVariance {
    double eta2_a = 0.0;
    double eta2_b = 0.0;
    double eta2_c = 0.0;
    double delta = 1.0;
    double total() const { return delta * eta2_a + eta2_b / delta + eta2_c / (delta * delta * delta); }
};

// eta2_A = (2/f) int s^4 l^2 / phi, eta2_B = 4 (g2p/g2) omega2 int s^2 l,
// eta2_C = 2 f (g2p/g2)^2 omega2^2.
PreAvgAsymptoticVariance asymptotic_variance_preavg(const AsymptoticInputs& in, double delta, double omega2,
                                                    const PreAvgSpec& spec);

// Frequency minimizing delta * eta2_A + eta2_C / delta^3:
// (1/omega2) (g2 delta^2 / g2p) sqrt(int s^4 l^2 / phi).
double optimal_frequency(const AsymptoticInputs& in, double delta, double omega2, const PreAvgSpec& spec);

}  // namespace ttsv
