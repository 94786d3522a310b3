#include "ttsv/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace ttsv {

double rv(std::span<const double> returns) {
    double s = 0.0;
    for (double r : returns) s += r * r;
    return s;
}

PreAvgSpec PreAvgSpec::triangular(std::size_t H) {
    PreAvgSpec s;
    s.g = [](double x) { return x < 0.5 ? x : 1.0 - x; };
    s.g2 = 1.0 / 12.0;
    s.g2p = 1.0;
    s.H = H;
    return s;
}

PreAvgSpec PreAvgSpec::from_kernel(std::function<double(double)> g, std::size_t H, std::size_t n) {
    PreAvgSpec s;
    const double dx = 1.0 / static_cast<double>(n);
    double g2 = 0.0;
    double g2p = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = dx * static_cast<double>(k);
        const double mid = g(a + 0.5 * dx);
        const double slope = (g(a + dx) - g(a)) / dx;
        g2 += mid * mid * dx;
        g2p += slope * slope * dx;
    }
    s.g = std::move(g);
    s.g2 = g2;
    s.g2p = g2p;
    s.H = H;
    return s;
}

void PreAvgSpec::validate() const {
    if (!g) throw std::invalid_argument("preavg: missing weight function");
    if (H < 2) throw std::invalid_argument("preavg: H must be >= 2");
    if (!(g2 > 0.0)) throw std::invalid_argument("preavg: g2 must be positive");
}

std::size_t default_window(std::size_t M, double delta) {
    const double h = std::round(delta * std::sqrt(static_cast<double>(M)));
    return h < 2.0 ? 2 : static_cast<std::size_t>(h);
}

double preavg_rv(std::span<const double> returns, const PreAvgSpec& spec) {
    spec.validate();
    const std::size_t M = returns.size();
    const std::size_t H = spec.H;
    if (M < 2 * H) throw std::invalid_argument("preavg: need M >= 2H returns");

    std::vector<double> weight(H);
    for (std::size_t l = 1; l < H; ++l) weight[l] = spec.g(static_cast<double>(l) / static_cast<double>(H));

    const std::size_t blocks = (M + H - 1) / H - 1;
    double block_sum = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        double rbar = 0.0;
        const std::size_t start = b * H;
        for (std::size_t l = 1; l < H; ++l) rbar += weight[l] * returns[start + l - 1];
        block_sum += rbar * rbar;
    }

    // Noise in each block comes through all H weight increments, g(0) = g(1) = 0.
    // The correction is scaled to the blocks actually summed.
    double h2 = 0.0;
    for (std::size_t l = 0; l < H; ++l) {
        const double lo = l == 0 ? 0.0 : weight[l];
        const double hi = l + 1 == H ? 0.0 : weight[l + 1];
        h2 += (hi - lo) * (hi - lo);
    }
    const double K = static_cast<double>(blocks);
    return block_sum / spec.g2 - K * h2 / (2.0 * static_cast<double>(M) * spec.g2) * rv(returns);
}

double sum_squared_bin_riv(std::span<const double> tick_times, std::span<const double> tick_variance,
                           std::span<const double> taus) {
    double s = 0.0;
    for (double b : bin_tick_sums(tick_times, tick_variance, taus)) s += b * b;
    return s;
}

double conditional_mse(std::span<const double> taus, const MseInputs& in, MseSetting setting) {
    if (taus.size() < 2) throw std::invalid_argument("conditional_mse: grid needs at least one bin");
    if (setting.conditioning == Conditioning::jump) {
        if (in.tick_variance.size() != in.tick_times.size() || (in.tick_times.empty() && !in.tick_variance.empty())) {
            throw std::invalid_argument("conditional_mse: tick variances must match tick times");
        }
        if (in.tick_variance.empty() && !in.tick_times.empty()) {
            throw std::invalid_argument("conditional_mse: jump settings need varsigma at the ticks");
        }
        const auto bins = bin_tick_sums(in.tick_times, in.tick_variance, taus);
        double sq = 0.0;
        double riv = 0.0;
        for (double b : bins) {
            sq += b * b;
            riv += b;
        }
        double mse = 2.0 * sq;
        if (setting.target == Target::iv) mse += (riv - in.iv) * (riv - in.iv);
        return mse;
    }
    if (in.spot_variance == nullptr) {
        throw std::invalid_argument("conditional_mse: intensity settings need the spot-variance curve");
    }
    double sq = 0.0;
    for (double b : bin_integrals(*in.spot_variance, taus)) sq += b * b;
    return 2.0 * sq + (setting.target == Target::iv ? 3.0 : 2.0) * in.iq;
}

namespace {

struct UnitIntegrals {
    double s4l2_over_phi = 0.0;
    double s4_mu = 0.0;
    double s4l = 0.0;
    double s2l = 0.0;
};

UnitIntegrals unit_integrals(const AsymptoticInputs& in) {
    if (!in.phi || !in.lambda || !in.varsigma) {
        throw std::invalid_argument("asymptotic variance: phi, lambda and varsigma are required");
    }
    const IntensityCurve& phi = *in.phi;
    if (std::abs(phi.integral() - 1.0) > 1e-8) {
        throw std::invalid_argument("asymptotic variance: phi must integrate to 1");
    }
    const std::size_t n = phi.size();
    const double h = phi.step();
    UnitIntegrals out;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = phi.time_at(k);
        const double w = (k == 0 || k + 1 == n) ? 0.5 * h : h;
        const double l = (*in.lambda)(t);
        const double s2 = (*in.varsigma)(t) * (*in.varsigma)(t);
        const double s4 = s2 * s2;
        out.s4l2_over_phi += w * s4 * l * l / phi.value(k);
        if (in.mu) out.s4_mu += w * s4 * (*in.mu)(t);
        out.s4l += w * s4 * l;
        out.s2l += w * s2 * l;
    }
    return out;
}

}  // namespace

RvAsymptoticVariance asymptotic_variance_rv(const AsymptoticInputs& in) {
    if (!(in.frequency > 0.0)) throw std::invalid_argument("asymptotic variance: frequency must be positive");
    const UnitIntegrals u = unit_integrals(in);
    return {2.0 / in.frequency * u.s4l2_over_phi, 2.0 * u.s4_mu, u.s4l};
}

PreAvgAsymptoticVariance asymptotic_variance_preavg(const AsymptoticInputs& in, double delta, double omega2,
                                                    const PreAvgSpec& spec) {
    if (!(delta > 0.0)) throw std::invalid_argument("asymptotic variance: delta must be positive");
    if (!(in.frequency > 0.0)) throw std::invalid_argument("asymptotic variance: frequency must be positive");
    const UnitIntegrals u = unit_integrals(in);
    const double ratio = spec.g2p / spec.g2;
    PreAvgAsymptoticVariance v;
    v.delta = delta;
    v.eta2_a = 2.0 / in.frequency * u.s4l2_over_phi;
    v.eta2_b = 4.0 * ratio * omega2 * u.s2l;
    v.eta2_c = 2.0 * in.frequency * ratio * ratio * omega2 * omega2;
    return v;
}

double optimal_frequency(const AsymptoticInputs& in, double delta, double omega2, const PreAvgSpec& spec) {
    if (!(omega2 > 0.0)) throw std::invalid_argument("optimal frequency: omega2 must be positive");
    const UnitIntegrals u = unit_integrals(in);
    return (1.0 / omega2) * (spec.g2 * delta * delta / spec.g2p) * std::sqrt(u.s4l2_over_phi);
}

}  // namespace ttsv
