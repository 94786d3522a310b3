#include "ttsv/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ttsv {

std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::cts: return "cts";
    case Scheme::itts: return "itts";
    case Scheme::rtts: return "rtts";
    case Scheme::ibts: return "ibts";
    case Scheme::rbts: return "rbts";
    }
    return "?";
}

Scheme parse_scheme(std::string_view tag) {
    if (tag == "cts") return Scheme::cts;
    if (tag == "itts") return Scheme::itts;
    if (tag == "rtts") return Scheme::rtts;
    if (tag == "ibts") return Scheme::ibts;
    if (tag == "rbts") return Scheme::rbts;
    throw std::invalid_argument("unknown sampling scheme '" + std::string(tag) + "'");
}

namespace {

// Drop repeated boundaries; the grid keeps tau_0 and tau_M.
void merge_coincident(SamplingGrid& g) {
    const auto before = g.taus.size();
    g.taus.erase(std::unique(g.taus.begin(), g.taus.end()), g.taus.end());
    g.merged += before - g.taus.size();
}

// Generalized inverse on nodes (times, acc) with acc weakly increasing.
double generalized_inverse(std::span<const double> acc, double t0, double h, double level) {
    auto it = std::lower_bound(acc.begin(), acc.end(), level);
    if (it == acc.begin()) return t0;
    if (it == acc.end()) --it;
    const auto k = static_cast<std::size_t>(it - acc.begin());
    const double seg = acc[k] - acc[k - 1];
    const double frac = seg > 0.0 ? std::clamp((level - acc[k - 1]) / seg, 0.0, 1.0) : 1.0;
    return t0 + h * (static_cast<double>(k - 1) + frac);
}

SamplingGrid from_cumulative(std::span<const double> acc, double t0, double t1, double h,
                             std::size_t M, Scheme tag) {
    if (M < 1) throw std::invalid_argument("grid: M must be >= 1");
    SamplingGrid g;
    g.scheme = tag;
    g.requested_M = M;
    g.taus.resize(M + 1);
    const double total = acc.back();
    g.taus[0] = t0;
    for (std::size_t j = 1; j < M; ++j) {
        const double level = total * static_cast<double>(j) / static_cast<double>(M);
        g.taus[j] = std::min(generalized_inverse(acc, t0, h, level), t1);
    }
    g.taus[M] = t1;
    merge_coincident(g);
    return g;
}

std::vector<double> tick_cumsum(std::span<const double> w) {
    std::vector<double> c(w.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0)) throw std::invalid_argument("rbts: tick variances must be positive");
        s += w[i];
        c[i] = s;
    }
    return c;
}

}  // namespace

SamplingGrid grid_from_accumulated(const Curve& phi, std::size_t M, Scheme tag) {
    const auto v = phi.values();
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] < v[k - 1]) throw std::invalid_argument("grid: accumulated intensity is not monotone");
    }
    const double span_t = phi.t1() - phi.t0();
    if (std::abs(v.front()) > 1e-9 * span_t) throw std::invalid_argument("grid: Phi(0) must be 0");
    if (!(v.back() > 0.0)) throw std::invalid_argument("grid: Phi(T) must be positive");
    return from_cumulative(v, phi.t0(), phi.t1(), phi.step(), M, tag);
}

SamplingGrid cts_grid(double day_length, std::size_t M) {
    if (M < 1) throw std::invalid_argument("grid: M must be >= 1");
    SamplingGrid g;
    g.scheme = Scheme::cts;
    g.requested_M = M;
    g.taus.resize(M + 1);
    for (std::size_t j = 0; j <= M; ++j) {
        g.taus[j] = day_length * static_cast<double>(j) / static_cast<double>(M);
    }
    g.taus[M] = day_length;
    return g;
}

SamplingGrid itts_grid(const IntensityCurve& lambda, std::size_t M) {
    const auto acc = lambda.cumulative();
    return from_cumulative(acc, lambda.t0(), lambda.t1(), lambda.step(), M, Scheme::itts);
}

SamplingGrid ibts_grid(const IntensityCurve& spot_variance, std::size_t M) {
    const auto acc = spot_variance.cumulative();
    return from_cumulative(acc, spot_variance.t0(), spot_variance.t1(), spot_variance.step(), M,
                           Scheme::ibts);
}

SamplingGrid rtts_grid(const TickSeries& ticks, std::size_t M) {
    if (M < 1) throw std::invalid_argument("grid: M must be >= 1");
    const std::size_t n = ticks.size();
    if (n < M) throw std::invalid_argument("rtts: fewer ticks than M");
    SamplingGrid g;
    g.scheme = Scheme::rtts;
    g.requested_M = M;
    g.taus.resize(M + 1);
    g.taus[0] = 0.0;
    for (std::size_t j = 1; j < M; ++j) {
        const std::size_t end = (j * n + M - 1) / M;  // ceil(j n / M) ticks so far
        g.taus[j] = ticks.times[end - 1];
    }
    g.taus[M] = ticks.day_length;
    merge_coincident(g);
    return g;
}

SamplingGrid rbts_grid(const TickSeries& ticks, std::span<const double> tick_variance, std::size_t M) {
    if (M < 1) throw std::invalid_argument("grid: M must be >= 1");
    if (tick_variance.size() != ticks.size()) throw std::invalid_argument("rbts: one weight per tick required");
    if (ticks.size() < M) throw std::invalid_argument("rbts: fewer ticks than M");
    const auto cum = tick_cumsum(tick_variance);
    const double total = cum.back();
    SamplingGrid g;
    g.scheme = Scheme::rbts;
    g.requested_M = M;
    g.taus.resize(M + 1);
    g.taus[0] = 0.0;
    for (std::size_t j = 1; j < M; ++j) {
        // Relative slack absorbs summation round-off at exact multiples.
        const double level = total * static_cast<double>(j) / static_cast<double>(M) * (1.0 - 1e-12);
        auto it = std::lower_bound(cum.begin(), cum.end(), level);
        if (it == cum.end()) --it;
        g.taus[j] = ticks.times[static_cast<std::size_t>(it - cum.begin())];
    }
    g.taus[M] = ticks.day_length;
    merge_coincident(g);
    return g;
}

SamplingGrid rbts_grid(const TickSeries& ticks, const IntensityCurve& varsigma2, std::size_t M) {
    std::vector<double> w(ticks.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = varsigma2(ticks.times[i]);
    return rbts_grid(ticks, w, M);
}

SamplingGrid rbts_grid(const TickSeries& ticks, std::size_t M) {
    if (!ticks.has_varsigma()) throw std::invalid_argument("rbts: tick series carries no varsigma");
    std::vector<double> w(ticks.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = ticks.true_varsigma[i] * ticks.true_varsigma[i];
    return rbts_grid(ticks, w, M);
}

SamplingGrid rtts_threshold_grid(const TickSeries& ticks, std::size_t ticks_per_bin) {
    if (ticks_per_bin < 1) throw std::invalid_argument("rtts: threshold must be >= 1");
    SamplingGrid g;
    g.scheme = Scheme::rtts;
    g.taus.push_back(0.0);
    for (std::size_t k = ticks_per_bin; k <= ticks.size(); k += ticks_per_bin) {
        g.taus.push_back(ticks.times[k - 1]);
    }
    if (g.taus.back() < ticks.day_length || g.taus.size() == 1) g.taus.push_back(ticks.day_length);
    else g.taus.back() = ticks.day_length;
    g.requested_M = g.taus.size() - 1;
    merge_coincident(g);
    return g;
}

SamplingGrid rbts_threshold_grid(const TickSeries& ticks, std::span<const double> tick_variance,
                                 double riv_per_bin) {
    if (!(riv_per_bin > 0.0)) throw std::invalid_argument("rbts: threshold must be positive");
    if (tick_variance.size() != ticks.size()) throw std::invalid_argument("rbts: one weight per tick required");
    const auto cum = tick_cumsum(tick_variance);
    SamplingGrid g;
    g.scheme = Scheme::rbts;
    g.taus.push_back(0.0);
    double level = riv_per_bin;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        if (cum[i] >= level) {
            g.taus.push_back(ticks.times[i]);
            while (cum[i] >= level) level += riv_per_bin;
        }
    }
    if (g.taus.back() < ticks.day_length || g.taus.size() == 1) g.taus.push_back(ticks.day_length);
    else g.taus.back() = ticks.day_length;
    g.requested_M = g.taus.size() - 1;
    merge_coincident(g);
    return g;
}

std::vector<double> previous_tick_resample(const TickSeries& ticks, std::span<const double> taus,
                                           double anchor) {
    std::vector<double> out(taus.size());
    for (std::size_t j = 0; j < taus.size(); ++j) {
        const auto it = std::upper_bound(ticks.times.begin(), ticks.times.end(), taus[j]);
        const auto idx = static_cast<std::size_t>(it - ticks.times.begin());
        out[j] = idx == 0 ? anchor : ticks.log_prices[idx - 1];
    }
    return out;
}

std::vector<double> returns_from_grid(const TickSeries& ticks, const SamplingGrid& grid, double anchor) {
    const auto prices = previous_tick_resample(ticks, grid.taus, anchor);
    std::vector<double> r(prices.size() > 0 ? prices.size() - 1 : 0);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = prices[j + 1] - prices[j];
    return r;
}

std::vector<double> bin_tick_sums(std::span<const double> times, std::span<const double> weights,
                                  std::span<const double> taus) {
    if (weights.size() != times.size()) throw std::invalid_argument("bin sums: one weight per tick required");
    std::vector<double> out(taus.empty() ? 0 : taus.size() - 1, 0.0);
    // Ticks at or before tau_0 belong to no bin.
    std::size_t i = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), taus.empty() ? 0.0 : taus[0]) -
                                             times.begin());
    for (std::size_t j = 0; j < out.size(); ++j) {
        double s = 0.0;
        while (i < times.size() && times[i] <= taus[j + 1]) s += weights[i++];
        out[j] = s;
    }
    return out;
}

std::vector<double> bin_integrals(const Curve& density, std::span<const double> taus) {
    const auto acc = density.cumulative();
    const Curve cum(density.t0(), density.t1(), acc);
    std::vector<double> out(taus.empty() ? 0 : taus.size() - 1);
    double prev = taus.empty() ? 0.0 : cum(taus[0]);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double cur = cum(taus[j + 1]);
        out[j] = cur - prev;
        prev = cur;
    }
    return out;
}

void validate_grid(const SamplingGrid& grid, double day_length) {
    if (grid.taus.size() < 2) throw std::invalid_argument("grid: need at least one bin");
    if (grid.taus.front() != 0.0) throw std::invalid_argument("grid: tau_0 must be 0");
    if (grid.taus.back() != day_length) throw std::invalid_argument("grid: tau_M must equal T");
    for (std::size_t j = 1; j < grid.taus.size(); ++j) {
        if (!(grid.taus[j] > grid.taus[j - 1])) throw std::invalid_argument("grid: taus not increasing");
    }
}

}  // namespace ttsv
