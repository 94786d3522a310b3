#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttsv/curve.hpp"
#include "ttsv/sim.hpp"

namespace ttsv {

enum class Scheme { cts, itts, rtts, ibts, rbts };

std::string_view to_string(Scheme s);
// Accepts the lower-case tags "cts", "itts", "rtts", "ibts", "rbts".
Scheme parse_scheme(std::string_view tag);

// Sampling times 0 = tau_0 < ... < tau_M = T.
struct SamplingGrid {
    std::vector<double> taus;
    Scheme scheme = Scheme::cts;
    std::size_t requested_M = 0;
    // Bins dropped because two boundaries coincided (sparse realized grids).
    std::size_t merged = 0;

    std::size_t M() const { return taus.empty() ? 0 : taus.size() - 1; }
};

// Generalized inverse tau_j = inf{t : Phi(t) >= j Phi(T) / M} of a weakly
// increasing piecewise-linear accumulator with Phi(0) = 0.
SamplingGrid grid_from_accumulated(const Curve& phi, std::size_t M, Scheme tag = Scheme::cts);

SamplingGrid cts_grid(double day_length, std::size_t M);
SamplingGrid itts_grid(const IntensityCurve& lambda, std::size_t M);
// `spot_variance` is varsigma^2 * lambda.
SamplingGrid ibts_grid(const IntensityCurve& spot_variance, std::size_t M);

// Equal tick counts per bin: bin j ends at tick ceil(j N / M), so bin sizes
// are floor(N/M) or ceil(N/M). Requires N >= M.
SamplingGrid rtts_grid(const TickSeries& ticks, std::size_t M);

// Equal tick-variance-weighted counts: tau_j is the first tick whose
// cumulative weight reaches j W / M. Requires N >= M and positive weights.
SamplingGrid rbts_grid(const TickSeries& ticks, std::span<const double> tick_variance, std::size_t M);
SamplingGrid rbts_grid(const TickSeries& ticks, const IntensityCurve& varsigma2, std::size_t M);
// Uses ticks.true_varsigma.
SamplingGrid rbts_grid(const TickSeries& ticks, std::size_t M);

// Fixed-threshold variants: a boundary every `ticks_per_bin` ticks or every
// `riv_per_bin` of accumulated tick variance, then a final boundary at T.
SamplingGrid rtts_threshold_grid(const TickSeries& ticks, std::size_t ticks_per_bin);
SamplingGrid rbts_threshold_grid(const TickSeries& ticks, std::span<const double> tick_variance,
                                 double riv_per_bin);

// Price at each tau: the last tick at or before tau, `anchor` before the first tick.
std::vector<double> previous_tick_resample(const TickSeries& ticks, std::span<const double> taus,
                                           double anchor = 0.0);
std::vector<double> returns_from_grid(const TickSeries& ticks, const SamplingGrid& grid,
                                      double anchor = 0.0);

// Per-bin sums of tick weights over (tau_{j-1}, tau_j]; with unit weights
// these are the tick counts.
std::vector<double> bin_tick_sums(std::span<const double> times, std::span<const double> weights,
                                  std::span<const double> taus);
// Per-bin increments of a cumulative curve evaluated by linear interpolation.
std::vector<double> bin_integrals(const Curve& density, std::span<const double> taus);

// Throws std::invalid_argument unless tau_0 = 0, tau_M = T and taus increase.
void validate_grid(const SamplingGrid& grid, double day_length);

}  // namespace ttsv
