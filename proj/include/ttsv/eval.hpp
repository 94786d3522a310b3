#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ttsv/rng.hpp"

namespace ttsv {

// proxy/estimate - ln(proxy/estimate) - 1. Throws on non-positive inputs.
double qlike(double proxy, double estimate);
double mse_loss(double proxy, double estimate);

struct LossRecord {
    std::uint64_t day = 0;
    std::string asset;
    std::string estimator;
    std::string scheme;
    std::size_t M = 0;
    double estimate = 0.0;
    double proxy = 0.0;
    double mse = 0.0;
    double qlike = 0.0;  // NaN when estimate <= 0
};

// Fills mse and qlike from estimate and proxy.
LossRecord make_record(std::uint64_t day, std::string asset, std::string estimator, std::string scheme,
                       std::size_t M, double estimate, double proxy);

// CSV with header day,asset,estimator,scheme,M,estimate,proxy,mse,qlike.
void write_loss_table(std::ostream& os, std::span<const LossRecord> rows);
std::vector<LossRecord> read_loss_table(std::istream& is);

struct DmResult {
    double mean_diff = 0.0;
    double p_value = 1.0;
    std::size_t n_bootstrap = 0;
    double mean_block_length = 1.0;
};

// Stationary-bootstrap index sequence of length n: blocks start at uniform
// positions, lengths are geometric with mean `mean_block_length`, and indices
// wrap around the end.
std::vector<std::size_t> stationary_bootstrap_indices(std::size_t n, double mean_block_length,
                                                      RngStream& rng);

// Two-sided test of a zero mean loss difference. The p-value is
// (1 + #{|mean* - mean| >= |mean|}) / (n_boot + 1) over stationary-bootstrap
// resamples. An all-zero series gives p = 1. Needs at least 10 observations.
DmResult dm_test(std::span<const double> loss_diff, double mean_block_length, std::size_t n_boot,
                 RngStream& rng);

enum class LossKind { mse, qlike };
std::string to_string(LossKind k);

struct RankingRow {
    std::string scheme;
    std::string baseline;
    std::string loss;
    double pct_sig_pos = 0.0;  // scheme significantly better than baseline
    double pct_sig_neg = 0.0;
};

struct RankingOptions {
    std::string baseline = "cts";
    double mean_block_length = 20.0;
    std::size_t n_boot = 999;
    double level = 0.05;
    std::uint64_t seed = 1;
};

// For every (asset, estimator, M) cell and every non-baseline scheme, the DM
// test on d = L(baseline) - L(scheme) over the days both have. Rows report
// the share of cells with a significant positive / negative mean difference.
// Cells run in parallel with one random stream each.
std::vector<RankingRow> patton_rank(std::span<const LossRecord> records, const RankingOptions& opt);
void write_ranking(std::ostream& os, std::span<const RankingRow> rows);

struct HarFit {
    double beta0 = 0.0;
    double beta_d = 0.0;
    double beta_w = 0.0;
    double beta_m = 0.0;
    double residual_variance = 0.0;
    std::size_t n_obs = 0;
    bool ridge_applied = false;
};

// OLS of RV_d on [1, RV_{d-1}, mean RV_{d-5..d-1}, mean RV_{d-22..d-1}] for
// d = 22 .. n-1. Needs at least 23 observations; falls back to a tiny ridge
// penalty when the design is rank deficient.
HarFit har_fit(std::span<const double> rv);
// One-step forecast from the last 22 values of `history`.
double har_forecast(const HarFit& fit, std::span<const double> history);
// Forecast of rv[d] from a fit on rv[d-window .. d-1], d = window .. n-1.
std::vector<double> rolling_forecast(std::span<const double> rv, std::size_t window = 803);

// sum(est - iv) / sum(iv)
double relative_bias(std::span<const double> estimates, std::span<const double> truths);
// sqrt(mean (est - iv)^2) / mean(iv); never below |relative_bias|.
double relative_rmse(std::span<const double> estimates, std::span<const double> truths);

}  // namespace ttsv
