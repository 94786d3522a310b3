#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttsv/config.hpp"
#include "ttsv/eval.hpp"
#include "ttsv/intensity.hpp"
#include "ttsv/sim.hpp"

namespace ttsv {

// Scheme tags of the study. `_true` variants use the simulated curves,
// `_roll` variants the rolling kernel estimates of the previous window.
enum class StudyScheme { cts, itts_true, itts_roll, rtts, ibts_true, ibts_roll, rbts_true, rbts_roll };
std::string to_string(StudyScheme s);
StudyScheme parse_study_scheme(const std::string& tag);
const std::vector<StudyScheme>& all_study_schemes();

enum class Estimator { rv, pavg };
std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& tag);

// Noise tags: none, iid, arma.
std::string noise_tag(NoiseKind k);
NoiseKind parse_noise(const std::string& tag);

enum class ProxyMode { true_iv, next_rv };

struct ExperimentConfig {
    SimConfig sim;
    std::size_t days = 500;
    std::size_t window_days = 50;
    std::vector<StudyScheme> schemes = all_study_schemes();
    std::vector<std::size_t> rv_M{13, 26, 39, 78, 260, 390};
    std::vector<std::size_t> pavg_M{78, 260, 390, 780, 2340, 4680};
    std::vector<Estimator> estimators{Estimator::rv, Estimator::pavg};
    std::vector<NoiseKind> noises{NoiseKind::none, NoiseKind::iid_gaussian};
    KernelSpec kernel{};
    double preavg_delta = 1.0;
    ProxyMode proxy = ProxyMode::true_iv;
    std::size_t proxy_M = 78;  // CTS frequency of the next-day RV proxy
    int threads = 0;           // 0: OpenMP default
    std::string out_dir = "out";

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Builds a config from `key = value` entries; see docs/config.md.
ExperimentConfig experiment_config_from(const ConfigFile& file);
// Full-scale sizes (4800 days); callers print a runtime warning.
void apply_full_scale(ExperimentConfig& cfg);

struct AggregateRow {
    std::string noise;
    std::string estimator;
    std::string scheme;
    std::size_t M = 0;
    std::size_t n_days = 0;
    double rel_bias = 0.0;
    double rel_rmse = 0.0;
    double bias_se = 0.0;  // Monte Carlo standard error of rel_bias
};

struct ExperimentResult {
    std::vector<LossRecord> losses;
    std::vector<double> iv;  // true IV, parallel to `losses`
    std::vector<AggregateRow> aggregate;
    std::size_t skipped_cells = 0;  // fewer ticks than M, or M < 2H
};

// Evaluation day d (0 .. days-1) is simulated day d + window_days; days
// 0 .. window_days-1 only warm up the rolling estimates. Every cell depends
// only on its own day and the window before it, so the output does not
// depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
// Serial reference of the same computation.
ExperimentResult run_experiment_serial(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate(const std::vector<LossRecord>& losses, const std::vector<double>& iv);
void write_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate(std::istream& is);

// Writes losses.csv and aggregate.csv under cfg.out_dir.
void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& res);

}  // namespace ttsv
