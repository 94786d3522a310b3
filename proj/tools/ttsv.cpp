// Command-line front end: simulate, estimate, experiment, evaluate,
// forecast and plotdata. Exit codes: 0 ok, 2 config error, 3 data error.

#include <CLI11.hpp>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "ttsv/config.hpp"
#include "ttsv/error.hpp"
#include "ttsv/estimators.hpp"
#include "ttsv/eval.hpp"
#include "ttsv/experiment.hpp"
#include "ttsv/intensity.hpp"
#include "ttsv/io.hpp"
#include "ttsv/plotdata.hpp"
#include "ttsv/sampling.hpp"

namespace fs = std::filesystem;
using namespace ttsv;

namespace {

struct Global {
    std::string config;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string out = "out";
    bool out_given = false;
};

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
}

ExperimentConfig base_config(const Global& g) {
    ConfigFile file;
    if (!g.config.empty()) file = ConfigFile::load(g.config);
    ExperimentConfig c = experiment_config_from(file);
    if (g.seed) c.sim.master_seed = *g.seed;
    if (g.threads > 0) c.threads = g.threads;
    if (g.out_given || !file.has("out")) c.out_dir = g.out;
    return c;
}

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

int cmd_simulate(const Global& g, std::size_t days, const std::string& noise) {
    ExperimentConfig c = base_config(g);
    const NoiseKind kind = parse_noise(noise);
    NoiseSpec ns = c.sim.noise;
    ns.kind = kind;
    std::vector<TickDay> out(days);
    std::vector<DayPanel> truth;
    auto truth_file = open_out(fs::path(c.out_dir) / "truth.csv");
    truth_file << "day,n_ticks,iv,riv,iq\n";
    for (std::size_t d = 0; d < days; ++d) {
        DayPanel p = simulate_day(c.sim, d, ns);
        out[d].day = static_cast<std::int64_t>(d);
        out[d].ticks = kind == NoiseKind::none ? p.ticks_clean : p.ticks_noisy;
        truth_file << d << ',' << p.ticks_clean.size() << ',' << num(p.iv) << ',' << num(p.riv) << ','
                   << num(p.iq) << '\n';
    }
    auto ticks = open_out(fs::path(c.out_dir) / "ticks.csv");
    write_ticks(ticks, out);
    std::cout << "wrote " << days << " days to " << c.out_dir << "\n";
    return 0;
}

int cmd_estimate(const Global& g, const std::string& ticks_path, const std::string& scheme_tag,
                 std::size_t M, const std::string& estimator, double bandwidth, bool no_mirror,
                 std::size_t window_days) {
    ExperimentConfig c = base_config(g);
    const Scheme scheme = [&] {
        try {
            return parse_scheme(scheme_tag);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();
    const Estimator est = parse_estimator(estimator);
    if (M < 1) throw ConfigError("--M must be >= 1");
    KernelSpec ks = c.kernel;
    if (bandwidth > 0.0) ks.bandwidth = bandwidth;
    if (no_mirror) ks.mirror = false;
    if (window_days < 1) throw ConfigError("--window-days must be >= 1");

    const TickIngest in = read_ticks_file(ticks_path, c.sim.day_length);
    if (in.duplicates_collapsed > 0) {
        std::cerr << "warning: " << in.duplicates_collapsed << " duplicate timestamps collapsed\n";
    }
    RollingEstimate lam(window_days), vs2(window_days), spot(window_days);
    auto f = open_out(fs::path(c.out_dir) / "estimates.csv");
    f << "day,scheme,M,estimator,estimate,n_ticks\n";
    for (const auto& day : in.days) {
        const TickSeries& t = day.ticks;
        if (t.size() < 2) {
            std::cerr << "warning: day " << day.day << " has fewer than 2 ticks, skipped\n";
            continue;
        }
        const IntensityCurve l = estimate_lambda(t, ks);
        const IntensityCurve v = estimate_varsigma2(t, ks);
        // The first day has no history and uses its own curves.
        const IntensityCurve lr = lam.empty() ? l : lam.average();
        const IntensityCurve vr = vs2.empty() ? v : vs2.average();
        const IntensityCurve sr = spot.empty() ? multiply(l, v) : spot.average();
        lam.push(l);
        vs2.push(v);
        spot.push(multiply(l, v));

        if ((scheme == Scheme::rtts || scheme == Scheme::rbts) && t.size() < M) {
            std::cerr << "warning: day " << day.day << " has fewer ticks than M, skipped\n";
            continue;
        }
        SamplingGrid grid;
        switch (scheme) {
        case Scheme::cts: grid = cts_grid(t.day_length, M); break;
        case Scheme::itts: grid = itts_grid(lr, M); break;
        case Scheme::rtts: grid = rtts_grid(t, M); break;
        case Scheme::ibts: grid = ibts_grid(sr, M); break;
        case Scheme::rbts: grid = rbts_grid(t, vr, M); break;
        }
        // Before the first trade the price is anchored at the first observed level.
        const auto r = returns_from_grid(t, grid, t.log_prices.front());
        double value = rv(r);
        if (est == Estimator::pavg) {
            const std::size_t H = default_window(M, c.preavg_delta);
            if (r.size() < 2 * H) {
                std::cerr << "warning: day " << day.day << " too few returns for pre-averaging, skipped\n";
                continue;
            }
            value = preavg_rv(r, PreAvgSpec::triangular(H));
        }
        f << day.day << ',' << scheme_tag << ',' << M << ',' << estimator << ',' << num(value) << ','
          << t.size() << '\n';
    }
    return 0;
}

int cmd_experiment(const Global& g, bool paper_scale, std::optional<std::size_t> days) {
    ExperimentConfig c = base_config(g);
    if (days) c.days = *days;
    if (paper_scale) {
        apply_full_scale(c);
        std::cerr << "warning: full-scale run (" << c.days << " days) takes hours on a desktop\n";
    }
    c.validate();
    const ExperimentResult r = run_experiment(c);
    write_experiment(c, r);
    std::cout << r.losses.size() << " loss rows, " << r.aggregate.size() << " aggregate rows, "
              << r.skipped_cells << " cells skipped; output in " << c.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const Global& g, const std::string& losses_path, const std::string& baseline, double block,
                 std::size_t n_boot) {
    std::ifstream in(losses_path);
    if (!in) throw DataError("cannot open '" + losses_path + "'");
    const auto rows = read_loss_table(in);
    RankingOptions opt;
    opt.baseline = baseline;
    opt.mean_block_length = block;
    opt.n_boot = n_boot;
    if (g.seed) opt.seed = *g.seed;
    if (!(block >= 1.0)) throw ConfigError("--block-length must be >= 1");
    if (n_boot < 1) throw ConfigError("--n-boot must be >= 1");
    const auto ranking = patton_rank(rows, opt);
    auto f = open_out(fs::path(g.out) / "ranking.csv");
    write_ranking(f, ranking);
    write_ranking(std::cout, ranking);
    return 0;
}

int cmd_forecast(const Global& g, const std::string& rv_path, std::size_t window) {
    std::ifstream in(rv_path);
    if (!in) throw DataError("cannot open '" + rv_path + "'");
    // One value per line, or the last column of a CSV with a header.
    std::vector<double> series;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        const std::string cell = trim(comma == std::string::npos ? line : line.substr(comma + 1));
        try {
            std::size_t pos = 0;
            const double v = std::stod(cell, &pos);
            if (pos != cell.size()) throw std::invalid_argument(cell);
            series.push_back(v);
        } catch (const std::exception&) {
            if (n == 1) continue;  // header
            throw DataError("line " + std::to_string(n) + ": bad value '" + cell + "'");
        }
    }
    if (series.size() <= window) throw DataError("forecast: need more than " + std::to_string(window) + " values");
    const auto fc = rolling_forecast(series, window);
    auto f = open_out(fs::path(g.out) / "forecasts.csv");
    f << "index,forecast,realized\n";
    for (std::size_t i = 0; i < fc.size(); ++i) {
        f << window + i << ',' << num(fc[i]) << ',' << num(series[window + i]) << '\n';
    }
    std::cout << fc.size() << " forecasts written\n";
    return 0;
}

int cmd_plotdata(const Global& g, const std::string& agg_path, bool svg) {
    std::ifstream in(agg_path);
    if (!in) throw DataError("cannot open '" + agg_path + "'");
    const auto rows = read_aggregate(in);
    const auto names = emit_plotdata(rows, g.out, svg);
    std::cout << names.size() << " panels written to " << g.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tick-time stochastic volatility: simulation, sampling schemes and evaluation"};
    app.require_subcommand(1);
    Global g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "key = value config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", g.threads, "OpenMP threads (0 = default)")->check(CLI::NonNegativeNumber);
    auto* out_opt = app.add_option("--out", g.out, "output directory");

    auto* sim = app.add_subcommand("simulate", "simulate tick data and write ticks.csv and truth.csv");
    std::size_t sim_days = 1;
    std::string sim_noise = "none";
    sim->add_option("--days", sim_days, "number of days")->check(CLI::PositiveNumber);
    sim->add_option("--noise", sim_noise, "none, iid or arma");

    auto* est = app.add_subcommand("estimate", "RV or pre-averaged RV per day of a tick CSV");
    std::string ticks_path, scheme = "cts", estimator = "rv";
    std::size_t M = 78, window_days = 50;
    double bandwidth = 0.0;
    bool no_mirror = false;
    est->add_option("--ticks", ticks_path, "tick CSV day,time_seconds,log_price")->required();
    est->add_option("--scheme", scheme, "cts, itts, rtts, ibts or rbts");
    est->add_option("--M", M, "number of returns per day");
    est->add_option("--estimator", estimator, "rv or pavg");
    est->add_option("--bandwidth", bandwidth, "kernel bandwidth in seconds");
    est->add_flag("--no-mirror", no_mirror, "disable boundary reflection");
    est->add_option("--window-days", window_days, "rolling window for curve estimates");

    auto* exp = app.add_subcommand("experiment", "Monte Carlo study; writes losses.csv and aggregate.csv");
    bool paper_scale = false;
    std::size_t exp_days = 0;
    auto* days_opt = exp->add_option("--days", exp_days, "override number of days")->check(CLI::PositiveNumber);
    exp->add_flag("--paper-scale", paper_scale, "4800 days");

    auto* ev = app.add_subcommand("evaluate", "DM ranking of schemes against a baseline");
    std::string losses_path, baseline = "cts";
    double block = 20.0;
    std::size_t n_boot = 999;
    ev->add_option("--losses", losses_path, "losses.csv")->required();
    ev->add_option("--baseline", baseline, "baseline scheme tag");
    ev->add_option("--block-length", block, "mean stationary-bootstrap block length");
    ev->add_option("--n-boot", n_boot, "bootstrap resamples");

    auto* fc = app.add_subcommand("forecast", "rolling HAR one-step forecasts");
    std::string rv_path;
    std::size_t fc_window = 803;
    fc->add_option("--rv", rv_path, "RV series, one per line or last CSV column")->required();
    fc->add_option("--window", fc_window, "estimation window");

    auto* pd = app.add_subcommand("plotdata", "per-panel CSV and SVG from aggregate.csv");
    std::string agg_path;
    bool svg = false;
    pd->add_option("--aggregate", agg_path, "aggregate.csv")->required();
    pd->add_flag("--svg", svg, "also write SVG line plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (*seed_opt) g.seed = seed;
    g.out_given = out_opt->count() > 0;
    if (g.threads > 0) omp_set_num_threads(g.threads);

    try {
        if (*sim) return cmd_simulate(g, sim_days, sim_noise);
        if (*est) return cmd_estimate(g, ticks_path, scheme, M, estimator, bandwidth, no_mirror, window_days);
        if (*exp) return cmd_experiment(g, paper_scale, *days_opt ? std::optional<std::size_t>(exp_days) : std::nullopt);
        if (*ev) return cmd_evaluate(g, losses_path, baseline, block, n_boot);
        if (*fc) return cmd_forecast(g, rv_path, fc_window);
        if (*pd) return cmd_plotdata(g, agg_path, svg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
