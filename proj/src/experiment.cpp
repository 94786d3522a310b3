#include "ttsv/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "ttsv/error.hpp"
#include "ttsv/estimators.hpp"
#include "ttsv/io.hpp"
#include "ttsv/parallel.hpp"
#include "ttsv/sampling.hpp"

namespace ttsv {

std::string to_string(StudyScheme s) {
    switch (s) {
    case StudyScheme::cts: return "cts";
    case StudyScheme::itts_true: return "itts_true";
    case StudyScheme::itts_roll: return "itts_roll";
    case StudyScheme::rtts: return "rtts";
    case StudyScheme::ibts_true: return "ibts_true";
    case StudyScheme::ibts_roll: return "ibts_roll";
    case StudyScheme::rbts_true: return "rbts_true";
    case StudyScheme::rbts_roll: return "rbts_roll";
    }
    return "?";
}

const std::vector<StudyScheme>& all_study_schemes() {
    static const std::vector<StudyScheme> all{StudyScheme::cts,       StudyScheme::itts_true, StudyScheme::itts_roll,
                                              StudyScheme::rtts,      StudyScheme::ibts_true, StudyScheme::ibts_roll,
                                              StudyScheme::rbts_true, StudyScheme::rbts_roll};
    return all;
}

StudyScheme parse_study_scheme(const std::string& tag) {
    for (StudyScheme s : all_study_schemes()) {
        if (to_string(s) == tag) return s;
    }
    throw ConfigError("unknown scheme '" + tag + "'");
}

std::string to_string(Estimator e) { return e == Estimator::rv ? "rv" : "pavg"; }

Estimator parse_estimator(const std::string& tag) {
    if (tag == "rv") return Estimator::rv;
    if (tag == "pavg") return Estimator::pavg;
    throw ConfigError("unknown estimator '" + tag + "'");
}

std::string noise_tag(NoiseKind k) {
    switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::iid_gaussian: return "iid";
    case NoiseKind::diurnal_arma: return "arma";
    }
    return "?";
}

NoiseKind parse_noise(const std::string& tag) {
    if (tag == "none") return NoiseKind::none;
    if (tag == "iid") return NoiseKind::iid_gaussian;
    if (tag == "arma") return NoiseKind::diurnal_arma;
    throw ConfigError("unknown noise '" + tag + "'");
}

void ExperimentConfig::validate() const {
    if (days < 1) throw ConfigError("days must be >= 1");
    if (window_days < 1) throw ConfigError("window_days must be >= 1");
    if (schemes.empty()) throw ConfigError("schemes must not be empty");
    if (estimators.empty()) throw ConfigError("estimators must not be empty");
    if (noises.empty()) throw ConfigError("noise must not be empty");
    for (std::size_t m : rv_M) {
        if (m < 1) throw ConfigError("rv_M entries must be >= 1");
    }
    for (std::size_t m : pavg_M) {
        if (m < 1) throw ConfigError("pavg_M entries must be >= 1");
    }
    if (!(preavg_delta > 0.0)) throw ConfigError("preavg_delta must be positive");
    if (proxy_M < 1) throw ConfigError("proxy_M must be >= 1");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    try {
        kernel.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bandwidth: ") + e.what());
    }
    try {
        sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig experiment_config_from(const ConfigFile& f) {
    f.check_keys({"seed",
                  "days",
                  "window_days",
                  "day_length",
                  "n_steps",
                  "lambda_det_file",
                  "varsigma_det_file",
                  "lambda_ou.mean_reversion",
                  "lambda_ou.exp_scale",
                  "varsigma_ou.mean_reversion",
                  "varsigma_ou.exp_scale",
                  "leverage_rho",
                  "noise",
                  "noise.variance",
                  "noise.ar",
                  "noise.ma",
                  "noise.endpoint_ratio",
                  "schemes",
                  "rv_M",
                  "pavg_M",
                  "estimators",
                  "kernel",
                  "bandwidth",
                  "mirror",
                  "kernel_points",
                  "preavg_delta",
                  "proxy",
                  "proxy_M",
                  "threads",
                  "out"});
    ExperimentConfig c;
    SimConfig& s = c.sim;
    const auto count = [&](const std::string& key, std::int64_t fallback) {
        const auto v = f.get_int(key, fallback);
        if (v < 0) throw ConfigError("config key '" + key + "' must be >= 0");
        return static_cast<std::size_t>(v);
    };
    s.master_seed = static_cast<std::uint64_t>(f.get_int("seed", static_cast<std::int64_t>(s.master_seed)));
    c.days = count("days", static_cast<std::int64_t>(c.days));
    c.window_days = count("window_days", static_cast<std::int64_t>(c.window_days));
    s.day_length = f.get_double("day_length", s.day_length);
    s.n_steps = count("n_steps", static_cast<std::int64_t>(s.n_steps));
    if (!(s.day_length > 0.0)) throw ConfigError("day_length must be positive");
    if (s.n_steps < 1) throw ConfigError("n_steps must be >= 1");
    try {
        if (f.has("lambda_det_file")) {
            s.lambda_det = IntensityCurve(read_curve_file(f.get_string("lambda_det_file", "")));
        } else {
            s.lambda_det = default_lambda_det(s.day_length, s.n_steps + 1);
        }
        if (f.has("varsigma_det_file")) {
            s.varsigma_det = IntensityCurve(read_curve_file(f.get_string("varsigma_det_file", "")));
        } else {
            s.varsigma_det = default_varsigma_det(s.day_length, s.n_steps + 1);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("deterministic curve: ") + e.what());
    }
    s.lambda_ou.mean_reversion = f.get_double("lambda_ou.mean_reversion", s.lambda_ou.mean_reversion);
    s.lambda_ou.exp_scale = f.get_double("lambda_ou.exp_scale", s.lambda_ou.exp_scale);
    s.varsigma_ou.mean_reversion = f.get_double("varsigma_ou.mean_reversion", s.varsigma_ou.mean_reversion);
    s.varsigma_ou.exp_scale = f.get_double("varsigma_ou.exp_scale", s.varsigma_ou.exp_scale);
    s.leverage_rho = f.get_double("leverage_rho", s.leverage_rho);
    s.noise.variance = f.get_double("noise.variance", s.noise.variance);
    s.noise.ar = f.get_double("noise.ar", s.noise.ar);
    s.noise.ma = f.get_double("noise.ma", s.noise.ma);
    s.noise.endpoint_ratio = f.get_double("noise.endpoint_ratio", s.noise.endpoint_ratio);

    if (f.has("noise")) {
        c.noises.clear();
        for (const auto& t : f.get_list("noise", {})) c.noises.push_back(parse_noise(t));
    }
    if (f.has("schemes")) {
        c.schemes.clear();
        for (const auto& t : f.get_list("schemes", {})) c.schemes.push_back(parse_study_scheme(t));
    }
    if (f.has("estimators")) {
        c.estimators.clear();
        for (const auto& t : f.get_list("estimators", {})) c.estimators.push_back(parse_estimator(t));
    }
    c.rv_M = f.get_size_list("rv_M", c.rv_M);
    c.pavg_M = f.get_size_list("pavg_M", c.pavg_M);

    const std::string kernel = f.get_string("kernel", "gaussian");
    if (kernel == "gaussian") c.kernel.kernel = Kernel::gaussian;
    else if (kernel == "epanechnikov") c.kernel.kernel = Kernel::epanechnikov;
    else throw ConfigError("unknown kernel '" + kernel + "'");
    c.kernel.bandwidth = f.get_double("bandwidth", s.day_length / 50.0);
    c.kernel.mirror = f.get_bool("mirror", c.kernel.mirror);
    c.kernel.n_points = count("kernel_points", static_cast<std::int64_t>(c.kernel.n_points));
    c.preavg_delta = f.get_double("preavg_delta", c.preavg_delta);

    const std::string proxy = f.get_string("proxy", "iv");
    if (proxy == "iv") c.proxy = ProxyMode::true_iv;
    else if (proxy == "next_rv") c.proxy = ProxyMode::next_rv;
    else throw ConfigError("unknown proxy '" + proxy + "' (iv or next_rv)");
    c.proxy_M = count("proxy_M", static_cast<std::int64_t>(c.proxy_M));
    c.threads = static_cast<int>(f.get_int("threads", c.threads));
    c.out_dir = f.get_string("out", c.out_dir);
    c.validate();
    return c;
}

void apply_full_scale(ExperimentConfig& cfg) { cfg.days = 4800; }

namespace {

struct DayCurves {
    std::optional<IntensityCurve> lambda;
    std::optional<IntensityCurve> varsigma2;
    std::optional<IntensityCurve> spot;
    double proxy_rv = 0.0;
};

struct Needs {
    bool lambda = false;
    bool varsigma2 = false;
    bool spot = false;
};

Needs needs_of(const ExperimentConfig& cfg) {
    Needs n;
    for (StudyScheme s : cfg.schemes) {
        if (s == StudyScheme::itts_roll) n.lambda = true;
        if (s == StudyScheme::rbts_roll) n.varsigma2 = true;
        if (s == StudyScheme::ibts_roll) n.spot = true;
    }
    return n;
}

NoiseSpec noise_spec(const ExperimentConfig& cfg, NoiseKind k) {
    NoiseSpec n = cfg.sim.noise;
    n.kind = k;
    return n;
}

std::string asset_tag(const ExperimentConfig& cfg, NoiseKind k) {
    return noise_tag(k) + (cfg.sim.leverage_rho != 0.0 ? "+lev" : "");
}

double cts_rv(const TickSeries& ticks, std::size_t M) { return rv(returns_from_grid(ticks, cts_grid(ticks.day_length, M))); }

struct RollingCurves {
    std::optional<IntensityCurve> lambda;
    std::optional<IntensityCurve> varsigma2;
    std::optional<IntensityCurve> spot;
};

std::optional<IntensityCurve> window_mean(const std::vector<std::vector<DayCurves>>& est, std::size_t noise,
                                          std::size_t first, std::size_t last,
                                          std::optional<IntensityCurve> DayCurves::*member) {
    std::vector<IntensityCurve> v;
    v.reserve(last - first);
    for (std::size_t d = first; d < last; ++d) {
        const auto& c = est[d][noise].*member;
        if (c) v.push_back(*c);
    }
    if (v.empty()) return std::nullopt;
    return rolling_average(v, v.size());
}

ExperimentResult run_impl(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    const Needs need = needs_of(cfg);
    const std::size_t W = cfg.window_days;
    const std::size_t D = cfg.days;
    const std::size_t K = cfg.noises.size();
    const bool next_proxy = cfg.proxy == ProxyMode::next_rv;
    const bool any_roll = need.lambda || need.varsigma2 || need.spot;

    // Pass 1: per-day kernel estimates (and proxies) on the observed ticks.
    const std::size_t n_pre = (any_roll || next_proxy) ? W + D + (next_proxy ? 1 : 0) : 0;
    std::vector<std::vector<DayCurves>> est(n_pre, std::vector<DayCurves>(K));
    parallel_for(n_pre, threads, [&](std::size_t day) {
        const bool for_roll = any_roll && day + 1 < W + D;
        const bool for_proxy = next_proxy && day > W;
        if (!for_roll && !for_proxy) return;
        const DayPanel p = simulate_day(cfg.sim, day, NoiseSpec{});
        for (std::size_t k = 0; k < K; ++k) {
            RngStream rng(cfg.sim.master_seed, day, Purpose::noise);
            const TickSeries obs = contaminate(p.ticks_clean, noise_spec(cfg, cfg.noises[k]), rng);
            DayCurves& dc = est[day][k];
            if (for_proxy) dc.proxy_rv = cts_rv(obs, cfg.proxy_M);
            if (!for_roll || obs.size() < 2) continue;
            KernelSpec ks = cfg.kernel;
            ks.noise_robust = cfg.noises[k] != NoiseKind::none;
            if (need.lambda || need.spot) dc.lambda = estimate_lambda(obs, ks);
            if (need.varsigma2 || need.spot) dc.varsigma2 = estimate_varsigma2(obs, ks);
            if (need.spot) dc.spot = multiply(*dc.lambda, *dc.varsigma2);
            if (!need.lambda) dc.lambda.reset();
            if (!need.varsigma2) dc.varsigma2.reset();
        }
    });

    // Pass 2: rolling means over the window before each evaluation day.
    std::vector<std::vector<RollingCurves>> roll(any_roll ? D : 0, std::vector<RollingCurves>(K));
    for (std::size_t d = 0; d < roll.size(); ++d) {
        for (std::size_t k = 0; k < K; ++k) {
            if (need.lambda) roll[d][k].lambda = window_mean(est, k, d, d + W, &DayCurves::lambda);
            if (need.varsigma2) roll[d][k].varsigma2 = window_mean(est, k, d, d + W, &DayCurves::varsigma2);
            if (need.spot) roll[d][k].spot = window_mean(est, k, d, d + W, &DayCurves::spot);
        }
    }

    // Pass 3: estimates per evaluation day.
    struct DayOut {
        std::vector<LossRecord> rows;
        std::vector<double> iv;
        std::size_t skipped = 0;
    };
    std::vector<DayOut> out(D);
    parallel_for(D, threads, [&](std::size_t d) {
        const std::uint64_t day = d + W;
        const DayPanel p = simulate_day(cfg.sim, day, NoiseSpec{});
        const IntensityCurve spot = p.spot_variance();
        DayOut& o = out[d];
        for (std::size_t k = 0; k < K; ++k) {
            RngStream rng(cfg.sim.master_seed, day, Purpose::noise);
            const TickSeries obs = contaminate(p.ticks_clean, noise_spec(cfg, cfg.noises[k]), rng);
            const double proxy = next_proxy ? est[day + 1][k].proxy_rv : p.iv;
            const std::string asset = asset_tag(cfg, cfg.noises[k]);
            for (Estimator e : cfg.estimators) {
                for (StudyScheme s : cfg.schemes) {
                    for (std::size_t M : e == Estimator::rv ? cfg.rv_M : cfg.pavg_M) {
                        const bool realized = s == StudyScheme::rtts || s == StudyScheme::rbts_true ||
                                              s == StudyScheme::rbts_roll;
                        if (realized && obs.size() < M) {
                            ++o.skipped;
                            continue;
                        }
                        const RollingCurves* rc = any_roll ? &roll[d][k] : nullptr;
                        if ((s == StudyScheme::itts_roll && !rc->lambda) ||
                            (s == StudyScheme::ibts_roll && !rc->spot) ||
                            (s == StudyScheme::rbts_roll && !rc->varsigma2)) {
                            ++o.skipped;
                            continue;
                        }
                        SamplingGrid g;
                        switch (s) {
                        case StudyScheme::cts: g = cts_grid(obs.day_length, M); break;
                        case StudyScheme::itts_true: g = itts_grid(p.lambda_curve, M); break;
                        case StudyScheme::itts_roll: g = itts_grid(*rc->lambda, M); break;
                        case StudyScheme::rtts: g = rtts_grid(obs, M); break;
                        case StudyScheme::ibts_true: g = ibts_grid(spot, M); break;
                        case StudyScheme::ibts_roll: g = ibts_grid(*rc->spot, M); break;
                        case StudyScheme::rbts_true: g = rbts_grid(obs, M); break;
                        case StudyScheme::rbts_roll: g = rbts_grid(obs, *rc->varsigma2, M); break;
                        }
                        const auto r = returns_from_grid(obs, g);
                        double value = 0.0;
                        if (e == Estimator::rv) {
                            value = rv(r);
                        } else {
                            const std::size_t H = default_window(M, cfg.preavg_delta);
                            if (r.size() < 2 * H) {
                                ++o.skipped;
                                continue;
                            }
                            value = preavg_rv(r, PreAvgSpec::triangular(H));
                        }
                        o.rows.push_back(make_record(d, asset, to_string(e), to_string(s), M, value, proxy));
                        o.iv.push_back(p.iv);
                    }
                }
            }
        }
    });

    ExperimentResult res;
    for (auto& o : out) {
        res.losses.insert(res.losses.end(), std::make_move_iterator(o.rows.begin()),
                          std::make_move_iterator(o.rows.end()));
        res.iv.insert(res.iv.end(), o.iv.begin(), o.iv.end());
        res.skipped_cells += o.skipped;
    }
    res.aggregate = aggregate(res.losses, res.iv);
    return res;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) { return run_impl(cfg, cfg.threads); }

ExperimentResult run_experiment_serial(const ExperimentConfig& cfg) { return run_impl(cfg, 1); }

std::vector<AggregateRow> aggregate(const std::vector<LossRecord>& losses, const std::vector<double>& iv) {
    if (losses.size() != iv.size()) throw std::invalid_argument("aggregate: one IV per record required");
    // Keyed in first-appearance order so the output follows the config order.
    using Key = std::tuple<std::string, std::string, std::string, std::size_t>;
    std::map<Key, std::size_t> index;
    std::vector<Key> keys;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const auto& r = losses[i];
        Key key{r.asset, r.estimator, r.scheme, r.M};
        auto [it, fresh] = index.emplace(key, keys.size());
        if (fresh) {
            keys.push_back(key);
            members.emplace_back();
        }
        members[it->second].push_back(i);
    }
    std::vector<AggregateRow> rows;
    for (std::size_t c = 0; c < keys.size(); ++c) {
        std::vector<double> e;
        std::vector<double> t;
        for (std::size_t i : members[c]) {
            e.push_back(losses[i].estimate);
            t.push_back(iv[i]);
        }
        AggregateRow a;
        std::tie(a.noise, a.estimator, a.scheme, a.M) = keys[c];
        a.n_days = e.size();
        a.rel_bias = relative_bias(e, t);
        a.rel_rmse = relative_rmse(e, t);
        // Delta-method standard error of the ratio sum(e - iv) / sum(iv).
        double sum_t = 0.0;
        for (double x : t) sum_t += x;
        const double n = static_cast<double>(e.size());
        double ss = 0.0;
        std::vector<double> z(e.size());
        double zbar = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            z[i] = (e[i] - t[i]) - a.rel_bias * t[i];
            zbar += z[i] / n;
        }
        for (double zi : z) ss += (zi - zbar) * (zi - zbar);
        a.bias_se = e.size() > 1 ? std::sqrt(n * ss / (n - 1.0)) / sum_t : 0.0;
        rows.push_back(a);
    }
    return rows;
}

void write_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "noise,estimator,scheme,M,n_days,rel_bias,rel_rmse,bias_se\n";
    for (const auto& r : rows) {
        os << r.noise << ',' << r.estimator << ',' << r.scheme << ',' << r.M << ',' << r.n_days << ','
           << fmt(r.rel_bias) << ',' << fmt(r.rel_rmse) << ',' << fmt(r.bias_se) << '\n';
    }
}

std::vector<AggregateRow> read_aggregate(std::istream& is) {
    std::vector<AggregateRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw DataError("aggregate: empty file");
    const auto head = split_list(line);
    const std::vector<std::string> want{"noise", "estimator", "scheme", "M", "n_days", "rel_bias", "rel_rmse", "bias_se"};
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < head.size(); ++i) col[head[i]] = i;
    for (const auto& w : want) {
        if (!col.count(w)) throw DataError("aggregate: missing column '" + w + "'");
    }
    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::istringstream in(line);
        std::string cell;
        while (std::getline(in, cell, ',')) f.push_back(trim(cell));
        if (f.size() < head.size()) throw DataError("aggregate line " + std::to_string(n) + ": too few fields");
        AggregateRow r;
        try {
            r.noise = f[col["noise"]];
            r.estimator = f[col["estimator"]];
            r.scheme = f[col["scheme"]];
            r.M = static_cast<std::size_t>(std::stoull(f[col["M"]]));
            r.n_days = static_cast<std::size_t>(std::stoull(f[col["n_days"]]));
            r.rel_bias = std::stod(f[col["rel_bias"]]);
            r.rel_rmse = std::stod(f[col["rel_rmse"]]);
            r.bias_se = std::stod(f[col["bias_se"]]);
        } catch (const std::exception&) {
            throw DataError("aggregate line " + std::to_string(n) + ": bad number");
        }
        rows.push_back(r);
    }
    return rows;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& res) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    const auto open = [&](const std::string& name) {
        std::ofstream f(std::filesystem::path(cfg.out_dir) / name);
        if (!f) throw ConfigError("cannot write to output directory '" + cfg.out_dir + "'");
        return f;
    };
    auto losses = open("losses.csv");
    write_loss_table(losses, res.losses);
    auto agg = open("aggregate.csv");
    write_aggregate(agg, res.aggregate);
    if (!losses || !agg) throw ConfigError("write failed in '" + cfg.out_dir + "'");
}

}  // namespace ttsv
