#include "ttsv/eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ttsv/error.hpp"
#include "ttsv/parallel.hpp"

namespace ttsv {

double qlike(double proxy, double estimate) {
    if (!(proxy > 0.0) || !(estimate > 0.0)) throw std::invalid_argument("qlike: inputs must be positive");
    const double x = proxy / estimate;
    return x - std::log(x) - 1.0;
}

double mse_loss(double proxy, double estimate) { return (proxy - estimate) * (proxy - estimate); }

LossRecord make_record(std::uint64_t day, std::string asset, std::string estimator, std::string scheme,
                       std::size_t M, double estimate, double proxy) {
    LossRecord r;
    r.day = day;
    r.asset = std::move(asset);
    r.estimator = std::move(estimator);
    r.scheme = std::move(scheme);
    r.M = M;
    r.estimate = estimate;
    r.proxy = proxy;
    r.mse = mse_loss(proxy, estimate);
    r.qlike = (estimate > 0.0 && proxy > 0.0) ? qlike(proxy, estimate) : std::numeric_limits<double>::quiet_NaN();
    return r;
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream s(line);
    while (std::getline(s, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

}  // namespace

void write_loss_table(std::ostream& os, std::span<const LossRecord> rows) {
    os << "day,asset,estimator,scheme,M,estimate,proxy,mse,qlike\n";
    for (const auto& r : rows) {
        os << r.day << ',' << r.asset << ',' << r.estimator << ',' << r.scheme << ',' << r.M << ','
           << fmt(r.estimate) << ',' << fmt(r.proxy) << ',' << fmt(r.mse) << ',' << fmt(r.qlike) << '\n';
    }
}

std::vector<LossRecord> read_loss_table(std::istream& is) {
    std::vector<LossRecord> rows;
    std::string line;
    if (!std::getline(is, line)) return rows;
    if (line.rfind("day,asset,estimator,scheme,M,estimate,proxy,mse,qlike", 0) != 0) {
        throw DataError("loss table: unexpected header '" + line + "'");
    }
    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 9) throw DataError("line " + std::to_string(n) + ": expected 9 fields");
        LossRecord r;
        r.day = static_cast<std::uint64_t>(parse_double(f[0], n));
        r.asset = f[1];
        r.estimator = f[2];
        r.scheme = f[3];
        r.M = static_cast<std::size_t>(parse_double(f[4], n));
        r.estimate = parse_double(f[5], n);
        r.proxy = parse_double(f[6], n);
        r.mse = parse_double(f[7], n);
        r.qlike = parse_double(f[8], n);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<std::size_t> stationary_bootstrap_indices(std::size_t n, double mean_block_length, RngStream& rng) {
    if (!(mean_block_length >= 1.0)) throw std::invalid_argument("bootstrap: mean block length must be >= 1");
    const double p = 1.0 / mean_block_length;
    std::vector<std::size_t> idx;
    idx.reserve(n);
    while (idx.size() < n) {
        const std::size_t start = rng.uniform_index(n);
        const std::size_t len = 1 + rng.geometric(p);
        for (std::size_t k = 0; k < len && idx.size() < n; ++k) idx.push_back((start + k) % n);
    }
    return idx;
}

DmResult dm_test(std::span<const double> loss_diff, double mean_block_length, std::size_t n_boot, RngStream& rng) {
    const std::size_t n = loss_diff.size();
    if (n < 10) throw std::invalid_argument("dm test: need at least 10 observations");
    if (n_boot < 1) throw std::invalid_argument("dm test: need at least one resample");
    DmResult res;
    res.n_bootstrap = n_boot;
    res.mean_block_length = mean_block_length;
    double sum = 0.0;
    bool all_zero = true;
    for (double d : loss_diff) {
        sum += d;
        if (d != 0.0) all_zero = false;
    }
    res.mean_diff = sum / static_cast<double>(n);
    if (all_zero) {
        res.p_value = 1.0;
        return res;
    }
    std::size_t exceed = 0;
    const double stat = std::abs(res.mean_diff);
    for (std::size_t b = 0; b < n_boot; ++b) {
        const auto idx = stationary_bootstrap_indices(n, mean_block_length, rng);
        double s = 0.0;
        for (std::size_t i : idx) s += loss_diff[i];
        if (std::abs(s / static_cast<double>(n) - res.mean_diff) >= stat) ++exceed;
    }
    res.p_value = static_cast<double>(1 + exceed) / static_cast<double>(n_boot + 1);
    return res;
}

std::string to_string(LossKind k) { return k == LossKind::mse ? "mse" : "qlike"; }

std::vector<RankingRow> patton_rank(std::span<const LossRecord> records, const RankingOptions& opt) {
    using CellKey = std::tuple<std::string, std::string, std::size_t>;  // asset, estimator, M
    std::map<CellKey, std::map<std::string, std::map<std::uint64_t, const LossRecord*>>> cells;
    for (const auto& r : records) cells[{r.asset, r.estimator, r.M}][r.scheme][r.day] = &r;

    bool baseline_seen = false;
    struct Job {
        const std::map<std::uint64_t, const LossRecord*>* base;
        const std::map<std::uint64_t, const LossRecord*>* other;
        std::string scheme;
        LossKind loss;
    };
    std::vector<Job> jobs;
    for (const auto& [key, schemes] : cells) {
        const auto b = schemes.find(opt.baseline);
        if (b == schemes.end()) continue;
        baseline_seen = true;
        for (const auto& [scheme, days] : schemes) {
            if (scheme == opt.baseline) continue;
            for (LossKind k : {LossKind::mse, LossKind::qlike}) jobs.push_back({&b->second, &days, scheme, k});
        }
    }
    if (!baseline_seen) throw DataError("ranking: baseline scheme '" + opt.baseline + "' not found");

    // -1, 0, +1 per job; 2 when the cell has too few common days.
    std::vector<int> sign(jobs.size(), 2);
    parallel_for(jobs.size(), 0, [&](std::size_t j) {
        const Job& job = jobs[j];
        std::vector<double> d;
        for (const auto& [day, rec] : *job.other) {
            const auto it = job.base->find(day);
            if (it == job.base->end()) continue;
            const double lb = job.loss == LossKind::mse ? it->second->mse : it->second->qlike;
            const double ls = job.loss == LossKind::mse ? rec->mse : rec->qlike;
            if (std::isnan(lb) || std::isnan(ls)) continue;
            d.push_back(lb - ls);
        }
        if (d.size() < 10) return;
        RngStream rng(opt.seed, j, Purpose::bootstrap);
        const auto res = dm_test(d, opt.mean_block_length, opt.n_boot, rng);
        sign[j] = res.p_value < opt.level ? (res.mean_diff > 0.0 ? 1 : -1) : 0;
    });

    std::map<std::pair<std::string, std::string>, std::array<std::size_t, 3>> tally;  // pos, neg, total
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (sign[j] == 2) continue;
        auto& t = tally[{jobs[j].scheme, to_string(jobs[j].loss)}];
        if (sign[j] > 0) ++t[0];
        if (sign[j] < 0) ++t[1];
        ++t[2];
    }
    std::vector<RankingRow> rows;
    for (const auto& [key, t] : tally) {
        RankingRow r;
        r.scheme = key.first;
        r.baseline = opt.baseline;
        r.loss = key.second;
        r.pct_sig_pos = 100.0 * static_cast<double>(t[0]) / static_cast<double>(t[2]);
        r.pct_sig_neg = 100.0 * static_cast<double>(t[1]) / static_cast<double>(t[2]);
        rows.push_back(r);
    }
    return rows;
}

void write_ranking(std::ostream& os, std::span<const RankingRow> rows) {
    os << "scheme,baseline,loss,pct_sig_pos,pct_sig_neg\n";
    for (const auto& r : rows) {
        os << r.scheme << ',' << r.baseline << ',' << r.loss << ',' << fmt(r.pct_sig_pos) << ','
           << fmt(r.pct_sig_neg) << '\n';
    }
}

namespace {

Eigen::RowVector4d har_row(std::span<const double> rv, std::size_t d) {
    double w = 0.0;
    double m = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) w += rv[d - k];
    for (std::size_t k = 1; k <= 22; ++k) m += rv[d - k];
    return {1.0, rv[d - 1], w / 5.0, m / 22.0};
}

}  // namespace

HarFit har_fit(std::span<const double> rv) {
    if (rv.size() < 23) throw std::invalid_argument("har: need at least 23 observations");
    const std::size_t n = rv.size() - 22;
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X.row(static_cast<Eigen::Index>(i)) = har_row(rv, i + 22);
        y(static_cast<Eigen::Index>(i)) = rv[i + 22];
    }
    HarFit fit;
    fit.n_obs = n;
    Eigen::Vector4d beta;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() == 4) {
        beta = qr.solve(y);
    } else {
        const Eigen::Matrix4d xtx = X.transpose() * X;
        const double penalty = 1e-10 * std::max(xtx.trace(), 1e-300) / 4.0;
        beta = (xtx + penalty * Eigen::Matrix4d::Identity()).ldlt().solve(X.transpose() * y);
        fit.ridge_applied = true;
    }
    fit.beta0 = beta(0);
    fit.beta_d = beta(1);
    fit.beta_w = beta(2);
    fit.beta_m = beta(3);
    const Eigen::VectorXd resid = y - X * beta;
    fit.residual_variance = n > 4 ? resid.squaredNorm() / static_cast<double>(n - 4) : 0.0;
    return fit;
}

double har_forecast(const HarFit& fit, std::span<const double> history) {
    if (history.size() < 22) throw std::invalid_argument("har forecast: need 22 past values");
    const Eigen::RowVector4d x = har_row(history, history.size());
    return fit.beta0 * x(0) + fit.beta_d * x(1) + fit.beta_w * x(2) + fit.beta_m * x(3);
}

std::vector<double> rolling_forecast(std::span<const double> rv, std::size_t window) {
    if (window < 23) throw std::invalid_argument("rolling forecast: window must be >= 23");
    if (rv.size() <= window) throw std::invalid_argument("rolling forecast: insufficient history");
    std::vector<double> out(rv.size() - window);
    for (std::size_t d = window; d < rv.size(); ++d) {
        const auto past = rv.subspan(d - window, window);
        out[d - window] = har_forecast(har_fit(past), past);
    }
    return out;
}

double relative_bias(std::span<const double> estimates, std::span<const double> truths) {
    if (estimates.empty() || estimates.size() != truths.size()) {
        throw std::invalid_argument("relative bias: need equal non-empty inputs");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (!(truths[i] > 0.0)) throw std::invalid_argument("relative bias: truths must be positive");
        num += estimates[i] - truths[i];
        den += truths[i];
    }
    return num / den;
}

double relative_rmse(std::span<const double> estimates, std::span<const double> truths) {
    if (estimates.empty() || estimates.size() != truths.size()) {
        throw std::invalid_argument("relative rmse: need equal non-empty inputs");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (!(truths[i] > 0.0)) throw std::invalid_argument("relative rmse: truths must be positive");
        num += (estimates[i] - truths[i]) * (estimates[i] - truths[i]);
        den += truths[i];
    }
    // sqrt(mean squared error) / mean IV; equals sqrt(n sum e^2) / sum IV.
    return std::sqrt(static_cast<double>(truths.size()) * num) / den;
}

}  // namespace ttsv
