#include "ttsv/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ttsv/config.hpp"
#include "ttsv/error.hpp"

namespace ttsv {

namespace {

bool parse_number(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string f;
    while (std::getline(in, f, ',')) out.push_back(trim(f));
    return out;
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
    throw DataError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

TickIngest read_ticks(std::istream& is, double day_length) {
    TickIngest out;
    std::string line;
    std::size_t n = 0;
    bool have_day = false;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = fields(line);
        if (n == 1 && !f.empty() && f[0] == "day") continue;
        if (f.size() != 3) bad(n, "expected day,time_seconds,log_price");
        double d = 0.0;
        double t = 0.0;
        double p = 0.0;
        if (!parse_number(f[0], d) || d != std::floor(d)) bad(n, "bad day '" + f[0] + "'");
        if (!parse_number(f[1], t)) bad(n, "bad time '" + f[1] + "'");
        if (!parse_number(f[2], p)) bad(n, "bad log price '" + f[2] + "'");
        if (t < 0.0 || t > day_length) bad(n, "time outside [0, day length]");
        const auto day = static_cast<std::int64_t>(d);
        if (!have_day || day != out.days.back().day) {
            if (have_day && day < out.days.back().day) bad(n, "days out of order");
            TickDay td;
            td.day = day;
            td.ticks.day_length = day_length;
            out.days.push_back(std::move(td));
            have_day = true;
        }
        TickSeries& ts = out.days.back().ticks;
        if (!ts.times.empty() && t == ts.times.back()) {
            ts.log_prices.back() = p;
            ++out.duplicates_collapsed;
            continue;
        }
        if (!ts.times.empty() && t < ts.times.back()) bad(n, "times decrease within a day");
        ts.times.push_back(t);
        ts.log_prices.push_back(p);
    }
    return out;
}

TickIngest read_ticks_file(const std::string& path, double day_length) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tick file '" + path + "'");
    return read_ticks(in, day_length);
}

void write_ticks(std::ostream& os, const std::vector<TickDay>& days) {
    os << "day,time_seconds,log_price\n" << std::setprecision(17);
    for (const auto& d : days) {
        for (std::size_t i = 0; i < d.ticks.size(); ++i) {
            os << d.day << ',' << d.ticks.times[i] << ',' << d.ticks.log_prices[i] << '\n';
        }
    }
}

Curve read_curve(std::istream& is) {
    std::vector<double> t;
    std::vector<double> v;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto f = fields(line);
        if (n == 1 && !f.empty() && f[0] == "t") continue;
        double a = 0.0;
        double b = 0.0;
        if (f.size() != 2 || !parse_number(f[0], a) || !parse_number(f[1], b)) bad(n, "expected t,value");
        t.push_back(a);
        v.push_back(b);
    }
    if (t.size() < 2) throw DataError("curve: need at least 2 points");
    const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double expect = t.front() + h * static_cast<double>(k);
        if (std::abs(t[k] - expect) > 1e-6 * std::max(1.0, std::abs(h))) {
            throw DataError("curve: time grid is not uniform at point " + std::to_string(k + 1));
        }
    }
    return Curve(t.front(), t.back(), std::move(v));
}

Curve read_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open curve file '" + path + "'");
    return read_curve(in);
}

void write_curve(std::ostream& os, const Curve& c) {
    os << "t,value\n" << std::setprecision(17);
    for (std::size_t k = 0; k < c.size(); ++k) os << c.time_at(k) << ',' << c.value(k) << '\n';
}

}  // namespace ttsv
