#include "ttsv/plotdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "ttsv/error.hpp"

namespace ttsv {

std::vector<Panel> make_panels(const std::vector<AggregateRow>& rows) {
    std::vector<Panel> panels;
    std::map<std::string, std::size_t> index;
    for (const char* metric : {"rel_bias", "rel_rmse"}) {
        for (const auto& r : rows) {
            const std::string name = r.estimator + "_" + metric + "_" + r.noise;
            auto [it, fresh] = index.emplace(name, panels.size());
            if (fresh) panels.push_back({name, metric, {}});
            const double v = std::string(metric) == "rel_bias" ? r.rel_bias : r.rel_rmse;
            panels[it->second].rows.push_back({r.M, r.scheme, v});
        }
    }
    return panels;
}

void write_panel_csv(std::ostream& os, const Panel& p) {
    os << "M,scheme," << p.metric << '\n' << std::setprecision(10);
    for (const auto& r : p.rows) os << r.M << ',' << r.scheme << ',' << r.value << '\n';
}

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_panel_svg(std::ostream& os, const Panel& p) {
    constexpr double W = 640.0, H = 400.0, L = 70.0, R = 150.0, T = 40.0, B = 50.0;
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    std::vector<std::string> order;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : p.rows) {
        if (!series.count(r.scheme)) order.push_back(r.scheme);
        const double x = std::log10(static_cast<double>(std::max<std::size_t>(r.M, 1)));
        series[r.scheme].push_back({x, r.value});
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        if (std::isfinite(r.value)) {
            ymin = std::min(ymin, r.value);
            ymax = std::max(ymax, r.value);
        }
    }
    if (p.rows.empty()) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    const auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    const auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    os << std::setprecision(6);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">" << escape(p.name) << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (W - R + L) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\">M (log scale)</text>\n";
    os << "<text x=\"8\" y=\"" << T - 8 << "\" font-size=\"12\">" << escape(p.metric) << "</text>\n";
    os << "<text x=\"4\" y=\"" << sy(ymax) + 4 << "\" font-size=\"10\">" << ymax << "</text>\n";
    os << "<text x=\"4\" y=\"" << sy(ymin) + 4 << "\" font-size=\"10\">" << ymin << "</text>\n";
    for (std::size_t s = 0; s < order.size(); ++s) {
        auto pts = series[order[s]];
        std::sort(pts.begin(), pts.end());
        const char* c = colors[s % 8];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
        for (const auto& [x, y] : pts) {
            if (std::isfinite(y)) os << sx(x) << ',' << sy(y) << ' ';
        }
        os << "\"/>\n";
        const double ly = T + 16.0 * static_cast<double>(s);
        os << "<text x=\"" << W - R + 10 << "\" y=\"" << ly + 4 << "\" font-size=\"11\" fill=\"" << c << "\">"
           << escape(order[s]) << "</text>\n";
    }
    os << "</svg>\n";
}

std::vector<std::string> emit_plotdata(const std::vector<AggregateRow>& rows, const std::string& out_dir, bool svg) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::vector<std::string> names;
    for (const auto& p : make_panels(rows)) {
        const auto base = std::filesystem::path(out_dir) / p.name;
        std::ofstream csv(base.string() + ".csv");
        if (!csv) throw ConfigError("cannot write to '" + out_dir + "'");
        write_panel_csv(csv, p);
        if (svg) {
            std::ofstream f(base.string() + ".svg");
            write_panel_svg(f, p);
        }
        names.push_back(p.name);
    }
    return names;
}

}  // namespace ttsv
