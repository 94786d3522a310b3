#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ttsv/experiment.hpp"

namespace ttsv {

struct PanelRow {
    std::size_t M = 0;
    std::string scheme;
    double value = 0.0;
};

struct Panel {
    std::string name;    // e.g. rv_rel_rmse_none
    std::string metric;  // rel_bias or rel_rmse
    std::vector<PanelRow> rows;
};

// One panel per (estimator, metric, noise): relative bias and relative RMSE
// against M with one series per scheme.
std::vector<Panel> make_panels(const std::vector<AggregateRow>& rows);

// Tidy CSV with header M,scheme,<metric>.
void write_panel_csv(std::ostream& os, const Panel& p);
// Minimal line plot, log-scaled M axis, one polyline per scheme.
void write_panel_svg(std::ostream& os, const Panel& p);

// Writes <name>.csv (and <name>.svg when `svg`) for every panel; returns the
// panel names.
std::vector<std::string> emit_plotdata(const std::vector<AggregateRow>& rows, const std::string& out_dir, bool svg);

}  // namespace ttsv
