#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ttsv/curve.hpp"
#include "ttsv/sim.hpp"

namespace ttsv {

struct TickDay {
    std::int64_t day = 0;
    TickSeries ticks;
};

struct TickIngest {
    std::vector<TickDay> days;
    std::size_t duplicates_collapsed = 0;
};

// Rows `day,time_seconds,log_price` sorted by (day, time); a header line is
// optional. Repeated timestamps keep the last price and are counted.
// Malformed rows, times outside [0, day_length] and decreasing times throw
// DataError with the line number. An empty file yields zero days.
TickIngest read_ticks(std::istream& is, double day_length = 23400.0);
TickIngest read_ticks_file(const std::string& path, double day_length = 23400.0);
void write_ticks(std::ostream& os, const std::vector<TickDay>& days);

// Curve CSV with header `t,value` on a uniform grid.
Curve read_curve(std::istream& is);
Curve read_curve_file(const std::string& path);
void write_curve(std::ostream& os, const Curve& c);

}  // namespace ttsv
