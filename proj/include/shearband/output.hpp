#pragma once

#include <string>
#include <vector>

namespace shearband::output {

// Shortest round-trip decimal representation; deterministic across runs.
std::string fmt(double v);

struct Column {
    std::string header;
    std::vector<double> values;
};

// Comma separators, '.' decimal, header row, LF endings.
std::string csv_table(const std::vector<Column>& columns);

void write_file(const std::string& path, const std::string& content);

struct Series {
    std::string label;
    std::vector<double> x, y;
};

// Self-contained SVG 1.1 line plot; log_y plots log10 of positive samples.
std::string svg_plot(const std::string& title, const std::vector<Series>& series, bool log_y,
                     int width = 640, int height = 440);

} // namespace shearband::output
