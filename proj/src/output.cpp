#include "shearband/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shearband/errors.hpp"

namespace shearband::output {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_table(const std::vector<Column>& columns) {
    std::ostringstream os;
    for (size_t c = 0; c < columns.size(); ++c)
        os << (c ? "," : "") << columns[c].header;
    os << "\n";
    size_t rows = columns.empty() ? 0 : columns.front().values.size();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << fmt(columns[c].values[r]);
        os << "\n";
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path + " for writing");
    f << content;
    if (!f)
        throw IoError("short write to " + path);
}

namespace {

const char* kPalette[] = {"#1f6fb4", "#d94f2a", "#2e8b57", "#8b4bb4", "#b4871f", "#3aa9b4"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string svg_plot(const std::string& title, const std::vector<Series>& series, bool log_y,
                     int width, int height) {
    const double ml = 64, mr = 16, mt = 34, mb = 40;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            double yv = s.y[i];
            if (log_y && !(yv > 0.0))
                continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(yv));
            ymax = std::max(ymax, ty(yv));
        }
    if (!(xmax > xmin)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymax > ymin)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double yv) {
        return height - mb - (yv - ymin) / (ymax - ymin) * (height - mt - mb);
    };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
       << "\" height=\"" << height << "\">\n"
       << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
          "font-family=\"sans-serif\">"
       << esc(title) << (log_y ? " (log scale)" : "") << "</text>\n"
       << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
       << "\" height=\"" << height - mt - mb
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // Corner tick labels.
    os << "<text x=\"" << ml << "\" y=\"" << height - mb + 16
       << "\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(xmin) << "</text>\n"
       << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 16
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(xmax)
       << "</text>\n"
       << "<text x=\"" << ml - 6 << "\" y=\"" << height - mb
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
       << fmt(log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n"
       << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
       << fmt(log_y ? std::pow(10.0, ymax) : ymax) << "</text>\n";
    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        os << "<polyline fill=\"none\" stroke=\"" << kPalette[si % 6]
           << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0.0))
                continue;
            if (!first)
                os << " ";
            first = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(s.x[i]), py(ty(s.y[i])));
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 16 + 16 * si
           << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
           << kPalette[si % 6] << "\">" << esc(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace shearband::output
