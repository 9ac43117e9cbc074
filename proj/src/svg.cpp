#include "contagion/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace contagion {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_cell(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(cell, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == cell.size();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

double nice_step(double range, int target) {
    if (range <= 0.0) return 1.0;
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = 10.0;
    if (norm < 1.5)
        step = 1.0;
    else if (norm < 3.5)
        step = 2.0;
    else if (norm < 7.5)
        step = 5.0;
    return step * mag;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

} // namespace

std::vector<Curve> curves_from_csv(const std::string& csv_text) {
    std::vector<std::string> lines;
    {
        std::stringstream ss(csv_text);
        std::string line;
        while (std::getline(ss, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw CsvParseError(1, "empty file");
    const std::vector<std::string> header = split_fields(lines[0]);
    if (header.size() < 2) throw CsvParseError(1, "need an x column and at least one data column");
    if (lines.size() < 2) throw CsvParseError(1, "header only, no data rows");

    const std::size_t n_cols = header.size();
    std::vector<std::vector<std::string>> cells;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        std::vector<std::string> fields = split_fields(lines[r]);
        if (fields.size() != n_cols)
            throw CsvParseError(static_cast<int>(r + 1),
                                "expected " + std::to_string(n_cols) + " fields, got " +
                                    std::to_string(fields.size()));
        cells.push_back(std::move(fields));
    }
    if (cells.empty()) throw CsvParseError(1, "header only, no data rows");

    std::vector<double> xs(cells.size());
    for (std::size_t r = 0; r < cells.size(); ++r)
        if (!parse_cell(cells[r][0], xs[r]))
            throw CsvParseError(static_cast<int>(r + 2), "x column: not a number: '" + cells[r][0] + "'");

    std::vector<Curve> curves;
    for (std::size_t c = 1; c < n_cols; ++c) {
        bool all_empty = true;
        for (const auto& row : cells)
            if (!row[c].empty()) all_empty = false;
        if (all_empty) continue;
        Curve curve;
        curve.label = header[c];
        curve.x = xs;
        curve.y.resize(cells.size());
        for (std::size_t r = 0; r < cells.size(); ++r)
            if (!parse_cell(cells[r][c], curve.y[r]))
                throw CsvParseError(static_cast<int>(r + 2),
                                    "column '" + header[c] + "': not a number: '" + cells[r][c] + "'");
        curves.push_back(std::move(curve));
    }
    if (curves.empty()) throw CsvParseError(1, "no numeric data columns");
    return curves;
}

std::string render_line_chart(std::span<const Curve> curves, const std::string& x_label,
                              const std::string& y_label) {
    if (curves.empty()) throw std::invalid_argument("render_line_chart: no curves");
    constexpr double kWidth = 840.0;
    constexpr double kHeight = 520.0;
    constexpr double kLeft = 70.0;
    constexpr double kTop = 30.0;
    constexpr double kBottom = 60.0;
    constexpr double kLegend = 180.0;
    const double plot_w = kWidth - kLeft - kLegend - 20.0;
    const double plot_h = kHeight - kTop - kBottom;

    double x_min = curves[0].x.front();
    double x_max = x_min;
    double y_min = curves[0].y.front();
    double y_max = y_min;
    for (const Curve& c : curves) {
        for (const double v : c.x) {
            x_min = std::min(x_min, v);
            x_max = std::max(x_max, v);
        }
        for (const double v : c.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    // headroom so curves do not sit on the frame
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto map_x = [&](double v) { return kLeft + (v - x_min) / (x_max - x_min) * plot_w; };
    auto map_y = [&](double v) { return kTop + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h; };

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#ff7f0e", "#9467bd", "#8c564b"};
    constexpr int kPaletteSize = 6;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"520\" "
           "viewBox=\"0 0 840 520\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"840\" height=\"520\" fill=\"white\"/>\n";

    // grid and ticks
    const double x_step = nice_step(x_max - x_min, 6);
    const double y_step = nice_step(y_max - y_min, 6);
    for (double t = std::ceil(x_min / x_step) * x_step; t <= x_max + 1e-9 * x_step; t += x_step) {
        const double px = map_x(t);
        svg += "<line x1=\"" + fmt2(px) + "\" y1=\"" + fmt2(kTop) + "\" x2=\"" + fmt2(px) +
               "\" y2=\"" + fmt2(kTop + plot_h) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt2(px) + "\" y=\"" + fmt2(kTop + plot_h + 18.0) +
               "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
               fmt(std::abs(t) < 1e-12 ? 0.0 : t) + "</text>\n";
    }
    for (double t = std::ceil(y_min / y_step) * y_step; t <= y_max + 1e-9 * y_step; t += y_step) {
        const double py = map_y(t);
        svg += "<line x1=\"" + fmt2(kLeft) + "\" y1=\"" + fmt2(py) + "\" x2=\"" +
               fmt2(kLeft + plot_w) + "\" y2=\"" + fmt2(py) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt2(kLeft - 8.0) + "\" y=\"" + fmt2(py + 4.0) +
               "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">" +
               fmt(std::abs(t) < 1e-12 ? 0.0 : t) + "</text>\n";
    }
    svg += "<rect x=\"" + fmt2(kLeft) + "\" y=\"" + fmt2(kTop) + "\" width=\"" + fmt2(plot_w) +
           "\" height=\"" + fmt2(plot_h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";

    // curves
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const Curve& c = curves[i];
        std::string pts;
        for (std::size_t k = 0; k < c.x.size(); ++k) {
            if (k) pts += ' ';
            pts += fmt2(map_x(c.x[k])) + "," + fmt2(map_y(c.y[k]));
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += kPalette[i % kPaletteSize];
        svg += "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
    }

    // axis labels
    svg += "<text x=\"" + fmt2(kLeft + plot_w / 2.0) + "\" y=\"" + fmt2(kHeight - 14.0) +
           "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
           xml_escape(x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt2(kTop + plot_h / 2.0) +
           "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 " +
           fmt2(kTop + plot_h / 2.0) + ")\">" + xml_escape(y_label) + "</text>\n";

    // legend
    const double lx = kLeft + plot_w + 16.0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const double ly = kTop + 12.0 + 22.0 * static_cast<double>(i);
        svg += "<line x1=\"" + fmt2(lx) + "\" y1=\"" + fmt2(ly) + "\" x2=\"" + fmt2(lx + 24.0) +
               "\" y2=\"" + fmt2(ly) + "\" stroke=\"";
        svg += kPalette[i % kPaletteSize];
        svg += "\" stroke-width=\"1.8\"/>\n";
        svg += "<text x=\"" + fmt2(lx + 30.0) + "\" y=\"" + fmt2(ly + 4.0) +
               "\" font-size=\"12\" font-family=\"sans-serif\">" + xml_escape(curves[i].label) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace contagion
