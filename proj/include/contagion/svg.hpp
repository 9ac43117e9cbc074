#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace contagion {

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct CsvParseError : std::runtime_error {
    CsvParseError(int line_number, const std::string& message)
        : std::runtime_error("csv line " + std::to_string(line_number) + ": " + message),
          line(line_number) {}
    int line;
};

// First column is the x axis; every column whose cells are all numeric becomes
// a curve; columns that are entirely empty are skipped. Mixed or non-numeric
// columns and ragged rows are reported with their line number. A header-only
// file is an error.
std::vector<Curve> curves_from_csv(const std::string& csv_text);

// Standalone multi-curve line chart with axis ticks and a legend. Identical
// input produces identical bytes.
std::string render_line_chart(std::span<const Curve> curves, const std::string& x_label,
                              const std::string& y_label);

} // namespace contagion
