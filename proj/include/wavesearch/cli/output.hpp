#pragma once

#include <string>
#include <vector>

namespace wavesearch::cli {

/// 17 significant digits, lossless for doubles.
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    CsvTable& row(std::vector<std::string> cells);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_number(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string annotation;  // drawn next to the legend entry
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<double> vlines;  // x positions of vertical markers
};

/// Self-contained line plot on a fixed 720x480 viewport, no timestamps.
std::string emit_svg(const std::vector<Series>& series, const Axes& axes);

} // namespace wavesearch::cli
