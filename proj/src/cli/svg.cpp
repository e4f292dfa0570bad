#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wavesearch/cli/output.hpp"
#include "wavesearch/error.hpp"

namespace wavesearch::cli {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 200.0, kTop = 40.0, kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

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

struct Scale {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    double map(double v, double a, double b) const {
        const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return a + t * (b - a);
    }
};

Scale fit(const std::vector<double>& values, bool log) {
    Scale s;
    s.log = log;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values) {
        if (!std::isfinite(v) || (log && !(v > 0.0))) continue;
        const double t = log ? std::log10(v) : v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    s.lo = lo;
    s.hi = hi;
    return s;
}

} // namespace

std::string emit_svg(const std::vector<Series>& series, const Axes& axes) {
    if (series.empty()) throw Error(ErrorKind::validation, "cli", "cannot plot an empty series set");
    std::vector<double> xs, ys;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw Error(ErrorKind::validation, "cli", "series '" + s.name + "' is empty or ragged");
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    for (double v : axes.vlines) xs.push_back(v);
    const Scale sx = fit(xs, axes.log_x), sy = fit(ys, axes.log_y);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" viewBox=\"0 0 720 480\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape(axes.title) + "</text>\n";
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" + num(y0 - y1) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double tx = sx.lo + f * (sx.hi - sx.lo), ty = sy.lo + f * (sy.hi - sy.lo);
        const double px = x0 + f * (x1 - x0), py = y0 + f * (y1 - y0);
        out += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               tick_label(sx.log ? std::pow(10.0, tx) : tx) + "</text>\n";
        out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               tick_label(sy.log ? std::pow(10.0, ty) : ty) + "</text>\n";
    }
    out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(axes.x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
           num((y0 + y1) / 2) + ")\">" + escape(axes.y_label) + "</text>\n";

    for (double v : axes.vlines) {
        if (sx.log && !(v > 0.0)) continue;
        const double px = sx.map(v, x0, x1);
        out += "<line x1=\"" + num(px) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px) + "\" y2=\"" + num(y1) +
               "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
    }

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((sx.log && !(s.x[i] > 0.0)) || (sy.log && !(s.y[i] > 0.0))) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(sx.map(s.x[i], x0, x1)) + "," + num(sy.map(s.y[i], y0, y1));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = y1 + 16.0 + 34.0 * static_cast<double>(k);
        out += "<line x1=\"" + num(x1 + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(x1 + 36) + "\" y2=\"" + num(ly) +
               "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(x1 + 42) + "\" y=\"" + num(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
               escape(s.name) + "</text>\n";
        if (!s.annotation.empty())
            out += "<text x=\"" + num(x1 + 42) + "\" y=\"" + num(ly + 18) +
                   "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\">" + escape(s.annotation) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace wavesearch::cli
