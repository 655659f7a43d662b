#pragma once
// Minimal deterministic SVG line-plot writer. No plotting framework: fixed
// palette, fixed float formatting, byte-identical output for fixed input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace pbg::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// round limits outward to a tidy step
inline std::vector<double> ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) hi = lo + 1.0;
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step)
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
}

inline const char* palette(size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

} // namespace detail

inline void write_line_plot(std::ostream& os, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<Series>& series) {
    if (series.empty()) throw std::invalid_argument("write_line_plot: no series");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    size_t npts = 0;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
            ++npts;
        }
    if (npts == 0) throw std::invalid_argument("write_line_plot: series have no points");
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    const double W = 720, H = 480, L = 70, R = 160, T = 40, B = 55;
    const double pw = W - L - R, ph = H - T - B;
    auto X = [&](double x) { return L + pw * (x - xmin) / (xmax - xmin); };
    auto Y = [&](double y) { return T + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
    using detail::fmt;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
       << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
       << "<text x=\"" << (L + pw / 2) << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\""
       << " text-anchor=\"middle\">" << title << "</text>\n";
    // axes box
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double tx : detail::ticks(xmin, xmax)) {
        os << "<line x1=\"" << fmt(X(tx)) << "\" y1=\"" << fmt(T + ph) << "\" x2=\"" << fmt(X(tx))
           << "\" y2=\"" << fmt(T + ph + 5) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fmt(X(tx)) << "\" y=\"" << fmt(T + ph + 18)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(tx)
           << "</text>\n";
    }
    for (double ty : detail::ticks(ymin, ymax)) {
        os << "<line x1=\"" << fmt(L - 5) << "\" y1=\"" << fmt(Y(ty)) << "\" x2=\"" << fmt(L)
           << "\" y2=\"" << fmt(Y(ty)) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fmt(L - 8) << "\" y=\"" << fmt(Y(ty) + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(ty)
           << "</text>\n";
    }
    os << "<text x=\"" << (L + pw / 2) << "\" y=\"" << (H - 12)
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
       << "</text>\n"
       << "<text x=\"18\" y=\"" << (T + ph / 2)
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (T + ph / 2) << ")\">" << ylabel << "</text>\n";
    for (size_t i = 0; i < series.size(); ++i) {
        os << "<polyline fill=\"none\" stroke=\"" << detail::palette(i)
           << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[i].points) os << fmt(X(x)) << ',' << fmt(Y(y)) << ' ';
        os << "\"/>\n";
        const double ly = T + 16 + 18 * static_cast<double>(i);
        os << "<line x1=\"" << (W - R + 10) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
           << (W - R + 34) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << detail::palette(i)
           << "\" stroke-width=\"1.5\"/>\n"
           << "<text x=\"" << (W - R + 40) << "\" y=\"" << fmt(ly)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label << "</text>\n";
    }
    os << "</svg>\n";
}

} // namespace pbg::svg
