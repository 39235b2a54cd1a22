// Copyright 2026 The orbitlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

/// Shortest text that round-trips a double exactly.
inline std::string fmt_num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

/// Writes `content` to a temporary file beside `path` and renames it into
/// place, so readers never observe a partially written artifact. On any
/// failure the temporary file is removed and an exception is thrown.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("output directory '" + dir.string() + "' does not exist");
    }
    const fs::path tmp = dir / ("." + path.filename().string() + ".partial");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed while writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move artifact into place at '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------------------
// Minimal static SVG plotting.

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = true;
    bool line = true;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
};

namespace detail {

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    return colors[i % 7];
}

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace detail

/// Line/scatter plot with axes, ticks, labels and a legend.
inline std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    constexpr double W = 640, H = 420, L = 70, R = 170, T = 40, B = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto tx = [&](double x) { return spec.log_x ? std::log10(std::max(x, 1e-300)) : x; };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                continue;
            }
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    }
    if (x1 == x0) {
        x1 = x0 + 1;
    }
    if (y1 == y0) {
        y1 = y0 + 1;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << detail::escape_xml(spec.title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        const double gx = L + (W - L - R) * i / 5.0;
        const double gy = H - B - (H - T - B) * i / 5.0;
        o << "<line x1=\"" << detail::svg_num(gx) << "\" y1=\"" << H - B << "\" x2=\"" << detail::svg_num(gx)
          << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << detail::svg_num(gx) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
          << detail::tick_label(spec.log_x ? std::pow(10.0, xv) : xv) << "</text>\n";
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << detail::svg_num(gy) << "\" x2=\"" << L << "\" y2=\""
          << detail::svg_num(gy) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << L - 8 << "\" y=\"" << detail::svg_num(gy + 4) << "\" text-anchor=\"end\">"
          << detail::tick_label(yv) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << detail::escape_xml(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape_xml(spec.y_label) << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = detail::palette(si);
        if (s.line && s.x.size() > 1) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                    o << detail::svg_num(px(s.x[i])) << "," << detail::svg_num(py(s.y[i])) << " ";
                }
            }
            o << "\"/>\n";
        }
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                    o << "<circle cx=\"" << detail::svg_num(px(s.x[i])) << "\" cy=\"" << detail::svg_num(py(s.y[i]))
                      << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
                }
            }
        }
        const double ly = T + 10 + 18.0 * static_cast<double>(si);
        o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\">" << detail::escape_xml(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// A colored band of the heat-map legend: values in [lo, hi).
struct LegendBand {
    double lo;
    double hi;
    std::string color;
    std::string label;
};

/// Heat map of values on a (x, y) grid, colored by legend bands.
inline std::string svg_band_map(const PlotSpec& spec, const std::vector<double>& xs, const std::vector<double>& ys,
                                const std::vector<double>& values /* x-major */,
                                const std::vector<LegendBand>& bands) {
    constexpr double W = 680, H = 440, L = 70, R = 210, T = 40, B = 55;
    const double cw = (W - L - R) / static_cast<double>(xs.size());
    const double ch = (H - T - B) / static_cast<double>(ys.size());
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << detail::escape_xml(spec.title) << "</text>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double v = values[i * ys.size() + j];
            std::string color = "#cccccc";
            for (const auto& b : bands) {
                if (v >= b.lo && v < b.hi) {
                    color = b.color;
                }
            }
            o << "<rect x=\"" << detail::svg_num(L + cw * static_cast<double>(i)) << "\" y=\""
              << detail::svg_num(H - B - ch * static_cast<double>(j + 1)) << "\" width=\"" << detail::svg_num(cw)
              << "\" height=\"" << detail::svg_num(ch) << "\" fill=\"" << color << "\" stroke=\"white\"/>\n";
        }
        o << "<text x=\"" << detail::svg_num(L + cw * (static_cast<double>(i) + 0.5)) << "\" y=\"" << H - B + 16
          << "\" text-anchor=\"middle\" font-size=\"10\">" << detail::tick_label(xs[i]) << "</text>\n";
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
        o << "<text x=\"" << L - 6 << "\" y=\"" << detail::svg_num(H - B - ch * (static_cast<double>(j) + 0.5) + 4)
          << "\" text-anchor=\"end\" font-size=\"10\">" << detail::tick_label(ys[j]) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\">"
      << detail::escape_xml(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape_xml(spec.y_label) << "</text>\n";
    for (std::size_t b = 0; b < bands.size(); ++b) {
        const double ly = T + 10 + 22.0 * static_cast<double>(b);
        o << "<rect x=\"" << W - R + 14 << "\" y=\"" << ly - 8 << "\" width=\"16\" height=\"14\" fill=\""
          << bands[b].color << "\"/>\n";
        o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\">" << detail::escape_xml(bands[b].label)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace orbitlab
