#pragma once
// SVG rendering of packings and sorting arrays. Output depends only on the
// input, so renders can be diffed and hashed.

#include "fanpack/geometry.hpp"
#include "fanpack/sorting.hpp"

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace fanpack {

struct SvgFrame {
    Rat x0, y0, x1, y1;  // region drawn as the container outline
    std::string label;   // "strip", "square", "bin 3", ...
};

struct SvgScene {
    std::vector<Placement> pieces;
    std::vector<HorizontalParallelogram> boxes;  // drawn as outlines
    std::vector<SvgFrame> frames;
    std::vector<std::string> legend;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string fillFor(size_t i) {
    // golden-angle hues; neighbours in placement order get distinct colours
    unsigned hue = static_cast<unsigned>((i * 137) % 360);
    unsigned light = 52 + static_cast<unsigned>((i / 360) % 3) * 8;
    return "hsl(" + std::to_string(hue) + ",60%," + std::to_string(light) + "%)";
}

}  // namespace detail

inline std::string renderSvg(const SvgScene& sc, double targetWidth = 1200) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    auto grow = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (auto& f : sc.frames) {
        grow(f.x0.toDouble(), f.y0.toDouble());
        grow(f.x1.toDouble(), f.y1.toDouble());
    }
    for (auto& p : sc.pieces)
        for (auto& v : p.piece.vertices()) grow((v.x + p.dx).toDouble(), (v.y + p.dy).toDouble());
    for (auto& b : sc.boxes)
        for (auto& v : b.corners()) grow(v.x.toDouble(), v.y.toDouble());
    double spanX = xmax - xmin, spanY = ymax - ymin;
    double scale = std::min(400.0, targetWidth / std::max(spanX, 1e-9));
    if (spanY * scale > 4000) scale = 4000 / spanY;
    const double margin = 20;
    double legendH = 16.0 * static_cast<double>(sc.legend.size()) + (sc.legend.empty() ? 0 : 8);
    double W = spanX * scale + 2 * margin, H = spanY * scale + 2 * margin + legendH;
    auto px = [&](double x) { return detail::num((x - xmin) * scale + margin); };
    auto py = [&](double y) { return detail::num((ymax - y) * scale + margin); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(W) + "\" height=\"" + detail::num(H) +
         "\" viewBox=\"0 0 " + detail::num(W) + " " + detail::num(H) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + detail::num(W) + "\" height=\"" + detail::num(H) + "\" fill=\"white\"/>\n";
    for (auto& f : sc.frames) {
        double fx0 = f.x0.toDouble(), fx1 = f.x1.toDouble(), fy0 = f.y0.toDouble(), fy1 = f.y1.toDouble();
        s += "<rect class=\"frame\" x=\"" + px(fx0) + "\" y=\"" + py(fy1) + "\" width=\"" + detail::num((fx1 - fx0) * scale) +
             "\" height=\"" + detail::num((fy1 - fy0) * scale) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    for (size_t i = 0; i < sc.pieces.size(); ++i) {
        const Placement& p = sc.pieces[i];
        std::string pts;
        for (auto& v : p.piece.vertices()) {
            if (!pts.empty()) pts += ' ';
            pts += px((v.x + p.dx).toDouble()) + "," + py((v.y + p.dy).toDouble());
        }
        s += "<polygon class=\"piece\" points=\"" + pts + "\" fill=\"" + detail::fillFor(i) +
             "\" stroke=\"#222\" stroke-width=\"0.5\"/>\n";
    }
    for (auto& b : sc.boxes) {
        std::string pts;
        for (auto& v : b.corners()) {
            if (!pts.empty()) pts += ' ';
            pts += px(v.x.toDouble()) + "," + py(v.y.toDouble());
        }
        s += "<polygon class=\"box\" points=\"" + pts + "\" fill=\"none\" stroke=\"#c33\" stroke-width=\"0.4\"/>\n";
    }
    double ly = spanY * scale + 2 * margin;
    for (auto& line : sc.legend) {
        ly += 16;
        std::string esc;
        for (char c : line) {
            if (c == '<') esc += "&lt;";
            else if (c == '>') esc += "&gt;";
            else if (c == '&') esc += "&amp;";
            else esc += c;
        }
        s += "<text x=\"" + detail::num(margin) + "\" y=\"" + detail::num(ly) +
             "\" font-family=\"monospace\" font-size=\"12\">" + esc + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

// Array as a bar chart: one bar per cell, height = stored value, gaps for
// empty cells.
inline std::string renderArraySvg(const SortArray& a, const std::string& caption) {
    const double cellW = std::max(1.0, std::min(24.0, 1200.0 / std::max<double>(1, static_cast<double>(a.capacity()))));
    const double H = 200, margin = 20;
    double W = cellW * static_cast<double>(a.capacity()) + 2 * margin;
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(W) + "\" height=\"" + detail::num(H + 2 * margin + 24) +
         "\">\n";
    s += "<rect class=\"frame\" x=\"" + detail::num(margin) + "\" y=\"" + detail::num(margin) + "\" width=\"" +
         detail::num(W - 2 * margin) + "\" height=\"" + detail::num(H) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (size_t i = 0; i < a.capacity(); ++i) {
        if (!a.filled(i)) continue;
        double v = a.at(i).toDouble();
        double h = std::max(0.5, v * H);
        s += "<rect class=\"cell\" x=\"" + detail::num(margin + cellW * static_cast<double>(i)) + "\" y=\"" +
             detail::num(margin + H - h) + "\" width=\"" + detail::num(cellW) + "\" height=\"" + detail::num(h) +
             "\" fill=\"" + detail::fillFor(i) + "\"/>\n";
    }
    s += "<text x=\"" + detail::num(margin) + "\" y=\"" + detail::num(H + 2 * margin + 12) +
         "\" font-family=\"monospace\" font-size=\"12\">" + caption + "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace fanpack
