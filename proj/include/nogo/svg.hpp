// svg.hpp
// Minimal hand-rolled SVG output for the two report figures: the violation
// vs dephasing overlay and the x-z disc scatter of raw/primary/secondary
// preparations. Axis ranges are fixed so regenerated plots diff cleanly.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace nogo::svg {

struct SeriesPoint {
    double x = 0.0;
    double y = 0.0;
    double err = 0.0;
};

struct DiscPoint {
    double x = 0.0;
    double z = 0.0;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;      // data ranges
    double px0, px1, py0, py1;  // pixel ranges (py0 is the *top*)

    double px(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
    double py(double y) const { return py0 + (y1 - y) / (y1 - y0) * (py1 - py0); }
};

inline void open_svg(std::string& s, int w, int h) {
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
         std::to_string(h) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void line(std::string& s, double x1, double y1, double x2, double y2,
                 const std::string& style) {
    s += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" " + style + "/>\n";
}

inline void text(std::string& s, double x, double y, const std::string& body,
                 const std::string& extra = "") {
    s += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" " + extra +
         ">" + body + "</text>\n";
}

}  // namespace detail

// Violation criteria against the dephasing factor: analytic curves as
// polylines, finite-statistics points as dots with one-standard-deviation
// bars, dotted verticals at the analytic zero crossings.
inline std::string sweep_plot(const std::vector<SeriesPoint>& ell_curve,
                              const std::vector<SeriesPoint>& tau_curve,
                              const std::vector<SeriesPoint>& ell_points,
                              const std::vector<SeriesPoint>& tau_points,
                              double ell_zero_mu, double tau_zero_mu) {
    using namespace detail;
    const int w = 640, h = 480;
    const Frame f{0.0, 0.7, -0.5, 2.5, 70.0, w - 20.0, 20.0, h - 50.0};
    std::string s;
    open_svg(s, w, h);

    // frame, zero line, ticks
    s += "<rect x=\"" + num(f.px0) + "\" y=\"" + num(f.py0) + "\" width=\"" +
         num(f.px1 - f.px0) + "\" height=\"" + num(f.py1 - f.py0) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    line(s, f.px0, f.py(0.0), f.px1, f.py(0.0), "stroke=\"#999\" stroke-width=\"0.5\"");
    for (int i = 0; i <= 7; ++i) {
        const double x = 0.1 * i;
        line(s, f.px(x), f.py1, f.px(x), f.py1 + 5, "stroke=\"black\"");
        text(s, f.px(x) - 10, f.py1 + 20, num(x), "font-size=\"12\"");
    }
    for (int i = -1; i <= 5; ++i) {
        const double y = 0.5 * i;
        line(s, f.px0 - 5, f.py(y), f.px0, f.py(y), "stroke=\"black\"");
        text(s, f.px0 - 40, f.py(y) + 4, num(y), "font-size=\"12\"");
    }
    text(s, 0.5 * (f.px0 + f.px1) - 60, h - 12.0, "dephasing factor", "font-size=\"14\"");

    auto polyline = [&](const std::vector<SeriesPoint>& pts, const char* color) {
        s += "<polyline fill=\"none\" stroke=\"";
        s += color;
        s += "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : pts) s += num(f.px(p.x)) + "," + num(f.py(p.y)) + " ";
        s += "\"/>\n";
    };
    auto markers = [&](const std::vector<SeriesPoint>& pts, const char* color) {
        for (const auto& p : pts) {
            line(s, f.px(p.x), f.py(p.y - p.err), f.px(p.x), f.py(p.y + p.err),
                 std::string("stroke=\"") + color + "\"");
            s += "<circle cx=\"" + num(f.px(p.x)) + "\" cy=\"" + num(f.py(p.y)) +
                 "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
        }
    };

    polyline(ell_curve, "#1f4e9c");
    polyline(tau_curve, "#c0392b");
    markers(ell_points, "#1f4e9c");
    markers(tau_points, "#c0392b");

    for (double mu : {ell_zero_mu, tau_zero_mu}) {
        line(s, f.px(mu), f.py0, f.px(mu), f.py1,
             "stroke=\"#555\" stroke-width=\"0.8\" stroke-dasharray=\"3,3\"");
    }
    text(s, f.px0 + 10, f.py0 + 18, "linear", "font-size=\"13\" fill=\"#1f4e9c\"");
    text(s, f.px0 + 10, f.py0 + 34, "nonlinear", "font-size=\"13\" fill=\"#c0392b\"");

    s += "</svg>\n";
    return s;
}

// Raw (triangles), primary (dots) and secondary (squares) preparations on
// the x-z section of the Bloch ball.
inline std::string disc_plot(const std::vector<DiscPoint>& raw,
                             const std::vector<DiscPoint>& primary,
                             const std::vector<DiscPoint>& secondary) {
    using namespace detail;
    const int w = 480, h = 480;
    const Frame f{-1.15, 1.15, -1.15, 1.15, 20.0, w - 20.0, 20.0, h - 20.0};
    std::string s;
    open_svg(s, w, h);

    s += "<circle cx=\"" + num(f.px(0)) + "\" cy=\"" + num(f.py(0)) + "\" r=\"" +
         num(f.px(1.0) - f.px(0.0)) + "\" fill=\"none\" stroke=\"black\"/>\n";
    line(s, f.px(-1.1), f.py(0), f.px(1.1), f.py(0), "stroke=\"#bbb\" stroke-width=\"0.6\"");
    line(s, f.px(0), f.py(-1.1), f.px(0), f.py(1.1), "stroke=\"#bbb\" stroke-width=\"0.6\"");
    text(s, f.px(1.02), f.py(0) - 6, "x", "font-size=\"13\"");
    text(s, f.px(0) + 6, f.py(1.02), "z", "font-size=\"13\"");

    for (const auto& p : raw) {
        const double cx = f.px(p.x), cy = f.py(p.z);
        s += "<polygon points=\"" + num(cx) + "," + num(cy - 5) + " " + num(cx - 4.5) + "," +
             num(cy + 4) + " " + num(cx + 4.5) + "," + num(cy + 4) +
             "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\"/>\n";
    }
    for (const auto& p : primary) {
        s += "<circle cx=\"" + num(f.px(p.x)) + "\" cy=\"" + num(f.py(p.z)) +
             "\" r=\"3.5\" fill=\"#e67e22\"/>\n";
    }
    for (const auto& p : secondary) {
        s += "<rect x=\"" + num(f.px(p.x) - 3.5) + "\" y=\"" + num(f.py(p.z) - 3.5) +
             "\" width=\"7\" height=\"7\" fill=\"#27ae60\"/>\n";
    }

    s += "</svg>\n";
    return s;
}

}  // namespace nogo::svg
