#include "hyplqr/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hyplqr/errors.hpp"

namespace hyplqr::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!std::isfinite(lo)) lo = 0, hi = 1;
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double d = std::max(1e-12, 0.05 * std::abs(hi));
            lo -= d;
            hi += d;
        }
    }
};

void frame(std::ostringstream& o, const Axes& a, double plot_w, double plot_h) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(a.title)
      << "</text>\n"
      << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
      << escape(a.xlabel) << "</text>\n"
      << "<text transform=\"translate(16," << kTop + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(a.ylabel) << "</text>\n";
}

void ticks(std::ostringstream& o, const Range& xr, const Range& yr, double plot_w, double plot_h, bool log_y) {
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double px = kLeft + f * plot_w, py = kTop + plot_h - f * plot_h;
        const double yv = yr.lo + f * (yr.hi - yr.lo);
        o << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
          << num(xr.lo + f * (xr.hi - xr.lo)) << "</text>\n"
          << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
          << num(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
}

void save(const std::string& path, const std::ostringstream& o) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << o.str();
}

// blue (-1) .. white (0) .. red (+1)
std::string diverging(double t) {
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t < 0) {
        r = static_cast<int>(std::lround(255 * (1 + t) + 33 * -t));
        g = static_cast<int>(std::lround(255 * (1 + t) + 102 * -t));
        b = static_cast<int>(std::lround(255 * (1 + t) + 172 * -t));
    } else {
        r = static_cast<int>(std::lround(255 * (1 - t) + 178 * t));
        g = static_cast<int>(std::lround(255 * (1 - t) + 24 * t));
        b = static_cast<int>(std::lround(255 * (1 - t) + 43 * t));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void line_plot(const std::string& path, const Axes& axes, const std::vector<Series>& series) {
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    const auto ty = [&](double v) { return axes.log_y ? (v > 0 ? std::log10(v) : NAN) : v; };
    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(ty(v));
    }
    xr.pad();
    yr.pad();
    const auto px = [&](double v) { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    const auto py = [&](double v) { return kTop + plot_h - (ty(v) - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream o;
    frame(o, axes, plot_w, plot_h);
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    ticks(o, xr, yr, plot_w, plot_h, axes.log_y);

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        const char* color = kPalette[s % kPalette.size()];
        if (ser.markers) {
            for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i)
                if (std::isfinite(py(ser.y[i])))
                    o << "<circle cx=\"" << num(px(ser.x[i])) << "\" cy=\"" << num(py(ser.y[i]))
                      << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
            if (!std::isfinite(py(ser.y[i]))) continue;
            if (ser.step && i > 0) pts += num(px(ser.x[i])) + "," + num(py(ser.y[i - 1])) + " ";
            pts += num(px(ser.x[i])) + "," + num(py(ser.y[i])) + " ";
        }
        if (!ser.markers)
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        if (!ser.label.empty())
            o << "<text x=\"" << num(kLeft + plot_w - 8) << "\" y=\"" << num(kTop + 16 + 16 * s)
              << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(ser.label) << "</text>\n";
    }
    o << "</svg>\n";
    save(path, o);
}

void heatmap(const std::string& path, const Axes& axes, const Eigen::MatrixXd& values, double x0, double x1,
             double y0, double y1) {
    const double plot_h = kHeight - kTop - kBottom;
    const double plot_w = plot_h;  // square cells for square kernels
    const Eigen::Index rows = values.rows(), cols = values.cols();
    const double vmax = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
    const double scale = vmax > 0 ? 1.0 / vmax : 0.0;
    const double cw = plot_w / std::max<Eigen::Index>(cols, 1), ch = plot_h / std::max<Eigen::Index>(rows, 1);

    std::ostringstream o;
    frame(o, axes, plot_w, plot_h);
    o << "<g shape-rendering=\"crispEdges\">\n";
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            o << "<rect x=\"" << num(kLeft + c * cw) << "\" y=\"" << num(kTop + r * ch) << "\" width=\""
              << num(cw + 0.05) << "\" height=\"" << num(ch + 0.05) << "\" fill=\""
              << diverging(values(r, c) * scale) << "\"/>\n";
    o << "</g>\n<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    Range xr, yr;
    xr.add(x0), xr.add(x1), yr.add(y1), yr.add(y0);
    ticks(o, xr, yr, plot_w, plot_h, false);

    // colorbar
    const double bx = kLeft + plot_w + 30;
    for (int i = 0; i < 50; ++i) {
        const double t = 1.0 - 2.0 * i / 49.0;
        o << "<rect x=\"" << num(bx) << "\" y=\"" << num(kTop + i * plot_h / 50) << "\" width=\"16\" height=\""
          << num(plot_h / 50 + 0.05) << "\" fill=\"" << diverging(t) << "\"/>\n";
    }
    o << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(kTop + 10) << "\">" << num(vmax) << "</text>\n"
      << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(kTop + plot_h / 2 + 4) << "\">0</text>\n"
      << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(kTop + plot_h) << "\">" << num(-vmax) << "</text>\n"
      << "</svg>\n";
    save(path, o);
}

}  // namespace hyplqr::svg
