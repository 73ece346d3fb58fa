#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "probeflow/errors.hpp"
#include "probeflow/reporting.hpp"

namespace probeflow {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string coord(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    std::string s(buf, res.ptr);
    return s == "-0.00" ? "0.00" : s;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default:
                // Control characters are not allowed in XML 1.0 text.
                if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') out += '?';
                else out += c;
        }
    }
    return out;
}

std::string percent_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 15];
        }
    }
    return out;
}

struct XAxis {
    AxisScale scale;
    double lo;
    double hi;

    double t(double x) const {
        if (scale == AxisScale::log) return (std::log10(x) - lo) / (hi - lo);
        return (x - lo) / (hi - lo);
    }
};

XAxis make_x_axis(const Panel& panel) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : panel.curves) {
        for (const auto& p : c.points) {
            if (!std::isfinite(p.complexity)) continue;
            if (panel.x_scale == AxisScale::log && p.complexity <= 0.0) continue;
            lo = std::min(lo, p.complexity);
            hi = std::max(hi, p.complexity);
        }
    }
    if (!std::isfinite(lo)) {
        lo = panel.x_scale == AxisScale::log ? 1.0 : 0.0;
        hi = lo + 1.0;
    }
    if (panel.x_scale == AxisScale::log) {
        double a = std::floor(std::log10(lo));
        double b = std::ceil(std::log10(hi));
        if (b <= a) b = a + 1.0;
        return {AxisScale::log, a, b};
    }
    if (hi - lo <= 0.0) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= pad;
        hi += pad;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {AxisScale::linear, lo, hi};
}

std::vector<double> y_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * mag;
        if (span / step <= 7.0) break;
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
        ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return ticks;
}

std::vector<double> x_ticks(const XAxis& axis) {
    std::vector<double> ticks;
    if (axis.scale == AxisScale::log) {
        for (double e = axis.lo; e <= axis.hi + 1e-9; e += 1.0) ticks.push_back(std::pow(10.0, e));
        return ticks;
    }
    return y_ticks(axis.lo, axis.hi);
}

std::string metric_title(const std::string& metric) {
    if (metric == "accuracy") return "auxiliary task accuracy";
    if (metric == "control_accuracy") return "control task accuracy";
    return metric;
}

}  // namespace

std::string svg_file_name(const Panel& panel) {
    return percent_encode(panel.task) + "__" + percent_encode(panel.model_kind) + "__" + percent_encode(panel.metric) + ".svg";
}

std::string render_panel_svg(const Panel& panel) {
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const XAxis xa = make_x_axis(panel);
    double y_lo = panel.y_min, y_hi = panel.y_max;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
    const auto px = [&](double x) { return kLeft + xa.t(x) * plot_w; };
    const auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) + "\" height=\"" + coord(kHeight) +
         "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + coord(kWidth) + "\" height=\"" + coord(kHeight) + "\" fill=\"white\"/>\n";
    s += "<text x=\"" + coord(kWidth / 2) + "\" y=\"22.00\" text-anchor=\"middle\" font-size=\"14\">" +
         escape_xml(panel.task + " / " + panel.model_kind + ": " + metric_title(panel.metric)) + "</text>\n";

    // Axes frame.
    s += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" + coord(plot_w) + "\" height=\"" +
         coord(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double v : y_ticks(y_lo, y_hi)) {
        const std::string y = coord(py(v));
        s += "<line x1=\"" + coord(kLeft - 5) + "\" y1=\"" + y + "\" x2=\"" + coord(kLeft + plot_w) + "\" y2=\"" + y +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(py(v) + 4) + "\" text-anchor=\"end\">" +
             escape_xml(format_double(v, 6)) + "</text>\n";
    }
    for (double v : x_ticks(xa)) {
        const std::string x = coord(px(v));
        s += "<line x1=\"" + x + "\" y1=\"" + coord(kTop) + "\" x2=\"" + x + "\" y2=\"" + coord(kTop + plot_h + 5) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + x + "\" y=\"" + coord(kTop + plot_h + 20) + "\" text-anchor=\"middle\">" +
             escape_xml(format_double(v, 6)) + "</text>\n";
    }
    const std::string x_label = panel.x_scale == AxisScale::log ? "probe complexity (log scale)" : "probe complexity";
    s += "<text x=\"" + coord(kLeft + plot_w / 2) + "\" y=\"" + coord(kHeight - 15) + "\" text-anchor=\"middle\">" +
         escape_xml(x_label) + "</text>\n";
    s += "<text x=\"18.00\" y=\"" + coord(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18.00 " +
         coord(kTop + plot_h / 2) + ")\">" + escape_xml(metric_title(panel.metric)) + "</text>\n";

    for (std::size_t i = 0; i < panel.curves.size(); ++i) {
        const Curve& curve = panel.curves[i];
        const std::string color = kPalette[i % std::size(kPalette)];
        std::string pts;
        std::string markers;
        for (const auto& p : curve.points) {
            if (!std::isfinite(p.value) || !std::isfinite(p.complexity)) continue;
            if (xa.scale == AxisScale::log && p.complexity <= 0.0) continue;
            const std::string x = coord(px(p.complexity));
            const std::string y = coord(py(std::clamp(p.value, y_lo, y_hi)));
            if (!pts.empty()) pts += ' ';
            pts += x + "," + y;
            markers += "<circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"3.00\" fill=\"" + color + "\"/>\n";
        }
        s += "<g>\n";
        if (!pts.empty()) {
            s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2.00\"/>\n";
        }
        s += markers;
        s += "</g>\n";

        const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 15;
        s += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(lx + 20) + "\" y2=\"" + coord(ly) +
             "\" stroke=\"" + color + "\" stroke-width=\"2.00\"/>\n";
        s += "<text x=\"" + coord(lx + 26) + "\" y=\"" + coord(ly + 4) + "\">" + escape_xml(curve.representation) +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::vector<fs::path> render_svg(const ReportModel& report, const fs::path& destination_dir) {
    std::error_code ec;
    fs::create_directories(destination_dir, ec);
    if (ec || !fs::is_directory(destination_dir)) {
        throw IoError("cannot create directory " + destination_dir.string());
    }
    std::vector<fs::path> written;
    for (const auto& panel : report.panels) {
        const fs::path path = destination_dir / svg_file_name(panel);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << render_panel_svg(panel);
        out.flush();
        if (!out) throw IoError("failed writing " + path.string());
        written.push_back(path);
    }
    return written;
}

}  // namespace probeflow
