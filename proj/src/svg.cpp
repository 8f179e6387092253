#include "ccaprobe/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace ccaprobe {
namespace {

constexpr double kWidth = 760.0;
constexpr double kPanelHeight = 300.0;
constexpr double kLeft = 60.0, kRight = 170.0, kTop = 40.0, kBottom = 40.0;

constexpr std::array<const char*, 7> kColors{
    "#d62728",  // cca_highest
    "#e6c700",  // cca_lowest
    "#ff7f0e",  // cca_random
    "#2ca02c",  // pca_top
    "#1f3fb4",  // random_projection
    "#6baed6",  // random_selection
    "#9467bd",  // max_activation
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Panel {
    double top;
    double log_max;

    double x(Index n_s) const {
        const double plot = kWidth - kLeft - kRight;
        return kLeft + (log_max > 0.0 ? std::log2(static_cast<double>(n_s)) / log_max : 0.0) * plot;
    }
    double y(double metric) const { return top + (1.0 - std::clamp(metric, 0.0, 1.0)) * kPanelHeight; }
};

void axes(std::string& out, const Panel& p, Index n_max, Index n_classes, const std::string& label) {
    const double bottom = p.top + kPanelHeight;
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(p.top) + "\" width=\"" + num(kWidth - kLeft - kRight) +
           "\" height=\"" + num(kPanelHeight) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 10; t += 2) {
        const double v = t / 10.0;
        out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(p.y(v) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + num(v) + "</text>\n";
        out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(p.y(v)) + "\" x2=\"" + num(kWidth - kRight) +
               "\" y2=\"" + num(p.y(v)) + "\" stroke=\"#eee\"/>\n";
    }
    for (Index t = 1; t <= n_max; t *= 2)
        out += "<text x=\"" + num(p.x(t)) + "\" y=\"" + num(bottom + 16) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(t) + "</text>\n";
    out += "<text x=\"" + num(kLeft + (kWidth - kLeft - kRight) / 2) + "\" y=\"" + num(bottom + 32) +
           "\" font-size=\"12\" text-anchor=\"middle\">n_s (components kept)</text>\n";
    out += "<text x=\"16\" y=\"" + num(p.top + kPanelHeight / 2) + "\" font-size=\"12\" transform=\"rotate(-90 16 " +
           num(p.top + kPanelHeight / 2) + ")\" text-anchor=\"middle\">" + label + "</text>\n";
    if (n_classes >= 1 && n_classes <= n_max)
        out += "<line x1=\"" + num(p.x(n_classes)) + "\" y1=\"" + num(p.top) + "\" x2=\"" + num(p.x(n_classes)) +
               "\" y2=\"" + num(bottom) + "\" stroke=\"#000\" stroke-dasharray=\"3,3\"/>\n";
}

void series(std::string& out, const Panel& p, const CurveResult& c, bool after) {
    const char* color = kColors[static_cast<std::size_t>(c.method)];
    std::vector<std::array<double, 3>> pts;  // n_s, mean, std
    for (const CurveAggregate& a : c.aggregate) {
        if (after && !a.mean_after) continue;
        pts.push_back({static_cast<double>(a.n_s), after ? *a.mean_after : a.mean_before,
                       after ? *a.std_after : a.std_before});
    }
    if (pts.empty()) return;
    std::string band, line;
    for (const auto& q : pts) band += num(p.x(static_cast<Index>(q[0]))) + "," + num(p.y(q[1] + q[2])) + " ";
    for (auto it = pts.rbegin(); it != pts.rend(); ++it)
        band += num(p.x(static_cast<Index>((*it)[0]))) + "," + num(p.y((*it)[1] - (*it)[2])) + " ";
    for (const auto& q : pts) line += num(p.x(static_cast<Index>(q[0]))) + "," + num(p.y(q[1])) + " ";
    band.pop_back();
    line.pop_back();
    out += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    out += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.8\"/>\n";
}

}  // namespace

std::string curves_svg(std::span<const CurveResult> curves, Index n_classes, const std::string& title) {
    Index n_max = 1;
    bool any_after = false;
    for (const CurveResult& c : curves)
        for (const CurveAggregate& a : c.aggregate) {
            n_max = std::max(n_max, a.n_s);
            any_after = any_after || a.mean_after.has_value();
        }
    const int panels = any_after ? 2 : 1;
    const double height = kTop + panels * (kPanelHeight + kBottom + 20.0);
    const double log_max = std::log2(static_cast<double>(n_max));

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                      num(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">" + title +
           "</text>\n";
    for (int panel = 0; panel < panels; ++panel) {
        const Panel p{kTop + panel * (kPanelHeight + kBottom + 20.0), log_max};
        axes(out, p, n_max, n_classes, panel == 0 ? "metric (original head)" : "metric (retrained head)");
        for (const CurveResult& c : curves) series(out, p, c, panel == 1);
    }
    double legend_y = kTop + 10.0;
    for (const CurveResult& c : curves) {
        const char* color = kColors[static_cast<std::size_t>(c.method)];
        out += "<line x1=\"" + num(kWidth - kRight + 12) + "\" y1=\"" + num(legend_y) + "\" x2=\"" +
               num(kWidth - kRight + 32) + "\" y2=\"" + num(legend_y) + "\" stroke=\"" + color +
               "\" stroke-width=\"3\"/>\n";
        out += "<text x=\"" + num(kWidth - kRight + 38) + "\" y=\"" + num(legend_y + 4) + "\" font-size=\"11\">" +
               std::string(to_string(c.method)) + "</text>\n";
        legend_y += 18.0;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace ccaprobe
