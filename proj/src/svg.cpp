#include "mailclass/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mailclass::svg {

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

Document::Document(int width, int height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill, std::string_view extra) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + escape(fill) + "\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += "/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + escape(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, std::string_view anchor, int size,
                    std::string_view extra) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + std::string(anchor) +
             "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) + "\"";
    if (!extra.empty()) body_ += " " + std::string(extra);
    body_ += ">" + escape(content) + "</text>\n";
}

void Document::polyline(std::span<const std::pair<double, double>> points, std::string_view stroke, double width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + escape(stroke) + "\" stroke-width=\"" + num(width) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += ' ';
        body_ += num(points[i].first) + "," + num(points[i].second);
    }
    body_ += "\"/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + escape(fill) +
             "\"/>\n";
}

std::string Document::str() const {
    const auto w = std::to_string(width_);
    const auto h = std::to_string(height_);
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w +
           "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n" + body_ + "</svg>\n";
}

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 90;

struct Frame {
    double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
};

void draw_frame(Document& doc, const Frame& f, std::string_view title, std::string_view x_label,
                std::string_view y_label) {
    doc.rect(0, 0, kWidth, kHeight, "#ffffff");
    doc.text(kWidth / 2.0, 28, title, "middle", 16);
    doc.line(f.x0, f.y0, f.x1, f.y0);
    doc.line(f.x0, f.y0, f.x0, f.y1);
    doc.text((f.x0 + f.x1) / 2, kHeight - 20, x_label, "middle", 13);
    doc.text(22, (f.y0 + f.y1) / 2, y_label, "middle", 13,
             "transform=\"rotate(-90 22 " + num((f.y0 + f.y1) / 2) + ")\"");
}

}  // namespace

std::string render_line_chart(const LineChart& chart) {
    Document doc(kWidth, kHeight);
    const Frame f;
    draw_frame(doc, f, chart.title, chart.x_label, chart.y_label);

    const bool log_x = chart.log_x && !chart.xs.empty() &&
                       std::all_of(chart.xs.begin(), chart.xs.end(), [](double x) { return x > 0; });
    auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
    double lo = 0, hi = 1;
    if (!chart.xs.empty()) {
        lo = tx(*std::min_element(chart.xs.begin(), chart.xs.end()));
        hi = tx(*std::max_element(chart.xs.begin(), chart.xs.end()));
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double y_span = chart.y_max - chart.y_min > 0 ? chart.y_max - chart.y_min : 1.0;
    auto px = [&](double x) { return f.x0 + 20 + (tx(x) - lo) / (hi - lo) * (f.x1 - f.x0 - 40); };
    auto py = [&](double y) { return f.y0 - (y - chart.y_min) / y_span * (f.y0 - f.y1); };

    for (int i = 0; i <= 5; ++i) {
        const double y = chart.y_min + y_span * i / 5.0;
        doc.line(f.x0 - 5, py(y), f.x0, py(y));
        doc.text(f.x0 - 8, py(y) + 4, num(y, 2), "end", 11);
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < chart.xs.size() && i < chart.ys.size(); ++i) {
        points.emplace_back(px(chart.xs[i]), py(chart.ys[i]));
        doc.line(px(chart.xs[i]), f.y0, px(chart.xs[i]), f.y0 + 5);
        doc.text(px(chart.xs[i]), f.y0 + 20, num(chart.xs[i], 4), "middle", 11);
    }
    doc.polyline(points, "#1f77b4");
    for (const auto& [x, y] : points) doc.circle(x, y, 4, "#1f77b4");
    return doc.str();
}

std::string render_bar_chart(const BarChart& chart) {
    Document doc(kWidth, kHeight);
    const Frame f;
    draw_frame(doc, f, chart.title, chart.x_label, chart.y_label);

    const std::size_t n = std::min(chart.labels.size(), chart.values.size());
    double max = 0;
    for (std::size_t i = 0; i < n; ++i) max = std::max(max, chart.values[i]);
    if (max <= 0) max = 1;
    for (int i = 0; i <= 5; ++i) {
        const double v = max * i / 5.0;
        const double y = f.y0 - v / max * (f.y0 - f.y1);
        doc.line(f.x0 - 5, y, f.x0, y);
        doc.text(f.x0 - 8, y + 4, num(v, 2), "end", 11);
    }
    if (n == 0) return doc.str();
    const double slot = (f.x1 - f.x0) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = chart.values[i] / max * (f.y0 - f.y1);
        const double x = f.x0 + slot * static_cast<double>(i);
        doc.rect(x + slot * 0.1, f.y0 - h, slot * 0.8, h, "#4c72b0");
        const double cx = x + slot / 2;
        doc.text(cx, f.y0 + 12, chart.labels[i], "end", 10,
                 "transform=\"rotate(-60 " + num(cx) + " " + num(f.y0 + 12) + ")\"");
    }
    return doc.str();
}

}  // namespace mailclass::svg
