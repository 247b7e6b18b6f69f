#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mailclass::svg {

std::string escape(std::string_view text);
// Shortest fixed representation with up to `decimals` digits.
std::string num(double value, int decimals = 2);

class Document {
public:
    Document(int width, int height);

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view extra = {});
    void line(double x1, double y1, double x2, double y2, std::string_view stroke = "#000", double width = 1.0);
    void text(double x, double y, std::string_view content, std::string_view anchor = "middle", int size = 12,
              std::string_view extra = {});
    void polyline(std::span<const std::pair<double, double>> points, std::string_view stroke, double width = 2.0);
    void circle(double cx, double cy, double r, std::string_view fill);

    std::string str() const;

private:
    int width_;
    int height_;
    std::string body_;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> xs;
    std::vector<double> ys;
    double y_min = 0.0;
    double y_max = 1.0;
    // Logarithmic x axis; only used when every x is positive.
    bool log_x = false;
};

// 800x500 chart with axes, ticks, one polyline and a marker per point.
std::string render_line_chart(const LineChart& chart);

struct BarChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> labels;
    std::vector<double> values;
};

// 800x500 vertical bar chart.
std::string render_bar_chart(const BarChart& chart);

}  // namespace mailclass::svg
