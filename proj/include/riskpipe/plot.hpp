#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace riskpipe::plot {

struct Color {
    uint8_t r = 0, g = 0, b = 0;
};

// Fixed-size RGB raster with integer primitives; PNG output via zlib.
class Canvas {
public:
    Canvas(int width, int height, Color bg = {255, 255, 255});

    int width() const { return w_; }
    int height() const { return h_; }

    void set(int x, int y, Color c);
    void fill_rect(int x, int y, int w, int h, Color c);
    void line(int x0, int y0, int x1, int y1, Color c);
    // 5x7 bitmap font (uppercased); scale multiplies the glyph size.
    void text(int x, int y, const std::string& s, Color c, int scale = 1);

    void write_png(const std::string& path) const;

private:
    int w_, h_;
    std::vector<uint8_t> pix_;
};

// Text width in pixels for the bitmap font.
int text_width(const std::string& s, int scale = 1);

// Deterministic SVG builder covering the shapes the charts need.
class Svg {
public:
    Svg(int width, int height);
    void rect(double x, double y, double w, double h, Color fill);
    void line(double x0, double y0, double x1, double y1, Color stroke, double width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts, Color stroke,
                  double width = 1.5);
    void polygon(const std::vector<std::pair<double, double>>& pts, Color fill);
    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start", Color fill = {0, 0, 0});
    void save(const std::string& path) const;

private:
    int w_, h_;
    std::string body_;
};

struct HeatmapSpec {
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::MatrixXd values;  // NaN cells render gray
    std::string value_label;
};

struct StackedAreaSpec {
    std::string title;
    std::string x_label;
    std::vector<std::string> series;
    Eigen::MatrixXd shares;  // rows = x steps, cols = series
};

struct CurveSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    bool unit_square = true;   // fix axes to [0,1]
    bool diagonal = false;     // reference diagonal (ROC)
    double hline = -1.0;       // horizontal reference (PR prevalence), <0 = off
};

// Each writer emits <stem>.svg and <stem>.png with identical geometry.
void write_heatmap(const std::string& stem, const HeatmapSpec& spec);
void write_stacked_area(const std::string& stem, const StackedAreaSpec& spec);
void write_curve(const std::string& stem, const CurveSpec& spec);

}  // namespace riskpipe::plot
