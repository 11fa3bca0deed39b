#include "riskpipe/plot.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "riskpipe/errors.hpp"

namespace riskpipe::plot {

namespace {

// 5x7 bitmap glyphs, one byte per row, low 5 bits used (MSB = left pixel).
struct Glyph {
    char ch;
    uint8_t rows[7];
};

const Glyph kFont[] = {
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'%', {0x19, 0x1A, 0x02, 0x04, 0x08, 0x0B, 0x13}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'/', {0x01, 0x02, 0x02, 0x04, 0x08, 0x08, 0x10}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'<', {0x02, 0x04, 0x08, 0x10, 0x08, 0x04, 0x02}},
    {'>', {0x08, 0x04, 0x02, 0x01, 0x02, 0x04, 0x08}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const uint8_t* find_glyph(char c) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& g : kFont)
        if (g.ch == up) return g.rows;
    return nullptr;
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4],
               const std::vector<uint8_t>& data) {
    put_u32(out, static_cast<uint32_t>(data.size()));
    const size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uint32_t crc = static_cast<uint32_t>(
        ::crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start)));
    put_u32(out, crc);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string color_hex(Color c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Sequential colormap from near-white to dark red.
Color heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const auto lerp = [](double a, double b, double u) {
        return static_cast<uint8_t>(std::lround(a + (b - a) * u));
    };
    if (t < 0.5) {
        const double u = t / 0.5;  // white -> orange
        return {lerp(255, 253, u), lerp(245, 141, u), lerp(235, 60, u)};
    }
    const double u = (t - 0.5) / 0.5;  // orange -> dark red
    return {lerp(253, 128, u), lerp(141, 0, u), lerp(60, 38, u)};
}

const Color kPalette[] = {
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},  {148, 103, 189},
    {140, 86, 75},  {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207},
};

}  // namespace

Canvas::Canvas(int width, int height, Color bg) : w_(width), h_(height) {
    pix_.resize(static_cast<size_t>(w_) * h_ * 3);
    for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w_; ++x) set(x, y, bg);
}

void Canvas::set(int x, int y, Color c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const size_t i = (static_cast<size_t>(y) * w_ + x) * 3;
    pix_[i] = c.r;
    pix_[i + 1] = c.g;
    pix_[i + 2] = c.b;
}

void Canvas::fill_rect(int x, int y, int w, int h, Color c) {
    for (int j = y; j < y + h; ++j)
        for (int i = x; i < x + w; ++i) set(i, j, c);
}

void Canvas::line(int x0, int y0, int x1, int y1, Color c) {
    // Bresenham
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        set(x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void Canvas::text(int x, int y, const std::string& s, Color c, int scale) {
    int cx = x;
    for (char ch : s) {
        const uint8_t* rows = find_glyph(ch);
        if (rows) {
            for (int ry = 0; ry < 7; ++ry)
                for (int rx = 0; rx < 5; ++rx)
                    if (rows[ry] & (0x10 >> rx))
                        fill_rect(cx + rx * scale, y + ry * scale, scale, scale, c);
        }
        cx += 6 * scale;
    }
}

int text_width(const std::string& s, int scale) {
    return static_cast<int>(s.size()) * 6 * scale;
}

void Canvas::write_png(const std::string& path) const {
    // Scanlines with filter byte 0.
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(h_) * (1 + static_cast<size_t>(w_) * 3));
    for (int y = 0; y < h_; ++y) {
        raw.push_back(0);
        const size_t off = static_cast<size_t>(y) * w_ * 3;
        raw.insert(raw.end(), pix_.begin() + off, pix_.begin() + off + static_cast<size_t>(w_) * 3);
    }
    uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> compressed(bound);
    if (::compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) !=
        Z_OK)
        throw Error("png: deflate failed");
    compressed.resize(bound);

    std::vector<uint8_t> png = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    std::vector<uint8_t> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(w_));
    put_u32(ihdr, static_cast<uint32_t>(h_));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", compressed);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
}

Svg::Svg(int width, int height) : w_(width), h_(height) {}

void Svg::rect(double x, double y, double w, double h, Color fill) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
             "\" height=\"" + fmt(h) + "\" fill=\"" + color_hex(fill) + "\"/>\n";
}

void Svg::line(double x0, double y0, double x1, double y1, Color stroke, double width) {
    body_ += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) +
             "\" y2=\"" + fmt(y1) + "\" stroke=\"" + color_hex(stroke) + "\" stroke-width=\"" +
             fmt(width) + "\"/>\n";
}

void Svg::polyline(const std::vector<std::pair<double, double>>& pts, Color stroke,
                   double width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + color_hex(stroke) + "\" stroke-width=\"" +
             fmt(width) + "\" points=\"";
    for (const auto& [x, y] : pts) body_ += fmt(x) + "," + fmt(y) + " ";
    body_ += "\"/>\n";
}

void Svg::polygon(const std::vector<std::pair<double, double>>& pts, Color fill) {
    body_ += "<polygon fill=\"" + color_hex(fill) + "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : pts) body_ += fmt(x) + "," + fmt(y) + " ";
    body_ += "\"/>\n";
}

void Svg::text(double x, double y, const std::string& s, int size, const std::string& anchor,
               Color fill) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"monospace\" " +
             "font-size=\"" + std::to_string(size) + "\" text-anchor=\"" + anchor +
             "\" fill=\"" + color_hex(fill) + "\">" + xml_escape(s) + "</text>\n";
}

void Svg::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
        << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
        << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"#ffffff\"/>\n"
        << body_ << "</svg>\n";
}

void write_heatmap(const std::string& stem, const HeatmapSpec& spec) {
    const int n_rows = static_cast<int>(spec.values.rows());
    const int n_cols = static_cast<int>(spec.values.cols());
    if (n_rows < 1 || n_cols < 1) throw ParameterError("heatmap: empty matrix");

    constexpr int W = 900, H = 600;
    constexpr int left = 220, top = 50, right = 80, bottom = 90;
    const double cw = static_cast<double>(W - left - right) / n_cols;
    const double chh = static_cast<double>(H - top - bottom) / n_rows;

    double vmin = 0.0, vmax = 1e-12;
    for (int i = 0; i < n_rows; ++i)
        for (int j = 0; j < n_cols; ++j)
            if (std::isfinite(spec.values(i, j))) vmax = std::max(vmax, spec.values(i, j));

    Svg svg(W, H);
    Canvas png(W, H);
    svg.text(W / 2.0, 24, spec.title, 15, "middle");
    png.text((W - text_width(spec.title)) / 2, 14, spec.title, {0, 0, 0});

    for (int i = 0; i < n_rows; ++i) {
        for (int j = 0; j < n_cols; ++j) {
            const double v = spec.values(i, j);
            const Color c = std::isfinite(v)
                                ? heat_color((v - vmin) / (vmax - vmin))
                                : Color{200, 200, 200};
            const double x = left + j * cw, y = top + i * chh;
            svg.rect(x, y, cw, chh, c);
            png.fill_rect(static_cast<int>(x), static_cast<int>(y),
                          static_cast<int>(cw) + 1, static_cast<int>(chh) + 1, c);
        }
        const std::string label =
            i < static_cast<int>(spec.row_labels.size()) ? spec.row_labels[i] : "";
        svg.text(left - 6, top + (i + 0.65) * chh, label, 11, "end");
        png.text(left - 6 - text_width(label), static_cast<int>(top + i * chh + chh / 2 - 3),
                 label, {0, 0, 0});
    }
    for (int j = 0; j < n_cols; ++j) {
        const std::string label =
            j < static_cast<int>(spec.col_labels.size()) ? spec.col_labels[j] : "";
        svg.text(left + (j + 0.5) * cw, H - bottom + 16, label, 11, "middle");
        png.text(static_cast<int>(left + j * cw + cw / 2) - text_width(label) / 2,
                 H - bottom + 10, label, {0, 0, 0});
    }
    // Scale bar.
    const std::string lo = "0", hi = fmt(vmax);
    for (int k = 0; k < 100; ++k) {
        const Color c = heat_color(k / 99.0);
        const double x = left + (W - left - right) * (k / 100.0);
        svg.rect(x, H - 40, (W - left - right) / 100.0 + 1, 12, c);
        png.fill_rect(static_cast<int>(x), H - 40,
                      static_cast<int>((W - left - right) / 100.0) + 1, 12, c);
    }
    svg.text(left, H - 48, spec.value_label + "  [" + lo + ", " + hi + "]", 11);
    png.text(left, H - 60, spec.value_label + "  [" + lo + ", " + hi + "]", {0, 0, 0});

    svg.save(stem + ".svg");
    png.write_png(stem + ".png");
}

void write_stacked_area(const std::string& stem, const StackedAreaSpec& spec) {
    const int steps = static_cast<int>(spec.shares.rows());
    const int k = static_cast<int>(spec.shares.cols());
    if (steps < 1 || k < 1) throw ParameterError("stacked area: empty matrix");

    constexpr int W = 900, H = 540;
    constexpr int left = 70, top = 50, right = 210, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    Svg svg(W, H);
    Canvas png(W, H);
    svg.text(W / 2.0, 24, spec.title, 15, "middle");
    png.text((W - text_width(spec.title)) / 2, 14, spec.title, {0, 0, 0});

    auto x_of = [&](double i) {
        return left + (steps > 1 ? pw * i / (steps - 1) : pw / 2.0);
    };
    auto y_of = [&](double share) { return top + ph * (1.0 - share); };

    Eigen::MatrixXd cum = Eigen::MatrixXd::Zero(steps, k + 1);
    for (int j = 0; j < k; ++j) cum.col(j + 1) = cum.col(j) + spec.shares.col(j);

    for (int j = 0; j < k; ++j) {
        const Color c = kPalette[j % 10];
        std::vector<std::pair<double, double>> poly;
        for (int i = 0; i < steps; ++i) poly.push_back({x_of(i), y_of(cum(i, j + 1))});
        for (int i = steps - 1; i >= 0; --i) poly.push_back({x_of(i), y_of(cum(i, j))});
        svg.polygon(poly, c);
        // Raster: vertical spans per pixel column with linear interpolation.
        for (int px = 0; px <= static_cast<int>(pw); ++px) {
            const double fi = steps > 1 ? px / pw * (steps - 1) : 0.0;
            const int i0 = std::min(static_cast<int>(fi), steps - 1);
            const int i1 = std::min(i0 + 1, steps - 1);
            const double u = fi - i0;
            const double lo = cum(i0, j) * (1 - u) + cum(i1, j) * u;
            const double hi = cum(i0, j + 1) * (1 - u) + cum(i1, j + 1) * u;
            png.fill_rect(left + px, static_cast<int>(y_of(hi)), 1,
                          std::max(1, static_cast<int>(y_of(lo)) - static_cast<int>(y_of(hi))),
                          c);
        }
        const std::string name = j < static_cast<int>(spec.series.size())
                                     ? spec.series[j]
                                     : "series " + std::to_string(j + 1);
        svg.rect(W - right + 14, top + 18 * j, 12, 12, c);
        svg.text(W - right + 32, top + 18 * j + 10, name, 11);
        png.fill_rect(W - right + 14, top + 18 * j, 12, 12, c);
        png.text(W - right + 32, top + 18 * j + 3, name, {0, 0, 0});
    }

    const Color axis{0, 0, 0};
    svg.line(left, top, left, H - bottom, axis);
    svg.line(left, H - bottom, W - right, H - bottom, axis);
    png.line(left, top, left, H - bottom, axis);
    png.line(left, H - bottom, W - right, H - bottom, axis);
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        svg.text(left - 8, y_of(v) + 4, fmt(v), 10, "end");
        png.text(left - 8 - text_width(fmt(v)), static_cast<int>(y_of(v)) - 3, fmt(v), axis);
    }
    svg.text(left + pw / 2, H - bottom + 30, spec.x_label, 12, "middle");
    png.text(static_cast<int>(left + pw / 2) - text_width(spec.x_label) / 2, H - bottom + 24,
             spec.x_label, axis);

    svg.save(stem + ".svg");
    png.write_png(stem + ".png");
}

void write_curve(const std::string& stem, const CurveSpec& spec) {
    if (spec.x.size() != spec.y.size() || spec.x.empty())
        throw ParameterError("curve: bad point set");

    constexpr int W = 620, H = 620;
    constexpr int left = 80, top = 50, right = 40, bottom = 70;
    const double pw = W - left - right, ph = H - top - bottom;

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!spec.unit_square) {
        xmin = *std::min_element(spec.x.begin(), spec.x.end());
        xmax = *std::max_element(spec.x.begin(), spec.x.end());
        ymin = *std::min_element(spec.y.begin(), spec.y.end());
        ymax = *std::max_element(spec.y.begin(), spec.y.end());
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
    }
    auto x_of = [&](double v) { return left + pw * (v - xmin) / (xmax - xmin); };
    auto y_of = [&](double v) { return top + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

    Svg svg(W, H);
    Canvas png(W, H);
    svg.text(W / 2.0, 24, spec.title, 15, "middle");
    png.text((W - text_width(spec.title)) / 2, 14, spec.title, {0, 0, 0});

    const Color grid{220, 220, 220}, axis{0, 0, 0}, curve{31, 119, 180}, ref{150, 150, 150};
    for (double v : {0.25, 0.5, 0.75}) {
        svg.line(x_of(xmin + v * (xmax - xmin)), top, x_of(xmin + v * (xmax - xmin)), H - bottom,
                 grid);
        svg.line(left, y_of(ymin + v * (ymax - ymin)), W - right, y_of(ymin + v * (ymax - ymin)),
                 grid);
        png.line(static_cast<int>(x_of(xmin + v * (xmax - xmin))), top,
                 static_cast<int>(x_of(xmin + v * (xmax - xmin))), H - bottom, grid);
        png.line(left, static_cast<int>(y_of(ymin + v * (ymax - ymin))), W - right,
                 static_cast<int>(y_of(ymin + v * (ymax - ymin))), grid);
    }
    if (spec.diagonal) {
        svg.line(x_of(xmin), y_of(ymin), x_of(xmax), y_of(ymax), ref);
        png.line(static_cast<int>(x_of(xmin)), static_cast<int>(y_of(ymin)),
                 static_cast<int>(x_of(xmax)), static_cast<int>(y_of(ymax)), ref);
    }
    if (spec.hline >= 0.0) {
        svg.line(left, y_of(spec.hline), W - right, y_of(spec.hline), ref);
        png.line(left, static_cast<int>(y_of(spec.hline)), W - right,
                 static_cast<int>(y_of(spec.hline)), ref);
    }

    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < spec.x.size(); ++i) pts.push_back({x_of(spec.x[i]), y_of(spec.y[i])});
    svg.polyline(pts, curve, 2.0);
    for (size_t i = 1; i < pts.size(); ++i)
        png.line(static_cast<int>(pts[i - 1].first), static_cast<int>(pts[i - 1].second),
                 static_cast<int>(pts[i].first), static_cast<int>(pts[i].second), curve);

    svg.line(left, top, left, H - bottom, axis);
    svg.line(left, H - bottom, W - right, H - bottom, axis);
    png.line(left, top, left, H - bottom, axis);
    png.line(left, H - bottom, W - right, H - bottom, axis);
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const std::string lx = fmt(xmin + v * (xmax - xmin));
        const std::string ly = fmt(ymin + v * (ymax - ymin));
        svg.text(x_of(xmin + v * (xmax - xmin)), H - bottom + 18, lx, 10, "middle");
        svg.text(left - 8, y_of(ymin + v * (ymax - ymin)) + 4, ly, 10, "end");
        png.text(static_cast<int>(x_of(xmin + v * (xmax - xmin))) - text_width(lx) / 2,
                 H - bottom + 10, lx, axis);
        png.text(left - 8 - text_width(ly),
                 static_cast<int>(y_of(ymin + v * (ymax - ymin))) - 3, ly, axis);
    }
    svg.text(left + pw / 2, H - 20, spec.x_label, 12, "middle");
    png.text(static_cast<int>(left + pw / 2) - text_width(spec.x_label) / 2, H - 34,
             spec.x_label, axis);
    svg.text(18, top + ph / 2, spec.y_label, 12, "middle");
    png.text(6, static_cast<int>(top + ph / 2), spec.y_label, axis);

    svg.save(stem + ".svg");
    png.write_png(stem + ".png");
}

}  // namespace riskpipe::plot
