#include "envkit/render.hpp"

#include <cstdio>

#include "envkit/errors.hpp"

namespace envkit {

Raster::Raster(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height * 3) {
    if (width < 1 || height < 1) {
        throw InvalidArgumentError("raster: dimensions must be positive");
    }
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = r;
        data_[i + 1] = g;
        data_[i + 2] = b;
    }
}

Raster Raster::for_grid(int rows, int cols) {
    return Raster(cols * kCell, rows * kCell);
}

void Raster::set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) {
        return;
    }
    const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    data_[i] = r;
    data_[i + 1] = g;
    data_[i + 2] = b;
}

void Raster::fill_rect(int x0, int y0, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            set_pixel(x, y, r, g, b);
        }
    }
}

void Raster::fill_cell(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    fill_rect(col * kCell, row * kCell, kCell, kCell, r, g, b);
}

void Raster::fill_cell_inset(int row, int col, int inset, std::uint8_t r, std::uint8_t g,
                             std::uint8_t b) {
    fill_rect(col * kCell + inset, row * kCell + inset, kCell - 2 * inset, kCell - 2 * inset, r, g, b);
}

std::string Raster::to_ppm() const {
    char header[64];
    std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", width_, height_);
    std::string out(header);
    out.append(reinterpret_cast<const char*>(data_.data()), data_.size());
    return out;
}

SvgBuilder::SvgBuilder(int size_px) : size_(size_px) {}

double SvgBuilder::px(double unit) const { return unit * (size_ - 20) + 10; }
double SvgBuilder::py(double unit) const { return (1.0 - unit) * (size_ - 20) + 10; }

void SvgBuilder::add_circle(double x, double y, double radius_px, const std::string& fill) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"%s\"/>\n",
                  px(x), py(y), radius_px, fill.c_str());
    body_ += buf;
}

void SvgBuilder::add_rect(double x, double y, double w_px, double h_px, const std::string& fill) {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\"/>\n",
                  px(x) - w_px / 2, py(y) - h_px / 2, w_px, h_px, fill.c_str());
    body_ += buf;
}

void SvgBuilder::add_polyline(const std::vector<std::pair<double, double>>& unit_points,
                              const std::string& stroke, double width_px, bool close) {
    if (unit_points.empty()) {
        return;
    }
    std::string pts;
    for (const auto& [x, y] : unit_points) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f,%.3f ", px(x), py(y));
        pts += buf;
    }
    if (close) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f,%.3f ", px(unit_points[0].first),
                      py(unit_points[0].second));
        pts += buf;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"%.3f\" points=\"",
                  stroke.c_str(), width_px);
    body_ += buf;
    body_ += pts;
    body_ += "\"/>\n";
}

std::string SvgBuilder::finish() const {
    char head[256];
    std::snprintf(head, sizeof(head),
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
                  "width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n"
                  "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n",
                  size_, size_, size_, size_, size_, size_);
    return std::string(head) + body_ + "</svg>\n";
}

} // namespace envkit
