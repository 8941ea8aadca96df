#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "envkit/env.hpp"

namespace envkit {

// 24-bit RGB raster with helpers for grid renders. Cells are drawn at a
// fixed 16 px size with no margins, so images are (cols*16) x (rows*16).
class Raster {
  public:
    static constexpr int kCell = 16;

    Raster(int width, int height, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255);
    static Raster for_grid(int rows, int cols);

    int width() const { return width_; }
    int height() const { return height_; }

    void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    void fill_rect(int x0, int y0, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    void fill_cell(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    // Smaller centered square inside a cell, for markers.
    void fill_cell_inset(int row, int col, int inset, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    // Binary PPM (P6) bytes.
    std::string to_ppm() const;
    RenderOut to_render_out() const { return RenderOut{RenderOut::Format::ppm, to_ppm()}; }

  private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

// Minimal SVG 1.1 document builder for point/tour renders on the unit square.
class SvgBuilder {
  public:
    explicit SvgBuilder(int size_px = 512);
    void add_circle(double x, double y, double radius_px, const std::string& fill);
    void add_rect(double x, double y, double w_px, double h_px, const std::string& fill);
    void add_polyline(const std::vector<std::pair<double, double>>& unit_points,
                      const std::string& stroke, double width_px, bool close = false);
    std::string finish() const;
    RenderOut to_render_out() const { return RenderOut{RenderOut::Format::svg, finish()}; }

  private:
    double px(double unit) const;
    double py(double unit) const;
    int size_;
    std::string body_;
};

} // namespace envkit
