#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace docqual::img {

// 8-bit RGB raster, row-major, interleaved channels.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::uint8_t& at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  void fill_rect(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b);

  bool operator==(const Image& o) const {
    return width == o.width && height == o.height && pixels == o.pixels;
  }
};

// Minimal PNG support: 8-bit RGB, no interlace. Writing is deterministic
// (fixed filter and compression settings).
void write_png(const std::string& path, const Image& image);
std::vector<std::uint8_t> encode_png(const Image& image);
Image read_png(const std::string& path);
Image decode_png(const std::uint8_t* data, std::size_t len);

}  // namespace docqual::img
