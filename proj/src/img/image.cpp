#include "docqual/img/image.hpp"

#include "docqual/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>

namespace docqual::img {

namespace {

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len, std::uint32_t seed = 0) {
  return static_cast<std::uint32_t>(
      ::crc32(seed, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  std::uint32_t crc = crc32_of(out.data() + start, out.size() - start);
  put_u32(out, crc);
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void Image::fill_rect(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g,
                      std::uint8_t b) {
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(width, x1);
  y1 = std::min(height, y1);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      at(y, x, 0) = r;
      at(y, x, 1) = g;
      at(y, x, 2) = b;
    }
  }
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  const int w = image.width, h = image.height;
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * 3));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    const std::uint8_t* row = image.pixels.data() + static_cast<std::size_t>(y) * w * 3;
    raw.insert(raw.end(), row, row + static_cast<std::size_t>(w) * 3);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) !=
      Z_OK)
    throw IoError("png: deflate failed");
  compressed.resize(bound);

  std::vector<std::uint8_t> out;
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  out.insert(out.end(), sig, sig + 8);
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: RGB
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", {});
  return out;
}

void write_png(const std::string& path, const Image& image) {
  std::vector<std::uint8_t> bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path);
}

Image decode_png(const std::uint8_t* data, std::size_t len) {
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (len < 8 || std::memcmp(data, sig, 8) != 0) throw IoError("png: bad signature");

  int w = 0, h = 0;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  bool seen_ihdr = false;
  while (pos + 12 <= len) {
    std::uint32_t clen = get_u32(data + pos);
    std::string type(reinterpret_cast<const char*>(data + pos + 4), 4);
    const std::uint8_t* payload = data + pos + 8;
    if (pos + 12 + clen > len) throw IoError("png: truncated chunk");
    if (type == "IHDR") {
      w = static_cast<int>(get_u32(payload));
      h = static_cast<int>(get_u32(payload + 4));
      int depth = payload[8], color = payload[9], interlace = payload[12];
      if (depth != 8 || color != 2 || interlace != 0)
        throw IoError("png: only 8-bit RGB non-interlaced supported");
      seen_ihdr = true;
    } else if (type == "IDAT") {
      idat.insert(idat.end(), payload, payload + clen);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + clen;
  }
  if (!seen_ihdr || w <= 0 || h <= 0) throw IoError("png: missing IHDR");

  std::size_t stride = static_cast<std::size_t>(w) * 3;
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(h) * (stride + 1));
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size())
    throw IoError("png: inflate failed");

  Image img(w, h);
  std::vector<std::uint8_t> prev(stride, 0);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
    int filter = src[0];
    std::uint8_t* dst = img.pixels.data() + static_cast<std::size_t>(y) * stride;
    for (std::size_t i = 0; i < stride; ++i) {
      int x = src[1 + i];
      int a = i >= 3 ? dst[i - 3] : 0;
      int b = prev[i];
      int c = i >= 3 ? prev[i - 3] : 0;
      switch (filter) {
        case 0: break;
        case 1: x += a; break;
        case 2: x += b; break;
        case 3: x += (a + b) / 2; break;
        case 4: x += paeth(a, b, c); break;
        default: throw IoError("png: unknown filter");
      }
      dst[i] = static_cast<std::uint8_t>(x & 0xff);
    }
    std::copy(dst, dst + stride, prev.begin());
  }
  return img;
}

Image read_png(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes.data(), bytes.size());
}

}  // namespace docqual::img
