// Copyright 2026 The fnsup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fnsup/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace fnsup {

namespace {

using Bytes = std::vector<unsigned char>;

Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(f), {});
}

void write_file(const std::string& path, const Bytes& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw IoError("failed writing '" + path + "'");
}

unsigned quantize(double v, unsigned maxval) {
  const double c = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0);
  return static_cast<unsigned>(std::lround(c * maxval));
}

// ------------------------------------------------------------------- PGM

class PgmCursor {
 public:
  PgmCursor(const Bytes& b, const std::string& path) : b_(b), path_(path) {}

  void skip_space() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    unsigned long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1000000000UL) throw CorruptHeader(start, path_ + ": " + what + " out of range");
      ++pos_;
    }
    if (pos_ == start) throw CorruptHeader(start, path_ + ": expected " + std::string(what));
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  const Bytes& bytes() const { return b_; }

 private:
  const Bytes& b_;
  const std::string& path_;
  std::size_t pos_ = 2;
};

ImageGrid read_pgm(const Bytes& b, const std::string& path) {
  const bool ascii = b[1] == '2';
  PgmCursor c(b, path);
  const unsigned long V = c.number("width"), U = c.number("height");
  const std::size_t max_at = c.pos();
  const unsigned long maxval = c.number("maxval");
  if (U == 0 || V == 0) throw CorruptHeader(max_at, path + ": zero image dimension");
  if (maxval == 0 || maxval > 65535) throw CorruptHeader(max_at, path + ": maxval out of range");
  ImageGrid g(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(V));
  const double scale = 1.0 / static_cast<double>(maxval);
  if (ascii) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      c.skip_space();
      const std::size_t at = c.pos();
      if (at >= b.size()) throw CorruptHeader(at, path + ": truncated pixel data");
      const unsigned long v = c.number("pixel value");
      if (v > maxval) throw CorruptHeader(at, path + ": pixel value exceeds maxval");
      g.data()[i] = static_cast<double>(v) * scale;
    }
    return g;
  }
  // Exactly one whitespace byte separates the header from binary data.
  if (c.pos() >= b.size() || !std::isspace(b[c.pos()])) {
    throw CorruptHeader(c.pos(), path + ": missing separator before pixel data");
  }
  c.advance(1);
  const std::size_t width = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(U) * V * width;
  if (b.size() - c.pos() < need) {
    throw CorruptHeader(b.size(), path + ": truncated pixel data, expected " +
                                      std::to_string(need) + " bytes");
  }
  const unsigned char* p = b.data() + c.pos();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const unsigned v = width == 2 ? (unsigned(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
    if (v > maxval) throw CorruptHeader(c.pos() + i * width, path + ": pixel exceeds maxval");
    g.data()[i] = static_cast<double>(v) * scale;
  }
  return g;
}

Bytes encode_pgm(const ImageGrid& g, unsigned maxval, bool ascii) {
  const std::string header = std::string(ascii ? "P2" : "P5") + "\n" + std::to_string(g.cols()) +
                             " " + std::to_string(g.rows()) + "\n" + std::to_string(maxval) + "\n";
  Bytes out(header.begin(), header.end());
  if (ascii) {
    for (Eigen::Index u = 0; u < g.rows(); ++u) {
      std::string line;
      for (Eigen::Index v = 0; v < g.cols(); ++v) {
        line += (v ? " " : "") + std::to_string(quantize(g(u, v), maxval));
      }
      line += "\n";
      out.insert(out.end(), line.begin(), line.end());
    }
    return out;
  }
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const unsigned q = quantize(g.data()[i], maxval);
    if (maxval > 255) out.push_back(static_cast<unsigned char>(q >> 8));
    out.push_back(static_cast<unsigned char>(q & 0xff));
  }
  return out;
}

// ------------------------------------------------------------------- PNG

struct PngSource {
  const Bytes* bytes;
  std::size_t pos;
};

struct PngFailure {
  char message[256];
};

void png_read_bytes(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->pos + n > src->bytes->size()) png_error(png, "unexpected end of file");
  std::memcpy(out, src->bytes->data() + src->pos, n);
  src->pos += n;
}

void png_on_error(png_structp png, png_const_charp msg) {
  auto* fail = static_cast<PngFailure*>(png_get_error_ptr(png));
  std::snprintf(fail->message, sizeof fail->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

// Plain-data workhorse so that longjmp never skips a destructor. Returns 0
// on success, 1 on a libpng error, 2 on an unsupported color type.
int decode_png_raw(PngSource* src, PngFailure* fail, png_uint_32* width, png_uint_32* height,
                   int* depth, png_bytep* pixels) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, fail, png_on_error,
                                           png_on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    std::snprintf(fail->message, sizeof fail->message, "libpng initialization failed");
    png_destroy_read_struct(&png, &info, nullptr);
    return 1;
  }
  png_bytep rows_mem = nullptr;
  png_bytepp row_ptrs = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    std::free(rows_mem);
    std::free(row_ptrs);
    png_destroy_read_struct(&png, &info, nullptr);
    return 1;
  }
  png_set_read_fn(png, src, png_read_bytes);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    return 2;
  }
  int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  png_read_update_info(png, info);
  *width = png_get_image_width(png, info);
  *height = png_get_image_height(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  rows_mem = static_cast<png_bytep>(std::malloc(rowbytes * *height));
  row_ptrs = static_cast<png_bytepp>(std::malloc(sizeof(png_bytep) * *height));
  if (!rows_mem || !row_ptrs) png_error(png, "out of memory");
  for (png_uint_32 r = 0; r < *height; ++r) row_ptrs[r] = rows_mem + r * rowbytes;
  png_read_image(png, row_ptrs);
  png_read_end(png, nullptr);
  std::free(row_ptrs);
  png_destroy_read_struct(&png, &info, nullptr);
  *depth = bit_depth;
  *pixels = rows_mem;
  return 0;
}

ImageGrid read_png(const Bytes& b, const std::string& path) {
  PngSource src{&b, 0};
  PngFailure fail{};
  png_uint_32 width = 0, height = 0;
  int depth = 0;
  png_bytep pixels = nullptr;
  const int rc = decode_png_raw(&src, &fail, &width, &height, &depth, &pixels);
  if (rc == 2) throw UnsupportedFormat(path + ": only grayscale PNG is supported");
  if (rc != 0) throw CorruptHeader(src.pos, path + ": " + fail.message);
  ImageGrid g(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
  const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const unsigned v = depth == 16 ? (unsigned(pixels[2 * i]) << 8) | pixels[2 * i + 1] : pixels[i];
    g.data()[i] = v * scale;
  }
  std::free(pixels);
  return g;
}

void png_write_bytes(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void png_flush_noop(png_structp) {}

int encode_png_raw(Bytes* out, PngFailure* fail, png_uint_32 width, png_uint_32 height, int depth,
                   png_bytepp rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, fail, png_on_error,
                                            png_on_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    std::snprintf(fail->message, sizeof fail->message, "libpng initialization failed");
    png_destroy_write_struct(&png, &info);
    return 1;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return 1;
  }
  png_set_write_fn(png, out, png_write_bytes, png_flush_noop);
  png_set_IHDR(png, info, width, height, depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return 0;
}

Bytes encode_png(const ImageGrid& g, int depth, const std::string& path) {
  const unsigned maxval = depth == 16 ? 65535 : 255;
  const std::size_t bpp = depth == 16 ? 2 : 1;
  const std::size_t rowbytes = static_cast<std::size_t>(g.cols()) * bpp;
  std::vector<unsigned char> mem(rowbytes * static_cast<std::size_t>(g.rows()));
  std::vector<png_bytep> rows(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index u = 0; u < g.rows(); ++u) {
    unsigned char* row = mem.data() + static_cast<std::size_t>(u) * rowbytes;
    rows[static_cast<std::size_t>(u)] = row;
    for (Eigen::Index v = 0; v < g.cols(); ++v) {
      const unsigned q = quantize(g(u, v), maxval);
      if (bpp == 2) {
        row[2 * v] = static_cast<unsigned char>(q >> 8);
        row[2 * v + 1] = static_cast<unsigned char>(q & 0xff);
      } else {
        row[v] = static_cast<unsigned char>(q);
      }
    }
  }
  Bytes out;
  PngFailure fail{};
  if (encode_png_raw(&out, &fail, static_cast<png_uint_32>(g.cols()),
                     static_cast<png_uint_32>(g.rows()), depth, rows.data()) != 0) {
    throw IoError(path + ": PNG encoding failed: " + fail.message);
  }
  return out;
}

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string e = path.substr(dot + 1);
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return e;
}

}  // namespace

ImageGrid image_read(const std::string& path) {
  const Bytes b = read_file(path);
  static const unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (b.size() >= 8 && std::equal(kPngSig, kPngSig + 8, b.begin())) return read_png(b, path);
  if (b.size() >= 2 && b[0] == 'P' && (b[1] == '2' || b[1] == '5')) return read_pgm(b, path);
  if (b.size() >= 2 && b[0] == 'P' && b[1] >= '1' && b[1] <= '7') {
    throw UnsupportedFormat(path + ": only grayscale PGM (P2/P5) is supported");
  }
  if (b.size() < 8 && b.size() >= 1 && b[0] == 0x89) {
    throw CorruptHeader(b.size(), path + ": truncated PNG signature");
  }
  throw UnsupportedFormat(path + ": not a PGM or PNG file");
}

void image_write(const std::string& path, const ImageGrid& grid, int depth) {
  const std::string ext = lower_extension(path);
  if (ext == "pgm") return image_write(path, grid, depth, ImageFormat::PgmBinary);
  if (ext == "png") return image_write(path, grid, depth, ImageFormat::Png);
  throw UnsupportedFormat(path + ": unknown image extension '" + ext + "'");
}

void image_write(const std::string& path, const ImageGrid& grid, int depth, ImageFormat format) {
  require_valid(grid, "image_write");
  if (depth != 8 && depth != 16) {
    throw UnsupportedFormat("image_write: bit depth must be 8 or 16, got " + std::to_string(depth));
  }
  const unsigned maxval = depth == 16 ? 65535 : 255;
  switch (format) {
    case ImageFormat::PgmAscii:
      return write_file(path, encode_pgm(grid, maxval, true));
    case ImageFormat::PgmBinary:
      return write_file(path, encode_pgm(grid, maxval, false));
    case ImageFormat::Png:
      return write_file(path, encode_png(grid, depth, path));
  }
}

}  // namespace fnsup
