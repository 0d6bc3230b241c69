#include "jsmreg/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace jsmreg::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

bool has_png_signature(const std::vector<std::uint8_t>& bytes) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(sig, sig + 8, bytes.begin());
}

GrayImage read_png(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng: cannot create info struct");
  }
  std::vector<std::uint8_t> raw;
  png_uint_32 w = 0, h = 0;
  int depth = 0, color = 0;
  std::size_t rowbytes = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("corrupt PNG: " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  png_get_IHDR(png, info, &w, &h, &depth, &color, nullptr, nullptr, nullptr);
  if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("not a grayscale PNG: " + path.string());
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  rowbytes = png_get_rowbytes(png, info);
  raw.resize(rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const int out_depth = depth == 16 ? 16 : 8;
  ScalarMap px(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      if (out_depth == 16) {
        const std::uint8_t* p = rows[y] + 2 * x;
        px(x, y) = ((p[0] << 8) | p[1]) / 65535.0;
      } else {
        px(x, y) = rows[y][x] / 255.0;
      }
    }
  }
  return GrayImage(std::move(px));
}

GrayImage read_pgm(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> IoError { return IoError("bad PGM " + path.string() + ": " + why); };
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_ws();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw fail("expected integer");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1 << 24) throw fail("header value too large");
    }
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) throw fail("unknown magic");
  const bool binary = bytes[1] == '5';
  pos = 2;
  const int w = read_int();
  const int h = read_int();
  const int maxval = read_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw fail("invalid header");
  ScalarMap px(w, h);
  if (binary) {
    ++pos;  // single whitespace before raster
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + bpp * w * h) throw fail("truncated raster");
    for (int i = 0; i < w * h; ++i) {
      const unsigned v = bpp == 2 ? (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1] : bytes[pos + i];
      if (v > static_cast<unsigned>(maxval)) throw fail("sample exceeds maxval");
      px.values()[i] = static_cast<double>(v) / maxval;
    }
  } else {
    for (int i = 0; i < w * h; ++i) {
      const int v = read_int();
      if (v > maxval) throw fail("sample exceeds maxval");
      px.values()[i] = static_cast<double>(v) / maxval;
    }
  }
  return GrayImage(std::move(px));
}

void write_png_raw(const fs::path& path, int width, int height, int depth, int color,
                   const std::vector<std::uint8_t>& data) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: cannot create info struct");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t channels = color == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data.data() + y * rowbytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(9);
  return out;
}

}  // namespace

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_text(path);
  out << text;
}

GrayImage read_image(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_bytes(path);
  if (has_png_signature(bytes)) return read_png(path);
  return read_pgm(bytes, path);
}

void write_png(const fs::path& path, const GrayImage& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw InvalidInput("write_png: bit depth must be 8 or 16");
  std::vector<std::uint8_t> data;
  data.reserve(img.size() * (bit_depth / 8));
  for (double v : img.pixels().values()) {
    if (bit_depth == 16) {
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      data.push_back(static_cast<std::uint8_t>(q >> 8));
      data.push_back(static_cast<std::uint8_t>(q & 0xff));
    } else {
      data.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
  }
  write_png_raw(path, img.width(), img.height(), bit_depth, PNG_COLOR_TYPE_GRAY, data);
}

void write_pgm(const fs::path& path, const GrayImage& img) {
  std::ostringstream head;
  head << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  const std::string h = head.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  for (double v : img.pixels().values()) bytes.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  write_bytes(path, bytes);
}

void write_png_rgb(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw InvalidInput("write_png_rgb: size mismatch");
  write_png_raw(path, width, height, 8, PNG_COLOR_TYPE_RGB, rgb);
}

void write_labels_png(const fs::path& path, const SuperpixelLabels& labels) {
  std::vector<std::uint8_t> data;
  for (int v : labels.labels.values()) {
    const auto q = static_cast<std::uint16_t>(std::clamp(v, 0, 65535));
    data.push_back(static_cast<std::uint8_t>(q >> 8));
    data.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  write_png_raw(path, labels.labels.width(), labels.labels.height(), 16, PNG_COLOR_TYPE_GRAY, data);
}

std::array<std::uint8_t, 3> colormap(double t) {
  // Viridis sampled at 9 evenly spaced stops.
  static constexpr double stops[9][3] = {
      {68, 1, 84},    {71, 44, 122},  {59, 81, 139},  {44, 113, 142}, {33, 144, 141},
      {39, 173, 129}, {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
  t = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, 1.0);
  const double s = t * 8.0;
  const int i = std::min(7, static_cast<int>(s));
  const double f = s - i;
  std::array<std::uint8_t, 3> c{};
  for (int k = 0; k < 3; ++k) {
    c[k] = static_cast<std::uint8_t>(std::lround(stops[i][k] * (1.0 - f) + stops[i + 1][k] * f));
  }
  return c;
}

void write_colormap_png(const fs::path& path, const ScalarMap& map, double lo, double hi) {
  if (lo == hi && !map.empty()) {
    lo = *std::min_element(map.values().begin(), map.values().end());
    hi = *std::max_element(map.values().begin(), map.values().end());
  }
  const double range = hi - lo;
  std::vector<std::uint8_t> rgb;
  rgb.reserve(map.size() * 3);
  for (double v : map.values()) {
    const auto c = colormap(range > 0.0 ? (v - lo) / range : 0.0);
    rgb.insert(rgb.end(), c.begin(), c.end());
  }
  write_png_rgb(path, map.width(), map.height(), rgb);
}

std::vector<std::uint8_t> encode_jsmf(const DenseDeformationField& field) {
  std::vector<std::uint8_t> out = {'J', 'S', 'M', 'F'};
  put_u32(out, static_cast<std::uint32_t>(field.width()));
  put_u32(out, static_cast<std::uint32_t>(field.height()));
  out.reserve(out.size() + field.size() * 8);
  for (const Vec2& v : field.values()) {
    for (double c : {v.x, v.y}) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(c)));
  }
  return out;
}

DenseDeformationField decode_jsmf(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "JSMF", 4) != 0) throw InvalidInput("not a JSMF field");
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16) || bytes.size() != 12 + n * 8) {
    throw InvalidInput("JSMF: size does not match header");
  }
  DenseDeformationField f(static_cast<int>(w), static_cast<int>(h));
  std::size_t at = 12;
  for (Vec2& v : f.values()) {
    v.x = std::bit_cast<float>(get_u32(bytes, at));
    v.y = std::bit_cast<float>(get_u32(bytes, at + 4));
    at += 8;
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw InvalidInput("JSMF: non-finite displacement");
  }
  return f;
}

void write_jsmf(const fs::path& path, const DenseDeformationField& field) { write_bytes(path, encode_jsmf(field)); }

DenseDeformationField read_jsmf(const fs::path& path) { return decode_jsmf(read_bytes(path)); }

void write_field_csv(const fs::path& path, const DenseDeformationField& field) {
  std::ofstream out = open_text(path);
  out << "x,y,u,v\n";
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) out << x << ',' << y << ',' << field(x, y).x << ',' << field(x, y).y << '\n';
  }
}

void write_sparse_csv(const fs::path& path, const SparseDisplacementField& sparse) {
  std::ofstream out = open_text(path);
  out << "x,y,dx,dy,confidence\n";
  for (const auto& s : sparse.samples) {
    out << s.position.x << ',' << s.position.y << ',' << s.displacement.x << ',' << s.displacement.y << ','
        << s.confidence << '\n';
  }
}

LandmarkSet parse_landmarks_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  LandmarkSet out;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line) {
        if (c != ' ' && c != '\t') compact += c;
      }
      if (compact != "rx,ry,mx,my") {
        throw InvalidInput("line " + std::to_string(lineno) + ": expected header rx,ry,mx,my");
      }
      header_seen = true;
      continue;
    }
    double v[4];
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t end = k < 3 ? line.find(',', start) : line.size();
      if (end == std::string::npos) throw InvalidInput("line " + std::to_string(lineno) + ": expected 4 fields");
      const std::string field = line.substr(start, end - start);
      std::size_t used = 0;
      try {
        v[k] = std::stod(field, &used);
      } catch (const std::exception&) {
        throw InvalidInput("line " + std::to_string(lineno) + ": field " + std::to_string(k + 1) + " is not a number");
      }
      if (field.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v[k])) {
        throw InvalidInput("line " + std::to_string(lineno) + ": field " + std::to_string(k + 1) + " is not a number");
      }
      start = end + 1;
    }
    if (line.find(',', line.rfind(',') + 1) != std::string::npos ||
        std::count(line.begin(), line.end(), ',') != 3) {
      throw InvalidInput("line " + std::to_string(lineno) + ": expected 4 fields");
    }
    out.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  if (!header_seen) throw InvalidInput("line 1: expected header rx,ry,mx,my");
  return out;
}

LandmarkSet read_landmarks_csv(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return parse_landmarks_csv(std::string(bytes.begin(), bytes.end()));
}

void write_landmarks_csv(const fs::path& path, const LandmarkSet& landmarks) {
  std::ofstream out = open_text(path);
  out.precision(12);
  out << "rx,ry,mx,my\n";
  for (const auto& lm : landmarks) {
    out << lm.reference.x << ',' << lm.reference.y << ',' << lm.moving.x << ',' << lm.moving.y << '\n';
  }
}

}  // namespace jsmreg::io
