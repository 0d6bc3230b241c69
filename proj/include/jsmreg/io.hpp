#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jsmreg/block_matching.hpp"
#include "jsmreg/evaluation.hpp"
#include "jsmreg/image.hpp"
#include "jsmreg/kernel_regression.hpp"
#include "jsmreg/superpixel.hpp"

namespace jsmreg::io {

namespace fs = std::filesystem;

/// 8- or 16-bit grayscale PNG or PGM (P2/P5), normalized by the format's
/// maximum value. Throws IoError for unreadable or non-grayscale files.
GrayImage read_image(const fs::path& path);

void write_png(const fs::path& path, const GrayImage& img, int bit_depth = 8);
void write_pgm(const fs::path& path, const GrayImage& img);
void write_png_rgb(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb);

/// Region ids as a 16-bit grayscale PNG.
void write_labels_png(const fs::path& path, const SuperpixelLabels& labels);

/// Viridis-like ramp, t in [0,1].
std::array<std::uint8_t, 3> colormap(double t);

/// Color-maps a scalar map after normalizing [lo, hi] to [0,1]; lo = hi uses
/// the map's own range.
void write_colormap_png(const fs::path& path, const ScalarMap& map, double lo = 0.0, double hi = 0.0);

// JSMF: "JSMF", width, height (uint32 LE), then row-major (u, v) float32 LE.
std::vector<std::uint8_t> encode_jsmf(const DenseDeformationField& field);
DenseDeformationField decode_jsmf(const std::vector<std::uint8_t>& bytes);
void write_jsmf(const fs::path& path, const DenseDeformationField& field);
DenseDeformationField read_jsmf(const fs::path& path);

void write_field_csv(const fs::path& path, const DenseDeformationField& field);
void write_sparse_csv(const fs::path& path, const SparseDisplacementField& sparse);

/// CSV with header `rx,ry,mx,my`. Malformed content throws InvalidInput
/// naming the offending line.
LandmarkSet parse_landmarks_csv(const std::string& text);
LandmarkSet read_landmarks_csv(const fs::path& path);
void write_landmarks_csv(const fs::path& path, const LandmarkSet& landmarks);

std::vector<std::uint8_t> read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const fs::path& path, const std::string& text);

}  // namespace jsmreg::io
