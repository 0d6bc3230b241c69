#pragma once

#include <cstdint>

#include "jsmreg/evaluation.hpp"
#include "jsmreg/image.hpp"
#include "jsmreg/kernel_regression.hpp"

namespace jsmreg::synth {

/// Band-limited random texture (two octaves of smoothed white noise),
/// normalized to [0.05, 0.95]. Deterministic for a given seed.
GrayImage textured_image(int width, int height, std::uint64_t seed);

/// mov(y) = img(y - t): content shifted by +t, so the true field is z = t.
GrayImage translate(const GrayImage& img, Vec2 t);

struct BumpSpec {
  Vec2 center;
  double peak = 6.0;   // max |z| in pixels, reached at the center
  double width = 20.0; // Gaussian std in pixels
  Vec2 direction{0.8, 0.6};
};

/// z(x) = peak * direction * exp(-|x - c|^2 / (2 width^2)).
Vec2 bump_displacement(const BumpSpec& spec, Vec2 x);
DenseDeformationField bump_field(int width, int height, const BumpSpec& spec);

/// Inverse of x -> x + z(x) for the analytic bump, by fixed-point iteration.
Vec2 invert_bump(const BumpSpec& spec, Vec2 y);

/// Moving image satisfying mov(x + z(x)) = ref(x) for the bump field z.
GrayImage apply_bump(const GrayImage& ref, const BumpSpec& spec);

enum class BlobFill {
  texture,  // unrelated texture with the same statistics as the base image
  uniform,  // constant intensity `value`
};

struct Blob {
  Vec2 center;         // in the moving image
  double radius = 12;  // 24 px diameter
  BlobFill fill = BlobFill::texture;
  double value = 1.0;
  std::uint64_t texture_seed = 0;
};

/// Paints the disk into the image.
GrayImage insert_blob(const GrayImage& img, const Blob& blob);

/// Pixels within `radius` of `center`.
Grid<char> disk_mask(int width, int height, Vec2 center, double radius);

/// Landmark pairs on a regular grid, moving side mapped through the field.
LandmarkSet grid_landmarks(const DenseDeformationField& truth, int step, int margin);

struct TranslationFixture {
  GrayImage ref, mov;
  DenseDeformationField truth;
};

struct BumpFixture {
  GrayImage ref, mov;
  DenseDeformationField truth;
  BumpSpec bump;
  Blob blob;          // only meaningful when has_blob
  bool has_blob = false;
  Vec2 blob_in_ref;   // blob center pulled back into the reference frame
};

TranslationFixture translation_fixture(std::uint64_t seed, int size = 128, Vec2 shift = {3.0, -2.0});
BumpFixture bump_fixture(std::uint64_t seed, int size = 256, bool with_blob = false,
                         BlobFill fill = BlobFill::texture);

}  // namespace jsmreg::synth
