#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "jsmreg/grid.hpp"

namespace jsmreg {

/// Grayscale image with intensities normalized to [0,1].
///
/// The range invariant is checked on construction; use from_clamped() when the
/// source may overshoot through rounding.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  explicit GrayImage(ScalarMap pixels);

  static GrayImage from_clamped(ScalarMap pixels);

  int width() const { return pixels_.width(); }
  int height() const { return pixels_.height(); }
  std::size_t size() const { return pixels_.size(); }

  double operator()(int x, int y) const { return pixels_(x, y); }
  double at_clamped(int x, int y) const { return pixels_.at_clamped(x, y); }
  double sample(double x, double y) const { return sample_bilinear(pixels_, x, y); }

  const ScalarMap& pixels() const { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  ScalarMap pixels_;
};

struct GradientField {
  ScalarMap gx;
  ScalarMap gy;
};

/// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  friend Tensor2 operator+(Tensor2 a, Tensor2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
  friend Tensor2 operator-(Tensor2 a, Tensor2 b) { return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}; }
  friend Tensor2 operator*(Tensor2 a, double s) { return {a.xx * s, a.xy * s, a.yy * s}; }
  friend bool operator==(Tensor2, Tensor2) = default;

  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * xy; }
};

struct Eigen2 {
  double major = 0.0;  // larger eigenvalue
  double minor = 0.0;
  Vec2 major_dir{1.0, 0.0};  // unit eigenvector of the larger eigenvalue
  Vec2 minor_dir{0.0, 1.0};
};

Eigen2 eigen_decompose(const Tensor2& t);

using StructureTensorField = Grid<Tensor2>;

struct ImagePyramid {
  std::vector<GrayImage> levels;  // level 0 is the input, coarsest last
  std::vector<std::string> warnings;
};

struct DiffusionConfig {
  double contrast = 0.1;   // K; +inf gives linear (heat equation) diffusion
  double time_step = 0.2;  // explicit scheme, stable for dt <= 0.25

  void validate() const;
};

/// Smallest pyramid level the builder will halve further.
inline constexpr int kMinPyramidSide = 16;

/// 2x2 box-average pyramid. A level is halved only while both its
/// dimensions exceed kMinPyramidSide; requesting more levels than that
/// allows clips the pyramid and records a warning.
ImagePyramid build_pyramid(const GrayImage& img, int levels);

/// 2x2 box average then decimation; odd dimensions replicate the last row/column.
ScalarMap downsample2(const ScalarMap& src);

/// Central differences in the interior, one-sided differences on the border.
GradientField gradient(const ScalarMap& img);
inline GradientField gradient(const GrayImage& img) { return gradient(img.pixels()); }

/// Separable Gaussian blur with replicate borders; sigma = 0 is the identity.
ScalarMap gaussian_blur(const ScalarMap& src, double sigma);

/// Outer product of gradients of the sigma_grad-smoothed image, integrated
/// with a Gaussian of std sigma_int.
StructureTensorField structure_tensor(const GrayImage& img, double sigma_grad, double sigma_int);

/// Number of explicit steps that reach diffusion time sigma^2 / 2.
int diffusion_steps(double sigma, double time_step);

/// Explicit 4-neighbour Perona-Malik diffusion with conductance
/// exp(-(|dI|/K)^2), run to time sigma^2/2 (the variance of a Gaussian of std
/// sigma under the heat equation).
GrayImage anisotropic_diffuse(const GrayImage& img, double sigma, const DiffusionConfig& cfg);

/// Same iteration, snapshotted at each of the (non-decreasing) scales. Each
/// snapshot is bit-identical to anisotropic_diffuse() at that scale.
std::vector<GrayImage> anisotropic_diffuse_series(const GrayImage& img,
                                                  const std::vector<double>& sigmas,
                                                  const DiffusionConfig& cfg);

}  // namespace jsmreg
