// Fixtures and independent reference implementations shared by the unit
// tests and the acceptance runner.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jsmreg/block_matching.hpp"
#include "jsmreg/kernel_regression.hpp"
#include "jsmreg/structure_scale.hpp"

namespace support {

using namespace jsmreg;

inline GrayImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarMap m(w, h);
  for (double& v : m.values()) v = u(rng);
  return GrayImage(std::move(m));
}

// Direct 2D Gaussian convolution with replicate borders; no separability.
inline ScalarMap direct_gaussian(const ScalarMap& src, double sigma) {
  const int r = static_cast<int>(std::ceil(5 * sigma));
  ScalarMap out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      double s = 0.0, ws = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const double w = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
          s += w * src.at_clamped(x + dx, y + dy);
          ws += w;
        }
      }
      out(x, y) = s / ws;
    }
  }
  return out;
}

inline double max_abs_diff(const ScalarMap& a, const ScalarMap& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

inline GrayImage step_image(int w, int h) {
  ScalarMap m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m(x, y) = x < w / 2 ? 0.0 : 1.0;
  }
  return GrayImage(std::move(m));
}

struct CheckerFixture {
  GrayImage image;
  int x0, y0, side;  // patch rectangle
};

/// Flat 0.5 background with a checkerboard patch of `square` px squares.
inline CheckerFixture checker_fixture(int size = 128, int side = 32, int square = 4, double lo = 0.4,
                                      double hi = 0.6) {
  ScalarMap m(size, size, 0.5);
  const int x0 = (size - side) / 2, y0 = (size - side) / 2;
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) m(x, y) = (((x - x0) / square + (y - y0) / square) % 2) ? hi : lo;
  }
  return {GrayImage(std::move(m)), x0, y0, side};
}

/// Fraction of each region's pixels inside the checker patch.
inline std::vector<double> patch_fraction(const CheckerFixture& f, const SuperpixelLabels& labels) {
  std::vector<double> inside(labels.count, 0.0), total(labels.count, 0.0);
  for (int y = 0; y < labels.labels.height(); ++y) {
    for (int x = 0; x < labels.labels.width(); ++x) {
      const int r = labels.labels(x, y);
      total[r] += 1.0;
      if (x >= f.x0 && x < f.x0 + f.side && y >= f.y0 && y < f.y0 + f.side) inside[r] += 1.0;
    }
  }
  for (int r = 0; r < labels.count; ++r) inside[r] /= total[r];
  return inside;
}

/// Exhaustive per-region MAP scale: for every region and every scale, sum the
/// normalized per-pixel log-likelihood directly from the residuals.
inline std::vector<int> oracle_region_map(const ScaleStack& stack, const SuperpixelLabels& labels,
                                          const MdlParams& p) {
  const std::size_t m = stack.sigmas.size();
  std::vector<std::vector<double>> score(labels.count, std::vector<double>(m, 0.0));
  std::vector<double> e(m);
  for (int y = 0; y < labels.labels.height(); ++y) {
    for (int x = 0; x < labels.labels.width(); ++x) {
      double mx = -1e300;
      for (std::size_t k = 0; k < m; ++k) {
        const double s = stack.sigmas[k];
        const double r = stack.residuals[k](x, y) * p.residual_scale;
        e[k] = -p.b * (p.c / (s * s) + r * r);
        mx = std::max(mx, e[k]);
      }
      double z = 0.0;
      for (std::size_t k = 0; k < m; ++k) z += std::exp(e[k] - mx);
      const double log_a = -(mx + std::log(z));
      for (std::size_t k = 0; k < m; ++k) score[labels.labels(x, y)][k] += log_a + e[k];
    }
  }
  std::vector<int> best(labels.count, 0);
  for (int r = 0; r < labels.count; ++r) {
    const double top = *std::max_element(score[r].begin(), score[r].end());
    for (int k = static_cast<int>(m) - 1; k >= 0; --k) {
      if (score[r][k] >= top - 1e-12 * std::max(1.0, std::abs(top))) {
        best[r] = k;
        break;
      }
    }
  }
  return best;
}

/// Brute-force weighted mean over every sample with a fixed inverse
/// covariance, Mahalanobis truncation at 3.
inline DenseDeformationField oracle_regression(const SparseDisplacementField& sparse, const ScalarMap& jsm,
                                               const std::vector<Tensor2>& inverse_per_pixel, int w, int h) {
  DenseDeformationField out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Tensor2& inv = inverse_per_pixel[static_cast<std::size_t>(y) * w + x];
      double sw = 0.0, su = 0.0, sv = 0.0;
      for (const auto& s : sparse.samples) {
        const double dx = s.position.x - x, dy = s.position.y - y;
        const double m2 = inv.xx * dx * dx + 2 * inv.xy * dx * dy + inv.yy * dy * dy;
        if (m2 > 9.0) continue;
        const double wi =
            std::exp(-0.5 * m2) * sample_bilinear(jsm, s.position.x, s.position.y) * s.confidence;
        sw += wi;
        su += wi * s.displacement.x;
        sv += wi * s.displacement.y;
      }
      out(x, y) = {su / sw, sv / sw};
    }
  }
  return out;
}

/// Tensor distance evaluated from scalar entries.
inline double oracle_tensor_distance(double a1, double b1, double c1, double a2, double b2, double c2) {
  const double a = a1 - a2, b = b1 - b2, c = c1 - c2;
  const double tr_d2 = a * a + 2.0 * b * b + c * c;
  const double tr = a + c;
  const double rad = 8.0 * M_PI / 15.0 * (tr_d2 - tr * tr / 3.0);
  return std::sqrt(std::max(rad, 0.0));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace support
