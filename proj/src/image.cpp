#include "jsmreg/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jsmreg {

GrayImage::GrayImage(int width, int height, double fill) : pixels_(width, height, fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidInput("GrayImage: fill outside [0,1]");
}

GrayImage::GrayImage(ScalarMap pixels) : pixels_(std::move(pixels)) {
  for (double v : pixels_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("GrayImage: intensity outside [0,1]");
  }
}

GrayImage GrayImage::from_clamped(ScalarMap pixels) {
  for (double& v : pixels.values()) {
    v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  }
  GrayImage img;
  img.pixels_ = std::move(pixels);
  return img;
}

Eigen2 eigen_decompose(const Tensor2& t) {
  const double half_diff = 0.5 * (t.xx - t.yy);
  const double mean = 0.5 * (t.xx + t.yy);
  const double radius = std::hypot(half_diff, t.xy);
  const double theta = 0.5 * std::atan2(2.0 * t.xy, t.xx - t.yy);
  Eigen2 e;
  e.major = mean + radius;
  e.minor = mean - radius;
  e.major_dir = {std::cos(theta), std::sin(theta)};
  e.minor_dir = {-e.major_dir.y, e.major_dir.x};
  return e;
}

void DiffusionConfig::validate() const {
  if (!(contrast > 0.0)) throw InvalidInput("DiffusionConfig: contrast K must be > 0");
  if (!(time_step > 0.0 && time_step <= 0.25)) {
    throw InvalidInput("DiffusionConfig: time step must lie in (0, 0.25]");
  }
}

ScalarMap downsample2(const ScalarMap& src) {
  const int w = (src.width() + 1) / 2;
  const int h = (src.height() + 1) / 2;
  ScalarMap dst(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = 2 * x;
      const int sy = 2 * y;
      dst(x, y) = 0.25 * (src.at_clamped(sx, sy) + src.at_clamped(sx + 1, sy) +
                          src.at_clamped(sx, sy + 1) + src.at_clamped(sx + 1, sy + 1));
    }
  }
  return dst;
}

ImagePyramid build_pyramid(const GrayImage& img, int levels) {
  if (levels < 1) throw InvalidInput("build_pyramid: levels must be >= 1");
  if (img.width() < kMinPyramidSide || img.height() < kMinPyramidSide) {
    throw InvalidInput("build_pyramid: image smaller than 16x16");
  }
  ImagePyramid pyr;
  pyr.levels.push_back(img);
  while (static_cast<int>(pyr.levels.size()) < levels) {
    const GrayImage& last = pyr.levels.back();
    if (last.width() <= kMinPyramidSide || last.height() <= kMinPyramidSide) break;
    pyr.levels.push_back(GrayImage::from_clamped(downsample2(last.pixels())));
  }
  if (static_cast<int>(pyr.levels.size()) < levels) {
    std::ostringstream msg;
    msg << "pyramid clipped from " << levels << " to " << pyr.levels.size()
        << " levels (coarsest " << pyr.levels.back().width() << "x"
        << pyr.levels.back().height() << ")";
    pyr.warnings.push_back(msg.str());
  }
  return pyr;
}

GradientField gradient(const ScalarMap& img) {
  const int w = img.width();
  const int h = img.height();
  GradientField g{ScalarMap(w, h), ScalarMap(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (w > 1) {
        if (x == 0) {
          g.gx(x, y) = img(1, y) - img(0, y);
        } else if (x == w - 1) {
          g.gx(x, y) = img(x, y) - img(x - 1, y);
        } else {
          g.gx(x, y) = 0.5 * (img(x + 1, y) - img(x - 1, y));
        }
      }
      if (h > 1) {
        if (y == 0) {
          g.gy(x, y) = img(x, 1) - img(x, 0);
        } else if (y == h - 1) {
          g.gy(x, y) = img(x, y) - img(x, y - 1);
        } else {
          g.gy(x, y) = 0.5 * (img(x, y + 1) - img(x, y - 1));
        }
      }
    }
  }
  return g;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

ScalarMap gaussian_blur(const ScalarMap& src, double sigma) {
  if (sigma < 0.0) throw InvalidInput("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0 || src.empty()) return src;
  const std::vector<double> k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = src.width();
  const int h = src.height();
  ScalarMap tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * src.at_clamped(x + i, y);
      tmp(x, y) = acc;
    }
  }
  ScalarMap dst(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at_clamped(x, y + i);
      dst(x, y) = acc;
    }
  }
  return dst;
}

StructureTensorField structure_tensor(const GrayImage& img, double sigma_grad, double sigma_int) {
  if (sigma_grad < 0.0 || sigma_int < 0.0) {
    throw InvalidInput("structure_tensor: sigmas must be >= 0");
  }
  const GradientField g = gradient(gaussian_blur(img.pixels(), sigma_grad));
  const int w = img.width();
  const int h = img.height();
  ScalarMap jxx(w, h), jxy(w, h), jyy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = g.gx(x, y);
      const double gy = g.gy(x, y);
      jxx(x, y) = gx * gx;
      jxy(x, y) = gx * gy;
      jyy(x, y) = gy * gy;
    }
  }
  jxx = gaussian_blur(jxx, sigma_int);
  jxy = gaussian_blur(jxy, sigma_int);
  jyy = gaussian_blur(jyy, sigma_int);
  StructureTensorField t(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) t(x, y) = {jxx(x, y), jxy(x, y), jyy(x, y)};
  }
  return t;
}

int diffusion_steps(double sigma, double time_step) {
  if (sigma <= 0.0) return 0;
  // Guard against 4/0.4 = 9.999...; steps are counted from the ideal quotient.
  const double q = sigma * sigma / (2.0 * time_step);
  return static_cast<int>(std::ceil(q - 1e-9 * std::max(1.0, q)));
}

namespace {

// One explicit Perona-Malik step. Fluxes are evaluated once per edge; the
// replicate border makes the flux through the image boundary zero.
void diffusion_step(const ScalarMap& cur, ScalarMap& next, ScalarMap& flux_x, ScalarMap& flux_y,
                    double inv_k, double dt) {
  const int w = cur.width();
  const int h = cur.height();
  const bool linear = inv_k == 0.0;
  auto flux = [&](double d) {
    if (linear) return d;
    const double s = d * inv_k;
    return d * std::exp(-s * s);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      flux_x(x, y) = x + 1 < w ? flux(cur(x + 1, y) - cur(x, y)) : 0.0;
      flux_y(x, y) = y + 1 < h ? flux(cur(x, y + 1) - cur(x, y)) : 0.0;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double west = x > 0 ? flux_x(x - 1, y) : 0.0;
      const double north = y > 0 ? flux_y(x, y - 1) : 0.0;
      next(x, y) = cur(x, y) + dt * ((flux_x(x, y) - west) + (flux_y(x, y) - north));
    }
  }
}

}  // namespace

std::vector<GrayImage> anisotropic_diffuse_series(const GrayImage& img,
                                                  const std::vector<double>& sigmas,
                                                  const DiffusionConfig& cfg) {
  cfg.validate();
  std::vector<GrayImage> out;
  out.reserve(sigmas.size());
  ScalarMap cur = img.pixels();
  ScalarMap next(img.width(), img.height());
  ScalarMap fx(img.width(), img.height());
  ScalarMap fy(img.width(), img.height());
  const double inv_k = std::isinf(cfg.contrast) ? 0.0 : 1.0 / cfg.contrast;
  int done = 0;
  for (double sigma : sigmas) {
    if (sigma < 0.0) throw InvalidInput("anisotropic_diffuse: sigma must be >= 0");
    if (sigma == 0.0) {
      out.push_back(img);
      continue;
    }
    const int target = diffusion_steps(sigma, cfg.time_step);
    if (target < done) throw InvalidInput("anisotropic_diffuse_series: scales must be non-decreasing");
    for (; done < target; ++done) {
      diffusion_step(cur, next, fx, fy, inv_k, cfg.time_step);
      std::swap(cur, next);
    }
    out.push_back(GrayImage::from_clamped(cur));
  }
  return out;
}

GrayImage anisotropic_diffuse(const GrayImage& img, double sigma, const DiffusionConfig& cfg) {
  return anisotropic_diffuse_series(img, {sigma}, cfg).front();
}

}  // namespace jsmreg
