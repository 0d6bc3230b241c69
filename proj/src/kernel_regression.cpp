#include "jsmreg/kernel_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jsmreg {

DenseDeformationField zero_field(int width, int height) { return DenseDeformationField(width, height, Vec2{}); }

SteeringKernel steering_covariance(const Tensor2& lst, double sigma_d) {
  if (!(sigma_d >= 1.0)) throw InvalidInput("steering_covariance: sigma_d must be >= 1");
  const Eigen2 e = eigen_decompose(lst);
  const double l1 = std::max(e.major, 0.0);
  const double l2 = std::max(e.minor, 0.0);
  const double eps = 1e-6 * std::max(l1, 1e-12);
  const double rho = std::clamp(std::sqrt((l1 + eps) / (l2 + eps)), 1.0, kMaxElongation);

  SteeringKernel k;
  k.std_across = sigma_d / std::sqrt(rho);
  k.std_along = sigma_d * std::sqrt(rho);
  const Vec2 u = e.major_dir;  // across the structure
  const Vec2 v = e.minor_dir;  // along it
  const double va = k.std_across * k.std_across;
  const double vb = k.std_along * k.std_along;
  k.covariance = {va * u.x * u.x + vb * v.x * v.x, va * u.x * u.y + vb * v.x * v.y, va * u.y * u.y + vb * v.y * v.y};
  k.inverse = {u.x * u.x / va + v.x * v.x / vb, u.x * u.y / va + v.x * v.y / vb, u.y * u.y / va + v.y * v.y / vb};
  return k;
}

namespace {

// Uniform bucket grid over sample positions; each bucket lists sample indices
// in ascending order.
class SampleIndex {
 public:
  SampleIndex(const std::vector<SparseSample>& samples, const std::vector<double>& factor, int width, int height,
              int cell)
      : cell_(cell), cols_(width / cell + 1), rows_(height / cell + 1), buckets_(cols_ * rows_) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (factor[i] <= 0.0) continue;
      buckets_[bucket_of(samples[i].position)].push_back(static_cast<int>(i));
    }
  }

  void query(double x0, double y0, double x1, double y1, std::vector<int>& out) const {
    out.clear();
    const int c0 = std::clamp(static_cast<int>(std::floor(x0 / cell_)), 0, cols_ - 1);
    const int c1 = std::clamp(static_cast<int>(std::floor(x1 / cell_)), 0, cols_ - 1);
    const int r0 = std::clamp(static_cast<int>(std::floor(y0 / cell_)), 0, rows_ - 1);
    const int r1 = std::clamp(static_cast<int>(std::floor(y1 / cell_)), 0, rows_ - 1);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const auto& b = buckets_[r * cols_ + c];
        out.insert(out.end(), b.begin(), b.end());
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  int bucket_of(Vec2 p) const {
    const int c = std::clamp(static_cast<int>(std::floor(p.x / cell_)), 0, cols_ - 1);
    const int r = std::clamp(static_cast<int>(std::floor(p.y / cell_)), 0, rows_ - 1);
    return r * cols_ + c;
  }

  int cell_;
  int cols_;
  int rows_;
  std::vector<std::vector<int>> buckets_;
};

int nearest_sample(const std::vector<SparseSample>& samples, const std::vector<double>& factor, double x, double y) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 2 && best < 0; ++pass) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const bool eligible = pass == 0 ? factor[i] > 0.0 : samples[i].confidence > 0.0;
      if (!eligible) continue;
      const double dx = samples[i].position.x - x;
      const double dy = samples[i].position.y - y;
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
  }
  return best;
}

}  // namespace

DenseDeformationField regress_dense(const SparseDisplacementField& sparse, const ScalarMap& jsm,
                                    const ScalarMap& kernel_scale, const StructureTensorField& lst,
                                    RegressionStats* stats) {
  if (sparse.samples.empty()) throw InvalidInput("regress_dense: empty sparse field");
  if (!jsm.same_shape(kernel_scale) || !jsm.same_shape(lst)) throw InvalidInput("regress_dense: shape mismatch");
  if (sparse.confident_count() == 0) throw InvalidInput("regress_dense: no confident samples");

  const auto& samples = sparse.samples;
  std::vector<double> factor(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    factor[i] = sample_bilinear(jsm, samples[i].position.x, samples[i].position.y) * samples[i].confidence;
  }

  const int w = jsm.width();
  const int h = jsm.height();
  const SampleIndex index(samples, factor, w, h, 8);
  DenseDeformationField z(w, h);
  RegressionStats local_stats;
  std::vector<int> candidates;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const SteeringKernel k = steering_covariance(lst(x, y), kernel_scale(x, y));
      bool done = false;
      for (int doubling = 0; doubling <= kMaxSupportDoublings && !done; ++doubling) {
        const double scale2 = std::ldexp(1.0, 2 * doubling);  // (2^doubling)^2
        const Tensor2 inv = k.inverse * (1.0 / scale2);
        const double hx = kSupportRadius * std::sqrt(k.covariance.xx * scale2);
        const double hy = kSupportRadius * std::sqrt(k.covariance.yy * scale2);
        index.query(x - hx, y - hy, x + hx, y + hy, candidates);
        double sw = 0.0, su = 0.0, sv = 0.0;
        for (int i : candidates) {
          const double dx = samples[i].position.x - x;
          const double dy = samples[i].position.y - y;
          const double m2 = inv.xx * dx * dx + 2.0 * inv.xy * dx * dy + inv.yy * dy * dy;
          if (m2 > kSupportRadius * kSupportRadius) continue;
          const double wi = std::exp(-0.5 * m2) * factor[i];
          sw += wi;
          su += wi * samples[i].displacement.x;
          sv += wi * samples[i].displacement.y;
        }
        if (sw >= kMinTotalWeight) {
          z(x, y) = {su / sw, sv / sw};
          done = true;
          if (doubling > 0) ++local_stats.pixels_widened;
        }
      }
      if (!done) {
        const int i = nearest_sample(samples, factor, x, y);
        z(x, y) = samples[i].displacement;
        ++local_stats.pixels_widened;
        ++local_stats.pixels_fallback;
      }
    }
  }
  if (stats) *stats = local_stats;
  return z;
}

DenseDeformationField compose(const DenseDeformationField& initial, const DenseDeformationField& update) {
  if (!initial.same_shape(update)) throw InvalidInput("compose: fields on different grids");
  DenseDeformationField out(update.width(), update.height());
  for (int y = 0; y < update.height(); ++y) {
    for (int x = 0; x < update.width(); ++x) {
      const Vec2 u = update(x, y);
      out(x, y) = u + sample_bilinear(initial, x + u.x, y + u.y);
    }
  }
  return out;
}

DenseDeformationField resample_field(const DenseDeformationField& field, int width, int height) {
  if (field.empty() || width < 1 || height < 1) throw InvalidInput("resample_field: empty grid");
  const double rx = static_cast<double>(field.width()) / width;
  const double ry = static_cast<double>(field.height()) / height;
  DenseDeformationField out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 v = sample_bilinear(field, (x + 0.5) * rx - 0.5, (y + 0.5) * ry - 0.5);
      out(x, y) = {v.x / rx, v.y / ry};
    }
  }
  return out;
}

DenseDeformationField upsample_field(const DenseDeformationField& field, int width, int height) {
  if ((width + 1) / 2 != field.width() || (height + 1) / 2 != field.height()) {
    throw InvalidInput("upsample_field: target is not the next finer pyramid grid");
  }
  return resample_field(field, width, height);
}

double mean_magnitude(const DenseDeformationField& field) {
  if (field.empty()) return 0.0;
  double s = 0.0;
  for (const Vec2& v : field.values()) s += v.norm();
  return s / static_cast<double>(field.size());
}

}  // namespace jsmreg
