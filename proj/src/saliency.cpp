#include "jsmreg/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jsmreg {

void JsmParams::validate() const {
  if (!(gain > 0.0)) throw InvalidInput("JsmParams: gain F must be > 0");
  if (radius < 0) throw InvalidInput("JsmParams: radius must be >= 0");
  if (!(saliency_floor > 0.0 && saliency_floor < 1.0)) {
    throw InvalidInput("JsmParams: saliency floor must lie in (0,1)");
  }
  if (!(max_mismatch_scale >= 1.0) || !(max_kernel_scale >= 1.0)) {
    throw InvalidInput("JsmParams: scale caps must be >= 1");
  }
}

double tensor_distance(const Tensor2& t1, const Tensor2& t2) {
  const Tensor2 d = t1 - t2;
  const double tr_sq = d.xx * d.xx + 2.0 * d.xy * d.xy + d.yy * d.yy;  // Tr(D^2)
  const double tr = d.trace();
  double radicand = (8.0 * std::numbers::pi / 15.0) * (tr_sq - tr * tr / 3.0);
  // Tr(D^2) >= Tr(D)^2 / 2 for symmetric D, so only rounding can go negative.
  if (radicand < 0.0 && radicand >= -1e-12) radicand = 0.0;
  return std::sqrt(radicand);
}

double tensor_distance(const Matrix2& t1, const Matrix2& t2) {
  auto as_tensor = [](const Matrix2& m) {
    const double scale = std::max({1.0, std::abs(m.b), std::abs(m.c)});
    if (std::abs(m.b - m.c) > 1e-12 * scale) throw InvalidInput("tensor_distance: asymmetric tensor");
    return Tensor2{m.a, 0.5 * (m.b + m.c), m.d};
  };
  return tensor_distance(as_tensor(t1), as_tensor(t2));
}

ScalarMap saliency_map(const StructureTensorField& lst, const JsmParams& params) {
  params.validate();
  const int w = lst.width();
  const int h = lst.height();
  const int r = params.radius;
  const double inv_count = 1.0 / ((2 * r + 1) * (2 * r + 1));
  ScalarMap s(w, h);
  double lo = 0.0;
  double hi = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Tensor2& center = lst(x, y);
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) acc += tensor_distance(lst.at_clamped(x + dx, y + dy), center);
      }
      s(x, y) = acc * inv_count;
      if (x == 0 && y == 0) {
        lo = hi = s(x, y);
      } else {
        lo = std::min(lo, s(x, y));
        hi = std::max(hi, s(x, y));
      }
    }
  }
  const double range = hi - lo;
  for (double& v : s.values()) v = range > 0.0 ? std::clamp((v - lo) / range, 0.0, 1.0) : 0.0;
  return s;
}

ScalarMap tensor_distance_map(const StructureTensorField& a, const StructureTensorField& b) {
  if (!a.same_shape(b)) throw InvalidInput("tensor_distance_map: shape mismatch");
  ScalarMap d(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) d(x, y) = tensor_distance(a(x, y), b(x, y));
  }
  return d;
}

JointSaliency joint_saliency(const ScalarMap& sr, const ScalarMap& sm, const StructureTensorField& lst_r,
                             const StructureTensorField& lst_m_warped, const JsmParams& params) {
  params.validate();
  if (!sr.same_shape(sm) || !sr.same_shape(lst_r) || !sr.same_shape(lst_m_warped)) {
    throw InvalidInput("joint_saliency: shape mismatch");
  }
  const ScalarMap dist = tensor_distance_map(lst_r, lst_m_warped);
  double dmax = 0.0;
  for (double v : dist.values()) dmax = std::max(dmax, v);
  JointSaliency out{ScalarMap(sr.width(), sr.height()), 0.5 * dmax};
  const double g = out.offset;
  for (int y = 0; y < sr.height(); ++y) {
    for (int x = 0; x < sr.width(); ++x) {
      const double s = std::min(sr(x, y), sm(x, y));
      const double factor = g > 0.0 ? params.gain * g / (g + dist(x, y)) : 1.0;
      out.js(x, y) = std::clamp(s * factor, 0.0, 1.0);
    }
  }
  return out;
}

Grid<char> background_mask(const ScalarMap& sr, const StructureScaleMap& ssm, const JsmParams& params) {
  if (!sr.same_shape(ssm.sigma)) throw InvalidInput("background_mask: shape mismatch");
  Grid<char> mask(sr.width(), sr.height(), 0);
  const double top = ssm.largest();
  for (int y = 0; y < sr.height(); ++y) {
    for (int x = 0; x < sr.width(); ++x) {
      mask(x, y) = (sr(x, y) < params.saliency_floor || ssm.sigma(x, y) >= top) ? 1 : 0;
    }
  }
  return mask;
}

ScalarMap mismatch_scale(const ScalarMap& jsm, const Grid<char>& mask, const JsmParams& params) {
  if (!jsm.same_shape(mask)) throw InvalidInput("mismatch_scale: shape mismatch");
  ScalarMap m(jsm.width(), jsm.height());
  for (int y = 0; y < jsm.height(); ++y) {
    for (int x = 0; x < jsm.width(); ++x) {
      if (mask(x, y)) {
        m(x, y) = 0.0;
      } else if (jsm(x, y) <= 0.0) {
        m(x, y) = params.max_mismatch_scale;
      } else {
        m(x, y) = std::clamp(1.0 / jsm(x, y), 1.0, params.max_mismatch_scale);
      }
    }
  }
  return m;
}

ScalarMap kernel_scale(const ScalarMap& structure_scale, const ScalarMap& mismatch_scale,
                       const JsmParams& params) {
  if (!structure_scale.same_shape(mismatch_scale)) throw InvalidInput("kernel_scale: shape mismatch");
  ScalarMap k(structure_scale.width(), structure_scale.height());
  for (int y = 0; y < k.height(); ++y) {
    for (int x = 0; x < k.width(); ++x) {
      const double v = std::max(structure_scale(x, y) * mismatch_scale(x, y), 1.0);
      k(x, y) = std::clamp(v, 1.0, params.max_kernel_scale);
    }
  }
  return k;
}

}  // namespace jsmreg
