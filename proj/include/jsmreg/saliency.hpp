#pragma once

#include "jsmreg/image.hpp"
#include "jsmreg/structure_scale.hpp"

namespace jsmreg {

/// General 2x2 matrix [[a, b], [c, d]], for inputs whose symmetry is not
/// guaranteed by construction.
struct Matrix2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

struct JsmParams {
  double gain = 10.0;         // F
  int radius = 2;             // saliency neighbourhood is (2r+1)^2
  double saliency_floor = 0.05;
  double max_mismatch_scale = 15.0;
  double max_kernel_scale = 45.0;

  void validate() const;
};

/// Tensor dissimilarity sqrt(8pi/15 (Tr(D^2) - Tr(D)^2 / 3)), D = T1 - T2.
double tensor_distance(const Tensor2& t1, const Tensor2& t2);
/// Throws InvalidInput if either matrix is not symmetric.
double tensor_distance(const Matrix2& t1, const Matrix2& t2);

/// Center-surround saliency: mean tensor distance to the neighbourhood, then
/// min-max normalized to [0,1] (all zero when the map is constant).
ScalarMap saliency_map(const StructureTensorField& lst, const JsmParams& params);

/// Pixelwise tensor distance between two fields.
ScalarMap tensor_distance_map(const StructureTensorField& a, const StructureTensorField& b);

struct JointSaliency {
  ScalarMap js;
  double offset = 0.0;  // G = max(distance) / 2
};

/// JS = clamp(min(S_R, S_M) * F G / (G + d), 0, 1) with d the LST distance
/// at the pixel; G = 0 (identical fields) degenerates to min(S_R, S_M).
JointSaliency joint_saliency(const ScalarMap& sr, const ScalarMap& sm, const StructureTensorField& lst_r,
                             const StructureTensorField& lst_m_warped, const JsmParams& params);

/// True where the pixel is background/homogeneous: S_R below the floor, or
/// the structure scale at the top of the scale set.
Grid<char> background_mask(const ScalarMap& sr, const StructureScaleMap& ssm, const JsmParams& params);

ScalarMap mismatch_scale(const ScalarMap& jsm, const Grid<char>& mask, const JsmParams& params);

ScalarMap kernel_scale(const ScalarMap& structure_scale, const ScalarMap& mismatch_scale,
                       const JsmParams& params);

}  // namespace jsmreg
