#pragma once

#include "jsmreg/block_matching.hpp"
#include "jsmreg/image.hpp"

namespace jsmreg {

/// Per-pixel displacement z(x) on the reference grid: a pixel x of the
/// reference corresponds to x + z(x) in the moving image.
using DenseDeformationField = Grid<Vec2>;

DenseDeformationField zero_field(int width, int height);

struct SteeringKernel {
  Tensor2 covariance;
  Tensor2 inverse;
  double std_along = 0.0;   // along the structure (minor LST eigenvector)
  double std_across = 0.0;  // across it (major LST eigenvector)
};

inline constexpr double kMaxElongation = 4.0;
inline constexpr double kSupportRadius = 3.0;  // Mahalanobis truncation
inline constexpr double kMinTotalWeight = 1e-8;
inline constexpr int kMaxSupportDoublings = 5;

/// Anisotropic Gaussian kernel steered by the local structure tensor:
/// elongation rho = clamp(sqrt((l1+e)/(l2+e)), 1, 4), stds sigma*sqrt(rho)
/// along the structure and sigma/sqrt(rho) across it.
SteeringKernel steering_covariance(const Tensor2& lst, double sigma_d);

struct RegressionStats {
  long pixels_widened = 0;   // needed at least one support doubling
  long pixels_fallback = 0;  // resolved by the nearest-sample fallback
};

/// Order-0 (Nadaraya-Watson) regression of the sparse displacements:
///   z(x) = sum_i w_i(x) y_i / sum_i w_i(x),
///   w_i(x) = exp(-d^T Sigma(x)^-1 d / 2) * JS(x_i) * conf_i,  d = x_i - x,
/// truncated at Mahalanobis radius 3. An empty support doubles the kernel
/// stds (up to 5 times) and then takes the nearest sample with positive
/// weight factor JS*conf (or, failing that, the nearest confident sample).
DenseDeformationField regress_dense(const SparseDisplacementField& sparse, const ScalarMap& jsm,
                                    const ScalarMap& kernel_scale, const StructureTensorField& lst,
                                    RegressionStats* stats = nullptr);

/// (initial o update)(x) = update(x) + initial(x + update(x)), bilinear and
/// edge clamped.
DenseDeformationField compose(const DenseDeformationField& initial, const DenseDeformationField& update);

/// Bilinear resampling onto a new grid with pixel-center alignment; vectors
/// are scaled by the per-axis dimension ratio.
DenseDeformationField resample_field(const DenseDeformationField& field, int width, int height);

/// resample_field restricted to roughly doubling each dimension.
DenseDeformationField upsample_field(const DenseDeformationField& field, int width, int height);

double mean_magnitude(const DenseDeformationField& field);

}  // namespace jsmreg
