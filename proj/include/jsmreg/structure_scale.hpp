#pragma once

#include <vector>

#include "jsmreg/image.hpp"
#include "jsmreg/superpixel.hpp"

namespace jsmreg {

/// Relative tolerance under which two scores count as tied. Ties go to the
/// larger scale.
inline constexpr double kScoreTieTolerance = 1e-12;

struct ScaleSet {
  std::vector<double> sigmas;

  static ScaleSet integer_range(int first, int last);  // {first, ..., last}
  static ScaleSet defaults() { return integer_range(1, 15); }

  std::size_t size() const { return sigmas.size(); }
  double largest() const { return sigmas.back(); }
  void validate() const;  // non-empty, positive, strictly increasing
};

struct ScaleStack {
  std::vector<double> sigmas;
  std::vector<GrayImage> smoothed;
  std::vector<ScalarMap> residuals;  // I - I_sigma
};

/// Parameters of the description-length likelihood
///   p(x|s) = A exp(-B (C/s^2 + (r * eps_s(x))^2))
/// and the region MRF strength lambda. r converts [0,1] residuals into
/// 8-bit gray levels (r = 255 by default, r = 1 evaluates raw residuals).
struct MdlParams {
  double a = 1.0;  // informational; the per-pixel normalizer is computed
  double b = 1.0;
  double c = 1.0;
  double lambda = 0.05;
  double residual_scale = 255.0;

  void validate() const;
};

/// Per-scale, per-pixel log-likelihood, normalized per pixel so the
/// probabilities over the scale set sum to one.
struct PixelLogLikelihood {
  std::vector<double> sigmas;
  std::vector<ScalarMap> log_p;  // one map per scale
};

/// Per-region log P(S_i | sigma_k) = sum over pixels of log p(x | sigma_k).
struct RegionPosteriors {
  std::vector<double> sigmas;
  std::vector<std::vector<double>> log_post;  // [region][scale]
};

/// Chosen scale per region (index into sigmas) plus its raster.
struct StructureScaleMap {
  std::vector<double> sigmas;
  std::vector<int> region_scale;  // index into sigmas
  ScalarMap sigma;                // per-pixel structure scale in pixels

  double largest() const { return sigmas.back(); }
};

struct IcmResult {
  std::vector<int> labels;               // index into sigmas, per region
  std::vector<double> objective_trace;   // objective after initialization and each sweep
  int sweeps = 0;
};

inline constexpr int kMaxIcmSweeps = 20;

ScaleStack build_scale_stack(const GrayImage& img, const ScaleSet& scales, const DiffusionConfig& cfg);

/// Unnormalized exponent -B (C/sigma^2 + (r*eps)^2) of the likelihood.
double log_likelihood_exponent(double sigma, double residual, const MdlParams& params);

PixelLogLikelihood pixel_log_likelihood(const ScaleStack& stack, const MdlParams& params);

RegionPosteriors region_posterior(const PixelLogLikelihood& loglik, const SuperpixelLabels& labels);

/// Index of the maximum, ties (within kScoreTieTolerance) resolved toward the
/// later, i.e. larger-scale, entry.
int argmax_prefer_larger(const std::vector<double>& scores);

/// Shifted log-posteriors with per-region maximum 0.
std::vector<std::vector<double>> normalize_posteriors(const RegionPosteriors& post);

/// Objective maximized by select_scales: sum of normalized log-posteriors plus
/// lambda * sum over edges of [same label] * exp(-(mu_i - mu_j)^2).
double mrf_objective(const std::vector<std::vector<double>>& normalized, const AdjacencyGraph& graph,
                     const RegionStats& stats, double lambda, const std::vector<int>& labels);

/// ICM from the per-region MAP, regions swept in id order, until no label
/// changes or kMaxIcmSweeps sweeps.
IcmResult select_scales_icm(const RegionPosteriors& post, const AdjacencyGraph& graph,
                            const RegionStats& stats, const MdlParams& params);

StructureScaleMap select_scales(const RegionPosteriors& post, const AdjacencyGraph& graph,
                                const RegionStats& stats, const MdlParams& params,
                                const SuperpixelLabels& labels);

StructureScaleMap rasterize_scales(const std::vector<double>& sigmas, const std::vector<int>& region_scale,
                                   const SuperpixelLabels& labels);

struct StructureScaleConfig {
  SlicConfig slic;
  ScaleSet scales = ScaleSet::defaults();
  MdlParams mdl;
  DiffusionConfig diffusion;
};

struct StructureScaleAnalysis {
  SuperpixelLabels superpixels;
  RegionStats stats;
  AdjacencyGraph graph;
  StructureScaleMap scale_map;
};

/// Whole chain on one (reference) image: superpixels, scale stack,
/// likelihoods, posteriors and MRF selection.
StructureScaleAnalysis analyze_structure_scales(const GrayImage& img, const StructureScaleConfig& cfg);

}  // namespace jsmreg
