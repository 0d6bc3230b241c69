#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jsmreg/block_matching.hpp"
#include "jsmreg/kernel_regression.hpp"
#include "jsmreg/saliency.hpp"
#include "jsmreg/structure_scale.hpp"

namespace jsmreg {

struct TensorConfig {
  double sigma_grad = 0.5;
  double sigma_int = 1.5;
};

struct RegistrationConfig {
  int pyramid_levels = 5;
  int iters_per_level = 5;
  double convergence_eps = 0.05;  // mean |update| in pixels
  DiffusionConfig diffusion;
  TensorConfig tensor;
  SlicConfig slic;
  ScaleSet scales = ScaleSet::defaults();
  MdlParams mdl;
  JsmParams jsm;
  BlockMatchConfig block;
  bool keep_maps = false;  // snapshot per-level maps into the diagnostics

  void validate() const;
};

/// Maps from the last iteration of a level, for inspection and export.
struct LevelMaps {
  SuperpixelLabels superpixels;
  ScalarMap structure_scale;
  ScalarMap saliency_ref;
  ScalarMap jsm;
  ScalarMap mismatch_scale;
  ScalarMap kernel_scale;
};

struct IterationRecord {
  int level = 0;
  int iteration = 0;
  double mean_update = 0.0;
  std::size_t samples = 0;
  std::size_t confident = 0;
  double wall_ms = 0.0;

  /// key=value line; the wall time is left out when include_time is false.
  std::string log_line(bool include_time = true) const;
};

struct LevelDiagnostics {
  int level = 0;  // 0 is the finest
  int width = 0;
  int height = 0;
  std::vector<IterationRecord> iterations;
  DenseDeformationField field;  // accumulated field when the level finished
  std::optional<LevelMaps> maps;
};

struct RegistrationResult {
  DenseDeformationField field;  // finest grid
  GrayImage warped;
  std::vector<LevelDiagnostics> levels;  // in processing order, coarsest first
  std::vector<std::string> warnings;

  std::vector<std::string> log_lines(bool include_time = true) const;
};

/// Resample img at x + z(x), bilinear and edge clamped.
GrayImage warp(const GrayImage& img, const DenseDeformationField& field);

/// Coarse-to-fine registration of mov onto ref. At each level the reference
/// superpixels and structure scales are computed once; every iteration warps
/// the moving level, block-matches, rebuilds the joint saliency, mismatch and
/// kernel scale maps, regresses a dense update and composes it into the
/// running field.
RegistrationResult register_images(const GrayImage& ref, const GrayImage& mov, const RegistrationConfig& cfg,
                                   const std::optional<DenseDeformationField>& initial = std::nullopt);

}  // namespace jsmreg
