#pragma once

#include <optional>
#include <vector>

#include "jsmreg/kernel_regression.hpp"

namespace jsmreg {

struct LandmarkPair {
  Vec2 reference;
  Vec2 moving;

  friend bool operator==(const LandmarkPair&, const LandmarkPair&) = default;
};

using LandmarkSet = std::vector<LandmarkPair>;

/// Per-item errors with mean and population standard deviation.
struct ErrorReport {
  std::vector<double> errors;
  double mean = 0.0;
  double sd = 0.0;
};

ErrorReport summarize_errors(std::vector<double> errors);

/// |x_ref + z(x_ref) - x_mov| per pair, z sampled bilinearly. Throws
/// InvalidInput naming the first landmark outside the field bounds.
ErrorReport landmark_error(const LandmarkSet& landmarks, const DenseDeformationField& field);

/// Endpoint error |z - z_true| over pixels where mask is unset (all pixels
/// when no mask is given).
ErrorReport field_error(const DenseDeformationField& field, const DenseDeformationField& truth,
                        const std::optional<Grid<char>>& exclude = std::nullopt);

}  // namespace jsmreg
