#include "jsmreg/evaluation.hpp"

#include <cmath>
#include <string>

namespace jsmreg {

ErrorReport summarize_errors(std::vector<double> errors) {
  ErrorReport r;
  r.errors = std::move(errors);
  if (r.errors.empty()) return r;
  const double n = static_cast<double>(r.errors.size());
  double sum = 0.0;
  for (double e : r.errors) sum += e;
  r.mean = sum / n;
  double ss = 0.0;
  for (double e : r.errors) ss += (e - r.mean) * (e - r.mean);
  r.sd = std::sqrt(ss / n);
  return r;
}

namespace {

bool inside(const DenseDeformationField& f, Vec2 p) {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= f.width() - 1 && p.y <= f.height() - 1;
}

}  // namespace

ErrorReport landmark_error(const LandmarkSet& landmarks, const DenseDeformationField& field) {
  std::vector<double> errors;
  errors.reserve(landmarks.size());
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const LandmarkPair& lm = landmarks[i];
    if (!inside(field, lm.reference) || !inside(field, lm.moving)) {
      throw InvalidInput("landmark " + std::to_string(i) + " lies outside the image bounds");
    }
    const Vec2 z = sample_bilinear(field, lm.reference.x, lm.reference.y);
    errors.push_back((lm.reference + z - lm.moving).norm());
  }
  return summarize_errors(std::move(errors));
}

ErrorReport field_error(const DenseDeformationField& field, const DenseDeformationField& truth,
                        const std::optional<Grid<char>>& exclude) {
  if (!field.same_shape(truth)) throw InvalidInput("field_error: fields on different grids");
  if (exclude && !exclude->same_shape(field)) throw InvalidInput("field_error: mask shape mismatch");
  std::vector<double> errors;
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (exclude && (*exclude)(x, y)) continue;
      errors.push_back((field(x, y) - truth(x, y)).norm());
    }
  }
  return summarize_errors(std::move(errors));
}

}  // namespace jsmreg
