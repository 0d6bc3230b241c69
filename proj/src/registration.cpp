#include "jsmreg/registration.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace jsmreg {

void RegistrationConfig::validate() const {
  if (pyramid_levels < 1) throw InvalidInput("RegistrationConfig: pyramid_levels must be >= 1");
  if (iters_per_level < 1) throw InvalidInput("RegistrationConfig: iters_per_level must be >= 1");
  if (!(convergence_eps > 0.0)) throw InvalidInput("RegistrationConfig: convergence_eps must be > 0");
  if (tensor.sigma_grad < 0.0 || tensor.sigma_int < 0.0) throw InvalidInput("RegistrationConfig: tensor sigmas must be >= 0");
  diffusion.validate();
  slic.validate();
  scales.validate();
  mdl.validate();
  jsm.validate();
  block.validate();
}

std::string IterationRecord::log_line(bool include_time) const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "level=%d iteration=%d mean_update=%.6f samples=%zu confident=%zu", level,
                iteration, mean_update, samples, confident);
  std::string line = buf;
  if (include_time) {
    std::snprintf(buf, sizeof buf, " wall_ms=%.3f", wall_ms);
    line += buf;
  }
  return line;
}

std::vector<std::string> RegistrationResult::log_lines(bool include_time) const {
  std::vector<std::string> out;
  for (const auto& lvl : levels) {
    for (const auto& it : lvl.iterations) out.push_back(it.log_line(include_time));
  }
  return out;
}

GrayImage warp(const GrayImage& img, const DenseDeformationField& field) {
  if (!field.same_shape(img.pixels())) throw InvalidInput("warp: field and image dimensions differ");
  ScalarMap out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Vec2 d = field(x, y);
      out(x, y) = img.sample(x + d.x, y + d.y);
    }
  }
  return GrayImage::from_clamped(std::move(out));
}

RegistrationResult register_images(const GrayImage& ref, const GrayImage& mov, const RegistrationConfig& cfg,
                                   const std::optional<DenseDeformationField>& initial) {
  cfg.validate();
  if (ref.width() != mov.width() || ref.height() != mov.height()) {
    throw InvalidInput("register: reference and moving images differ in size");
  }
  if (initial && !initial->same_shape(ref.pixels())) {
    throw InvalidInput("register: initial field does not match the reference grid");
  }

  RegistrationResult result;
  const ImagePyramid ref_pyr = build_pyramid(ref, cfg.pyramid_levels);
  const ImagePyramid mov_pyr = build_pyramid(mov, cfg.pyramid_levels);
  result.warnings = ref_pyr.warnings;

  const StructureScaleConfig ss_cfg{cfg.slic, cfg.scales, cfg.mdl, cfg.diffusion};
  DenseDeformationField field;
  bool any_update = false;
  using clock = std::chrono::steady_clock;

  for (int level = static_cast<int>(ref_pyr.levels.size()) - 1; level >= 0; --level) {
    const GrayImage& ref_l = ref_pyr.levels[level];
    const GrayImage& mov_l = mov_pyr.levels[level];
    const int w = ref_l.width();
    const int h = ref_l.height();
    if (field.empty()) {
      field = initial ? resample_field(*initial, w, h) : zero_field(w, h);
    } else {
      field = upsample_field(field, w, h);
    }

    LevelDiagnostics diag;
    diag.level = level;
    diag.width = w;
    diag.height = h;

    // Reference-side quantities are static within a level.
    const StructureScaleAnalysis ref_scales = analyze_structure_scales(ref_l, ss_cfg);
    const StructureTensorField lst_r = structure_tensor(ref_l, cfg.tensor.sigma_grad, cfg.tensor.sigma_int);
    const ScalarMap sr = saliency_map(lst_r, cfg.jsm);
    const Grid<char> mask = background_mask(sr, ref_scales.scale_map, cfg.jsm);

    for (int iter = 1; iter <= cfg.iters_per_level; ++iter) {
      const auto start = clock::now();
      const GrayImage warped = warp(mov_l, field);
      const SparseDisplacementField sparse = match_blocks(ref_l, warped, cfg.block);
      for (const auto& wmsg : sparse.warnings) result.warnings.push_back(wmsg);
      if (sparse.confident_count() == 0) {
        if (sparse.warnings.empty()) {
          std::ostringstream msg;
          msg << "level " << level << ": no confident block matches; level skipped";
          result.warnings.push_back(msg.str());
        }
        break;
      }
      const StructureTensorField lst_m = structure_tensor(warped, cfg.tensor.sigma_grad, cfg.tensor.sigma_int);
      const ScalarMap sm = saliency_map(lst_m, cfg.jsm);
      const JointSaliency js = joint_saliency(sr, sm, lst_r, lst_m, cfg.jsm);
      const ScalarMap msm = mismatch_scale(js.js, mask, cfg.jsm);
      const ScalarMap ksm = kernel_scale(ref_scales.scale_map.sigma, msm, cfg.jsm);
      const DenseDeformationField update = regress_dense(sparse, js.js, ksm, lst_r);
      field = compose(field, update);
      any_update = true;

      IterationRecord rec;
      rec.level = level;
      rec.iteration = iter;
      rec.mean_update = mean_magnitude(update);
      rec.samples = sparse.samples.size();
      rec.confident = sparse.confident_count();
      rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
      diag.iterations.push_back(rec);

      if (cfg.keep_maps) {
        diag.maps = LevelMaps{ref_scales.superpixels, ref_scales.scale_map.sigma, sr, js.js, msm, ksm};
      }
      if (rec.mean_update < cfg.convergence_eps) break;
    }
    diag.field = field;
    result.levels.push_back(std::move(diag));
  }

  if (!any_update) {
    result.warnings.push_back("no level produced a confident match (flat or degenerate image pair); identity field returned");
  }
  result.field = std::move(field);
  result.warped = warp(mov, result.field);
  return result;
}

}  // namespace jsmreg
