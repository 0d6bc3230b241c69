#include "jsmreg/structure_scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jsmreg {

ScaleSet ScaleSet::integer_range(int first, int last) {
  ScaleSet s;
  for (int v = first; v <= last; ++v) s.sigmas.push_back(v);
  return s;
}

void ScaleSet::validate() const {
  if (sigmas.empty()) throw InvalidInput("ScaleSet: empty");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw InvalidInput("ScaleSet: scales must be positive");
    if (i > 0 && !(sigmas[i] > sigmas[i - 1])) throw InvalidInput("ScaleSet: scales must increase strictly");
  }
}

void MdlParams::validate() const {
  if (!(b > 0.0) || !(c > 0.0)) throw InvalidInput("MdlParams: B and C must be > 0");
  if (!(lambda >= 0.0)) throw InvalidInput("MdlParams: lambda must be >= 0");
  if (!(residual_scale > 0.0)) throw InvalidInput("MdlParams: residual_scale must be > 0");
}

ScaleStack build_scale_stack(const GrayImage& img, const ScaleSet& scales, const DiffusionConfig& cfg) {
  scales.validate();
  ScaleStack stack;
  stack.sigmas = scales.sigmas;
  stack.smoothed = anisotropic_diffuse_series(img, scales.sigmas, cfg);
  for (const GrayImage& s : stack.smoothed) {
    ScalarMap r(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) r(x, y) = img(x, y) - s(x, y);
    }
    stack.residuals.push_back(std::move(r));
  }
  return stack;
}

double log_likelihood_exponent(double sigma, double residual, const MdlParams& params) {
  const double r = params.residual_scale * residual;
  return -params.b * (params.c / (sigma * sigma) + r * r);
}

PixelLogLikelihood pixel_log_likelihood(const ScaleStack& stack, const MdlParams& params) {
  params.validate();
  PixelLogLikelihood out;
  out.sigmas = stack.sigmas;
  const std::size_t m = stack.sigmas.size();
  if (m == 0) return out;
  const int w = stack.residuals.front().width();
  const int h = stack.residuals.front().height();
  out.log_p.assign(m, ScalarMap(w, h));
  std::vector<double> e(m);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        e[k] = log_likelihood_exponent(stack.sigmas[k], stack.residuals[k](x, y), params);
        peak = std::max(peak, e[k]);
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) sum += std::exp(e[k] - peak);
      // log A: per-pixel normalizer making the probabilities over scales sum to 1.
      const double log_a = -(peak + std::log(sum));
      for (std::size_t k = 0; k < m; ++k) out.log_p[k](x, y) = e[k] + log_a;
    }
  }
  return out;
}

RegionPosteriors region_posterior(const PixelLogLikelihood& loglik, const SuperpixelLabels& labels) {
  RegionPosteriors post;
  post.sigmas = loglik.sigmas;
  const std::size_t m = loglik.sigmas.size();
  post.log_post.assign(labels.count, std::vector<double>(m, 0.0));
  for (const ScalarMap& map : loglik.log_p) {
    if (!map.same_shape(labels.labels)) throw InvalidInput("region_posterior: shape mismatch");
  }
  for (int y = 0; y < labels.labels.height(); ++y) {
    for (int x = 0; x < labels.labels.width(); ++x) {
      auto& row = post.log_post[labels.labels(x, y)];
      for (std::size_t k = 0; k < m; ++k) row[k] += loglik.log_p[k](x, y);
    }
  }
  return post;
}

int argmax_prefer_larger(const std::vector<double>& scores) {
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const double tol = kScoreTieTolerance * std::max(1.0, std::abs(best_value));
    if (best < 0 || scores[k] >= best_value - tol) {
      best = static_cast<int>(k);
      best_value = std::max(best_value, scores[k]);
    }
  }
  return best;
}

std::vector<std::vector<double>> normalize_posteriors(const RegionPosteriors& post) {
  std::vector<std::vector<double>> out = post.log_post;
  for (auto& row : out) {
    if (row.empty()) continue;
    const double peak = *std::max_element(row.begin(), row.end());
    for (double& v : row) v -= peak;
  }
  return out;
}

namespace {

double pair_weight(const RegionStats& stats, int i, int j) {
  const double d = stats.mean_intensity[i] - stats.mean_intensity[j];
  return std::exp(-d * d);
}

void check_inputs(const RegionPosteriors& post, const AdjacencyGraph& graph, const RegionStats& stats) {
  const std::size_t n = post.log_post.size();
  if (graph.region_count != static_cast<int>(n) || stats.mean_intensity.size() != n) {
    throw InvalidInput("select_scales: posteriors, adjacency and stats cover different region sets");
  }
}

}  // namespace

double mrf_objective(const std::vector<std::vector<double>>& normalized, const AdjacencyGraph& graph,
                     const RegionStats& stats, double lambda, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < normalized.size(); ++i) total += normalized[i][labels[i]];
  for (auto [i, j] : graph.edges) {
    if (labels[i] == labels[j]) total += lambda * pair_weight(stats, i, j);
  }
  return total;
}

IcmResult select_scales_icm(const RegionPosteriors& post, const AdjacencyGraph& graph,
                            const RegionStats& stats, const MdlParams& params) {
  params.validate();
  check_inputs(post, graph, stats);
  const auto normalized = normalize_posteriors(post);
  const auto nbrs = graph.neighbours();
  const std::size_t n = normalized.size();
  const std::size_t m = post.sigmas.size();

  IcmResult res;
  res.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.labels[i] = argmax_prefer_larger(normalized[i]);
  res.objective_trace.push_back(mrf_objective(normalized, graph, stats, params.lambda, res.labels));
  if (params.lambda == 0.0) return res;

  std::vector<double> local(m);
  for (int sweep = 0; sweep < kMaxIcmSweeps; ++sweep) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      local = normalized[i];
      for (int j : nbrs[i]) local[res.labels[j]] += params.lambda * pair_weight(stats, static_cast<int>(i), j);
      const int best = argmax_prefer_larger(local);
      if (best != res.labels[i]) {
        res.labels[i] = best;
        changed = true;
      }
    }
    ++res.sweeps;
    res.objective_trace.push_back(mrf_objective(normalized, graph, stats, params.lambda, res.labels));
    if (!changed) break;
  }
  return res;
}

StructureScaleMap rasterize_scales(const std::vector<double>& sigmas, const std::vector<int>& region_scale,
                                   const SuperpixelLabels& labels) {
  StructureScaleMap map;
  map.sigmas = sigmas;
  map.region_scale = region_scale;
  map.sigma = ScalarMap(labels.labels.width(), labels.labels.height());
  for (int y = 0; y < labels.labels.height(); ++y) {
    for (int x = 0; x < labels.labels.width(); ++x) {
      map.sigma(x, y) = sigmas[region_scale[labels.labels(x, y)]];
    }
  }
  return map;
}

StructureScaleMap select_scales(const RegionPosteriors& post, const AdjacencyGraph& graph,
                                const RegionStats& stats, const MdlParams& params,
                                const SuperpixelLabels& labels) {
  const IcmResult icm = select_scales_icm(post, graph, stats, params);
  return rasterize_scales(post.sigmas, icm.labels, labels);
}

StructureScaleAnalysis analyze_structure_scales(const GrayImage& img, const StructureScaleConfig& cfg) {
  StructureScaleAnalysis a;
  a.superpixels = slic_segment(img, cfg.slic);
  a.stats = region_stats(img, a.superpixels);
  a.graph = adjacency(a.superpixels);
  const ScaleStack stack = build_scale_stack(img, cfg.scales, cfg.diffusion);
  const RegionPosteriors post = region_posterior(pixel_log_likelihood(stack, cfg.mdl), a.superpixels);
  a.scale_map = select_scales(post, a.graph, a.stats, cfg.mdl, a.superpixels);
  return a;
}

}  // namespace jsmreg
