#include "jsmreg/block_matching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace jsmreg {

void BlockMatchConfig::validate() const {
  if (block_size < 5 || block_size % 2 == 0) throw InvalidInput("BlockMatchConfig: block_size must be odd and >= 5");
  if (search_radius < 1) throw InvalidInput("BlockMatchConfig: search_radius must be >= 1");
  if (grid_step < 1) throw InvalidInput("BlockMatchConfig: grid_step must be >= 1");
  if (bins < 8) throw InvalidInput("BlockMatchConfig: bins must be >= 8");
}

std::size_t SparseDisplacementField::confident_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const SparseSample& s) { return s.confidence > 0.0; }));
}

namespace {

int to_bin(double v, int bins) {
  return std::clamp(static_cast<int>(v * bins), 0, bins - 1);
}

bool has_variance(std::span<const double> p) {
  return std::any_of(p.begin(), p.end(), [&](double v) { return v != p.front(); });
}

// Joint-histogram MI with reusable buffers; only touched cells are reset.
class MiEvaluator {
 public:
  MiEvaluator(int bins, std::size_t n)
      : bins_(bins), joint_(static_cast<std::size_t>(bins) * bins, 0), marg_a_(bins, 0), marg_b_(bins, 0),
        c_log_c_(n + 1, 0.0) {
    for (std::size_t c = 1; c <= n; ++c) c_log_c_[c] = static_cast<double>(c) * std::log(static_cast<double>(c));
    touched_.reserve(n);
  }

  double operator()(std::span<const int> a_bins, std::span<const int> b_bins) {
    const std::size_t n = a_bins.size();
    touched_.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const int cell = a_bins[i] * bins_ + b_bins[i];
      if (joint_[cell]++ == 0) touched_.push_back(cell);
      ++marg_a_[a_bins[i]];
      ++marg_b_[b_bins[i]];
    }
    // H = log N - (1/N) sum c log c for each histogram.
    double sa = 0.0, sb = 0.0, sab = 0.0;
    for (int cell : touched_) {
      sab += c_log_c_[joint_[cell]];
      joint_[cell] = 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int ab = a_bins[i];
      const int bb = b_bins[i];
      if (marg_a_[ab] > 0) {
        sa += c_log_c_[marg_a_[ab]];
        marg_a_[ab] = 0;
      }
      if (marg_b_[bb] > 0) {
        sb += c_log_c_[marg_b_[bb]];
        marg_b_[bb] = 0;
      }
    }
    const double nn = static_cast<double>(n);
    // MI = H(a) + H(b) - H(a,b)
    const double mi = (sab - sa - sb) / nn + std::log(nn);
    return std::max(0.0, mi);
  }

 private:
  int bins_;
  std::vector<int> joint_;
  std::vector<int> marg_a_;
  std::vector<int> marg_b_;
  std::vector<double> c_log_c_;
  std::vector<int> touched_;
};

}  // namespace

double local_mi(std::span<const double> a, std::span<const double> b, int bins) {
  if (a.size() != b.size()) throw InvalidInput("local_mi: patch sizes differ");
  if (bins < 2) throw InvalidInput("local_mi: bins must be >= 2");
  if (a.empty() || !has_variance(a) || !has_variance(b)) return 0.0;
  std::vector<int> ab(a.size()), bb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab[i] = to_bin(a[i], bins);
    bb[i] = to_bin(b[i], bins);
  }
  MiEvaluator mi(bins, a.size());
  return mi(ab, bb);
}

SparseDisplacementField match_blocks(const GrayImage& ref, const GrayImage& mov_warped,
                                     const BlockMatchConfig& cfg) {
  cfg.validate();
  if (ref.width() != mov_warped.width() || ref.height() != mov_warped.height()) {
    throw InvalidInput("match_blocks: image dimensions differ");
  }
  SparseDisplacementField out;
  const int w = ref.width();
  const int h = ref.height();
  const int margin = cfg.margin();
  if (w < 2 * margin + 1 || h < 2 * margin + 1) {
    std::ostringstream msg;
    msg << "match_blocks: " << w << "x" << h << " image too small for block " << cfg.block_size
        << " with search radius " << cfg.search_radius << "; no samples";
    out.warnings.push_back(msg.str());
    return out;
  }

  const int half = cfg.block_size / 2;
  const int r = cfg.search_radius;
  const std::size_t n = static_cast<std::size_t>(cfg.block_size) * cfg.block_size;

  // Candidate order: smaller |d|, then smaller dy, then smaller dx.
  std::vector<std::tuple<int, int, int>> candidates;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) candidates.emplace_back(dx * dx + dy * dy, dy, dx);
  }
  std::sort(candidates.begin(), candidates.end());
  const double tie_fraction = 0.25;

  Grid<int> mov_bins(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mov_bins(x, y) = to_bin(mov_warped(x, y), cfg.bins);
  }

  MiEvaluator mi(cfg.bins, n);
  std::vector<int> ref_block(n), mov_block(n);
  std::vector<double> ref_vals(n), mov_vals(n);
  std::vector<double> scores(candidates.size());
  for (int y = margin; y < h - margin; y += cfg.grid_step) {
    for (int x = margin; x < w - margin; x += cfg.grid_step) {
      double sum = 0.0, sum2 = 0.0;
      std::size_t i = 0;
      for (int by = -half; by <= half; ++by) {
        for (int bx = -half; bx <= half; ++bx, ++i) {
          const double v = ref(x + bx, y + by);
          ref_vals[i] = v;
          ref_block[i] = to_bin(v, cfg.bins);
          sum += v;
          sum2 += v * v;
        }
      }
      const double mean = sum / n;
      const double stddev = std::sqrt(std::max(0.0, sum2 / n - mean * mean));
      const bool ref_flat = !has_variance(ref_vals);

      std::size_t best = 0;
      double best_mi = -1.0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto [d2, dy, dx] = candidates[c];
        i = 0;
        for (int by = -half; by <= half; ++by) {
          for (int bx = -half; bx <= half; ++bx, ++i) {
            mov_vals[i] = mov_warped(x + dx + bx, y + dy + by);
            mov_block[i] = mov_bins(x + dx + bx, y + dy + by);
          }
        }
        scores[c] = (ref_flat || !has_variance(mov_vals)) ? 0.0 : mi(ref_block, mov_block);
        if (scores[c] > best_mi + 1e-12 * std::max(1.0, best_mi)) {
          best_mi = scores[c];
          best = c;
        }
      }
      const double tol = 1e-12 * std::max(1.0, best_mi);
      const auto ties = static_cast<std::size_t>(
          std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= best_mi - tol; }));
      const bool degenerate =
          stddev < 0.01 || static_cast<double>(ties) > tie_fraction * static_cast<double>(candidates.size());

      const auto [d2, dy, dx] = candidates[best];
      out.samples.push_back({Vec2{static_cast<double>(x), static_cast<double>(y)},
                             Vec2{static_cast<double>(dx), static_cast<double>(dy)}, degenerate ? 0.0 : 1.0});
    }
  }
  return out;
}

}  // namespace jsmreg
