#include "jsmreg/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

namespace jsmreg {

std::vector<std::vector<int>> AdjacencyGraph::neighbours() const {
  std::vector<std::vector<int>> out(region_count);
  for (auto [i, j] : edges) {
    out[i].push_back(j);
    out[j].push_back(i);
  }
  for (auto& n : out) std::sort(n.begin(), n.end());
  return out;
}

void SlicConfig::validate() const {
  if (region_size < 4) throw InvalidInput("SLIC: region_size must be >= 4");
  if (!(compactness > 0.0)) throw InvalidInput("SLIC: compactness must be > 0");
  if (iterations < 1) throw InvalidInput("SLIC: iterations must be >= 1");
}

namespace {

struct Components {
  Grid<int> id;
  std::vector<long> area;
  std::vector<int> label;
};

// 4-connected components of equal label, numbered in raster order.
Components connected_components(const Grid<int>& labels) {
  const int w = labels.width();
  const int h = labels.height();
  Components c{Grid<int>(w, h, -1), {}, {}};
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (c.id(x, y) >= 0) continue;
      const int cid = static_cast<int>(c.area.size());
      const int lab = labels(x, y);
      long count = 0;
      stack.assign(1, {x, y});
      c.id(x, y) = cid;
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        ++count;
        const int nx[4] = {px - 1, px + 1, px, px};
        const int ny[4] = {py, py, py - 1, py + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
          if (c.id(nx[k], ny[k]) >= 0 || labels(nx[k], ny[k]) != lab) continue;
          c.id(nx[k], ny[k]) = cid;
          stack.emplace_back(nx[k], ny[k]);
        }
      }
      c.area.push_back(count);
      c.label.push_back(lab);
    }
  }
  return c;
}

// Shared boundary length between adjacent components.
std::vector<std::map<int, long>> component_boundaries(const Components& c) {
  std::vector<std::map<int, long>> b(c.area.size());
  const int w = c.id.width();
  const int h = c.id.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = c.id(x, y);
      if (x + 1 < w && c.id(x + 1, y) != a) {
        ++b[a][c.id(x + 1, y)];
        ++b[c.id(x + 1, y)][a];
      }
      if (y + 1 < h && c.id(x, y + 1) != a) {
        ++b[a][c.id(x, y + 1)];
        ++b[c.id(x, y + 1)][a];
      }
    }
  }
  return b;
}

void enforce_connectivity(Grid<int>& labels, long min_area) {
  for (;;) {
    const Components c = connected_components(labels);
    const int n = static_cast<int>(c.area.size());
    if (n <= 1) return;

    std::map<int, int> largest;  // label -> component
    for (int i = 0; i < n; ++i) {
      auto it = largest.find(c.label[i]);
      if (it == largest.end() || c.area[i] > c.area[it->second]) largest[c.label[i]] = i;
    }
    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
      if (c.area[i] < min_area || largest[c.label[i]] != i) candidates.push_back(i);
    }
    if (candidates.empty()) return;
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return c.area[a] < c.area[b]; });

    const auto boundaries = component_boundaries(c);
    std::vector<char> touched(n, 0);
    std::vector<int> new_label(n);
    for (int i = 0; i < n; ++i) new_label[i] = c.label[i];
    bool merged_any = false;
    for (int cand : candidates) {
      if (touched[cand]) continue;
      int best = -1;
      long best_len = 0;
      for (auto [nb, len] : boundaries[cand]) {
        if (len > best_len) {
          best = nb;
          best_len = len;
        }
      }
      if (best < 0 || touched[best]) continue;
      new_label[cand] = c.label[best];
      touched[cand] = 1;
      touched[best] = 1;
      for (auto [nb, len] : boundaries[cand]) touched[nb] = 1;
      merged_any = true;
    }
    if (!merged_any) return;
    for (int y = 0; y < labels.height(); ++y) {
      for (int x = 0; x < labels.width(); ++x) labels(x, y) = new_label[c.id(x, y)];
    }
  }
}

int renumber_raster(Grid<int>& labels) {
  std::map<int, int> remap;
  for (int& v : labels.values()) {
    auto [it, inserted] = remap.try_emplace(v, static_cast<int>(remap.size()));
    v = it->second;
  }
  return static_cast<int>(remap.size());
}

struct Center {
  double intensity;
  double x;
  double y;
};

}  // namespace

SuperpixelLabels slic_segment(const GrayImage& img, const SlicConfig& cfg) {
  cfg.validate();
  const int w = img.width();
  const int h = img.height();
  const int s = cfg.region_size;
  if (s >= std::max(w, h)) return {Grid<int>(w, h, 0), 1};

  const int nx = std::max(1, static_cast<int>(std::lround(static_cast<double>(w) / s)));
  const int ny = std::max(1, static_cast<int>(std::lround(static_cast<double>(h) / s)));
  const GradientField g = gradient(img);
  auto grad2 = [&](int x, int y) {
    return g.gx(x, y) * g.gx(x, y) + g.gy(x, y) * g.gy(x, y);
  };

  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int cx = std::min(w - 1, static_cast<int>((i + 0.5) * w / nx));
      int cy = std::min(h - 1, static_cast<int>((j + 0.5) * h / ny));
      int bx = cx;
      int by = cy;
      double best = grad2(cx, cy);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int px = cx + dx;
          const int py = cy + dy;
          if (px < 0 || py < 0 || px >= w || py >= h) continue;
          if (grad2(px, py) < best) {
            best = grad2(px, py);
            bx = px;
            by = py;
          }
        }
      }
      centers.push_back({img(bx, by), static_cast<double>(bx), static_cast<double>(by)});
    }
  }

  const double spatial_weight = (cfg.compactness / 100.0) / s;
  const double sw2 = spatial_weight * spatial_weight;
  Grid<int> labels(w, h, -1);
  ScalarMap dist(w, h);
  const int k = static_cast<int>(centers.size());
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    std::fill(dist.values().begin(), dist.values().end(), std::numeric_limits<double>::infinity());
    for (int c = 0; c < k; ++c) {
      const Center& ct = centers[c];
      const int x0 = std::max(0, static_cast<int>(ct.x) - s);
      const int x1 = std::min(w - 1, static_cast<int>(ct.x) + s);
      const int y0 = std::max(0, static_cast<int>(ct.y) - s);
      const int y1 = std::min(h - 1, static_cast<int>(ct.y) + s);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double di = img(x, y) - ct.intensity;
          const double dx = x - ct.x;
          const double dy = y - ct.y;
          const double d = di * di + sw2 * (dx * dx + dy * dy);
          if (d < dist(x, y)) {
            dist(x, y) = d;
            labels(x, y) = c;
          }
        }
      }
    }
    // Pixels outside every search window (only possible on skewed grids).
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (labels(x, y) >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = (x - centers[c].x) * (x - centers[c].x) + (y - centers[c].y) * (y - centers[c].y);
          if (d < best) {
            best = d;
            labels(x, y) = c;
          }
        }
      }
    }
    std::vector<double> si(k, 0.0), sx(k, 0.0), sy(k, 0.0);
    std::vector<long> cnt(k, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int c = labels(x, y);
        si[c] += img(x, y);
        sx[c] += x;
        sy[c] += y;
        ++cnt[c];
      }
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] == 0) continue;
      centers[c] = {si[c] / cnt[c], sx[c] / cnt[c], sy[c] / cnt[c]};
    }
  }

  enforce_connectivity(labels, static_cast<long>(s) * s / 4);
  SuperpixelLabels out{std::move(labels), 0};
  out.count = renumber_raster(out.labels);
  return out;
}

RegionStats region_stats(const GrayImage& img, const SuperpixelLabels& labels) {
  if (!labels.labels.same_shape(img.pixels())) throw InvalidInput("region_stats: shape mismatch");
  RegionStats st;
  st.pixel_count.assign(labels.count, 0);
  st.mean_intensity.assign(labels.count, 0.0);
  st.centroid.assign(labels.count, Vec2{});
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int r = labels.labels(x, y);
      if (r < 0 || r >= labels.count) throw InvalidInput("region_stats: label out of range");
      ++st.pixel_count[r];
      st.mean_intensity[r] += img(x, y);
      st.centroid[r].x += x;
      st.centroid[r].y += y;
    }
  }
  for (int r = 0; r < labels.count; ++r) {
    if (st.pixel_count[r] == 0) continue;
    const double n = static_cast<double>(st.pixel_count[r]);
    st.mean_intensity[r] = std::clamp(st.mean_intensity[r] / n, 0.0, 1.0);
    st.centroid[r] = {st.centroid[r].x / n, st.centroid[r].y / n};
  }
  return st;
}

AdjacencyGraph adjacency(const SuperpixelLabels& labels) {
  const Grid<int>& l = labels.labels;
  std::vector<std::pair<int, int>> edges;
  auto add = [&](int a, int b) {
    if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int y = 0; y < l.height(); ++y) {
    for (int x = 0; x < l.width(); ++x) {
      if (x + 1 < l.width()) add(l(x, y), l(x + 1, y));
      if (y + 1 < l.height()) add(l(x, y), l(x, y + 1));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return {labels.count, std::move(edges)};
}

bool is_valid_partition(const SuperpixelLabels& labels) {
  if (labels.count < 1) return false;
  for (int v : labels.labels.values()) {
    if (v < 0 || v >= labels.count) return false;
  }
  const Components c = connected_components(labels.labels);
  // Exactly one component per label: every region non-empty and connected.
  if (static_cast<int>(c.area.size()) != labels.count) return false;
  std::vector<char> seen(labels.count, 0);
  for (int lab : c.label) {
    if (seen[lab]) return false;
    seen[lab] = 1;
  }
  return true;
}

}  // namespace jsmreg
