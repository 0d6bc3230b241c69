#pragma once

#include <utility>
#include <vector>

#include "jsmreg/image.hpp"

namespace jsmreg {

struct SuperpixelLabels {
  Grid<int> labels;  // region id per pixel, in [0, count)
  int count = 0;
};

struct RegionStats {
  std::vector<long> pixel_count;
  std::vector<double> mean_intensity;
  std::vector<Vec2> centroid;
};

/// Unordered region pairs sharing a 4-neighbour boundary, stored as (i, j)
/// with i < j in lexicographic order.
struct AdjacencyGraph {
  int region_count = 0;
  std::vector<std::pair<int, int>> edges;

  /// Neighbour lists, each sorted ascending.
  std::vector<std::vector<int>> neighbours() const;
};

struct SlicConfig {
  int region_size = 16;     // grid interval S in pixels
  double compactness = 10;  // on the usual [0,100] lightness scale
  int iterations = 10;

  void validate() const;
};

/// Grayscale SLIC: k-means in (intensity, x, y) with distance
/// sqrt(dI^2 + (m/100)^2 (ds/S)^2), followed by a connectivity pass that
/// merges orphan fragments and fragments smaller than S^2/4 into the
/// neighbouring region sharing the longest boundary. Labels are renumbered
/// in raster order of first appearance.
SuperpixelLabels slic_segment(const GrayImage& img, const SlicConfig& cfg);

RegionStats region_stats(const GrayImage& img, const SuperpixelLabels& labels);

AdjacencyGraph adjacency(const SuperpixelLabels& labels);

/// Checks the partition invariants (labels in range, every region non-empty
/// and 4-connected).
bool is_valid_partition(const SuperpixelLabels& labels);

}  // namespace jsmreg
