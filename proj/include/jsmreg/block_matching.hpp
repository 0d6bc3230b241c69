#pragma once

#include <span>
#include <string>
#include <vector>

#include "jsmreg/image.hpp"

namespace jsmreg {

struct BlockMatchConfig {
  int block_size = 17;  // odd
  int search_radius = 6;
  int grid_step = 4;
  int bins = 32;

  void validate() const;
  int margin() const { return block_size / 2 + search_radius; }
};

struct SparseSample {
  Vec2 position;      // reference-frame pixel position
  Vec2 displacement;  // residual displacement in pixels
  double confidence = 0.0;
};

struct SparseDisplacementField {
  std::vector<SparseSample> samples;  // row-major over the sampling grid
  std::vector<std::string> warnings;

  std::size_t confident_count() const;
};

/// Shannon mutual information (natural log) of the joint histogram of two
/// equal-length patches with intensities in [0,1]. Zero when either patch has
/// no intensity variance.
double local_mi(std::span<const double> a, std::span<const double> b, int bins);

/// Exhaustive integer search, per grid node, over [-r, r]^2 for the shift of
/// mov_warped maximizing block MI against the reference block. Candidates are
/// visited by (|d|^2, dy, dx) and only a strictly larger MI replaces the best,
/// so ties resolve to the smallest shift. Confidence is 0 for flat reference
/// blocks (std < 0.01) and for peaks shared by more than 25% of candidates.
SparseDisplacementField match_blocks(const GrayImage& ref, const GrayImage& mov_warped,
                                     const BlockMatchConfig& cfg);

}  // namespace jsmreg
