#pragma once

#include <cstdint>
#include <vector>

#include "segmeld/raster.hpp"

namespace segmeld {

/// A candidate object segment: one region of the boundary map cut at `threshold`.
struct RegionProposal {
  BinaryMask mask;
  double threshold = 0.0;
  int area = 0;
};

/// 15 uniformly spaced levels in [0.05, 0.95].
std::vector<double> default_thresholds();

struct HierarchyConfig {
  std::vector<double> thresholds = default_thresholds();
  double min_area_fraction = 0.001;
  double max_area_fraction = 0.5;

  /// Thresholds sorted ascending. InvalidArgument if any lies outside (0, 1],
  /// two coincide, or the area fractions violate 0 < min < max <= 1.
  std::vector<double> sorted_thresholds() const;
};

/// Region index per pixel, numbered 0.. in order of each region's first
/// pixel in raster order, plus the pixel count of every region.
struct Partition {
  Plane<std::int32_t> region;
  std::vector<int> areas;

  std::size_t size() const { return areas.size(); }
  BinaryMask mask(std::int32_t index) const { return region == index; }
};

/// Connected components of the 4-neighbour graph whose edges are kept when
/// max(b[p], b[q]) < t. InvalidArgument unless t is in (0, 1].
Partition partition_at_threshold(const BoundaryMap& boundary, double t);

/// Every region of the cut at t, no size filtering, in partition order.
std::vector<RegionProposal> regions_at_threshold(const BoundaryMap& boundary, double t);

/// Regions from all thresholds, dropping those with area strictly above
/// max_area_fraction or strictly below min_area_fraction of the image.
/// Identical pixel sets found at several levels are kept once, at the
/// lowest threshold. Ordered by threshold, then partition order.
std::vector<RegionProposal> extract_proposals(const BoundaryMap& boundary, const HierarchyConfig& cfg);

}  // namespace segmeld
