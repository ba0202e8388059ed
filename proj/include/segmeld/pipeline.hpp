#pragma once

#include <optional>

#include "segmeld/gallery.hpp"
#include "segmeld/hierarchy.hpp"
#include "segmeld/vote.hpp"

namespace segmeld {

struct SegmentOptions {
  HierarchyConfig hierarchy;
  std::size_t k = 3;
  /// Classes known to be present; nullopt disables the filter.
  std::optional<ClassSet> expected;
};

struct SegmentResult {
  LabelMap labels;
  std::size_t proposal_count = 0;
};

/// Proposals from the boundary map, each described, embedded and labelled
/// with its k nearest gallery classes, then fused by pixel voting.
/// With no proposals the result is all background.
SegmentResult segment_image(const EmbeddingNet<double>& net, const Gallery& gallery, const ColorImage& image,
                            const BoundaryMap& boundary, const SegmentOptions& opts);

/// Enrolls every nonzero class of `labels` as one view, skipping classes
/// that already hold `max_views` entries. Returns how many were added.
std::size_t enroll_labelled_image(Gallery& gallery, const ColorImage& image, const LabelMap& labels,
                                  const EmbeddingNet<double>& net, std::size_t max_views);

}  // namespace segmeld
