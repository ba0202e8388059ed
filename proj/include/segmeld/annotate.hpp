#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "segmeld/raster.hpp"

namespace segmeld {

struct Component {
  std::vector<std::int32_t> pixels;  // row-major indices, ascending
  double centroid_x = 0;
  double centroid_y = 0;

  int area() const { return static_cast<int>(pixels.size()); }
};

/// 4-connected components of the foreground, ordered by first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

enum class ReviewReason { ComponentCount, CentroidTie };

struct NeedsReview {
  ReviewReason reason = ReviewReason::ComponentCount;
  int found = 0;  // components left after the area filter
};

using SplitOutcome = std::variant<LabelMap, NeedsReview>;

/// Splits a two-item foreground mask: components below min_area are
/// dropped, exactly two must remain, and the one with the smaller centroid
/// x gets labels.first. NeedsReview otherwise, or when the centroids share
/// an x coordinate. InvalidArgument if the labels coincide or are not
/// positive, or min_area < 1.
SplitOutcome split_two(const BinaryMask& fg, std::pair<ClassId, ClassId> labels, int min_area);

/// 0.1% of the mask area, at least one pixel.
int default_min_area(const BinaryMask& fg);

struct CaptureOutcome {
  std::string capture_id;
  std::string mask_path;
  SplitOutcome outcome;
};

struct ReviewItem {
  std::string capture_id;
  std::string mask_path;
  NeedsReview review;
};

/// The NeedsReview outcomes, in input order.
std::vector<ReviewItem> review_queue(const std::vector<CaptureOutcome>& results);

std::string to_string(ReviewReason reason);

}  // namespace segmeld
