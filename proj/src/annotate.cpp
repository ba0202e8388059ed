#include "segmeld/annotate.hpp"

#include <algorithm>
#include <cmath>

namespace segmeld {

std::vector<Component> connected_components(const BinaryMask& mask) {
  const auto h = static_cast<std::int32_t>(mask.rows());
  const auto w = static_cast<std::int32_t>(mask.cols());
  std::vector<bool> visited(static_cast<std::size_t>(w) * h, false);
  std::vector<Component> out;
  std::vector<std::int32_t> stack;
  for (std::int32_t start = 0; start < w * h; ++start) {
    if (visited[start] || !mask.data()[start]) continue;
    Component comp;
    visited[start] = true;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::int32_t i = stack.back();
      stack.pop_back();
      comp.pixels.push_back(i);
      const std::int32_t x = i % w, y = i / w;
      auto visit = [&](std::int32_t j) {
        if (!visited[j] && mask.data()[j]) {
          visited[j] = true;
          stack.push_back(j);
        }
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
      if (y > 0) visit(i - w);
      if (y + 1 < h) visit(i + w);
    }
    std::sort(comp.pixels.begin(), comp.pixels.end());
    double sx = 0, sy = 0;
    for (std::int32_t i : comp.pixels) {
      sx += i % w;
      sy += i / w;
    }
    comp.centroid_x = sx / comp.area();
    comp.centroid_y = sy / comp.area();
    out.push_back(std::move(comp));
  }
  return out;
}

int default_min_area(const BinaryMask& fg) {
  return std::max(1, static_cast<int>(std::ceil(0.001 * static_cast<double>(fg.size()))));
}

SplitOutcome split_two(const BinaryMask& fg, std::pair<ClassId, ClassId> labels, int min_area) {
  if (labels.first == labels.second) throw Error(ErrorCode::InvalidArgument, "split_two labels must differ");
  if (labels.first <= 0 || labels.second <= 0) throw Error(ErrorCode::InvalidArgument, "split_two labels must be > 0");
  if (min_area < 1) throw Error(ErrorCode::InvalidArgument, "min_area must be >= 1");

  std::vector<Component> kept;
  for (auto& c : connected_components(fg)) {
    if (c.area() >= min_area) kept.push_back(std::move(c));
  }
  if (kept.size() != 2) return NeedsReview{ReviewReason::ComponentCount, static_cast<int>(kept.size())};

  // Centroids are means of integer coordinates; compare exactly via sums.
  const auto sum_x = [&](const Component& c) {
    std::int64_t s = 0;
    for (std::int32_t i : c.pixels) s += i % fg.cols();
    return s;
  };
  const std::int64_t lhs = sum_x(kept[0]) * kept[1].area();
  const std::int64_t rhs = sum_x(kept[1]) * kept[0].area();
  if (lhs == rhs) return NeedsReview{ReviewReason::CentroidTie, 2};
  const Component& left = lhs < rhs ? kept[0] : kept[1];
  const Component& right = lhs < rhs ? kept[1] : kept[0];

  LabelMap out = LabelMap::Zero(fg.rows(), fg.cols());
  for (std::int32_t i : left.pixels) out.data()[i] = labels.first;
  for (std::int32_t i : right.pixels) out.data()[i] = labels.second;
  return out;
}

std::vector<ReviewItem> review_queue(const std::vector<CaptureOutcome>& results) {
  std::vector<ReviewItem> out;
  for (const auto& r : results) {
    if (const auto* review = std::get_if<NeedsReview>(&r.outcome)) {
      out.push_back({r.capture_id, r.mask_path, *review});
    }
  }
  return out;
}

std::string to_string(ReviewReason reason) {
  switch (reason) {
    case ReviewReason::ComponentCount: return "component_count";
    case ReviewReason::CentroidTie: return "centroid_tie";
  }
  return "unknown";
}

}  // namespace segmeld
