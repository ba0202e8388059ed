#include "segmeld/vote.hpp"

#include <algorithm>

namespace segmeld {

TallyGrid::TallyGrid(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "tally dimensions must be >= 1");
  cells_.resize(static_cast<std::size_t>(width) * height);
}

void TallyGrid::add(int x, int y, ClassId c, int count) {
  Counts& cell = cells_[static_cast<std::size_t>(y) * width_ + x];
  auto it = std::lower_bound(cell.begin(), cell.end(), c, [](const auto& e, ClassId id) { return e.first < id; });
  if (it != cell.end() && it->first == c) {
    it->second += count;
  } else {
    cell.insert(it, {c, count});
  }
}

int TallyGrid::count(int x, int y, ClassId c) const {
  for (const auto& [id, n] : at(x, y)) {
    if (id == c) return n;
  }
  return 0;
}

TallyGrid accumulate(int width, int height, std::span<const LabelledProposal> proposals) {
  TallyGrid tally(width, height);
  for (const auto& prop : proposals) {
    if (prop.mask.cols() != width || prop.mask.rows() != height) {
      throw Error(ErrorCode::DimensionMismatch, "proposal mask does not match tally dimensions");
    }
    std::map<ClassId, int> multiplicity;
    for (ClassId c : prop.labels) ++multiplicity[c];
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (!prop.mask(y, x)) continue;
        for (const auto& [c, n] : multiplicity) tally.add(x, y, c, n);
      }
    }
  }
  return tally;
}

namespace {

template <typename Keep>
LabelMap fuse_impl(const TallyGrid& tally, Keep keep) {
  LabelMap out = LabelMap::Zero(tally.height(), tally.width());
  for (int y = 0; y < tally.height(); ++y) {
    for (int x = 0; x < tally.width(); ++x) {
      int best = 0;
      // Cells are sorted by id, so a strict > keeps the smallest id on ties.
      for (const auto& [c, n] : tally.at(x, y)) {
        if (keep(c) && n > best) {
          best = n;
          out(y, x) = c;
        }
      }
    }
  }
  return out;
}

}  // namespace

LabelMap fuse(const TallyGrid& tally, const ClassSet& expected) {
  if (expected.empty()) throw Error(ErrorCode::InvalidArgument, "expected class set is empty");
  return fuse_impl(tally, [&](ClassId c) { return expected.count(c) > 0; });
}

LabelMap fuse_unfiltered(const TallyGrid& tally) {
  return fuse_impl(tally, [](ClassId) { return true; });
}

ClassSet ScoreMap::classes() const {
  ClassSet out;
  for (const auto& [c, plane] : planes) out.insert(c);
  return out;
}

LabelMap restricted_argmax(const ScoreMap& scores, const ClassSet& expected) {
  if (expected.empty()) throw Error(ErrorCode::InvalidArgument, "expected class set is empty");
  std::vector<std::pair<ClassId, const BoundaryMap*>> planes;
  for (ClassId c : expected) {
    auto it = scores.planes.find(c);
    if (it == scores.planes.end()) {
      throw Error(ErrorCode::UnknownClassInExpected, "no score plane for class " + std::to_string(c));
    }
    if (it->second.rows() != scores.height || it->second.cols() != scores.width) {
      throw Error(ErrorCode::DimensionMismatch, "score plane for class " + std::to_string(c) + " has wrong shape");
    }
    planes.emplace_back(c, &it->second);
  }
  LabelMap out(scores.height, scores.width);
  for (int y = 0; y < scores.height; ++y) {
    for (int x = 0; x < scores.width; ++x) {
      ClassId best = planes.front().first;
      double best_score = (*planes.front().second)(y, x);
      for (std::size_t i = 1; i < planes.size(); ++i) {
        const double s = (*planes[i].second)(y, x);
        if (s > best_score) {
          best_score = s;
          best = planes[i].first;
        }
      }
      out(y, x) = best;
    }
  }
  return out;
}

}  // namespace segmeld
