#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "segmeld/raster.hpp"

namespace segmeld {

/// Per-pixel sparse vote counts, each pixel's list sorted by class id.
class TallyGrid {
 public:
  using Counts = std::vector<std::pair<ClassId, int>>;

  TallyGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  void add(int x, int y, ClassId c, int count = 1);
  const Counts& at(int x, int y) const { return cells_[static_cast<std::size_t>(y) * width_ + x]; }
  int count(int x, int y, ClassId c) const;

  bool operator==(const TallyGrid&) const = default;

 private:
  int width_;
  int height_;
  std::vector<Counts> cells_;
};

/// A proposal mask with the class labels of its nearest gallery entries.
struct LabelledProposal {
  BinaryMask mask;
  std::vector<ClassId> labels;
};

/// tally[p][c] = number of (proposal, label) pairs with p in the mask and
/// label c; repeated labels count with multiplicity. DimensionMismatch if a
/// mask is not width x height.
TallyGrid accumulate(int width, int height, std::span<const LabelledProposal> proposals);

/// Per pixel: tallies of classes outside `expected` are dropped, then the
/// largest count wins, ties to the smallest id; no surviving tally gives 0.
/// InvalidArgument if expected is empty.
LabelMap fuse(const TallyGrid& tally, const ClassSet& expected);

/// fuse without the expected-class filter.
LabelMap fuse_unfiltered(const TallyGrid& tally);

/// Per-class score planes of a dense classifier.
struct ScoreMap {
  int width = 0;
  int height = 0;
  std::map<ClassId, BoundaryMap> planes;  // any finite reals, not only [0,1]

  ClassSet classes() const;
};

/// Per pixel argmax over the planes of `expected` only, ties to the smallest
/// id. UnknownClassInExpected if expected names a class without a plane;
/// InvalidArgument if expected is empty.
LabelMap restricted_argmax(const ScoreMap& scores, const ClassSet& expected);

}  // namespace segmeld
