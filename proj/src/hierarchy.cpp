#include "segmeld/hierarchy.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "segmeld/parallel.hpp"

namespace segmeld {

std::vector<double> default_thresholds() {
  std::vector<double> t(15);
  for (int i = 0; i < 15; ++i) t[i] = 0.05 + 0.9 * i / 14.0;
  return t;
}

std::vector<double> HierarchyConfig::sorted_thresholds() const {
  if (!(min_area_fraction > 0.0 && min_area_fraction < max_area_fraction && max_area_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "area fractions must satisfy 0 < min < max <= 1");
  }
  std::vector<double> t = thresholds;
  std::sort(t.begin(), t.end());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0 && t[i] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold outside (0, 1]");
    if (i > 0 && t[i] == t[i - 1]) throw Error(ErrorCode::InvalidArgument, "duplicate threshold");
  }
  return t;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Root at the smaller index; numbering below does not rely on it.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Partition partition_at_threshold(const BoundaryMap& boundary, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be in (0, 1]");
  const Eigen::Index h = boundary.rows();
  const Eigen::Index w = boundary.cols();
  DisjointSets sets(static_cast<std::size_t>(h * w));
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const double b = boundary(y, x);
      const auto i = static_cast<std::size_t>(y * w + x);
      if (x + 1 < w && std::max(b, boundary(y, x + 1)) < t) sets.unite(i, i + 1);
      if (y + 1 < h && std::max(b, boundary(y + 1, x)) < t) sets.unite(i, i + static_cast<std::size_t>(w));
    }
  }

  Partition out;
  out.region.resize(h, w);
  std::vector<std::int32_t> index_of_root(static_cast<std::size_t>(h * w), -1);
  for (Eigen::Index i = 0; i < h * w; ++i) {
    const std::size_t root = sets.find(static_cast<std::size_t>(i));
    std::int32_t& idx = index_of_root[root];
    if (idx < 0) {
      idx = static_cast<std::int32_t>(out.areas.size());
      out.areas.push_back(0);
    }
    out.region.data()[i] = idx;
    ++out.areas[static_cast<std::size_t>(idx)];
  }
  return out;
}

std::vector<RegionProposal> regions_at_threshold(const BoundaryMap& boundary, double t) {
  const Partition part = partition_at_threshold(boundary, t);
  std::vector<RegionProposal> out;
  out.reserve(part.size());
  for (std::size_t r = 0; r < part.size(); ++r) {
    out.push_back({part.mask(static_cast<std::int32_t>(r)), t, part.areas[r]});
  }
  return out;
}

std::vector<RegionProposal> extract_proposals(const BoundaryMap& boundary, const HierarchyConfig& cfg) {
  const std::vector<double> levels = cfg.sorted_thresholds();
  const double pixels = static_cast<double>(boundary.size());
  const double min_area = cfg.min_area_fraction * pixels;
  const double max_area = cfg.max_area_fraction * pixels;

  std::vector<Partition> parts(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) { parts[i] = partition_at_threshold(boundary, levels[i]); });

  std::vector<RegionProposal> out;
  std::set<std::vector<std::int32_t>> seen;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const Partition& part = parts[li];
    std::vector<bool> keep(part.size());
    for (std::size_t r = 0; r < part.size(); ++r) {
      const double a = part.areas[r];
      keep[r] = !(a > max_area || a < min_area);
    }
    std::vector<std::vector<std::int32_t>> members(part.size());
    for (Eigen::Index i = 0; i < part.region.size(); ++i) {
      const auto r = static_cast<std::size_t>(part.region.data()[i]);
      if (keep[r]) members[r].push_back(static_cast<std::int32_t>(i));
    }
    for (std::size_t r = 0; r < part.size(); ++r) {
      if (members[r].empty()) continue;
      if (!seen.insert(std::move(members[r])).second) continue;
      out.push_back({part.mask(static_cast<std::int32_t>(r)), levels[li], part.areas[r]});
    }
  }
  return out;
}

}  // namespace segmeld
