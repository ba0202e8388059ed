#include "segmeld/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "segmeld/descriptor.hpp"

namespace segmeld {

void Gallery::add(EmbeddingVector v, ClassId class_id) {
  if (dim_ == 0 && entries_.empty()) dim_ = static_cast<int>(v.size());
  if (v.size() != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding has " + std::to_string(v.size()) + " entries, gallery holds " + std::to_string(dim_));
  }
  if (!(std::abs(v.norm() - 1.0) <= 1e-9)) throw Error(ErrorCode::InvalidArgument, "gallery vectors must be unit-norm");
  entries_.push_back({std::move(v), class_id});
}

ClassSet Gallery::classes() const {
  ClassSet out;
  for (const auto& e : entries_) out.insert(e.class_id);
  return out;
}

std::vector<Neighbor> Gallery::classify(const EmbeddingVector& query, std::size_t k) const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (k > entries_.size()) {
    throw Error(ErrorCode::GalleryTooSmall,
                "k = " + std::to_string(k) + " but gallery holds " + std::to_string(entries_.size()));
  }
  if (query.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "query dimension differs from gallery");

  std::vector<Neighbor> all(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    all[i] = {entries_[i].class_id, (entries_[i].vector - query).norm(), i};
  }
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  return all;
}

Gallery enroll(Gallery gallery, const ColorImage& image, const BinaryMask& mask, ClassId class_id,
               const EmbeddingNet<double>& net) {
  gallery.add(forward(net, describe_patch(image, mask)), class_id);
  return gallery;
}

}  // namespace segmeld
