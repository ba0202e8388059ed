#pragma once

#include <vector>

#include <Eigen/Core>

#include "segmeld/embed.hpp"
#include "segmeld/raster.hpp"

namespace segmeld {

using EmbeddingVector = Eigen::VectorXd;

struct Neighbor {
  ClassId class_id = 0;
  double distance = 0;
  std::size_t index = 0;  // enrollment position

  bool operator==(const Neighbor&) const = default;
};

/// Reference embeddings with class labels, queried by exact k-NN.
class Gallery {
 public:
  struct Entry {
    EmbeddingVector vector;
    ClassId class_id = 0;
  };

  Gallery() = default;
  explicit Gallery(int dim) : dim_(dim) {}

  /// Appends an entry. DimensionMismatch if the length differs from the
  /// gallery's; InvalidArgument unless the vector is unit-norm.
  void add(EmbeddingVector v, ClassId class_id);

  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  ClassSet classes() const;

  /// The k nearest entries by Euclidean distance, ascending; ties keep
  /// enrollment order. GalleryTooSmall if k exceeds the size,
  /// InvalidArgument for k < 1.
  std::vector<Neighbor> classify(const EmbeddingVector& query, std::size_t k) const;

 private:
  int dim_ = 0;
  std::vector<Entry> entries_;
};

/// Embeds the masked patch and returns the gallery grown by one entry.
Gallery enroll(Gallery gallery, const ColorImage& image, const BinaryMask& mask, ClassId class_id,
               const EmbeddingNet<double>& net);

}  // namespace segmeld
