#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include <Eigen/Core>

namespace segmeld {

/// Class identifier. 0 is background / unlabelled and is never registered.
using ClassId = std::int32_t;
using ClassSet = std::set<ClassId>;

// Dense per-pixel planes are row-major Eigen arrays: rows() == height,
// cols() == width, so coeff(y, x) addresses pixel (x, y).
template <typename T>
using Plane = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-pixel contour strength in [0, 1].
using BoundaryMap = Plane<double>;
/// Per-pixel class ids.
using LabelMap = Plane<ClassId>;
using BinaryMask = Plane<bool>;

/// 8-bit RGB image with interleaved row-major storage.
struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  ColorImage() = default;
  ColorImage(int w, int h);

  std::uint8_t& at(int x, int y, int channel) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }
  std::uint8_t at(int x, int y, int channel) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + channel];
  }

  bool operator==(const ColorImage&) const = default;
};

template <typename Derived>
int width_of(const Eigen::DenseBase<Derived>& plane) {
  return static_cast<int>(plane.cols());
}
template <typename Derived>
int height_of(const Eigen::DenseBase<Derived>& plane) {
  return static_cast<int>(plane.rows());
}

/// Throws DimensionMismatch unless both planes have the same shape.
template <typename A, typename B>
void require_same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b, const char* what);

/// Distinct nonzero ids occurring in the map.
ClassSet present_classes(const LabelMap& labels);

/// Pixels with at least one 4-neighbour carrying a different label.
BinaryMask label_discontinuities(const LabelMap& labels);

/// Pixels of `labels` equal to `id`.
BinaryMask class_mask(const LabelMap& labels, ClassId id);

/// Throws ValueOutOfRange if any value lies outside [0, 1] or is not finite.
void validate_boundary(const BoundaryMap& boundary);

BinaryMask flip_horizontal(const BinaryMask& mask);

}  // namespace segmeld

#include "segmeld/error.hpp"

namespace segmeld {

template <typename A, typename B>
void require_same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.cols()) + "x" + std::to_string(a.rows()) +
                    " vs " + std::to_string(b.cols()) + "x" + std::to_string(b.rows()));
  }
}

}  // namespace segmeld
