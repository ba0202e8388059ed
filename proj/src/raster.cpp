#include "segmeld/raster.hpp"

#include <cmath>

namespace segmeld {

ColorImage::ColorImage(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be >= 1");
  }
  data.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

ClassSet present_classes(const LabelMap& labels) {
  ClassSet out;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels.data()[i] != 0) out.insert(labels.data()[i]);
  }
  return out;
}

BinaryMask label_discontinuities(const LabelMap& labels) {
  const Eigen::Index h = labels.rows();
  const Eigen::Index w = labels.cols();
  BinaryMask out = BinaryMask::Constant(h, w, false);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const ClassId c = labels(y, x);
      if (x + 1 < w && labels(y, x + 1) != c) out(y, x) = out(y, x + 1) = true;
      if (y + 1 < h && labels(y + 1, x) != c) out(y, x) = out(y + 1, x) = true;
    }
  }
  return out;
}

BinaryMask class_mask(const LabelMap& labels, ClassId id) {
  return labels == id;
}

void validate_boundary(const BoundaryMap& boundary) {
  for (Eigen::Index i = 0; i < boundary.size(); ++i) {
    const double v = boundary.data()[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::ValueOutOfRange, "boundary value " + std::to_string(v) + " outside [0,1]");
    }
  }
}

BinaryMask flip_horizontal(const BinaryMask& mask) {
  return mask.rowwise().reverse();
}

}  // namespace segmeld
