#include "segmeld/descriptor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace segmeld {

double hue_of(int r, int g, int b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const double c = mx - mn;
  if (c <= 0) return -1.0;
  double h;
  if (mx == r) {
    h = std::fmod((g - b) / c, 6.0);
  } else if (mx == g) {
    h = (b - r) / c + 2.0;
  } else {
    h = (r - g) / c + 4.0;
  }
  h *= 60.0;
  return h < 0 ? h + 360.0 : h;
}

int hue_bin(double hue_degrees) {
  const double width = 360.0 / kHueBins;
  return static_cast<int>(std::floor((hue_degrees + width / 2) / width)) % kHueBins;
}

PatchDescriptor describe_patch(const ColorImage& image, const BinaryMask& mask) {
  if (mask.rows() != image.height || mask.cols() != image.width) {
    throw Error(ErrorCode::DimensionMismatch, "mask does not match image");
  }
  int x0 = image.width, y0 = image.height, x1 = -1, y1 = -1;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (!mask(y, x)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::EmptyMask, "describe_patch: mask selects no pixel");

  const int bw = x1 - x0 + 1;
  const int bh = y1 - y0 + 1;
  std::array<Eigen::Vector3d, kGridCells * kGridCells> sums;
  std::array<int, kGridCells * kGridCells> counts{};
  sums.fill(Eigen::Vector3d::Zero());
  Eigen::Vector3d total = Eigen::Vector3d::Zero();
  int total_count = 0;
  PatchDescriptor out = PatchDescriptor::Zero(kDescriptorDim);
  auto hist = out.segment<kHueBins>(kGridSize);

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (!mask(y, x)) continue;
      const int r = image.at(x, y, 0), g = image.at(x, y, 1), b = image.at(x, y, 2);
      const Eigen::Vector3d rgb(r / 255.0, g / 255.0, b / 255.0);
      const int cell = ((y - y0) * kGridCells / bh) * kGridCells + (x - x0) * kGridCells / bw;
      sums[cell] += rgb;
      ++counts[cell];
      total += rgb;
      ++total_count;
      if (const double h = hue_of(r, g, b); h >= 0) hist(hue_bin(h)) += 1.0;
    }
  }

  const Eigen::Vector3d mean = total / total_count;
  for (int c = 0; c < kGridCells * kGridCells; ++c) {
    out.segment<3>(3 * c) = counts[c] > 0 ? Eigen::Vector3d(sums[c] / counts[c]) : mean;
  }
  auto grid = out.head<kGridSize>();
  if (const double s = grid.sum(); s > 0) grid /= s;
  if (const double s = hist.sum(); s > 0) hist /= s;
  return out;
}

}  // namespace segmeld
