#pragma once

#include <Eigen/Core>

#include "segmeld/raster.hpp"

namespace segmeld {

/// Hand-crafted stand-in for a CNN input crop.
using PatchDescriptor = Eigen::VectorXd;

inline constexpr int kGridCells = 4;
inline constexpr int kGridSize = kGridCells * kGridCells * 3;
inline constexpr int kHueBins = 16;
inline constexpr int kDescriptorDim = kGridSize + kHueBins;

/// Two blocks, each L1-normalised:
///  [0, 48)  mean RGB of the masked pixels in a 4x4 grid over the mask's
///           bounding box (cells with no masked pixel take the overall mean);
///  [48, 64) hue histogram of the chromatic masked pixels, bin 0 centred on red.
/// EmptyMask if nothing is selected; DimensionMismatch if shapes differ.
PatchDescriptor describe_patch(const ColorImage& image, const BinaryMask& mask);

/// Bin of a hue in degrees, bins centred on multiples of 22.5.
int hue_bin(double hue_degrees);

/// HSV hue in degrees of an RGB triple, or a negative value when achromatic.
double hue_of(int r, int g, int b);

}  // namespace segmeld
