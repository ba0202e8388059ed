#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "segmeld/raster.hpp"

namespace segmeld {

// Binary Netpbm codecs. Colour images are P6 with 8-bit samples; boundary
// maps, label maps and masks are P5 with 16-bit big-endian samples. The
// decoders also accept 8-bit P5 so masks from external tools load.
//
// Errors: MalformedHeader for anything wrong before the payload (including
// zero or absurd dimensions), TruncatedPayload when the file ends early,
// IoFailure when the file cannot be opened or written.

/// Decoded P5 samples plus the header's maxval.
struct GrayPlane {
  Plane<std::uint16_t> values;
  int maxval = 65535;
};

ColorImage decode_ppm(std::string_view bytes);
std::string encode_ppm(const ColorImage& image);

GrayPlane decode_pgm(std::string_view bytes);
std::string encode_pgm16(const Plane<std::uint16_t>& values);

ColorImage read_ppm(const std::filesystem::path& path);
void write_ppm(const ColorImage& image, const std::filesystem::path& path);

/// Boundary values are sample / maxval (65535 for 16-bit files).
BoundaryMap read_boundary_pgm(const std::filesystem::path& path);
/// Values are rounded to the nearest 1/65535. ValueOutOfRange outside [0,1].
void write_pgm16(const BoundaryMap& boundary, const std::filesystem::path& path);

LabelMap read_label_pgm(const std::filesystem::path& path);
/// ValueOutOfRange for ids outside [0, 65535].
void write_pgm16(const LabelMap& labels, const std::filesystem::path& path);

/// Nonzero samples are foreground.
BinaryMask read_mask_pgm(const std::filesystem::path& path);
/// Foreground is written as 65535.
void write_pgm16(const BinaryMask& mask, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace segmeld
