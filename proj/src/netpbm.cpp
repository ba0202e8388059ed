#include "segmeld/netpbm.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace segmeld {
namespace {

constexpr std::int64_t kMaxPixels = std::int64_t{1} << 28;

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view magic() {
    if (bytes_.size() < 2) fail("missing magic number");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  std::int64_t number(const char* field) {
    skip_whitespace_and_comments();
    std::int64_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      if (++digits > 9) fail(std::string(field) + " too large");
      value = value * 10 + (bytes_[pos_] - '0');
      ++pos_;
    }
    if (digits == 0) fail(std::string("expected ") + field);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) fail("missing separator before payload");
    return pos_ + 1;
  }

  [[noreturn]] static void fail(const std::string& what) { throw Error(ErrorCode::MalformedHeader, what); }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  void skip_whitespace_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  int width;
  int height;
  int maxval;
  std::size_t payload;
};

Header parse_header(std::string_view bytes, std::string_view expected_magic) {
  HeaderReader reader(bytes);
  if (reader.magic() != expected_magic) {
    HeaderReader::fail("expected magic " + std::string(expected_magic));
  }
  const auto w = reader.number("width");
  const auto h = reader.number("height");
  const auto maxval = reader.number("maxval");
  if (w < 1 || h < 1) HeaderReader::fail("dimensions must be >= 1");
  if (w * h > kMaxPixels) HeaderReader::fail("dimensions too large");
  if (maxval < 1 || maxval > 65535) HeaderReader::fail("maxval must be in [1, 65535]");
  return {static_cast<int>(w), static_cast<int>(h), static_cast<int>(maxval), reader.payload_offset()};
}

std::string header_text(std::string_view magic, int w, int h, int maxval) {
  std::ostringstream os;
  os << magic << '\n' << w << ' ' << h << '\n' << maxval << '\n';
  return os.str();
}

}  // namespace

ColorImage decode_ppm(std::string_view bytes) {
  const Header hdr = parse_header(bytes, "P6");
  if (hdr.maxval > 255) HeaderReader::fail("only 8-bit PPM is supported");
  ColorImage image(hdr.width, hdr.height);
  if (bytes.size() - hdr.payload < image.data.size()) {
    throw Error(ErrorCode::TruncatedPayload, "PPM payload shorter than " + std::to_string(image.data.size()));
  }
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(hdr.payload), image.data.size(), image.data.begin());
  return image;
}

std::string encode_ppm(const ColorImage& image) {
  if (image.width < 1 || image.height < 1 ||
      image.data.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent ColorImage");
  }
  std::string out = header_text("P6", image.width, image.height, 255);
  out.append(image.data.begin(), image.data.end());
  return out;
}

GrayPlane decode_pgm(std::string_view bytes) {
  const Header hdr = parse_header(bytes, "P5");
  const std::size_t sample_bytes = hdr.maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(hdr.width) * hdr.height;
  if (bytes.size() - hdr.payload < count * sample_bytes) {
    throw Error(ErrorCode::TruncatedPayload, "PGM payload shorter than " + std::to_string(count * sample_bytes));
  }
  GrayPlane out;
  out.maxval = hdr.maxval;
  out.values.resize(hdr.height, hdr.width);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + hdr.payload);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint16_t v = sample_bytes == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
    if (v > hdr.maxval) {
      throw Error(ErrorCode::ValueOutOfRange, "sample exceeds maxval");
    }
    out.values.data()[i] = v;
  }
  return out;
}

std::string encode_pgm16(const Plane<std::uint16_t>& values) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "empty plane");
  }
  std::string out = header_text("P5", static_cast<int>(values.cols()), static_cast<int>(values.rows()), 65535);
  out.reserve(out.size() + static_cast<std::size_t>(values.size()) * 2);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const std::uint16_t v = values.data()[i];
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

ColorImage read_ppm(const std::filesystem::path& path) {
  return decode_ppm(read_file(path));
}

void write_ppm(const ColorImage& image, const std::filesystem::path& path) {
  write_file(path, encode_ppm(image));
}

BoundaryMap read_boundary_pgm(const std::filesystem::path& path) {
  const GrayPlane g = decode_pgm(read_file(path));
  return g.values.cast<double>() / static_cast<double>(g.maxval);
}

void write_pgm16(const BoundaryMap& boundary, const std::filesystem::path& path) {
  validate_boundary(boundary);
  const Plane<std::uint16_t> q = (boundary * 65535.0).round().cast<std::uint16_t>();
  write_file(path, encode_pgm16(q));
}

LabelMap read_label_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file(path)).values.cast<ClassId>();
}

void write_pgm16(const LabelMap& labels, const std::filesystem::path& path) {
  if (labels.size() > 0 && (labels.minCoeff() < 0 || labels.maxCoeff() > 65535)) {
    throw Error(ErrorCode::ValueOutOfRange, "label id outside [0, 65535]");
  }
  write_file(path, encode_pgm16(labels.cast<std::uint16_t>()));
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file(path)).values != 0;
}

void write_pgm16(const BinaryMask& mask, const std::filesystem::path& path) {
  const Plane<std::uint16_t> q = mask.select(Plane<std::uint16_t>::Constant(mask.rows(), mask.cols(), 65535),
                                             Plane<std::uint16_t>::Zero(mask.rows(), mask.cols()));
  write_file(path, encode_pgm16(q));
}

}  // namespace segmeld
