#include "jpegcons/pnm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace jpegcons {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads a decimal field.
  long next_int() {
    skip_space();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1 << 24) fail(ErrorKind::TruncatedPayload, "header field too large");
      ++digits;
    }
    if (digits == 0) fail(ErrorKind::TruncatedPayload, "malformed header");
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail(ErrorKind::TruncatedPayload, "missing raster separator");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

PixelImage read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') fail(ErrorKind::UnsupportedMagic, "not a PNM file");
  int channels = 0;
  if (bytes[1] == '5') {
    channels = 1;
  } else if (bytes[1] == '6') {
    channels = 3;
  } else {
    fail(ErrorKind::UnsupportedMagic, std::string("P") + char(bytes[1]));
  }

  HeaderReader reader(bytes);
  const long width = reader.next_int();
  const long height = reader.next_int();
  const long maxval = reader.next_int();
  if (maxval != 255) fail(ErrorKind::MaxvalNot255, std::to_string(maxval));
  if (width <= 0 || height <= 0) fail(ErrorKind::TruncatedPayload, "zero dimension");
  reader.single_space();

  PixelImage img(int(width), int(height), channels);
  const auto need = static_cast<std::size_t>(img.size());
  if (bytes.size() - reader.pos() < need) fail(ErrorKind::TruncatedPayload, "raster shorter than header claims");
  std::copy_n(bytes.begin() + reader.pos(), need, img.data.data());
  return img;
}

std::vector<std::uint8_t> write_pnm(const PixelImage& img) {
  const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" + std::to_string(img.width) +
                             " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data.data(), img.data.data() + img.size());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}  // namespace jpegcons
