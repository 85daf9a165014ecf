#include "jpegcons/codec.hpp"

#include <cmath>
#include <cstring>

namespace jpegcons {

void CodecOptions::validate() const {
  if (block_size != 1 && block_size != 8) fail(ErrorKind::InvalidArgument, "block size must be 1 or 8");
}

bool CoefficientGrid::operator==(const CoefficientGrid& o) const {
  if (width != o.width || height != o.height || color != o.color || block_size != o.block_size ||
      !(table == o.table) || channels.size() != o.channels.size())
    return false;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].rows() != o.channels[c].rows() || channels[c].cols() != o.channels[c].cols() ||
        !(channels[c] == o.channels[c]).all())
      return false;
  }
  return true;
}

CodecOptions grid_options(const CoefficientGrid& grid, bool round_intermediate) {
  CodecOptions opts;
  opts.color = grid.color;
  opts.block_size = grid.block_size;
  opts.round_intermediate = round_intermediate;
  return opts;
}

namespace stage {
namespace {

Plane<double> round_to_8bit(const Plane<double>& p) {
  return p.unaryExpr([](double v) { return std::clamp(std::nearbyint(v), 0.0, 255.0); });
}

}  // namespace

std::vector<Plane<double>> to_shifted_planes(const FloatImage& img, const CodecOptions& opts) {
  opts.validate();
  if (!opts.pad && (img.width % opts.block_size != 0 || img.height % opts.block_size != 0))
    fail(ErrorKind::NonMultipleOf8WithoutPadFlag, "dimensions are not block multiples and padding is off");

  std::vector<Plane<double>> planes;
  if (img.channels == 3 && opts.color == ColorPath::ycbcr) {
    auto ycc = rgb_to_ycbcr(img);
    for (auto& p : ycc.planes) planes.push_back(std::move(p));
  } else {
    for (int c = 0; c < img.channels; ++c) planes.emplace_back(img.channel(c));
  }
  for (auto& p : planes) {
    if (opts.round_intermediate) p = round_to_8bit(p);
    p = pad_edge<double>(p - 128.0, opts.block_size);
  }
  return planes;
}

FloatImage from_shifted_planes(const std::vector<Plane<double>>& planes, int width, int height, int channels,
                               const CodecOptions& opts) {
  if (int(planes.size()) != channels) fail(ErrorKind::DimMismatch, "plane count does not match channels");
  std::vector<Plane<double>> cropped;
  for (const auto& p : planes) {
    Plane<double> q = p.topLeftCorner(height, width) + 128.0;
    if (opts.round_intermediate) q = round_to_8bit(q);
    cropped.push_back(std::move(q));
  }
  if (channels == 3 && opts.color == ColorPath::ycbcr) {
    YCbCrImage<double> ycc{width, height, {cropped[0], cropped[1], cropped[2]}};
    return ycbcr_to_rgb(ycc);
  }
  FloatImage out(width, height, channels);
  for (int c = 0; c < channels; ++c) out.channel(c) = cropped[c];
  return out;
}

void forward_transform(std::vector<Plane<double>>& planes, int block_size) {
  for (auto& p : planes) transform_blocks(p, block_size, false);
}

void inverse_transform(std::vector<Plane<double>>& planes, int block_size) {
  for (auto& p : planes) transform_blocks(p, block_size, true);
}

Plane<double> divisors(const QuantTable& table, const CodecOptions& opts, int channel, Eigen::Index rows,
                       Eigen::Index cols) {
  const bool luma_table = channel == 0 || opts.color == ColorPath::rgb_passthrough;
  return tile_table<double>(luma_table ? table.luma : table.chroma, rows, cols, opts.block_size);
}

std::vector<Plane<double>> quantized_domain(const FloatImage& img, const QuantTable& table,
                                            const CodecOptions& opts) {
  auto planes = to_shifted_planes(img, opts);
  forward_transform(planes, opts.block_size);
  for (std::size_t c = 0; c < planes.size(); ++c)
    planes[c] /= divisors(table, opts, int(c), planes[c].rows(), planes[c].cols());
  return planes;
}

FloatImage from_quantized_domain(const std::vector<Plane<double>>& xq, const QuantTable& table, int width,
                                 int height, int channels, const CodecOptions& opts) {
  std::vector<Plane<double>> planes;
  for (std::size_t c = 0; c < xq.size(); ++c)
    planes.push_back(xq[c] * divisors(table, opts, int(c), xq[c].rows(), xq[c].cols()));
  inverse_transform(planes, opts.block_size);
  return from_shifted_planes(planes, width, height, channels, opts);
}

}  // namespace stage

CoefficientGrid compress(const FloatImage& img, const QuantTable& table, const CodecOptions& opts) {
  table.validate();
  const auto xq = stage::quantized_domain(img, table, opts);
  CoefficientGrid grid;
  grid.width = img.width;
  grid.height = img.height;
  grid.color = opts.color;
  grid.block_size = opts.block_size;
  grid.table = table;
  for (const auto& p : xq)
    grid.channels.push_back(p.unaryExpr([](double v) { return int(round_half_away(v)); }));
  return grid;
}

CoefficientGrid compress(const PixelImage& img, const QuantTable& table, const CodecOptions& opts) {
  return compress(to_float(img), table, opts);
}

CoefficientGrid compress(const PixelImage& img, int qf, const CodecOptions& opts) {
  return compress(img, table_for_qf(qf), opts);
}

FloatImage decompress_float(const CoefficientGrid& grid, bool round_intermediate) {
  std::vector<Plane<double>> xq;
  for (const auto& p : grid.channels) xq.push_back(p.cast<double>());
  return stage::from_quantized_domain(xq, grid.table, grid.width, grid.height, grid.channel_count(),
                                      grid_options(grid, round_intermediate));
}

PixelImage decompress(const CoefficientGrid& grid, bool round_intermediate) {
  return to_pixels(decompress_float(grid, round_intermediate));
}

PixelImage jpeg_q(const PixelImage& img, const QuantTable& table, const CodecOptions& opts) {
  return decompress(compress(img, table, opts), opts.round_intermediate);
}

PixelImage jpeg_q(const PixelImage& img, int qf, const CodecOptions& opts) {
  return jpeg_q(img, table_for_qf(qf), opts);
}

// Sidecar layout, all little-endian:
//   "CGRD" | version u8 (=1) | width u32 | height u32 | channels u8 | color u8
//   | block_size u8 | qf u8 (0 = custom) | luma[64] u8 zigzag | chroma[64] u8
//   zigzag | coefficient count u32 | int16 coefficients
// Coefficients run channel by channel, blocks in raster order, each block in
// zigzag order (block size 1: samples in raster order).
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

class SidecarReader {
 public:
  explicit SidecarReader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::int16_t i16() {
    need(2);
    const auto v = std::uint16_t(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return std::int16_t(v);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorKind::BadSidecar, "truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename Fn>
void for_each_coefficient(const CoefficientGrid& g, Fn&& fn) {
  const auto& zz = zigzag_order();
  for (int c = 0; c < g.channel_count(); ++c) {
    if (g.block_size == 1) {
      for (Eigen::Index y = 0; y < g.channels[c].rows(); ++y)
        for (Eigen::Index x = 0; x < g.channels[c].cols(); ++x) fn(c, y, x);
      continue;
    }
    for (int by = 0; by < g.blocks_y(); ++by)
      for (int bx = 0; bx < g.blocks_x(); ++bx)
        for (int k = 0; k < 64; ++k) fn(c, 8 * by + zz[k] / 8, 8 * bx + zz[k] % 8);
  }
}

}  // namespace

std::vector<std::uint8_t> write_sidecar(const CoefficientGrid& grid) {
  std::vector<std::uint8_t> out = {'C', 'G', 'R', 'D', 1};
  put_u32(out, std::uint32_t(grid.width));
  put_u32(out, std::uint32_t(grid.height));
  out.push_back(std::uint8_t(grid.channel_count()));
  out.push_back(std::uint8_t(grid.color));
  out.push_back(std::uint8_t(grid.block_size));
  out.push_back(std::uint8_t(grid.table.quality_factor.value_or(0)));
  for (const TableMatrix* m : {&grid.table.luma, &grid.table.chroma})
    for (int k = 0; k < 64; ++k) out.push_back(std::uint8_t(m->data()[zigzag_order()[k]]));
  std::size_t count = 0;
  for (const auto& p : grid.channels) count += std::size_t(p.size());
  put_u32(out, std::uint32_t(count));
  for_each_coefficient(grid, [&](int c, Eigen::Index y, Eigen::Index x) {
    const int v = grid.channels[c](y, x);
    if (v < INT16_MIN || v > INT16_MAX) fail(ErrorKind::CoefficientOutOfRange, "coefficient exceeds int16");
    const auto u = std::uint16_t(std::int16_t(v));
    out.push_back(std::uint8_t(u & 0xFF));
    out.push_back(std::uint8_t(u >> 8));
  });
  return out;
}

CoefficientGrid read_sidecar(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), "CGRD", 4) != 0) fail(ErrorKind::BadSidecar, "bad magic");
  SidecarReader in(bytes.subspan(4));
  if (in.u8() != 1) fail(ErrorKind::BadSidecar, "unsupported version");
  CoefficientGrid g;
  g.width = int(in.u32());
  g.height = int(in.u32());
  const int channels = in.u8();
  const int color = in.u8();
  g.block_size = in.u8();
  const int qf = in.u8();
  if (g.width <= 0 || g.height <= 0 || (channels != 1 && channels != 3) || color > 1 ||
      (g.block_size != 1 && g.block_size != 8) || qf > 100)
    fail(ErrorKind::BadSidecar, "invalid header");
  g.color = ColorPath(color);
  for (TableMatrix* m : {&g.table.luma, &g.table.chroma})
    for (int k = 0; k < 64; ++k) m->data()[zigzag_order()[k]] = in.u8();
  if (qf > 0) g.table.quality_factor = qf;
  try {
    g.table.validate();
  } catch (const Error&) {
    fail(ErrorKind::BadSidecar, "invalid table");
  }
  const int pw = padded_extent(g.width, g.block_size), ph = padded_extent(g.height, g.block_size);
  g.channels.assign(channels, Plane<int>::Zero(ph, pw));
  if (in.u32() != std::uint32_t(channels) * std::uint32_t(pw) * std::uint32_t(ph))
    fail(ErrorKind::BadSidecar, "coefficient count mismatch");
  for_each_coefficient(g, [&](int c, Eigen::Index y, Eigen::Index x) { g.channels[c](y, x) = in.i16(); });
  if (!in.done()) fail(ErrorKind::BadSidecar, "trailing bytes");
  return g;
}

}  // namespace jpegcons
