#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jpegcons/colorspace.hpp"
#include "jpegcons/quantization.hpp"

namespace jpegcons {

enum class ColorPath : std::uint8_t { ycbcr = 0, rgb_passthrough = 1 };

struct CodecOptions {
  ColorPath color = ColorPath::ycbcr;
  // Round (half to even) and clamp the colour-converted planes to 8 bits on
  // the way in and on the way out, the way integer codecs do.
  bool round_intermediate = false;
  // 8 is baseline JPEG. 1 turns every sample into its own "block" (identity
  // transform, DC table entry), emulating libjpeg's `-block 1`.
  int block_size = 8;
  // Edge-replicate partial blocks; when false, dimensions must be multiples
  // of the block size.
  bool pad = true;

  void validate() const;
};

// Quantized coefficients, stored per channel as a padded plane in which the
// coefficient (u, v) of block (by, bx) sits at (8 by + u, 8 bx + v).
struct CoefficientGrid {
  int width = 0;
  int height = 0;
  ColorPath color = ColorPath::ycbcr;
  int block_size = 8;
  QuantTable table;
  std::vector<Plane<int>> channels;

  int channel_count() const { return int(channels.size()); }
  int blocks_x() const { return padded_extent(width, block_size) / block_size; }
  int blocks_y() const { return padded_extent(height, block_size) / block_size; }
  const TableMatrix& table_for(int channel) const {
    return channel == 0 || color == ColorPath::rgb_passthrough ? table.luma : table.chroma;
  }
  IntBlock block(int channel, int by, int bx) const {
    return channels[channel].block<8, 8>(8 * by, 8 * bx).matrix();
  }
  void set_block(int channel, int by, int bx, const IntBlock& b) {
    channels[channel].block<8, 8>(8 * by, 8 * bx) = b.array();
  }

  bool operator==(const CoefficientGrid& o) const;
};

CoefficientGrid compress(const PixelImage& img, int qf, const CodecOptions& opts = {});
CoefficientGrid compress(const PixelImage& img, const QuantTable& table, const CodecOptions& opts = {});
// Float entry point: no input rounding, used for exact requantization checks.
CoefficientGrid compress(const FloatImage& img, const QuantTable& table, const CodecOptions& opts = {});

// Dequantize, inverse transform, crop, undo colour conversion. No terminal
// rounding or clamping.
FloatImage decompress_float(const CoefficientGrid& grid, bool round_intermediate = false);
PixelImage decompress(const CoefficientGrid& grid, bool round_intermediate = false);

PixelImage jpeg_q(const PixelImage& img, int qf, const CodecOptions& opts = {});
PixelImage jpeg_q(const PixelImage& img, const QuantTable& table, const CodecOptions& opts = {});

// Options a grid was produced under (intermediate rounding is a decoder-side
// choice and is not recorded in the grid).
CodecOptions grid_options(const CoefficientGrid& grid, bool round_intermediate = false);

// "CGRD" binary sidecar.
std::vector<std::uint8_t> write_sidecar(const CoefficientGrid& grid);
CoefficientGrid read_sidecar(std::span<const std::uint8_t> bytes);

namespace stage {

// Individual pipeline stages, shared by the differentiable operator and the
// projection. All planes here are padded to the block grid.

// Colour conversion (or passthrough), optional 8-bit rounding, level shift
// by -128, edge padding.
std::vector<Plane<double>> to_shifted_planes(const FloatImage& img, const CodecOptions& opts);
// Crop, +128, optional 8-bit rounding, inverse colour conversion.
FloatImage from_shifted_planes(const std::vector<Plane<double>>& planes, int width, int height, int channels,
                               const CodecOptions& opts);

void forward_transform(std::vector<Plane<double>>& planes, int block_size);
void inverse_transform(std::vector<Plane<double>>& planes, int block_size);

// Divisor plane for channel c of a padded coefficient plane.
Plane<double> divisors(const QuantTable& table, const CodecOptions& opts, int channel, Eigen::Index rows,
                       Eigen::Index cols);

// Unrounded quantized coefficients X^Q = DCT(X) / Q.
std::vector<Plane<double>> quantized_domain(const FloatImage& img, const QuantTable& table,
                                            const CodecOptions& opts);
// Inverse of quantized_domain for real-valued X^Q.
FloatImage from_quantized_domain(const std::vector<Plane<double>>& xq, const QuantTable& table, int width,
                                 int height, int channels, const CodecOptions& opts);

}  // namespace stage

}  // namespace jpegcons
