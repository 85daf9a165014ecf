#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jpegcons/codec.hpp"
#include "support/fixtures.hpp"

namespace jpegcons {
namespace {

double rmse(const PixelImage& a, const PixelImage& b) {
  return std::sqrt((a.data.cast<double>() - b.data.cast<double>()).square().mean());
}

TEST(Codec, MidGrayCompressesToZeroGrid) {
  PixelImage gray(24, 16, 3);
  gray.data.setConstant(128);
  for (int qf : {1, 50, 100}) {
    const CoefficientGrid g = compress(gray, qf);
    for (const auto& p : g.channels) EXPECT_EQ(p.cwiseAbs().maxCoeff(), 0);
    EXPECT_EQ(jpeg_q(gray, qf), gray);
  }
}

TEST(Codec, ZeroGridDecodesToMidGray) {
  CoefficientGrid g;
  g.width = 8;
  g.height = 8;
  g.table = table_for_qf(50);
  g.channels.assign(3, Plane<int>::Zero(8, 8));
  const PixelImage img = decompress(g);
  EXPECT_TRUE((img.data == 128).all());
  EXPECT_EQ(decompress(g), img);
}

TEST(Codec, GridShape) {
  std::mt19937_64 rng(1);
  const CoefficientGrid g = compress(testing::random_image(rng, 21, 9, 3), 50);
  EXPECT_EQ(g.blocks_x(), 3);
  EXPECT_EQ(g.blocks_y(), 2);
  EXPECT_EQ(g.channels[0].cols(), 24);
  EXPECT_EQ(g.channels[0].rows(), 16);
  const PixelImage back = decompress(g);
  EXPECT_EQ(back.width, 21);
  EXPECT_EQ(back.height, 9);
}

// One white pixel on black in an 8x8 gray image: DC from a scalar evaluation.
TEST(Codec, SingleBlockDcMatchesScalarOracle) {
  PixelImage img(8, 8, 1);
  img.at(3, 5, 0) = 255;
  double sum = 0;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) sum += (x == 3 && y == 5 ? 255.0 : 0.0) - 128.0;
  const double dc = sum / 8.0;  // (1/sqrt 8)^2 * sum
  for (int qf : {10, 50, 90}) {
    const CoefficientGrid g = compress(img, qf);
    const double q = table_for_qf(qf).luma(0, 0);
    EXPECT_EQ(g.channels[0](0, 0), int(std::round(dc / q))) << qf;
    // AC (0,1) by its own cosine sum.
    double ac = 0;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        ac += ((x == 3 && y == 5 ? 255.0 : 0.0) - 128.0) * std::sqrt(1.0 / 8) * 0.5 *
              std::cos((2 * x + 1) * std::numbers::pi / 16);
    EXPECT_EQ(g.channels[0](0, 1), int(std::round(ac / table_for_qf(qf).luma(0, 1)))) << qf;
  }
}

TEST(Codec, FloatDecodeIsALatticeFixedPoint) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    for (int qf : {5, 50, 95}) {
      for (ColorPath color : {ColorPath::ycbcr, ColorPath::rgb_passthrough}) {
        CodecOptions opts;
        opts.color = color;
        const CoefficientGrid g = compress(testing::random_image(rng, 32, 24, 3), qf, opts);
        EXPECT_EQ(compress(decompress_float(g), g.table, opts), g);
      }
    }
  }
}

TEST(Codec, LosslessWithBlockSizeOnePassthrough) {
  CodecOptions opts;
  opts.color = ColorPath::rgb_passthrough;
  opts.block_size = 1;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const PixelImage x = testing::noise_image(rng, 16, 8, 3);
    EXPECT_EQ(jpeg_q(x, 100, opts), x);
  }
}

// With 8x8 blocks, rounding the DCT coefficients themselves loses
// information even at qf 100; only the 1x1 transform is exactly lossless.
TEST(Codec, EightByEightAtQf100IsNearlyButNotExactlyLossless) {
  CodecOptions opts;
  opts.color = ColorPath::rgb_passthrough;
  const auto images = testing::natural_fixtures();
  double total = 0;
  for (const auto& x : images) total += rmse(jpeg_q(x, 100, opts), x);
  EXPECT_GT(total, 0.0);
  EXPECT_LT(total / double(images.size()), 0.5);
}

// Per image, the bound holds when the float decode stays (almost) inside
// [0, 255]; clamping saturated regions can push single coefficients across a
// cell boundary, which at low qf costs more than a gray level.
TEST(Codec, RecompressionIsNearlyIdempotent) {
  const auto images = testing::natural_fixtures();
  for (int qf : {5, 10, 50, 95}) {
    double sum = 0;
    for (const auto& x : images) {
      const CoefficientGrid g = compress(x, qf);
      const FloatImage yf = decompress_float(g);
      const PixelImage y = to_pixels(yf);
      const double r = rmse(jpeg_q(y, qf), y);
      const double clamped = ((yf.data < -0.5) || (yf.data > 255.5)).cast<double>().mean();
      if (clamped < 0.01) EXPECT_LE(r, 1.0) << "qf " << qf;
      sum += r;
    }
    EXPECT_LE(sum / double(images.size()), 1.0) << "qf " << qf;
  }
}

TEST(Codec, GrayImagesUseTheLumaTable) {
  std::mt19937_64 rng(4);
  const PixelImage x = testing::random_image(rng, 16, 16, 1);
  const CoefficientGrid g = compress(x, 30);
  EXPECT_EQ(g.channel_count(), 1);
  EXPECT_EQ(decompress(g).channels, 1);
  EXPECT_EQ(compress(decompress_float(g), g.table), g);
}

TEST(Codec, OptionErrors) {
  PixelImage x(10, 10, 3);
  CodecOptions nopad;
  nopad.pad = false;
  try {
    compress(x, 50, nopad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonMultipleOf8WithoutPadFlag);
  }
  try {
    compress(x, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::QfOutOfRange);
  }
  CodecOptions bad;
  bad.block_size = 4;
  EXPECT_THROW(compress(x, 50, bad), Error);
}

TEST(Sidecar, RoundTripsAndValidates) {
  std::mt19937_64 rng(5);
  for (int block : {1, 8}) {
    CodecOptions opts;
    opts.block_size = block;
    const CoefficientGrid g = compress(testing::random_image(rng, 19, 11, 3), 40, opts);
    const auto bytes = write_sidecar(g);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CGRD");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(read_sidecar(bytes), g);
    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(read_sidecar(truncated), Error);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(read_sidecar(bad_magic), Error);
  }
  CoefficientGrid custom = compress(testing::random_image(rng, 8, 8, 1), 50);
  custom.table.luma(0, 0) = 3;
  custom.table.quality_factor.reset();
  EXPECT_EQ(read_sidecar(write_sidecar(custom)), custom);
}

}  // namespace
}  // namespace jpegcons
