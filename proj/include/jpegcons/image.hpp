#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "jpegcons/error.hpp"

namespace jpegcons {

// Row-major single channel, rows = height.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-major raster with channels interleaved (1 = gray, 3 = RGB).
template <typename T>
struct Image {
  using Scalar = T;
  using Storage = Eigen::Array<T, Eigen::Dynamic, 1>;

  int width = 0;
  int height = 0;
  int channels = 0;
  Storage data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c), data(Storage::Zero(Index(w, h, c))) {
    if (w <= 0 || h <= 0) fail(ErrorKind::InvalidArgument, "image dimensions must be positive");
    if (c != 1 && c != 3) fail(ErrorKind::WrongChannelCount, "channels must be 1 or 3");
  }
  Image(int w, int h, int c, Storage values) : Image(w, h, c) {
    if (values.size() != data.size()) fail(ErrorKind::DimMismatch, "sample count does not match dimensions");
    data = std::move(values);
  }

  static Eigen::Index Index(int w, int h, int c) { return Eigen::Index(w) * h * c; }

  Eigen::Index pixel_count() const { return Eigen::Index(width) * height; }
  Eigen::Index size() const { return data.size(); }

  T& at(int x, int y, int c) { return data[(Eigen::Index(y) * width + x) * channels + c]; }
  T at(int x, int y, int c) const { return data[(Eigen::Index(y) * width + x) * channels + c]; }

  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  template <typename U>
  bool same_shape(const Image<U>& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  // Strided view of one channel as a height x width plane.
  auto channel(int c) const {
    using Map = Eigen::Map<const Plane<T>, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    return Map(data.data() + c, height, width,
               Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(Eigen::Index(width) * channels, channels));
  }
  auto channel(int c) {
    using Map = Eigen::Map<Plane<T>, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    return Map(data.data() + c, height, width,
               Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(Eigen::Index(width) * channels, channels));
  }

  bool operator==(const Image& o) const { return same_shape(o) && (data == o.data).all(); }
};

using PixelImage = Image<std::uint8_t>;
using FloatImage = Image<double>;

template <typename U, typename T>
void require_same_shape(const Image<U>& a, const Image<T>& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    fail(ErrorKind::DimMismatch, "image dimensions differ");
}

// Rounding for quantization and pixel output: ties go away from zero.
template <typename Scalar>
inline Scalar round_half_away(Scalar v) {
  return std::round(v);
}

template <typename Scalar = double>
Image<Scalar> to_float(const PixelImage& img) {
  Image<Scalar> out(img.width, img.height, img.channels);
  out.data = img.data.template cast<Scalar>();
  return out;
}

template <typename Scalar>
PixelImage to_pixels(const Image<Scalar>& img) {
  PixelImage out(img.width, img.height, img.channels);
  out.data = img.data.unaryExpr([](Scalar v) {
    return static_cast<std::uint8_t>(std::clamp<Scalar>(round_half_away(v), Scalar(0), Scalar(255)));
  });
  return out;
}

}  // namespace jpegcons
