#pragma once

#include <array>

#include <Eigen/Dense>

#include "jpegcons/image.hpp"

namespace jpegcons {

// Full-range JFIF YCbCr, three full-resolution planes.
template <typename Scalar>
struct YCbCrImage {
  int width = 0;
  int height = 0;
  std::array<Plane<Scalar>, 3> planes;  // Y', Cb, Cr
};

template <typename Scalar>
const Eigen::Matrix<Scalar, 3, 3>& rgb_to_ycbcr_matrix() {
  static const Eigen::Matrix<Scalar, 3, 3> m = (Eigen::Matrix<Scalar, 3, 3>() <<
      Scalar(0.299), Scalar(0.587), Scalar(0.114),
      Scalar(-0.168736), Scalar(-0.331264), Scalar(0.5),
      Scalar(0.5), Scalar(-0.418688), Scalar(-0.081312)).finished();
  return m;
}

// Exact inverse of the forward matrix rather than the rounded 1.402/1.772
// textbook constants, so the float round trip closes to machine precision.
template <typename Scalar>
const Eigen::Matrix<Scalar, 3, 3>& ycbcr_to_rgb_matrix() {
  static const Eigen::Matrix<Scalar, 3, 3> m = rgb_to_ycbcr_matrix<Scalar>().inverse();
  return m;
}

template <typename Scalar>
YCbCrImage<Scalar> rgb_to_ycbcr(const Image<Scalar>& rgb) {
  if (rgb.channels != 3) fail(ErrorKind::WrongChannelCount, "rgb_to_ycbcr needs 3 channels");
  const auto& m = rgb_to_ycbcr_matrix<Scalar>();
  YCbCrImage<Scalar> out{rgb.width, rgb.height, {}};
  const Scalar offset[3] = {Scalar(0), Scalar(128), Scalar(128)};
  for (int k = 0; k < 3; ++k) {
    out.planes[k] = m(k, 0) * rgb.channel(0) + m(k, 1) * rgb.channel(1) + m(k, 2) * rgb.channel(2) + offset[k];
  }
  return out;
}

template <typename Scalar>
Image<Scalar> ycbcr_to_rgb(const YCbCrImage<Scalar>& ycc) {
  const auto& m = ycbcr_to_rgb_matrix<Scalar>();
  Image<Scalar> out(ycc.width, ycc.height, 3);
  const Plane<Scalar> cb = ycc.planes[1] - Scalar(128);
  const Plane<Scalar> cr = ycc.planes[2] - Scalar(128);
  for (int k = 0; k < 3; ++k) {
    out.channel(k) = m(k, 0) * ycc.planes[0] + m(k, 1) * cb + m(k, 2) * cr;
  }
  return out;
}

// Transpose of the forward map's linear part; used by gradient code.
template <typename Scalar>
Image<Scalar> rgb_to_ycbcr_adjoint(const YCbCrImage<Scalar>& g) {
  const auto& m = rgb_to_ycbcr_matrix<Scalar>();
  Image<Scalar> out(g.width, g.height, 3);
  for (int k = 0; k < 3; ++k) {
    out.channel(k) = m(0, k) * g.planes[0] + m(1, k) * g.planes[1] + m(2, k) * g.planes[2];
  }
  return out;
}

template <typename Scalar>
YCbCrImage<Scalar> ycbcr_to_rgb_adjoint(const Image<Scalar>& g) {
  const auto& m = ycbcr_to_rgb_matrix<Scalar>();
  YCbCrImage<Scalar> out{g.width, g.height, {}};
  for (int k = 0; k < 3; ++k) {
    out.planes[k] = m(0, k) * g.channel(0) + m(1, k) * g.channel(1) + m(2, k) * g.channel(2);
  }
  return out;
}

// Luma plane of an RGB or gray image.
template <typename Scalar>
Plane<Scalar> luma(const Image<Scalar>& img) {
  if (img.channels == 1) return img.channel(0);
  const auto& m = rgb_to_ycbcr_matrix<Scalar>();
  return m(0, 0) * img.channel(0) + m(0, 1) * img.channel(1) + m(0, 2) * img.channel(2);
}

}  // namespace jpegcons
