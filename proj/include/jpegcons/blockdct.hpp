#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jpegcons/image.hpp"

namespace jpegcons {

template <typename Scalar, int N = 8>
using Block = Eigen::Matrix<Scalar, N, N, Eigen::RowMajor>;

// Orthonormal DCT-II basis: row i is frequency i.
template <typename Scalar, int N = 8>
const Eigen::Matrix<Scalar, N, N>& dct_matrix() {
  static const Eigen::Matrix<Scalar, N, N> c = [] {
    Eigen::Matrix<Scalar, N, N> m;
    for (int i = 0; i < N; ++i) {
      const Scalar scale = i == 0 ? std::sqrt(Scalar(1) / N) : std::sqrt(Scalar(2) / N);
      for (int j = 0; j < N; ++j)
        m(i, j) = scale * std::cos(Scalar((2 * j + 1) * i) * std::numbers::pi_v<Scalar> / Scalar(2 * N));
    }
    return m;
  }();
  return c;
}

template <typename Derived>
auto dct2(const Eigen::MatrixBase<Derived>& b) {
  using Scalar = typename Derived::Scalar;
  constexpr int N = Derived::RowsAtCompileTime;
  const auto& c = dct_matrix<Scalar, N>();
  return Block<Scalar, N>(c * b * c.transpose());
}

template <typename Derived>
auto idct2(const Eigen::MatrixBase<Derived>& d) {
  using Scalar = typename Derived::Scalar;
  constexpr int N = Derived::RowsAtCompileTime;
  const auto& c = dct_matrix<Scalar, N>();
  return Block<Scalar, N>(c.transpose() * d * c);
}

inline int padded_extent(int n, int block) { return (n + block - 1) / block * block; }

// Edge-replicate padding up to a multiple of `block` in each direction.
template <typename Scalar>
Plane<Scalar> pad_edge(const Plane<Scalar>& p, int block) {
  const Eigen::Index h = p.rows(), w = p.cols();
  const Eigen::Index ph = padded_extent(int(h), block), pw = padded_extent(int(w), block);
  if (ph == h && pw == w) return p;
  Plane<Scalar> out(ph, pw);
  out.topLeftCorner(h, w) = p;
  for (Eigen::Index x = w; x < pw; ++x) out.col(x).head(h) = p.col(w - 1);
  for (Eigen::Index y = h; y < ph; ++y) out.row(y) = out.row(h - 1);
  return out;
}

// Adjoint of pad_edge: padded samples fold back onto the edge they copy.
template <typename Scalar>
Plane<Scalar> pad_edge_adjoint(const Plane<Scalar>& g, int width, int height) {
  Plane<Scalar> rows = g.topRows(height);
  for (Eigen::Index y = height; y < g.rows(); ++y) rows.row(height - 1) += g.row(y);
  Plane<Scalar> out = rows.leftCols(width);
  for (Eigen::Index x = width; x < g.cols(); ++x) out.col(width - 1) += rows.col(x);
  return out;
}

template <typename Scalar>
std::vector<Block<Scalar>> split_blocks(const Plane<Scalar>& plane, bool pad = false) {
  if (!pad && (plane.rows() % 8 != 0 || plane.cols() % 8 != 0))
    fail(ErrorKind::NonMultipleOf8WithoutPadFlag, "plane is not a multiple of 8 and padding is off");
  const Plane<Scalar> padded = pad_edge(plane, 8);
  std::vector<Block<Scalar>> blocks;
  blocks.reserve(padded.size() / 64);
  for (Eigen::Index by = 0; by < padded.rows(); by += 8)
    for (Eigen::Index bx = 0; bx < padded.cols(); bx += 8)
      blocks.emplace_back(padded.template block<8, 8>(by, bx).matrix());
  return blocks;
}

// Inverse of split_blocks; crops to width x height.
template <typename Scalar>
Plane<Scalar> merge_blocks(std::span<const Block<Scalar>> blocks, int width, int height) {
  const int pw = padded_extent(width, 8), ph = padded_extent(height, 8);
  if (blocks.size() != std::size_t(pw / 8) * std::size_t(ph / 8))
    fail(ErrorKind::DimMismatch, "block count does not match plane dimensions");
  Plane<Scalar> padded(ph, pw);
  std::size_t i = 0;
  for (int by = 0; by < ph; by += 8)
    for (int bx = 0; bx < pw; bx += 8) padded.template block<8, 8>(by, bx) = blocks[i++].array();
  return padded.topLeftCorner(height, width);
}

// Applies the block transform in place to every tile of an already padded
// plane. Block size 1 is the identity transform.
template <typename Scalar>
void transform_blocks(Plane<Scalar>& padded, int block_size, bool inverse) {
  if (block_size == 1) return;
  for (Eigen::Index by = 0; by < padded.rows(); by += 8) {
    for (Eigen::Index bx = 0; bx < padded.cols(); bx += 8) {
      auto tile = padded.template block<8, 8>(by, bx);
      const Block<Scalar> b = tile.matrix();
      tile = (inverse ? idct2(b) : dct2(b)).array();
    }
  }
}

}  // namespace jpegcons
