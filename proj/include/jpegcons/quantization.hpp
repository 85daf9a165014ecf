#pragma once

#include <array>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "jpegcons/blockdct.hpp"

namespace jpegcons {

using IntBlock = Eigen::Matrix<int, 8, 8, Eigen::RowMajor>;
using TableMatrix = Eigen::Matrix<int, 8, 8, Eigen::RowMajor>;

struct QuantTable {
  TableMatrix luma;
  TableMatrix chroma;
  std::optional<int> quality_factor;  // empty for custom tables

  bool operator==(const QuantTable& o) const {
    return luma == o.luma && chroma == o.chroma && quality_factor == o.quality_factor;
  }
  // Entry range [1, 255]; throws InvalidArgument otherwise.
  void validate() const;
};

const TableMatrix& annex_k_luma();
const TableMatrix& annex_k_chroma();

// libjpeg quality scaling of the Annex K base tables, entries clamped to [1, 255].
QuantTable table_for_qf(int qf);

// First quality factor in 1..100 that reproduces both tables, if any.
std::optional<int> match_quality_factor(const TableMatrix& luma, const TableMatrix& chroma);

// zigzag[k] = natural (row-major) index of the k-th coefficient in scan order.
const std::array<int, 64>& zigzag_order();

template <typename Derived>
IntBlock quantize(const Eigen::MatrixBase<Derived>& d, const TableMatrix& q) {
  return (d.array() / q.array().template cast<typename Derived::Scalar>())
      .unaryExpr([](auto v) { return int(round_half_away(v)); })
      .matrix();
}

template <typename Scalar = double>
Block<Scalar> dequantize(const IntBlock& r, const TableMatrix& q) {
  return (r.array() * q.array()).template cast<Scalar>().matrix();
}

// Per-sample divisor plane for a padded coefficient plane. With block size 1
// every sample uses the table's DC entry.
template <typename Scalar>
Plane<Scalar> tile_table(const TableMatrix& q, Eigen::Index rows, Eigen::Index cols, int block_size) {
  if (block_size == 1) return Plane<Scalar>::Constant(rows, cols, Scalar(q(0, 0)));
  return q.cast<Scalar>().array().replicate(rows / 8, cols / 8);
}

// Two lines of 64 zigzag-ordered integers: luma then chroma.
std::string format_tables(const QuantTable& t);
QuantTable parse_tables(const std::string& text);

}  // namespace jpegcons
