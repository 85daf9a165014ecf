#pragma once

#include <span>
#include <string>
#include <vector>

#include "jpegcons/codec.hpp"

namespace jpegcons {

// How far "lossless" JPEG (all-ones table) is from the identity along each
// colour path.
struct NumericsRow {
  std::string path;
  double rmse = 0.0;
  int n_images = 0;
};

struct NumericsTable {
  std::vector<NumericsRow> rows;

  const NumericsRow& row(const std::string& path) const;
  static std::string csv_header();
  std::string csv() const;
};

// Rows are ycbcr-rounded, ycbcr-float and rgb-passthrough, each the mean
// per-image RMSE(x, jpeg_q(x)) at qf 100.
NumericsTable run_numerics_study(std::span<const PixelImage> images, int block_size = 1);

}  // namespace jpegcons
