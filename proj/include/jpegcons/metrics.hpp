#pragma once

#include <span>
#include <string>

#include "jpegcons/batch.hpp"
#include "jpegcons/codec.hpp"

namespace jpegcons {

// RMSE in gray levels between y and jpeg_q(xhat).
double consistency_rmse(const PixelImage& xhat, const PixelImage& y, const QuantTable& table,
                        const CodecOptions& opts = {});
double consistency_rmse(const PixelImage& xhat, const PixelImage& y, int qf, const CodecOptions& opts = {});

double rmse(const PixelImage& a, const PixelImage& b);
// +inf when the images are identical.
double psnr(const PixelImage& a, const PixelImage& b);

// 64 means followed by 64 log-variances of the luma DCT coefficients, one
// entry per position, over all 8x8 blocks of the image.
inline constexpr double kLogVarianceFloor = 1e-6;
Eigen::VectorXd dct_statistics(const PixelImage& img);

struct FrechetResult {
  double distance = 0.0;
  // True when a covariance was singular and both got 1e-6 I added.
  bool regularized = false;
};

FrechetResult frechet_distance(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1,
                               const Eigen::VectorXd& mu2, const Eigen::MatrixXd& sigma2);
FrechetResult perceptual_proxy(std::span<const PixelImage> set_a, std::span<const PixelImage> set_b);

// Per-pixel sample standard deviation over the batch (n - 1 normalization),
// optionally passed through a 4th root for display.
FloatImage std_map(const SampleBatch& batch, bool fourth_root = false);
// Mean of a std map scaled by 1/255.
double per_pixel_std(const FloatImage& map);

struct MetricReport {
  std::string name;
  int qf = 0;
  double consistency_rmse = 0.0;
  double psnr = 0.0;
  double perceptual_proxy = 0.0;
  int n_samples = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

}  // namespace jpegcons
