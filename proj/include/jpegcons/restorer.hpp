#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jpegcons/losses.hpp"

namespace jpegcons {

// lambda_c moves from start to end over the run along half a cosine.
struct CosineSchedule {
  double start = 0.1;
  double end = 10.0;

  double at(int step, int steps) const;
};

// Smoothness prior weight used when none is given.
inline constexpr double kDefaultPriorWeight = 2.0;

struct RestoreConfig {
  LossWeights weights{1.0, 0.0, 0.0, 0.0, kDefaultPriorWeight};
  int steps = 100;
  double step_size = 0.1;
  int n_seeds = 1;
  std::uint64_t seed = 0;
  double init_noise_std = 4.0;
  double huber_eps = 0.1;
  QuantTable table = table_for_qf(50);
  CodecOptions opts;
  std::optional<CosineSchedule> lambda_c_schedule;

  static RestoreConfig for_quality(int qf);
  void validate() const;
};

// Ground truth and reference estimate for the FM, SM and P terms.
struct RestoreTargets {
  std::optional<FloatImage> x;
  std::optional<FloatImage> xbar;
  FeatureExtractor phi = band_energy_features();
};

struct PriorTerm {
  double value = 0.0;
  FloatImage grad;
};

// Isotropic total variation with Huber smoothing of the gradient magnitude,
// per channel, forward differences, normalized by the sample count.
PriorTerm huber_tv(const FloatImage& img, double eps);

struct RestoreRun {
  std::vector<FloatImage> outputs;
  // Total loss after every accepted step, per seed (or one row for a jointly
  // optimized batch).
  std::vector<std::vector<double>> loss_history;
  bool diverged = false;
};

// Gradient descent from y plus seeded noise. Seeds run independently unless
// the FM or SM weight couples them. A step that would raise the loss is
// halved until it does not.
RestoreRun restore_run(const PixelImage& y, const RestoreConfig& cfg, const RestoreTargets& targets = {});

// Checks that y is a decoded JPEG under cfg (consistency RMSE at most 1).
std::vector<PixelImage> restore(const PixelImage& y, const RestoreConfig& cfg, const RestoreTargets& targets = {});
// Starts from the decoded grid; table and options must match cfg.
std::vector<PixelImage> restore(const CoefficientGrid& grid, const RestoreConfig& cfg,
                                const RestoreTargets& targets = {});

std::vector<PixelImage> restore_project(const PixelImage& y, const RestoreConfig& cfg,
                                        const RestoreTargets& targets = {});
std::vector<PixelImage> restore_project(const CoefficientGrid& grid, const RestoreConfig& cfg,
                                        const RestoreTargets& targets = {});

struct SweepRow {
  double lambda_c = 0.0;
  double consistency_rmse = 0.0;
  double perceptual_proxy = 0.0;
  double psnr = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  static std::string csv_header();
  std::string csv() const;
};

// Restores every grid at each lambda_c (ascending, at least two) and reports
// mean consistency RMSE against the decoded grid, the proxy of all outputs
// against xs, and mean PSNR against the matching x. With project set the
// outputs are projected first.
SweepResult sweep_lambda_c(std::span<const CoefficientGrid> ys, std::span<const PixelImage> xs,
                           std::span<const double> lambdas, const RestoreConfig& cfg, bool project = false);

}  // namespace jpegcons
