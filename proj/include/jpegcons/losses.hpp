#pragma once

#include <functional>

#include "jpegcons/batch.hpp"
#include "jpegcons/codec.hpp"

namespace jpegcons {

struct LossWeights {
  double lambda_c = 0.0;
  double lambda_fm = 0.0;
  double lambda_p = 0.0;
  double lambda_sm = 0.0;
  double lambda_prior = 0.0;

  void validate() const;
};

// Value of a batch loss and its gradient with respect to each sample.
struct LossTerm {
  double value = 0.0;
  std::vector<FloatImage> grads;
};

// All losses are normalized by the number of samples per image
// (width * height * channels).

// Mean over samples of |y - jpeg_q(xhat_k)|^2, jpeg_q from the differentiable
// operator; the gradient is straight-through.
double loss_c(const SampleBatch& batch, const QuantTable& table, const CodecOptions& opts = {});
double loss_c(const SampleBatch& batch, int qf, const CodecOptions& opts = {});
LossTerm loss_c_term(const SampleBatch& batch, const QuantTable& table, const CodecOptions& opts = {});

// |x - mean_k xhat_k|^2.
double loss_fm(const SampleBatch& batch);
LossTerm loss_fm_term(const SampleBatch& batch);

// Mean over pixels of |(x - xbar)^2 - var_k(xhat_k)|, population variance
// unless unbiased is set.
double loss_sm(const SampleBatch& batch, bool unbiased = false);
LossTerm loss_sm_term(const SampleBatch& batch, bool unbiased = false);

// Feature map with an optional vector-Jacobian product. Without one the
// loss has a value but no gradient.
struct FeatureExtractor {
  std::function<Eigen::VectorXd(const FloatImage&)> features;
  std::function<FloatImage(const FloatImage&, const Eigen::VectorXd&)> vjp;
};

// Per 8x8 luma block, the DCT coefficient energy in four radial bands
// (r = 0, 0 < r <= 3, 3 < r <= 6, r > 6 with r = |(u, v)|), each reported as
// sqrt(sum c^2) / 8. The DC band is |block mean - 128|.
Eigen::VectorXd band_energy(const FloatImage& img);
FloatImage band_energy_vjp(const FloatImage& img, const Eigen::VectorXd& cotangent);
FeatureExtractor band_energy_features();

// Mean over samples of |phi(x) - phi(xhat_k)|^2 / feature count.
double loss_p(const SampleBatch& batch, const FeatureExtractor& phi = band_energy_features());
LossTerm loss_p_term(const SampleBatch& batch, const FeatureExtractor& phi = band_energy_features());

}  // namespace jpegcons
