#include "jpegcons/losses.hpp"

#include <cmath>

#include "jpegcons/diffjpeg.hpp"

namespace jpegcons {

void LossWeights::validate() const {
  for (double w : {lambda_c, lambda_fm, lambda_p, lambda_sm, lambda_prior})
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::InvalidArgument, "loss weights must be finite and >= 0");
}

namespace {

FloatImage zeros_like(const FloatImage& img) {
  FloatImage z(img.width, img.height, img.channels);
  z.data.setZero();
  return z;
}

const FloatImage& require_x(const SampleBatch& batch) {
  if (!batch.x) fail(ErrorKind::MissingGroundTruth, "loss needs the ground truth x");
  return *batch.x;
}

}  // namespace

LossTerm loss_c_term(const SampleBatch& batch, const QuantTable& table, const CodecOptions& opts) {
  batch.validate();
  const FloatImage y = to_float(batch.y);
  const DiffJpegOp op = DiffJpegOp::for_image(y, table, opts);
  const double n = double(y.size()), k = double(batch.size());
  LossTerm t;
  for (const auto& s : batch.samples) {
    auto [out, vjp] = forward(op, s);
    out.data -= y.data;
    t.value += out.data.square().sum() / n / k;
    out.data *= 2.0 / n / k;
    t.grads.push_back(apply_vjp(vjp, out));
  }
  return t;
}

double loss_c(const SampleBatch& batch, const QuantTable& table, const CodecOptions& opts) {
  return loss_c_term(batch, table, opts).value;
}

double loss_c(const SampleBatch& batch, int qf, const CodecOptions& opts) {
  return loss_c(batch, table_for_qf(qf), opts);
}

LossTerm loss_fm_term(const SampleBatch& batch) {
  batch.validate();
  const FloatImage& x = require_x(batch);
  const double n = double(x.size()), k = double(batch.size());
  Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(x.size());
  for (const auto& s : batch.samples) mean += s.data;
  mean /= k;
  const Eigen::ArrayXd diff = mean - x.data;
  LossTerm t;
  t.value = diff.square().sum() / n;
  FloatImage g = zeros_like(x);
  g.data = 2.0 * diff / n / k;
  t.grads.assign(batch.size(), g);
  return t;
}

double loss_fm(const SampleBatch& batch) { return loss_fm_term(batch).value; }

LossTerm loss_sm_term(const SampleBatch& batch, bool unbiased) {
  batch.validate();
  const FloatImage& x = require_x(batch);
  if (!batch.xbar) fail(ErrorKind::MissingReference, "second-moment loss needs the reference estimate xbar");
  if (batch.size() < 2) fail(ErrorKind::TooFewSamples, "second-moment loss needs at least two samples");
  const double n = double(x.size()), k = double(batch.size());
  const double denom = unbiased ? k - 1 : k;

  Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(x.size());
  for (const auto& s : batch.samples) mean += s.data;
  mean /= k;
  Eigen::ArrayXd var = Eigen::ArrayXd::Zero(x.size());
  for (const auto& s : batch.samples) var += (s.data - mean).square();
  var /= denom;

  const Eigen::ArrayXd target = (x.data - batch.xbar->data).square();
  const Eigen::ArrayXd gap = var - target;
  LossTerm t;
  t.value = gap.abs().sum() / n;
  const Eigen::ArrayXd sign = gap.sign();
  for (const auto& s : batch.samples) {
    FloatImage g = zeros_like(x);
    g.data = sign * 2.0 * (s.data - mean) / denom / n;
    t.grads.push_back(std::move(g));
  }
  return t;
}

double loss_sm(const SampleBatch& batch, bool unbiased) { return loss_sm_term(batch, unbiased).value; }

namespace {

const std::array<int, 64>& band_of() {
  static const std::array<int, 64> bands = [] {
    std::array<int, 64> b{};
    for (int u = 0; u < 8; ++u)
      for (int v = 0; v < 8; ++v) {
        const double r = std::sqrt(double(u * u + v * v));
        b[8 * u + v] = r == 0 ? 0 : r <= 3 ? 1 : r <= 6 ? 2 : 3;
      }
    return b;
  }();
  return bands;
}

std::vector<Block<double>> luma_coefficients(const FloatImage& img) {
  auto blocks = split_blocks(pad_edge<double>(luma(img) - 128.0, 8));
  for (auto& b : blocks) b = dct2(b);
  return blocks;
}

}  // namespace

Eigen::VectorXd band_energy(const FloatImage& img) {
  const auto blocks = luma_coefficients(img);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(4 * blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (int k = 0; k < 64; ++k) f(Eigen::Index(4 * i + band_of()[k])) += blocks[i](k / 8, k % 8) * blocks[i](k / 8, k % 8);
  }
  return f.cwiseSqrt() / 8.0;
}

FloatImage band_energy_vjp(const FloatImage& img, const Eigen::VectorXd& cotangent) {
  const auto blocks = luma_coefficients(img);
  if (cotangent.size() != Eigen::Index(4 * blocks.size())) fail(ErrorKind::DimMismatch, "cotangent size");
  const Eigen::VectorXd f = band_energy(img);
  const int bx = padded_extent(img.width, 8) / 8;
  Plane<double> g = Plane<double>::Zero(padded_extent(img.height, 8), padded_extent(img.width, 8));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Block<double> gc;
    for (int k = 0; k < 64; ++k) {
      const Eigen::Index j = Eigen::Index(4 * i + band_of()[k]);
      gc(k / 8, k % 8) = f(j) > 0 ? cotangent(j) * blocks[i](k / 8, k % 8) / (64.0 * f(j)) : 0.0;
    }
    g.block<8, 8>(8 * (int(i) / bx), 8 * (int(i) % bx)) = idct2(gc).array();
  }
  const Plane<double> gl = pad_edge_adjoint(g, img.width, img.height);
  FloatImage out(img.width, img.height, img.channels);
  if (img.channels == 1) {
    out.channel(0) = gl;
  } else {
    const auto& m = rgb_to_ycbcr_matrix<double>();
    for (int c = 0; c < 3; ++c) out.channel(c) = m(0, c) * gl;
  }
  return out;
}

FeatureExtractor band_energy_features() { return {band_energy, band_energy_vjp}; }

LossTerm loss_p_term(const SampleBatch& batch, const FeatureExtractor& phi) {
  batch.validate();
  const FloatImage& x = require_x(batch);
  const Eigen::VectorXd fx = phi.features(x);
  const double k = double(batch.size()), m = double(fx.size());
  LossTerm t;
  for (const auto& s : batch.samples) {
    const Eigen::VectorXd diff = phi.features(s) - fx;
    if (diff.size() != fx.size()) fail(ErrorKind::DimMismatch, "feature sizes differ");
    t.value += diff.squaredNorm() / m / k;
    if (phi.vjp) t.grads.push_back(phi.vjp(s, 2.0 * diff / m / k));
  }
  return t;
}

double loss_p(const SampleBatch& batch, const FeatureExtractor& phi) { return loss_p_term(batch, phi).value; }

}  // namespace jpegcons
