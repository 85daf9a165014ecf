#include "jpegcons/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace jpegcons {

double rmse(const PixelImage& a, const PixelImage& b) {
  require_same_shape(a, b);
  return std::sqrt((a.data.cast<double>() - b.data.cast<double>()).square().mean());
}

double psnr(const PixelImage& a, const PixelImage& b) {
  require_same_shape(a, b);
  const double mse = (a.data.cast<double>() - b.data.cast<double>()).square().mean();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double consistency_rmse(const PixelImage& xhat, const PixelImage& y, const QuantTable& table,
                        const CodecOptions& opts) {
  require_same_shape(xhat, y);
  return rmse(y, jpeg_q(xhat, table, opts));
}

double consistency_rmse(const PixelImage& xhat, const PixelImage& y, int qf, const CodecOptions& opts) {
  return consistency_rmse(xhat, y, table_for_qf(qf), opts);
}

Eigen::VectorXd dct_statistics(const PixelImage& img) {
  const Plane<double> y = pad_edge<double>(luma(to_float(img)) - 128.0, 8);
  const auto blocks = split_blocks(y);
  Eigen::Array<double, 64, 1> sum = Eigen::Array<double, 64, 1>::Zero(), sq = sum;
  for (const auto& b : blocks) {
    const Block<double> d = dct2(b);
    const Eigen::Map<const Eigen::Array<double, 64, 1>> flat(d.data());
    sum += flat;
    sq += flat.square();
  }
  const double n = double(blocks.size());
  const Eigen::Array<double, 64, 1> mean = sum / n;
  const Eigen::Array<double, 64, 1> var = (sq / n - mean.square()).max(0.0);
  Eigen::VectorXd f(128);
  f.head<64>() = mean.matrix();
  f.tail<64>() = (var + kLogVarianceFloor).log().matrix();
  return f;
}

namespace {

bool singular(const Eigen::MatrixXd& s) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff());
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

Gaussian fit(std::span<const PixelImage> set) {
  if (set.empty()) fail(ErrorKind::EmptySet, "perceptual proxy needs a nonempty set");
  Eigen::MatrixXd f(Eigen::Index(set.size()), 128);
  for (std::size_t i = 0; i < set.size(); ++i) f.row(Eigen::Index(i)) = dct_statistics(set[i]).transpose();
  Gaussian g;
  g.mean = f.colwise().mean().transpose();
  const Eigen::MatrixXd centered = f.rowwise() - g.mean.transpose();
  g.cov = set.size() > 1 ? Eigen::MatrixXd(centered.transpose() * centered / double(set.size() - 1))
                         : Eigen::MatrixXd::Zero(128, 128);
  return g;
}

}  // namespace

FrechetResult frechet_distance(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1,
                               const Eigen::VectorXd& mu2, const Eigen::MatrixXd& sigma2) {
  if (mu1.size() != mu2.size() || sigma1.rows() != mu1.size() || sigma2.rows() != mu2.size())
    fail(ErrorKind::DimMismatch, "Gaussian dimensions differ");
  FrechetResult r;
  Eigen::MatrixXd s1 = sigma1, s2 = sigma2;
  if (singular(s1) || singular(s2)) {
    const auto eye = Eigen::MatrixXd::Identity(s1.rows(), s1.cols());
    s1 += 1e-6 * eye;
    s2 += 1e-6 * eye;
    r.regularized = true;
  }
  const Eigen::MatrixXd root1 = psd_sqrt(s1);
  const Eigen::MatrixXd m = root1 * s2 * root1;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  r.distance = std::max(0.0, (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross);
  return r;
}

FrechetResult perceptual_proxy(std::span<const PixelImage> set_a, std::span<const PixelImage> set_b) {
  const Gaussian a = fit(set_a), b = fit(set_b);
  return frechet_distance(a.mean, a.cov, b.mean, b.cov);
}

FloatImage std_map(const SampleBatch& batch, bool fourth_root) {
  batch.validate();
  const std::size_t k = batch.size();
  if (k < 2) fail(ErrorKind::TooFewSamples, "standard deviation needs at least two samples");
  // Deviations from the first sample keep identical samples exactly zero.
  const Eigen::ArrayXd& ref = batch.samples[0].data;
  Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(ref.size());
  for (const auto& s : batch.samples) mean += s.data - ref;
  mean /= double(k);
  Eigen::ArrayXd ss = Eigen::ArrayXd::Zero(ref.size());
  for (const auto& s : batch.samples) ss += (s.data - ref - mean).square();
  FloatImage out(batch.y.width, batch.y.height, batch.y.channels);
  out.data = (ss / double(k - 1)).sqrt();
  if (fourth_root) out.data = out.data.sqrt().sqrt();
  return out;
}

double per_pixel_std(const FloatImage& map) { return map.data.mean() / 255.0; }

std::string MetricReport::csv_header() { return "name,qf,consistency_rmse,psnr,perceptual_proxy,n"; }

std::string MetricReport::csv_row() const {
  std::ostringstream out;
  out.precision(10);
  out << name << ',' << qf << ',' << consistency_rmse << ',';
  if (std::isinf(psnr)) out << "inf";
  else out << psnr;
  out << ',' << perceptual_proxy << ',' << n_samples;
  return out.str();
}

}  // namespace jpegcons
