#include "jpegcons/restorer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "jpegcons/diffjpeg.hpp"
#include "jpegcons/metrics.hpp"
#include "jpegcons/projection.hpp"

namespace jpegcons {

double CosineSchedule::at(int step, int steps) const {
  const double t = steps > 1 ? double(step) / (steps - 1) : 1.0;
  return end + (start - end) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

RestoreConfig RestoreConfig::for_quality(int qf) {
  RestoreConfig cfg;
  cfg.table = table_for_qf(qf);
  return cfg;
}

void RestoreConfig::validate() const {
  weights.validate();
  if (steps < 1) fail(ErrorKind::InvalidArgument, "steps must be at least 1");
  if (!(step_size > 0) || !std::isfinite(step_size)) fail(ErrorKind::InvalidArgument, "step size must be positive");
  if (n_seeds < 1) fail(ErrorKind::InvalidArgument, "need at least one seed");
  if (!(init_noise_std >= 0)) fail(ErrorKind::InvalidArgument, "noise std must be >= 0");
  if (!(huber_eps > 0)) fail(ErrorKind::InvalidArgument, "Huber epsilon must be positive");
  if (lambda_c_schedule && (lambda_c_schedule->start < 0 || lambda_c_schedule->end < 0))
    fail(ErrorKind::InvalidArgument, "schedule weights must be >= 0");
  table.validate();
  opts.validate();
}

PriorTerm huber_tv(const FloatImage& img, double eps) {
  const double n = double(img.size());
  PriorTerm t{0.0, FloatImage(img.width, img.height, img.channels)};
  t.grad.data.setZero();
  for (int c = 0; c < img.channels; ++c) {
    const Plane<double> p = img.channel(c);
    Plane<double> dx = Plane<double>::Zero(p.rows(), p.cols()), dy = dx;
    dx.leftCols(p.cols() - 1) = p.rightCols(p.cols() - 1) - p.leftCols(p.cols() - 1);
    dy.topRows(p.rows() - 1) = p.bottomRows(p.rows() - 1) - p.topRows(p.rows() - 1);
    const Plane<double> s = (dx.square() + dy.square()).sqrt();
    t.value += (s <= eps).select(s.square() / (2 * eps), s - eps / 2).sum() / n;
    // d h / d(dx) = w dx with w = 1/eps inside the quadratic zone, 1/s outside.
    const Plane<double> w = (s <= eps).select(Plane<double>::Constant(s.rows(), s.cols(), 1.0 / eps), 1.0 / s);
    const Plane<double> gx = w * dx / n, gy = w * dy / n;
    Plane<double> g = -gx - gy;
    g.rightCols(p.cols() - 1) += gx.leftCols(p.cols() - 1);
    g.bottomRows(p.rows() - 1) += gy.topRows(p.rows() - 1);
    t.grad.channel(c) = g;
  }
  return t;
}

namespace {

struct Objective {
  const PixelImage& y;
  const RestoreConfig& cfg;
  const RestoreTargets& targets;

  // ||jpeg_Q(x) - y||^2 with jpeg_Q applied to the pixel image the sample
  // would be saved as. Both 8-bit roundings and the coefficient rounding are
  // passed straight through in the backward pass.
  LossTerm consistency(const SampleBatch& batch) const {
    const FloatImage yf = to_float(y);
    const DiffJpegOp op = DiffJpegOp::for_image(yf, cfg.table, cfg.opts);
    const double n = double(yf.size()), k = double(batch.size());
    LossTerm t;
    for (const auto& s : batch.samples) {
      auto [out, vjp] = forward(op, to_float(to_pixels(s)));
      out.data = to_float(to_pixels(out)).data - yf.data;
      t.value += out.data.square().sum() / n / k;
      out.data *= 2.0 / n / k;
      t.grads.push_back(apply_vjp(vjp, out));
    }
    return t;
  }

  // Loss of a batch and, when grads is non-null, its gradient per sample.
  double operator()(const std::vector<FloatImage>& samples, double lambda_c,
                    std::vector<FloatImage>* grads) const {
    SampleBatch batch;
    batch.y = y;
    batch.samples = samples;
    batch.x = targets.x;
    batch.xbar = targets.xbar;
    const LossWeights& w = cfg.weights;
    double total = 0.0;
    if (grads) {
      grads->clear();
      for (const auto& s : samples) {
        FloatImage z(s.width, s.height, s.channels);
        z.data.setZero();
        grads->push_back(std::move(z));
      }
    }
    auto add = [&](double weight, const LossTerm& term) {
      total += weight * term.value;
      if (grads)
        for (std::size_t k = 0; k < samples.size(); ++k) (*grads)[k].data += weight * term.grads[k].data;
    };
    if (lambda_c > 0) add(lambda_c, consistency(batch));
    if (w.lambda_fm > 0) add(w.lambda_fm, loss_fm_term(batch));
    if (w.lambda_sm > 0) add(w.lambda_sm, loss_sm_term(batch));
    if (w.lambda_p > 0) {
      const LossTerm p = loss_p_term(batch, targets.phi);
      if (grads && p.grads.size() != samples.size())
        fail(ErrorKind::InvalidArgument, "the perceptual feature extractor has no gradient");
      add(w.lambda_p, p);
    }
    if (w.lambda_prior > 0) {
      for (std::size_t k = 0; k < samples.size(); ++k) {
        PriorTerm tv = huber_tv(samples[k], cfg.huber_eps);
        total += w.lambda_prior * tv.value / double(samples.size());
        if (grads) (*grads)[k].data += w.lambda_prior * tv.grad.data / double(samples.size());
      }
    }
    if (!std::isfinite(total)) fail(ErrorKind::NonFiniteLoss, "restoration loss is not finite");
    return total;
  }
};

FloatImage initial_sample(const PixelImage& y, const RestoreConfig& cfg, int k) {
  std::seed_seq seq{std::uint32_t(cfg.seed), std::uint32_t(cfg.seed >> 32), std::uint32_t(k)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, 1.0);
  FloatImage x = to_float(y);
  if (cfg.init_noise_std > 0)
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data[i] += cfg.init_noise_std * noise(rng);
  return x;
}

// Descent on one batch. The step is halved until the loss does not rise and
// is allowed to double again on the next iteration. Returns true when no
// step size works.
bool descend(std::vector<FloatImage>& samples, const Objective& objective, std::vector<double>& history) {
  const RestoreConfig& cfg = objective.cfg;
  const double scale = double(samples[0].size());
  double step = cfg.step_size;
  std::vector<FloatImage> grads, trial;
  for (int it = 0; it < cfg.steps; ++it) {
    const double lambda_c = cfg.lambda_c_schedule ? cfg.lambda_c_schedule->at(it, cfg.steps) : cfg.weights.lambda_c;
    const double current = objective(samples, lambda_c, &grads);
    double next = current;
    bool accepted = false;
    step = std::min(2.0 * step, cfg.step_size);
    for (int halvings = 0; halvings < 40; ++halvings, step *= 0.5) {
      trial = samples;
      for (std::size_t k = 0; k < samples.size(); ++k) trial[k].data -= step * scale * grads[k].data;
      next = objective(trial, lambda_c, nullptr);
      if (next <= current + 1e-9) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return true;
    samples.swap(trial);
    history.push_back(next);
  }
  return false;
}

void check_targets(const PixelImage& y, const RestoreConfig& cfg, const RestoreTargets& targets) {
  const LossWeights& w = cfg.weights;
  if ((w.lambda_fm > 0 || w.lambda_sm > 0 || w.lambda_p > 0) && !targets.x)
    fail(ErrorKind::MissingGroundTruth, "FM, SM and P need the ground truth");
  if (w.lambda_sm > 0 && !targets.xbar) fail(ErrorKind::MissingReference, "SM needs the reference estimate");
  if (w.lambda_sm > 0 && cfg.n_seeds < 2) fail(ErrorKind::TooFewSamples, "SM needs at least two seeds");
  if (targets.x) require_same_shape(y, *targets.x);
  if (targets.xbar) require_same_shape(y, *targets.xbar);
}

void check_grid(const CoefficientGrid& grid, const RestoreConfig& cfg) {
  if (!(grid.table == cfg.table) && !(grid.table.luma == cfg.table.luma && grid.table.chroma == cfg.table.chroma))
    fail(ErrorKind::OptionsMismatch, "grid was compressed with a different table");
  if (grid.color != cfg.opts.color || grid.block_size != cfg.opts.block_size)
    fail(ErrorKind::OptionsMismatch, "grid was compressed with different options");
}

}  // namespace

RestoreRun restore_run(const PixelImage& y, const RestoreConfig& cfg, const RestoreTargets& targets) {
  cfg.validate();
  check_targets(y, cfg, targets);
  const Objective objective{y, cfg, targets};
  RestoreRun run;
  const bool coupled = cfg.weights.lambda_fm > 0 || cfg.weights.lambda_sm > 0;
  std::vector<FloatImage> samples;
  for (int k = 0; k < cfg.n_seeds; ++k) samples.push_back(initial_sample(y, cfg, k));
  if (coupled) {
    run.loss_history.emplace_back();
    run.diverged = descend(samples, objective, run.loss_history.back());
    run.outputs = std::move(samples);
  } else {
    for (auto& s : samples) {
      std::vector<FloatImage> one{std::move(s)};
      run.loss_history.emplace_back();
      run.diverged |= descend(one, objective, run.loss_history.back());
      run.outputs.push_back(std::move(one[0]));
    }
  }
  return run;
}

namespace {

std::vector<PixelImage> to_pixel_set(const std::vector<FloatImage>& images) {
  std::vector<PixelImage> out;
  for (const auto& img : images) out.push_back(to_pixels(img));
  return out;
}

}  // namespace

std::vector<PixelImage> restore(const PixelImage& y, const RestoreConfig& cfg, const RestoreTargets& targets) {
  cfg.validate();
  if (consistency_rmse(y, y, cfg.table, cfg.opts) > 1.0)
    fail(ErrorKind::NotACompressedInput, "input does not recompress to itself within one gray level");
  return to_pixel_set(restore_run(y, cfg, targets).outputs);
}

std::vector<PixelImage> restore(const CoefficientGrid& grid, const RestoreConfig& cfg, const RestoreTargets& targets) {
  check_grid(grid, cfg);
  return to_pixel_set(restore_run(decompress(grid), cfg, targets).outputs);
}

std::vector<PixelImage> restore_project(const PixelImage& y, const RestoreConfig& cfg,
                                        const RestoreTargets& targets) {
  cfg.validate();
  if (consistency_rmse(y, y, cfg.table, cfg.opts) > 1.0)
    fail(ErrorKind::NotACompressedInput, "input does not recompress to itself within one gray level");
  const CoefficientGrid grid = compress(y, cfg.table, cfg.opts);
  std::vector<PixelImage> out;
  for (const auto& s : restore_run(y, cfg, targets).outputs)
    out.push_back(to_pixels(project(to_pixels(s), grid)));
  return out;
}

std::vector<PixelImage> restore_project(const CoefficientGrid& grid, const RestoreConfig& cfg,
                                        const RestoreTargets& targets) {
  check_grid(grid, cfg);
  std::vector<PixelImage> out;
  for (const auto& s : restore_run(decompress(grid), cfg, targets).outputs)
    out.push_back(to_pixels(project(to_pixels(s), grid)));
  return out;
}

std::string SweepResult::csv_header() { return "lambda_c,consistency_rmse,perceptual_proxy,psnr"; }

std::string SweepResult::csv() const {
  std::ostringstream out;
  out.precision(10);
  out << csv_header() << '\n';
  for (const auto& r : rows)
    out << r.lambda_c << ',' << r.consistency_rmse << ',' << r.perceptual_proxy << ',' << r.psnr << '\n';
  return out.str();
}

SweepResult sweep_lambda_c(std::span<const CoefficientGrid> ys, std::span<const PixelImage> xs,
                           std::span<const double> lambdas, const RestoreConfig& cfg, bool project) {
  if (ys.size() != xs.size() || ys.empty()) fail(ErrorKind::InvalidArgument, "sweep needs paired, nonempty sets");
  if (lambdas.size() < 2) fail(ErrorKind::InvalidArgument, "sweep needs at least two lambda values");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] < lambdas[i - 1]) fail(ErrorKind::InvalidArgument, "lambda values must be ascending");

  SweepResult result;
  for (double lambda : lambdas) {
    RestoreConfig c = cfg;
    c.weights.lambda_c = lambda;
    c.lambda_c_schedule.reset();
    std::vector<PixelImage> outputs;
    double consistency = 0.0, quality = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const PixelImage y = decompress(ys[i]);
      const auto restored = project ? restore_project(ys[i], c) : restore(ys[i], c);
      for (const auto& r : restored) {
        consistency += consistency_rmse(r, y, c.table, c.opts);
        quality += psnr(r, xs[i]);
        ++count;
        outputs.push_back(r);
      }
    }
    result.rows.push_back({lambda, consistency / count, perceptual_proxy(outputs, xs).distance, quality / count});
  }
  return result;
}

}  // namespace jpegcons
