// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "jpegcons/diffjpeg.hpp"
#include "jpegcons/jfif.hpp"
#include "jpegcons/losses.hpp"
#include "jpegcons/metrics.hpp"
#include "jpegcons/numerics.hpp"
#include "jpegcons/pnm.hpp"
#include "jpegcons/projection.hpp"
#include "jpegcons/restorer.hpp"
#include "jpegcons/toy.hpp"
#include "support/fixtures.hpp"
#include "support/naive_pipeline.hpp"
#ifdef JPEGCONS_HAVE_LIBJPEG
#include "support/libjpeg_decode.hpp"
#endif

using namespace jpegcons;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("%s  %2d  %s | %s | %.1f s of %.0f s%s\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
              budget_s, in_time ? "" : " (over budget)");
  std::fflush(stdout);
}

// 100 smooth random images with block-multiple sides (8 to 64), every fifth
// one grayscale, each compressed at the four test qualities.
const std::vector<CoefficientGrid>& codec_corpus() {
  static const std::vector<CoefficientGrid> grids = [] {
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<int> blocks(1, 8);
    std::vector<CoefficientGrid> out;
    for (int i = 0; i < 100; ++i) {
      const int w = 8 * blocks(rng), h = 8 * blocks(rng);
      const PixelImage x = testing::random_image(rng, w, h, i % 5 == 4 ? 1 : 3);
      for (int qf : {5, 10, 50, 95}) out.push_back(compress(x, qf));
    }
    return out;
  }();
  return grids;
}

// First ten natural fixtures whose qf 5 decode passes restore's precondition.
struct SweepFixture {
  std::vector<PixelImage> xs;
  std::vector<CoefficientGrid> ys;
  std::vector<std::string> names;
};

const SweepFixture& sweep_fixture() {
  static const SweepFixture f = [] {
    SweepFixture out;
    const auto images = testing::natural_fixtures();
    const auto names = testing::natural_fixture_names();
    for (std::size_t i = 0; i < images.size() && out.xs.size() < 10; ++i) {
      const CoefficientGrid g = compress(images[i], 5);
      const PixelImage y = decompress(g);
      if (consistency_rmse(y, y, 5) > 1.0) continue;
      out.xs.push_back(images[i]);
      out.ys.push_back(g);
      out.names.push_back(names[i]);
    }
    return out;
  }();
  return f;
}

RestoreConfig sweep_config() {
  RestoreConfig cfg = RestoreConfig::for_quality(5);
  cfg.n_seeds = 2;
  cfg.seed = 2024;
  return cfg;
}

const std::vector<double> kLambdas{0, 1, 5, 10, 100};

const SweepResult& plain_sweep() {
  static const SweepResult r = sweep_lambda_c(sweep_fixture().ys, sweep_fixture().xs, kLambdas, sweep_config());
  return r;
}

std::string column(const SweepResult& r, double SweepRow::*field, const char* f = "%.3f") {
  std::string s;
  for (const auto& row : r.rows) s += (s.empty() ? "" : "/") + fmt(f, row.*field);
  return s;
}

bool dct_consistent(const FloatImage& img, const CoefficientGrid& grid) {
  const auto xq = quantized_coefficients(img, grid);
  for (int c = 0; c < grid.channel_count(); ++c)
    if ((xq[c].round().cast<int>() != grid.channels[c]).any()) return false;
  return true;
}

toy::ToyModel toy_fixture(const char* name) {
  const auto bytes = read_file(testing::fixture_dir() / "toy" / name);
  return toy::parse_model(std::string(bytes.begin(), bytes.end()));
}

}  // namespace

int main() {
  criterion(1, "MMSE estimate stays in the quantization cell", 10, [] {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int ties = 0;
    const int models = 200;
    for (int i = 0; i < models; ++i) {
      const toy::ToyModel m = toy::random_model(rng);
      const double b = toy::theorem1_bound(m);
      worst = std::max(worst, b);
      ties += b == 0.5;
    }
    return Outcome{worst <= 0.5 + 1e-12,
                   fmt("max |DCT(E[X|y])/q - y|_inf = %.17g over %d models (%d reach exactly 0.5)", worst, models, ties)};
  });

  criterion(2, "posterior sampler is consistent and marginal-preserving", 5, [] {
    std::mt19937_64 rng(102);
    double mass = 0.0, tv = 0.0;
    bool converse = true;
    for (int i = 0; i < 100; ++i) {
      const toy::ToyModel m = toy::random_model(rng);
      const toy::SamplerReport r = toy::posterior_sampler_checks(m, toy::posterior_sampler(m));
      mass = std::max(mass, r.inconsistent_mass);
      tv = std::max(tv, r.total_variation);
      converse &= r.converse_holds;
    }
    const toy::ToyModel m = toy_fixture("n2_a4_q2.txt");
    const toy::SamplerReport snapped = toy::posterior_sampler_checks(m, toy::mmse_snapped_sampler(m));
    const toy::SamplerReport prior = toy::posterior_sampler_checks(m, toy::prior_sampler(m));
    const bool snapped_one = snapped.inconsistent_mass == 0.0 && snapped.total_variation > 1e-6;
    const bool prior_one = prior.total_variation < 1e-12 && prior.inconsistent_mass > 1e-6;
    return Outcome{mass == 0.0 && tv < 1e-12 && converse && snapped_one && prior_one,
                   fmt("posterior: mass %.3g, TV %.3g over 100 models; snapped MMSE: mass %.3g, TV %.3f; "
                       "prior: mass %.3f, TV %.3g",
                       mass, tv, snapped.inconsistent_mass, snapped.total_variation, prior.inconsistent_mass,
                       prior.total_variation)};
  });

  criterion(3, "compress(decompress(g)) = g", 30, [] {
    int exact = 0, pixel_exact = 0;
    const auto& grids = codec_corpus();
    for (const auto& g : grids) {
      exact += compress(decompress_float(g), g.table, grid_options(g)) == g;
      pixel_exact += compress(decompress(g), g.table, grid_options(g)) == g;
    }
    return Outcome{exact == int(grids.size()),
                   fmt("%d/%zu grids exact in the DCT domain (after 8-bit pixel rounding and clipping: %d/%zu)",
                       exact, grids.size(), pixel_exact, grids.size())};
  });

  criterion(4, "JFIF round trip and external decoder", 60, [] {
    int exact = 0;
    const auto& grids = codec_corpus();
    for (const auto& g : grids) exact += parse_jfif(write_jfif(g)).grid == g;
    std::string external = "external decoder skipped (built without libjpeg)";
    bool external_ok = true;
#ifdef JPEGCONS_HAVE_LIBJPEG
    int worst = 0;
    long off = 0, values = 0;
    for (const auto& g : grids) {
      const PixelImage theirs = testing::libjpeg_decode(write_jfif(g));
      const PixelImage ours = decompress(g, true);
      if (!theirs.same_shape(ours)) {
        worst = 256;
        continue;
      }
      const auto gap = (theirs.data.cast<int>() - ours.data.cast<int>()).abs().eval();
      worst = std::max(worst, int(gap.maxCoeff()));
      off += (gap > 1).count();
      values += gap.size();
    }
    external_ok = worst <= 1;
    external = fmt("libjpeg max |difference| %d gray levels (%ld of %ld values off by more than 1)", worst, off, values);
#endif
    return Outcome{exact == int(grids.size()) && external_ok,
                   fmt("%d/%zu parse(write(g)) = g; %s", exact, grids.size(), external.c_str())};
  });

  criterion(5, "projection consistency", 30, [] {
    std::mt19937_64 rng(105);
    std::uniform_int_distribution<int> blocks(1, 6);
    std::uniform_real_distribution<double> jitter(-3.0, 3.0);
    const int qfs[] = {5, 10, 50, 95};
    int exact = 0, far_exact = 0;
    double pixel = 0.0, worst = 0.0, far_pixel = 0.0;
    const int pairs = 50;
    for (int i = 0; i < pairs; ++i) {
      const int w = 8 * blocks(rng), h = 8 * blocks(rng), qf = qfs[i % 4];
      const PixelImage x = testing::random_image(rng, w, h, 3);
      const CoefficientGrid g = compress(x, qf);
      const PixelImage y = decompress(g);
      // A restoration: the decode with up to three gray levels of change.
      FloatImage xhat = to_float(y);
      for (Eigen::Index k = 0; k < xhat.size(); ++k) xhat.data[k] += jitter(rng);
      const FloatImage p = project(xhat, g);
      exact += dct_consistent(p, g);
      const double c = consistency_rmse(to_pixels(p), y, g.table);
      pixel += c / pairs;
      worst = std::max(worst, c);
      // An unrelated guess, reported only.
      const FloatImage far = project(testing::random_image(rng, w, h, 3), g);
      far_exact += dct_consistent(far, g);
      far_pixel += consistency_rmse(to_pixels(far), y, g.table) / pairs;
    }
    return Outcome{exact == pairs && pixel <= 1.0,
                   fmt("%d/%d DCT-exact; pixel-path consistency mean %.4f (max %.4f); unrelated guesses: %d/%d "
                       "DCT-exact, pixel mean %.3f",
                       exact, pairs, pixel, worst, far_exact, pairs, far_pixel)};
  });

  criterion(6, "straight-through VJP vs finite differences", 30, [] {
    std::mt19937_64 rng(106);
    const auto images = testing::natural_fixtures();
    const int qfs[] = {5, 25, 50, 75, 95};
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const FloatImage x = to_float(images[std::size_t(i)]);
      const testing::NaivePipeline f{table_for_qf(qfs[i])};
      const Vjp vjp = forward(DiffJpegOp::for_image(x, table_for_qf(qfs[i])), x).vjp;
      for (int d = 0; d < 10; ++d) {
        const FloatImage v = testing::random_float_image(rng, x.width, x.height, 3, -1, 1);
        const FloatImage w = testing::random_float_image(rng, x.width, x.height, 3, -1, 1);
        const double h = 1e-3;
        FloatImage xp = x, xm = x;
        xp.data += h * v.data;
        xm.data -= h * v.data;
        const double fd = ((f(xp).data - f(xm).data) * w.data).sum() / (2 * h);
        const double adj = (apply_vjp(vjp, w).data * v.data).sum();
        worst = std::max(worst, std::abs(fd - adj) / std::max(std::abs(fd), 1e-12));
      }
    }
    return Outcome{worst <= 1e-5, fmt("max relative error %.3g over 5 images x 10 directions", worst)};
  });

  criterion(7, "numerics study", 30, [] {
    const auto images = testing::natural_fixtures();
    const NumericsTable t = run_numerics_study(images);
    const double rgb = t.row("rgb-passthrough").rmse, rounded = t.row("ycbcr-rounded").rmse;
    return Outcome{images.size() >= 10 && rgb == 0.0 && rounded > 0.0 && rounded <= 1.0,
                   fmt("%zu images: ycbcr-rounded %.4f, ycbcr-float %.4f, rgb-passthrough %.17g", images.size(),
                       rounded, t.row("ycbcr-float").rmse, rgb)};
  });

  criterion(8, "consistency improves with lambda_C", 600, [] {
    const SweepResult& r = plain_sweep();
    int violations = 0;
    bool small = true, zero_is_max = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      const double prev = r.rows[i - 1].consistency_rmse, cur = r.rows[i].consistency_rmse;
      if (cur > prev) {
        ++violations;
        small &= cur <= 1.05 * prev;
      }
      zero_is_max &= r.rows[0].consistency_rmse >= cur;
    }
    return Outcome{r.rows.size() == kLambdas.size() && violations <= 1 && small && zero_is_max,
                   fmt("%zu images at qf 5, lambda_C 0/1/5/10/100: consistency %s, proxy %s, PSNR %s",
                       sweep_fixture().xs.size(), column(r, &SweepRow::consistency_rmse).c_str(),
                       column(r, &SweepRow::perceptual_proxy, "%.1f").c_str(),
                       column(r, &SweepRow::psnr, "%.2f").c_str())};
  });

  criterion(9, "loss fixed points", 10, [] {
    std::mt19937_64 rng(109);
    double fm = 0.0, sm = 0.0;
    for (int i = 0; i < 20; ++i) {
      SampleBatch b;
      const FloatImage x = testing::random_float_image(rng, 16, 8, 3);
      const FloatImage d = testing::random_float_image(rng, 16, 8, 3, -20, 20);
      const FloatImage xbar = testing::random_float_image(rng, 16, 8, 3);
      b.y = to_pixels(x);
      b.x = x;
      b.xbar = xbar;
      FloatImage a = x, c = x;
      a.data += d.data;
      c.data -= d.data;
      b.samples = {a, c};
      fm = std::max(fm, loss_fm(b));
      const Eigen::ArrayXd s = (x.data - xbar.data).abs();
      a.data = xbar.data + s;
      c.data = xbar.data - s;
      b.samples = {a, c};
      sm = std::max(sm, loss_sm(b));
    }
    double lattice = 0.0;
    int in_range = 0, out_of_range = 0;
    for (const auto& g : codec_corpus()) {
      const FloatImage s = decompress_float(g);
      if (s.data.minCoeff() < -0.5 || s.data.maxCoeff() > 255.5) {
        ++out_of_range;
        continue;
      }
      SampleBatch b;
      b.y = decompress(g);
      b.samples = {s};
      lattice = std::max(lattice, loss_c(b, g.table, grid_options(g)));
      ++in_range;
    }
    std::mt19937_64 mrng(209);
    double fm_identity = 0.0;
    for (int i = 0; i < 100; ++i) fm_identity = std::max(fm_identity, toy::fm_identity_check(toy::random_model(mrng)));
    return Outcome{fm < 1e-12 && sm < 1e-12 && lattice <= 1.0 && in_range > 0 && fm_identity < 1e-12,
                   fmt("FM %.3g, SM %.3g, loss_c on %d lattice images %.4f (%d lattice points outside [0, 255] "
                       "skipped), first-moment identity %.3g",
                       fm, sm, in_range, lattice, out_of_range, fm_identity)};
  });

  criterion(10, "projection barely moves the perceptual proxy", 120, [] {
    const SweepResult& plain = plain_sweep();
    const SweepResult projected =
        sweep_lambda_c(sweep_fixture().ys, sweep_fixture().xs, kLambdas, sweep_config(), true);
    double worst = 0.0;
    std::string changes;
    for (std::size_t i = 0; i < plain.rows.size(); ++i) {
      const double rel = projected.rows[i].perceptual_proxy / plain.rows[i].perceptual_proxy - 1.0;
      worst = std::max(worst, std::abs(rel));
      changes += (changes.empty() ? "" : "/") + fmt("%+.2f%%", 100 * rel);
    }
    return Outcome{worst <= 0.15,
                   fmt("proxy change per lambda_C %s; projected consistency %s", changes.c_str(),
                       column(projected, &SweepRow::consistency_rmse).c_str())};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
