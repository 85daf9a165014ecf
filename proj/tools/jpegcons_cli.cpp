#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jpegcons/jfif.hpp"
#include "jpegcons/metrics.hpp"
#include "jpegcons/numerics.hpp"
#include "jpegcons/pnm.hpp"
#include "jpegcons/projection.hpp"
#include "jpegcons/restorer.hpp"
#include "jpegcons/toy.hpp"

namespace fs = std::filesystem;
using namespace jpegcons;

namespace {

CoefficientGrid load_jpeg(const fs::path& path) { return parse_jfif(read_file(path)).grid; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
}

int quality_of(const CoefficientGrid& grid) {
  return match_quality_factor(grid.table.luma, grid.table.chroma).value_or(0);
}

std::vector<fs::path> images_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::InvalidArgument, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (ext == ".ppm" || ext == ".pgm") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) fail(ErrorKind::EmptySet, "no .ppm or .pgm files in " + dir.string());
  return out;
}

struct RestoreFlags {
  double lambda_c = 1.0;
  double prior = kDefaultPriorWeight;
  int steps = 100;
  int seeds = 1;
  std::uint64_t seed = 0;
  double step_size = 0.1;
  double noise = 4.0;

  void add_to(CLI::App* app) {
    app->add_option("--prior", prior, "Smoothness prior weight")->capture_default_str();
    app->add_option("--steps", steps, "Descent iterations")->capture_default_str();
    app->add_option("--seeds", seeds, "Outputs per input")->capture_default_str();
    app->add_option("--seed", seed, "Base seed")->capture_default_str();
    app->add_option("--step-size", step_size)->capture_default_str();
    app->add_option("--noise-std", noise, "Initialization noise, gray levels")->capture_default_str();
  }
  RestoreConfig config(const QuantTable& table) const {
    RestoreConfig cfg;
    cfg.table = table;
    cfg.weights.lambda_c = lambda_c;
    cfg.weights.lambda_prior = prior;
    cfg.steps = steps;
    cfg.n_seeds = seeds;
    cfg.seed = seed;
    cfg.step_size = step_size;
    cfg.init_noise_std = noise;
    return cfg;
  }
};

// Runs the toy-model suites; true when every bound holds.
bool theorem_check(const std::vector<toy::ToyModel>& models) {
  double worst_t1 = 0.0, worst_mass = 0.0, worst_tv = 0.0, worst_fm = 0.0;
  int snapped_breaks = 0, prior_breaks = 0;
  bool ok = true;
  for (const auto& m : models) {
    worst_t1 = std::max(worst_t1, toy::theorem1_bound(m));
    const toy::SamplerReport post = toy::posterior_sampler_checks(m, toy::posterior_sampler(m));
    worst_mass = std::max(worst_mass, post.inconsistent_mass);
    worst_tv = std::max(worst_tv, post.total_variation);
    worst_fm = std::max(worst_fm, toy::fm_identity_check(m));
    // The snapped MMSE sampler is always consistent and the prior sampler
    // always preserves the marginal; Theorem 2 says neither can have both
    // unless it is the posterior.
    const toy::SamplerReport snapped = toy::posterior_sampler_checks(m, toy::mmse_snapped_sampler(m));
    const toy::SamplerReport prior = toy::posterior_sampler_checks(m, toy::prior_sampler(m));
    ok &= snapped.inconsistent_mass == 0.0 && snapped.converse_holds;
    ok &= prior.total_variation < 1e-12 && prior.converse_holds;
    snapped_breaks += snapped.total_variation >= 1e-12;
    prior_breaks += prior.inconsistent_mass > 0.0;
  }
  ok &= worst_t1 <= 0.5 + 1e-12 && worst_mass == 0.0 && worst_tv < 1e-12 && worst_fm < 1e-12;
  std::printf("models %zu\n", models.size());
  std::printf("max |DCT(E[X|y])/q - y|_inf %.15g (bound 0.5)\n", worst_t1);
  std::printf("posterior sampler: inconsistent mass %.3g, TV %.3g\n", worst_mass, worst_tv);
  std::printf("first-moment identity deviation %.3g\n", worst_fm);
  std::printf("snapped MMSE sampler breaks the marginal on %d models\n", snapped_breaks);
  std::printf("prior sampler breaks consistency on %d models\n", prior_breaks);
  std::printf("%s\n", ok ? "all bounds hold" : "BOUND VIOLATED");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JPEG consistency toolkit"};
  app.require_subcommand(1);

  std::string in, out, second, third;
  int qf = 75;
  bool passthrough = false, round_chroma = false, project_flag = false;
  RestoreFlags rf;
  std::vector<double> lambdas{0, 1, 5, 10, 100};
  int block_size = 1, n_models = 100;
  std::uint64_t model_seed = 1;
  std::string fixture;

  auto* encode = app.add_subcommand("encode", "Compress a PPM/PGM to baseline JFIF");
  encode->add_option("input", in)->required();
  encode->add_option("-q,--quality", qf)->required()->check(CLI::Range(1, 100));
  encode->add_option("-o,--output", out)->required();

  auto* decode = app.add_subcommand("decode", "Decode a baseline JFIF file to PPM/PGM");
  decode->add_option("input", in)->required();
  decode->add_option("-o,--output", out)->required();

  auto* roundtrip = app.add_subcommand("roundtrip", "Compress and decompress, print a metric row");
  roundtrip->add_option("input", in)->required();
  roundtrip->add_option("-q,--quality", qf)->required()->check(CLI::Range(1, 100));
  roundtrip->add_flag("--passthrough", passthrough, "Skip the YCbCr conversion");
  roundtrip->add_flag("--round-chroma", round_chroma, "Round YCbCr planes to 8 bits");

  auto* project_cmd = app.add_subcommand("project", "Project a restoration onto the cells of a JPEG");
  project_cmd->add_option("xhat", in)->required();
  project_cmd->add_option("jpeg", second)->required();
  project_cmd->add_option("-o,--output", out)->required();

  auto* metrics = app.add_subcommand("metrics", "Consistency, PSNR and proxy of one restoration");
  metrics->add_option("xhat", in)->required();
  metrics->add_option("x", second)->required();
  metrics->add_option("jpeg", third)->required();

  auto* restore_cmd = app.add_subcommand("restore", "Gradient-descent restoration of a JPEG");
  restore_cmd->add_option("jpeg", in)->required();
  restore_cmd->add_option("--lambda-c", rf.lambda_c, "Consistency weight")->capture_default_str();
  rf.add_to(restore_cmd);
  restore_cmd->add_flag("--project", project_flag, "Project outputs onto the JPEG cells");
  restore_cmd->add_option("-o,--output", out, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Consistency weight sweep over a directory of pairs");
  sweep->add_option("dir", in, "NAME.ppm ground truths, with NAME.jpg or compressed at -q")->required();
  sweep->add_option("--lambdas", lambdas)->delimiter(',')->capture_default_str();
  sweep->add_option("-q,--quality", qf, "Quality for ground truths without a .jpg")->check(CLI::Range(1, 100));
  rf.add_to(sweep);
  sweep->add_flag("--project", project_flag, "Project outputs before measuring");
  sweep->add_option("-o,--output", out)->required();

  auto* numerics = app.add_subcommand("numerics-study", "Lossless-table error of each colour path");
  numerics->add_option("dir", in)->required();
  numerics->add_option("--block-size", block_size)->check(CLI::IsMember({1, 8}))->capture_default_str();
  numerics->add_option("-o,--output", out)->required();

  auto* theorem = app.add_subcommand("theorem-check", "Exhaustive toy-model checks of both theorems");
  theorem->add_option("--models", n_models)->check(CLI::Range(0, 1000000))->capture_default_str();
  theorem->add_option("--seed", model_seed)->capture_default_str();
  theorem->add_option("--fixture", fixture, "Model file: n a, q, prior");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*encode) {
      write_file(out, write_jfif(compress(load_pnm(in), qf)));
    } else if (*decode) {
      save_pnm(out, decompress(load_jpeg(in)));
    } else if (*roundtrip) {
      CodecOptions opts;
      opts.color = passthrough ? ColorPath::rgb_passthrough : ColorPath::ycbcr;
      opts.round_intermediate = round_chroma;
      const PixelImage x = load_pnm(in);
      const PixelImage xq = jpeg_q(x, qf, opts);
      const std::vector<PixelImage> a{xq}, b{x};
      MetricReport r{fs::path(in).stem().string(), qf, consistency_rmse(xq, xq, qf, opts), psnr(xq, x),
                     perceptual_proxy(a, b).distance, 1};
      std::printf("%s\n%s\n", MetricReport::csv_header().c_str(), r.csv_row().c_str());
    } else if (*project_cmd) {
      save_pnm(out, to_pixels(project(load_pnm(in), load_jpeg(second))));
    } else if (*metrics) {
      const PixelImage xhat = load_pnm(in), x = load_pnm(second);
      const CoefficientGrid grid = load_jpeg(third);
      const std::vector<PixelImage> a{xhat}, b{x};
      MetricReport r{fs::path(in).stem().string(), quality_of(grid),
                     consistency_rmse(xhat, decompress(grid), grid.table, grid_options(grid)), psnr(xhat, x),
                     perceptual_proxy(a, b).distance, 1};
      std::printf("%s\n%s\n", MetricReport::csv_header().c_str(), r.csv_row().c_str());
    } else if (*restore_cmd) {
      const CoefficientGrid grid = load_jpeg(in);
      const RestoreConfig cfg = rf.config(grid.table);
      const auto outputs = project_flag ? restore_project(grid, cfg) : restore(grid, cfg);
      fs::create_directories(out);
      const std::string stem = fs::path(in).stem().string();
      const std::string ext = grid.channel_count() == 1 ? ".pgm" : ".ppm";
      for (std::size_t k = 0; k < outputs.size(); ++k)
        save_pnm(fs::path(out) / (stem + "_" + std::to_string(k) + ext), outputs[k]);
    } else if (*sweep) {
      if (sweep->count("--quality") == 0) qf = 5;
      std::vector<PixelImage> xs;
      std::vector<CoefficientGrid> ys;
      for (const auto& path : images_in(in)) {
        xs.push_back(load_pnm(path));
        fs::path jpeg = path;
        jpeg.replace_extension(".jpg");
        ys.push_back(fs::exists(jpeg) ? load_jpeg(jpeg) : compress(xs.back(), qf));
      }
      const RestoreConfig cfg = rf.config(ys.front().table);
      write_text(out, sweep_lambda_c(ys, xs, lambdas, cfg, project_flag).csv());
    } else if (*numerics) {
      std::vector<PixelImage> images;
      for (const auto& path : images_in(in)) images.push_back(load_pnm(path));
      write_text(out, run_numerics_study(images, block_size).csv());
    } else if (*theorem) {
      std::vector<toy::ToyModel> models;
      if (!fixture.empty()) {
        const auto bytes = read_file(fixture);
        models.push_back(toy::parse_model(std::string(bytes.begin(), bytes.end())));
      }
      std::mt19937_64 rng(model_seed);
      for (int i = 0; i < n_models; ++i) models.push_back(toy::random_model(rng));
      if (models.empty()) fail(ErrorKind::EmptySet, "no models to check");
      return theorem_check(models) ? 0 : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
