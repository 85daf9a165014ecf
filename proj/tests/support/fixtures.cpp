#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "jpegcons/pnm.hpp"

namespace jpegcons::testing {

std::filesystem::path fixture_dir() { return JPEGCONS_FIXTURE_DIR; }

std::vector<std::string> natural_fixture_names() {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(fixture_dir() / "natural"))
    if (entry.path().extension() == ".ppm") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<PixelImage> natural_fixtures() {
  std::vector<PixelImage> images;
  for (const auto& name : natural_fixture_names())
    images.push_back(load_pnm(fixture_dir() / "natural" / (name + ".ppm")));
  return images;
}

PixelImage random_image(std::mt19937_64& rng, int width, int height, int channels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 3.0);
  FloatImage img(width, height, channels);
  for (int c = 0; c < channels; ++c) {
    const double base = 40 + 170 * u(rng);
    const double gx = (u(rng) - 0.5) * 4, gy = (u(rng) - 0.5) * 4;
    const double bx = u(rng) * width, by = u(rng) * height, radius = 2 + u(rng) * width / 2.0;
    const double amp = (u(rng) - 0.5) * 160;
    const double fx = u(rng) * 0.8, fy = u(rng) * 0.8, tex = u(rng) * 20;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double d2 = ((x - bx) * (x - bx) + (y - by) * (y - by)) / (radius * radius);
        img.at(x, y, c) = base + gx * (x - width / 2.0) + gy * (y - height / 2.0) + amp * std::exp(-d2) +
                          tex * std::sin(fx * x + fy * y) + noise(rng);
      }
    }
  }
  return to_pixels(img);
}

PixelImage noise_image(std::mt19937_64& rng, int width, int height, int channels) {
  std::uniform_int_distribution<int> u(0, 255);
  PixelImage img(width, height, channels);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data[i] = std::uint8_t(u(rng));
  return img;
}

FloatImage random_float_image(std::mt19937_64& rng, int width, int height, int channels, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  FloatImage img(width, height, channels);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data[i] = u(rng);
  return img;
}

}  // namespace jpegcons::testing
