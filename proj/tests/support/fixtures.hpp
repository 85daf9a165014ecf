#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "jpegcons/image.hpp"

namespace jpegcons::testing {

std::filesystem::path fixture_dir();

// The 64x64 natural RGB crops under fixtures/natural, sorted by name.
std::vector<PixelImage> natural_fixtures();
std::vector<std::string> natural_fixture_names();

// Smooth random content (a few random gradients and blobs) plus mild noise,
// so that images look vaguely natural rather than like white noise.
PixelImage random_image(std::mt19937_64& rng, int width, int height, int channels);

// Independent uniform samples in [0, 255].
PixelImage noise_image(std::mt19937_64& rng, int width, int height, int channels);
FloatImage random_float_image(std::mt19937_64& rng, int width, int height, int channels, double lo = 0.0,
                              double hi = 255.0);

}  // namespace jpegcons::testing
