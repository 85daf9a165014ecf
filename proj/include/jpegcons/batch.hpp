#pragma once

#include <optional>
#include <vector>

#include "jpegcons/image.hpp"

namespace jpegcons {

// Restorations of one compressed input for several seeds, with optional
// ground truth x and reference estimate xbar.
struct SampleBatch {
  PixelImage y;
  std::vector<FloatImage> samples;
  std::optional<FloatImage> x;
  std::optional<FloatImage> xbar;

  // Same dimensions everywhere and at least one sample.
  void validate() const;
  std::size_t size() const { return samples.size(); }
};

}  // namespace jpegcons
