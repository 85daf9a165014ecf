#include "jpegcons/batch.hpp"

namespace jpegcons {

void SampleBatch::validate() const {
  if (samples.empty()) fail(ErrorKind::TooFewSamples, "batch has no samples");
  for (const auto& s : samples) require_same_shape(y, s);
  if (x) require_same_shape(y, *x);
  if (xbar) require_same_shape(y, *xbar);
}


}  // namespace jpegcons
