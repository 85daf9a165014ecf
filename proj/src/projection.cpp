#include "jpegcons/projection.hpp"

namespace jpegcons {

std::vector<Plane<double>> quantized_coefficients(const FloatImage& img, const CoefficientGrid& y_grid) {
  if (img.width != y_grid.width || img.height != y_grid.height || img.channels != y_grid.channel_count())
    fail(ErrorKind::DimMismatch, "image does not match the compressed grid");
  return stage::quantized_domain(img, y_grid.table, grid_options(y_grid));
}

FloatImage project(const FloatImage& xhat, const CoefficientGrid& y_grid, const std::optional<CodecOptions>& opts) {
  if (opts && (opts->color != y_grid.color || opts->block_size != y_grid.block_size))
    fail(ErrorKind::OptionsMismatch, "options differ from the ones the grid was compressed with");
  auto xq = quantized_coefficients(xhat, y_grid);
  for (std::size_t c = 0; c < xq.size(); ++c) {
    const Plane<double> yq = y_grid.channels[c].cast<double>();
    xq[c] = yq + (xq[c] - yq).max(-kProjectionHalfWidth).min(kProjectionHalfWidth);
  }
  return stage::from_quantized_domain(xq, y_grid.table, y_grid.width, y_grid.height, y_grid.channel_count(),
                                      grid_options(y_grid));
}

FloatImage project(const PixelImage& xhat, const CoefficientGrid& y_grid, const std::optional<CodecOptions>& opts) {
  return project(to_float(xhat), y_grid, opts);
}

}  // namespace jpegcons
