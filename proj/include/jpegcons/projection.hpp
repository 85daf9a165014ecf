#pragma once

#include <optional>

#include "jpegcons/codec.hpp"

namespace jpegcons {

// Half-width of the consistency cell. Slightly under 0.5 so that the
// requantized coefficient lands back on y's integer under half-away-from-zero
// rounding and float roundoff.
inline constexpr double kProjectionHalfWidth = 0.5 - 1e-6;

// Clamp the quantized-domain coefficients of xhat into the cell around
// y_grid's coefficients and transform back. Requantizing the result gives
// y_grid exactly when the dimensions are block multiples.
FloatImage project(const FloatImage& xhat, const CoefficientGrid& y_grid,
                   const std::optional<CodecOptions>& opts = std::nullopt);
FloatImage project(const PixelImage& xhat, const CoefficientGrid& y_grid,
                   const std::optional<CodecOptions>& opts = std::nullopt);

// Quantized-domain coefficients of an image under y_grid's table and path.
std::vector<Plane<double>> quantized_coefficients(const FloatImage& img, const CoefficientGrid& y_grid);

}  // namespace jpegcons
