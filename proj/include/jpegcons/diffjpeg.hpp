#pragma once

#include "jpegcons/codec.hpp"

namespace jpegcons {

// JPEG as a differentiable operator. The forward pass rounds like the real
// codec; the backward pass treats rounding as the identity (straight-through).
struct DiffJpegOp {
  QuantTable table;
  CodecOptions opts;
  int width = 0;
  int height = 0;
  int channels = 3;

  DiffJpegOp() = default;
  DiffJpegOp(QuantTable table, CodecOptions opts, int width, int height, int channels);
  static DiffJpegOp for_image(const FloatImage& x, const QuantTable& table, const CodecOptions& opts = {});

  void check_dims(const FloatImage& img) const;
};

// Everything after rounding is linear, so the operator itself is all the
// backward pass needs.
struct Vjp {
  DiffJpegOp op;
};

struct DiffJpegResult {
  FloatImage y;
  Vjp vjp;
};

// Float jpeg_q(x): no terminal rounding or clamping. With round_intermediate
// the 8-bit plane rounding is also straight-through in the backward pass.
DiffJpegResult forward(const DiffJpegOp& op, const FloatImage& x);
FloatImage apply_vjp(const Vjp& vjp, const FloatImage& cotangent);

}  // namespace jpegcons
