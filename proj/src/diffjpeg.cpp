#include "jpegcons/diffjpeg.hpp"

namespace jpegcons {

DiffJpegOp::DiffJpegOp(QuantTable table_, CodecOptions opts_, int width_, int height_, int channels_)
    : table(std::move(table_)), opts(opts_), width(width_), height(height_), channels(channels_) {
  table.validate();
  opts.validate();
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
    fail(ErrorKind::InvalidArgument, "bad operator dimensions");
}

DiffJpegOp DiffJpegOp::for_image(const FloatImage& x, const QuantTable& table, const CodecOptions& opts) {
  return DiffJpegOp(table, opts, x.width, x.height, x.channels);
}

void DiffJpegOp::check_dims(const FloatImage& img) const {
  if (img.width != width || img.height != height || img.channels != channels)
    fail(ErrorKind::DimMismatch, "image does not match operator dimensions");
}

DiffJpegResult forward(const DiffJpegOp& op, const FloatImage& x) {
  op.check_dims(x);
  auto xq = stage::quantized_domain(x, op.table, op.opts);
  for (auto& p : xq) p = p.unaryExpr([](double v) { return round_half_away(v); });
  return {stage::from_quantized_domain(xq, op.table, op.width, op.height, op.channels, op.opts), Vjp{op}};
}

FloatImage apply_vjp(const Vjp& vjp, const FloatImage& cotangent) {
  const DiffJpegOp& op = vjp.op;
  op.check_dims(cotangent);
  const bool ycc = op.channels == 3 && op.opts.color == ColorPath::ycbcr;
  const int bs = op.opts.block_size;

  // Adjoint of the inverse colour transform.
  std::vector<Plane<double>> planes;
  if (ycc) {
    for (auto& p : ycbcr_to_rgb_adjoint(cotangent).planes) planes.push_back(std::move(p));
  } else {
    for (int c = 0; c < op.channels; ++c) planes.emplace_back(cotangent.channel(c));
  }

  for (std::size_t c = 0; c < planes.size(); ++c) {
    // Adjoint of the crop: embed into the padded plane.
    Plane<double> g = Plane<double>::Zero(padded_extent(op.height, bs), padded_extent(op.width, bs));
    g.topLeftCorner(op.height, op.width) = planes[c];
    // The inverse DCT is orthonormal, so its adjoint is the forward DCT.
    transform_blocks(g, bs, false);
    // Dequantize (multiply by Q) and quantize (divide by Q) are diagonal.
    // Rounding in between passes the gradient through unchanged.
    const Plane<double> q = stage::divisors(op.table, op.opts, int(c), g.rows(), g.cols());
    g = g * q / q;
    transform_blocks(g, bs, true);
    // Adjoint of edge padding sums replicated samples back onto the edge.
    planes[c] = pad_edge_adjoint(g, op.width, op.height);
  }

  if (ycc) return rgb_to_ycbcr_adjoint(YCbCrImage<double>{op.width, op.height, {planes[0], planes[1], planes[2]}});
  FloatImage out(op.width, op.height, op.channels);
  for (int c = 0; c < op.channels; ++c) out.channel(c) = planes[c];
  return out;
}

}  // namespace jpegcons
