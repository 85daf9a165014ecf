#include "jpegcons/numerics.hpp"

#include <sstream>

#include "jpegcons/metrics.hpp"

namespace jpegcons {

const NumericsRow& NumericsTable::row(const std::string& path) const {
  for (const auto& r : rows)
    if (r.path == path) return r;
  fail(ErrorKind::InvalidArgument, "no row named " + path);
}

std::string NumericsTable::csv_header() { return "path,rmse,n_images"; }

std::string NumericsTable::csv() const {
  std::ostringstream out;
  out.precision(10);
  out << csv_header() << '\n';
  for (const auto& r : rows) out << r.path << ',' << r.rmse << ',' << r.n_images << '\n';
  return out.str();
}

NumericsTable run_numerics_study(std::span<const PixelImage> images, int block_size) {
  if (images.empty()) fail(ErrorKind::EmptySet, "numerics study needs at least one image");
  struct Path {
    const char* name;
    CodecOptions opts;
  };
  const Path paths[] = {
      {"ycbcr-rounded", {ColorPath::ycbcr, true, block_size}},
      {"ycbcr-float", {ColorPath::ycbcr, false, block_size}},
      {"rgb-passthrough", {ColorPath::rgb_passthrough, false, block_size}},
  };
  const QuantTable table = table_for_qf(100);
  NumericsTable out;
  for (const auto& p : paths) {
    p.opts.validate();
    double total = 0.0;
    for (const auto& img : images) total += rmse(img, jpeg_q(img, table, p.opts));
    out.rows.push_back({p.name, total / double(images.size()), int(images.size())});
  }
  return out;
}

}  // namespace jpegcons
