#include "jpegcons/quantization.hpp"

#include <algorithm>
#include <sstream>

namespace jpegcons {

const TableMatrix& annex_k_luma() {
  static const TableMatrix t = (TableMatrix() <<
      16, 11, 10, 16, 24, 40, 51, 61,
      12, 12, 14, 19, 26, 58, 60, 55,
      14, 13, 16, 24, 40, 57, 69, 56,
      14, 17, 22, 29, 51, 87, 80, 62,
      18, 22, 37, 56, 68, 109, 103, 77,
      24, 35, 55, 64, 81, 104, 113, 92,
      49, 64, 78, 87, 103, 121, 120, 101,
      72, 92, 95, 98, 112, 100, 103, 99).finished();
  return t;
}

const TableMatrix& annex_k_chroma() {
  static const TableMatrix t = (TableMatrix() <<
      17, 18, 24, 47, 99, 99, 99, 99,
      18, 21, 26, 66, 99, 99, 99, 99,
      24, 26, 56, 99, 99, 99, 99, 99,
      47, 66, 99, 99, 99, 99, 99, 99,
      99, 99, 99, 99, 99, 99, 99, 99,
      99, 99, 99, 99, 99, 99, 99, 99,
      99, 99, 99, 99, 99, 99, 99, 99,
      99, 99, 99, 99, 99, 99, 99, 99).finished();
  return t;
}

void QuantTable::validate() const {
  if (luma.minCoeff() < 1 || chroma.minCoeff() < 1 || luma.maxCoeff() > 255 || chroma.maxCoeff() > 255)
    fail(ErrorKind::InvalidArgument, "quantization table entries must lie in [1, 255]");
}

QuantTable table_for_qf(int qf) {
  if (qf < 1 || qf > 100) fail(ErrorKind::QfOutOfRange, std::to_string(qf));
  const int scale = qf < 50 ? 5000 / qf : 200 - 2 * qf;
  auto scaled = [scale](const TableMatrix& base) {
    return TableMatrix(base.unaryExpr([scale](int b) { return std::clamp((b * scale + 50) / 100, 1, 255); }));
  };
  return {scaled(annex_k_luma()), scaled(annex_k_chroma()), qf};
}

std::optional<int> match_quality_factor(const TableMatrix& luma, const TableMatrix& chroma) {
  for (int qf = 1; qf <= 100; ++qf) {
    const QuantTable t = table_for_qf(qf);
    if (t.luma == luma && t.chroma == chroma) return qf;
  }
  return std::nullopt;
}

const std::array<int, 64>& zigzag_order() {
  static const std::array<int, 64> order = [] {
    std::array<int, 64> z{};
    int k = 0;
    for (int s = 0; s < 15; ++s) {
      const int lo = std::max(0, s - 7), hi = std::min(s, 7);
      // Odd anti-diagonals run top-right to bottom-left.
      for (int i = 0; i <= hi - lo; ++i) {
        const int row = s % 2 == 0 ? hi - i : lo + i;
        z[k++] = row * 8 + (s - row);
      }
    }
    return z;
  }();
  return order;
}

std::string format_tables(const QuantTable& t) {
  std::ostringstream out;
  for (const TableMatrix* m : {&t.luma, &t.chroma}) {
    for (int k = 0; k < 64; ++k) out << (k ? " " : "") << m->data()[zigzag_order()[k]];
    out << '\n';
  }
  return out.str();
}

QuantTable parse_tables(const std::string& text) {
  std::istringstream in(text);
  QuantTable t;
  for (TableMatrix* m : {&t.luma, &t.chroma}) {
    for (int k = 0; k < 64; ++k) {
      int v = 0;
      if (!(in >> v)) fail(ErrorKind::InvalidArgument, "expected 128 table entries");
      m->data()[zigzag_order()[k]] = v;
    }
  }
  t.validate();
  t.quality_factor = match_quality_factor(t.luma, t.chroma);
  return t;
}

}  // namespace jpegcons
