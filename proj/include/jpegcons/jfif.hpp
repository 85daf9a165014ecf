#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "jpegcons/codec.hpp"

namespace jpegcons {

enum class TableClass : std::uint8_t { dc = 0, ac = 1 };

struct HuffmanTable {
  TableClass table_class = TableClass::dc;
  int id = 0;
  std::array<std::uint8_t, 16> counts{};  // number of codes of length 1..16
  std::vector<std::uint8_t> symbols;

  struct Code {
    std::uint16_t bits = 0;
    std::uint8_t length = 0;  // 0 = symbol absent
  };
  // Canonical (T.81 Annex C) code per symbol value.
  std::array<Code, 256> encoder_codes() const;
  // Counts sum to the symbol count, at most 256 symbols, and the canonical
  // assignment fits in 16 bits without using the all-ones code.
  void validate() const;
};

// T.81 Annex K.3 "typical" tables.
const HuffmanTable& annex_k_dc_luma();
const HuffmanTable& annex_k_ac_luma();
const HuffmanTable& annex_k_dc_chroma();
const HuffmanTable& annex_k_ac_chroma();

struct MarkerSegment {
  std::uint8_t code = 0;     // byte following 0xFF
  std::size_t offset = 0;    // offset of the 0xFF byte
  std::size_t length = 0;    // segment length field (0 for SOI/EOI/RSTn)
};

struct FrameComponent {
  int id = 0;
  int h_sampling = 1;
  int v_sampling = 1;
  int quant_table = 0;
};

struct JfifStructure {
  std::vector<MarkerSegment> markers;
  int width = 0;
  int height = 0;
  std::vector<FrameComponent> components;
  std::vector<HuffmanTable> huffman_tables;
  int restart_interval = 0;
  std::size_t scan_begin = 0;  // first entropy-coded byte of the first scan
  std::size_t scan_end = 0;    // one past its last byte
};

struct ParsedJfif {
  CoefficientGrid grid;
  JfifStructure structure;
};

// Baseline sequential, Huffman, 8-bit, 1 or 3 components, 1x1 sampling.
ParsedJfif parse_jfif(std::span<const std::uint8_t> bytes);

// SOI, APP0 (JFIF 1.01), DQT, SOF0, DHT (Annex K tables), SOS, EOI.
std::vector<std::uint8_t> write_jfif(const CoefficientGrid& grid);

}  // namespace jpegcons
