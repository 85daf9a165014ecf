#include "jpegcons/jfif.hpp"

#include <cstring>
#include <map>
#include <optional>

namespace jpegcons {
namespace {

HuffmanTable make_table(TableClass cls, int id, std::array<std::uint8_t, 16> counts,
                        std::vector<std::uint8_t> symbols) {
  HuffmanTable t{cls, id, counts, std::move(symbols)};
  t.validate();
  return t;
}

const std::vector<std::uint8_t> kDcSymbols = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

// Magnitude category (number of bits) of a coefficient value.
int category(int v) {
  int a = v < 0 ? -v : v, n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint32_t bits, int length) {
    for (int i = length - 1; i >= 0; --i) {
      acc_ = std::uint8_t((acc_ << 1) | ((bits >> i) & 1));
      if (++count_ == 8) emit();
    }
  }
  // Pads the final byte with one-bits.
  void flush() {
    while (count_ != 0) put(1, 1);
  }

 private:
  void emit() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    count_ = 0;
  }
  std::vector<std::uint8_t>& out_;
  std::uint8_t acc_ = 0;
  int count_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  int bit() {
    if (count_ == 0) fill();
    --count_;
    return (acc_ >> count_) & 1;
  }
  int bits(int n) {
    int v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | bit();
    return v;
  }
  // Drops buffered bits and consumes the expected RSTn marker.
  void restart(int n) {
    count_ = 0;
    if (pos_ + 1 >= bytes_.size()) fail(ErrorKind::TruncatedStream, "missing restart marker");
    if (bytes_[pos_] != 0xFF || bytes_[pos_ + 1] != 0xD0 + (n & 7))
      fail(ErrorKind::BadMarker, "expected RST" + std::to_string(n & 7));
    pos_ += 2;
  }
  std::size_t position() const { return pos_; }

 private:
  void fill() {
    if (pos_ >= bytes_.size()) fail(ErrorKind::TruncatedStream, "entropy-coded data ends early");
    std::uint8_t b = bytes_[pos_];
    if (b == 0xFF) {
      if (pos_ + 1 >= bytes_.size()) fail(ErrorKind::TruncatedStream, "entropy-coded data ends early");
      if (bytes_[pos_ + 1] != 0x00) fail(ErrorKind::TruncatedStream, "marker inside entropy-coded block");
      ++pos_;
    }
    ++pos_;
    acc_ = b;
    count_ = 8;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::uint32_t acc_ = 0;
  int count_ = 0;
};

// T.81 Annex F.2.2.3 decoding tables.
class HuffmanDecoder {
 public:
  explicit HuffmanDecoder(const HuffmanTable& t) : symbols_(t.symbols) {
    int code = 0, k = 0;
    for (int len = 1; len <= 16; ++len) {
      valptr_[len] = k;
      mincode_[len] = code;
      code += t.counts[len - 1];
      k += t.counts[len - 1];
      maxcode_[len] = t.counts[len - 1] ? code - 1 : -1;
      code <<= 1;
    }
  }

  int decode(BitReader& in) const {
    int code = 0;
    for (int len = 1; len <= 16; ++len) {
      code = (code << 1) | in.bit();
      if (maxcode_[len] >= 0 && code <= maxcode_[len]) return symbols_[valptr_[len] + code - mincode_[len]];
    }
    fail(ErrorKind::HuffmanDecodeError, "invalid Huffman code");
  }

 private:
  std::vector<std::uint8_t> symbols_;
  std::array<int, 17> maxcode_{}, mincode_{}, valptr_{};
};

int extend(int v, int s) { return s == 0 ? 0 : (v < (1 << (s - 1)) ? v - (1 << s) + 1 : v); }

class SegmentReader {
 public:
  SegmentReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  int u8() {
    if (pos_ >= bytes_.size()) fail(ErrorKind::TruncatedStream, "segment too short");
    return bytes_[pos_++];
  }
  int u16() {
    const int hi = u8();
    return (hi << 8) | u8();
  }
  bool empty() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v & 0xFF));
}

void put_marker(std::vector<std::uint8_t>& out, std::uint8_t code) {
  out.push_back(0xFF);
  out.push_back(code);
}

void put_huffman(std::vector<std::uint8_t>& out, const HuffmanTable& t) {
  out.push_back(std::uint8_t((int(t.table_class) << 4) | t.id));
  out.insert(out.end(), t.counts.begin(), t.counts.end());
  out.insert(out.end(), t.symbols.begin(), t.symbols.end());
}

bool is_unsupported_sof(std::uint8_t code) {
  return code == 0xC2 || code == 0xC3 || (code >= 0xC5 && code <= 0xC7) || (code >= 0xC9 && code <= 0xCB) ||
         (code >= 0xCD && code <= 0xCF);
}

}  // namespace

std::array<HuffmanTable::Code, 256> HuffmanTable::encoder_codes() const {
  std::array<Code, 256> codes{};
  int code = 0;
  std::size_t k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < counts[len - 1]; ++i) codes[symbols[k++]] = {std::uint16_t(code++), std::uint8_t(len)};
    code <<= 1;
  }
  return codes;
}

void HuffmanTable::validate() const {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total != symbols.size() || total > 256 || total == 0)
    fail(ErrorKind::HuffmanDecodeError, "Huffman counts do not match symbol list");
  // Kraft check; the all-ones code of any length is reserved.
  long code = 0;
  for (int len = 1; len <= 16; ++len) {
    code += counts[len - 1];
    if (code > (1L << len) - (len == 16 ? 1 : 0)) fail(ErrorKind::HuffmanDecodeError, "Huffman table over-subscribed");
    code <<= 1;
  }
  if (table_class == TableClass::dc) {
    for (auto s : symbols)
      if (s > 11) fail(ErrorKind::HuffmanDecodeError, "DC symbol out of range");
  }
}

const HuffmanTable& annex_k_dc_luma() {
  static const HuffmanTable t = make_table(TableClass::dc, 0, {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0}, kDcSymbols);
  return t;
}

const HuffmanTable& annex_k_dc_chroma() {
  static const HuffmanTable t = make_table(TableClass::dc, 1, {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, kDcSymbols);
  return t;
}

const HuffmanTable& annex_k_ac_luma() {
  static const HuffmanTable t = make_table(
      TableClass::ac, 0, {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125},
      {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71,
       0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
       0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x34, 0x35, 0x36, 0x37,
       0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
       0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83,
       0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
       0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
       0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
       0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA});
  return t;
}

const HuffmanTable& annex_k_ac_chroma() {
  static const HuffmanTable t = make_table(
      TableClass::ac, 1, {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119},
      {0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22,
       0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1,
       0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x35, 0x36,
       0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
       0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A,
       0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A,
       0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA,
       0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
       0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA});
  return t;
}

std::vector<std::uint8_t> write_jfif(const CoefficientGrid& grid) {
  if (grid.color == ColorPath::rgb_passthrough)
    fail(ErrorKind::PassthroughNotRepresentable, "JFIF stores YCbCr; rgb-passthrough grids have no JFIF form");
  if (grid.block_size != 8) fail(ErrorKind::InvalidArgument, "only 8x8 block grids can be written as JFIF");
  const int nc = grid.channel_count();
  if (nc != 1 && nc != 3) fail(ErrorKind::WrongChannelCount, "JFIF needs 1 or 3 components");
  if (grid.width > 65535 || grid.height > 65535) fail(ErrorKind::InvalidArgument, "image too large for SOF0");
  grid.table.validate();

  std::vector<std::uint8_t> out;
  put_marker(out, 0xD8);

  put_marker(out, 0xE0);
  put_u16(out, 16);
  for (char c : {'J', 'F', 'I', 'F', '\0'}) out.push_back(std::uint8_t(c));
  out.insert(out.end(), {1, 1, 0});  // version 1.01, no density units
  put_u16(out, 1);
  put_u16(out, 1);
  out.insert(out.end(), {0, 0});  // no thumbnail

  put_marker(out, 0xDB);
  put_u16(out, 2 + 2 * 65);
  for (int id = 0; id < 2; ++id) {
    const TableMatrix& q = id == 0 ? grid.table.luma : grid.table.chroma;
    out.push_back(std::uint8_t(id));  // 8-bit precision
    for (int k = 0; k < 64; ++k) out.push_back(std::uint8_t(q.data()[zigzag_order()[k]]));
  }

  put_marker(out, 0xC0);
  put_u16(out, 8 + 3 * nc);
  out.push_back(8);
  put_u16(out, grid.height);
  put_u16(out, grid.width);
  out.push_back(std::uint8_t(nc));
  for (int c = 0; c < nc; ++c) out.insert(out.end(), {std::uint8_t(c + 1), 0x11, std::uint8_t(c == 0 ? 0 : 1)});

  const HuffmanTable* tables[] = {&annex_k_dc_luma(), &annex_k_ac_luma(), &annex_k_dc_chroma(), &annex_k_ac_chroma()};
  const int table_count = nc == 1 ? 2 : 4;
  std::size_t dht_length = 2;
  for (int i = 0; i < table_count; ++i) dht_length += 17 + tables[i]->symbols.size();
  put_marker(out, 0xC4);
  put_u16(out, int(dht_length));
  for (int i = 0; i < table_count; ++i) put_huffman(out, *tables[i]);

  put_marker(out, 0xDA);
  put_u16(out, 6 + 2 * nc);
  out.push_back(std::uint8_t(nc));
  for (int c = 0; c < nc; ++c) out.insert(out.end(), {std::uint8_t(c + 1), std::uint8_t(c == 0 ? 0x00 : 0x11)});
  out.insert(out.end(), {0, 63, 0});

  const auto dc_luma = annex_k_dc_luma().encoder_codes(), ac_luma = annex_k_ac_luma().encoder_codes();
  const auto dc_chroma = annex_k_dc_chroma().encoder_codes(), ac_chroma = annex_k_ac_chroma().encoder_codes();
  BitWriter bits(out);
  std::array<int, 3> prediction{};
  const auto& zz = zigzag_order();
  auto put_value = [&](int v, int s) {
    if (s) bits.put(std::uint32_t(v < 0 ? v + (1 << s) - 1 : v), s);
  };
  for (int by = 0; by < grid.blocks_y(); ++by) {
    for (int bx = 0; bx < grid.blocks_x(); ++bx) {
      for (int c = 0; c < nc; ++c) {
        const auto& dc_codes = c == 0 ? dc_luma : dc_chroma;
        const auto& ac_codes = c == 0 ? ac_luma : ac_chroma;
        const IntBlock b = grid.block(c, by, bx);
        const int diff = b.data()[0] - prediction[c];
        prediction[c] = b.data()[0];
        const int s = category(diff);
        if (s > 11) fail(ErrorKind::CoefficientOutOfRange, "DC difference exceeds baseline range");
        bits.put(dc_codes[s].bits, dc_codes[s].length);
        put_value(diff, s);

        int run = 0;
        for (int k = 1; k < 64; ++k) {
          const int v = b.data()[zz[k]];
          if (v == 0) {
            ++run;
            continue;
          }
          while (run > 15) {
            bits.put(ac_codes[0xF0].bits, ac_codes[0xF0].length);
            run -= 16;
          }
          const int size = category(v);
          if (size > 10) fail(ErrorKind::CoefficientOutOfRange, "AC coefficient exceeds baseline range");
          const int symbol = (run << 4) | size;
          bits.put(ac_codes[symbol].bits, ac_codes[symbol].length);
          put_value(v, size);
          run = 0;
        }
        if (run > 0) bits.put(ac_codes[0x00].bits, ac_codes[0x00].length);
      }
    }
  }
  bits.flush();
  put_marker(out, 0xD9);
  return out;
}

ParsedJfif parse_jfif(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8) fail(ErrorKind::BadMarker, "missing SOI");

  ParsedJfif result;
  JfifStructure& st = result.structure;
  st.markers.push_back({0xD8, 0, 0});

  std::map<int, TableMatrix> quant;
  std::map<int, HuffmanTable> dc_tables, ac_tables;
  bool have_frame = false, have_scan = false, have_eoi = false;
  std::vector<Plane<int>> planes;
  int blocks_x = 0, blocks_y = 0;

  std::size_t pos = 2;
  while (!have_eoi) {
    if (pos >= bytes.size()) fail(ErrorKind::TruncatedStream, "missing EOI");
    if (bytes[pos] != 0xFF) fail(ErrorKind::BadMarker, "expected marker at offset " + std::to_string(pos));
    const std::size_t marker_offset = pos;
    while (pos < bytes.size() && bytes[pos] == 0xFF) ++pos;
    if (pos >= bytes.size()) fail(ErrorKind::TruncatedStream, "missing EOI");
    const std::uint8_t code = bytes[pos++];

    if (code == 0xD9) {
      st.markers.push_back({code, marker_offset, 0});
      have_eoi = true;
      break;
    }
    if (code == 0x01 || (code >= 0xD0 && code <= 0xD7)) {
      st.markers.push_back({code, marker_offset, 0});
      continue;
    }
    if (code == 0x00 || code == 0xD8) fail(ErrorKind::BadMarker, "unexpected marker");
    if (pos + 2 > bytes.size()) fail(ErrorKind::TruncatedStream, "segment length missing");
    const std::size_t length = (std::size_t(bytes[pos]) << 8) | bytes[pos + 1];
    if (length < 2) fail(ErrorKind::BadMarker, "segment length below 2");
    if (pos + length > bytes.size()) fail(ErrorKind::TruncatedStream, "segment runs past end of data");
    st.markers.push_back({code, marker_offset, length});
    SegmentReader seg(bytes.subspan(pos + 2, length - 2));
    pos += length;

    if (is_unsupported_sof(code) || code == 0xCC) fail(ErrorKind::NotBaseline, "SOF/DAC marker 0x" + std::to_string(code));

    if (code == 0xDB) {
      while (!seg.empty()) {
        const int pq_tq = seg.u8();
        const int precision = pq_tq >> 4, id = pq_tq & 15;
        if (precision > 1 || id > 3) fail(ErrorKind::BadMarker, "bad DQT table spec");
        TableMatrix q;
        for (int k = 0; k < 64; ++k) q.data()[zigzag_order()[k]] = precision ? seg.u16() : seg.u8();
        quant[id] = q;
      }
    } else if (code == 0xC4) {
      while (!seg.empty()) {
        const int tc_th = seg.u8();
        HuffmanTable t;
        if ((tc_th >> 4) > 1 || (tc_th & 15) > 3) fail(ErrorKind::BadMarker, "bad DHT table spec");
        t.table_class = TableClass(tc_th >> 4);
        t.id = tc_th & 15;
        std::size_t total = 0;
        for (auto& c : t.counts) total += (c = std::uint8_t(seg.u8()));
        if (total > seg.remaining()) fail(ErrorKind::TruncatedStream, "DHT symbols missing");
        for (std::size_t i = 0; i < total; ++i) t.symbols.push_back(std::uint8_t(seg.u8()));
        t.validate();
        (t.table_class == TableClass::dc ? dc_tables : ac_tables)[t.id] = t;
        st.huffman_tables.push_back(t);
      }
    } else if (code == 0xDD) {
      st.restart_interval = seg.u16();
    } else if (code == 0xC0 || code == 0xC1) {
      if (have_frame) fail(ErrorKind::BadMarker, "second frame header");
      have_frame = true;
      if (seg.u8() != 8) fail(ErrorKind::NotBaseline, "sample precision is not 8 bits");
      st.height = seg.u16();
      st.width = seg.u16();
      const int nc = seg.u8();
      if (st.width == 0 || st.height == 0) fail(ErrorKind::NotBaseline, "DNL-defined height is not supported");
      if (nc != 1 && nc != 3) fail(ErrorKind::WrongChannelCount, std::to_string(nc) + " components");
      for (int c = 0; c < nc; ++c) {
        FrameComponent fc;
        fc.id = seg.u8();
        const int hv = seg.u8();
        fc.h_sampling = hv >> 4;
        fc.v_sampling = hv & 15;
        fc.quant_table = seg.u8();
        if (fc.h_sampling != 1 || fc.v_sampling != 1) fail(ErrorKind::UnsupportedSampling, "only 1x1 sampling");
        if (fc.quant_table > 3) fail(ErrorKind::BadMarker, "bad quantization table id");
        st.components.push_back(fc);
      }
      blocks_x = (st.width + 7) / 8;
      blocks_y = (st.height + 7) / 8;
      planes.assign(nc, Plane<int>::Zero(8 * blocks_y, 8 * blocks_x));
    } else if (code == 0xDA) {
      if (!have_frame) fail(ErrorKind::BadMarker, "SOS before frame header");
      const int ns = seg.u8();
      struct ScanComponent {
        int index;
        const HuffmanDecoder* dc;
        const HuffmanDecoder* ac;
      };
      std::vector<HuffmanDecoder> decoders;
      decoders.reserve(2 * 4);
      std::vector<ScanComponent> scan;
      for (int i = 0; i < ns; ++i) {
        const int id = seg.u8(), tables = seg.u8();
        int index = -1;
        for (std::size_t c = 0; c < st.components.size(); ++c)
          if (st.components[c].id == id) index = int(c);
        if (index < 0) fail(ErrorKind::BadMarker, "scan references unknown component");
        const auto dc = dc_tables.find(tables >> 4), ac = ac_tables.find(tables & 15);
        if (dc == dc_tables.end() || ac == ac_tables.end())
          fail(ErrorKind::BadMarker, "scan references undefined Huffman table");
        decoders.emplace_back(dc->second);
        decoders.emplace_back(ac->second);
        scan.push_back({index, nullptr, nullptr});
      }
      for (std::size_t i = 0; i < scan.size(); ++i) {
        scan[i].dc = &decoders[2 * i];
        scan[i].ac = &decoders[2 * i + 1];
      }
      const int ss = seg.u8(), se = seg.u8(), ahal = seg.u8();
      if (ss != 0 || se != 63 || ahal != 0) fail(ErrorKind::NotBaseline, "spectral selection or approximation");
      if (ns < 1 || (ns > 1 && ns != int(st.components.size())))
        fail(ErrorKind::BadMarker, "unsupported scan component set");

      if (!have_scan) st.scan_begin = pos;
      BitReader in(bytes, pos);
      std::array<int, 3> prediction{};
      const auto& zz = zigzag_order();
      int mcu = 0, rst = 0;
      for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
          if (st.restart_interval && mcu > 0 && mcu % st.restart_interval == 0) {
            in.restart(rst++);
            prediction = {};
          }
          for (const auto& sc : scan) {
            auto tile = planes[sc.index].block<8, 8>(8 * by, 8 * bx);
            const int s = sc.dc->decode(in);
            if (s > 11) fail(ErrorKind::HuffmanDecodeError, "DC category out of range");
            prediction[sc.index] += extend(in.bits(s), s);
            tile.setZero();
            tile(0, 0) = prediction[sc.index];
            for (int k = 1; k < 64;) {
              const int rs = sc.ac->decode(in);
              const int run = rs >> 4, size = rs & 15;
              if (size == 0) {
                if (run == 15) {
                  k += 16;
                  continue;
                }
                break;  // EOB
              }
              k += run;
              if (k > 63) fail(ErrorKind::HuffmanDecodeError, "coefficient index past 63");
              tile(zz[k] / 8, zz[k] % 8) = extend(in.bits(size), size);
              ++k;
            }
          }
          ++mcu;
        }
      }
      pos = in.position();
      if (!have_scan) st.scan_end = pos;
      have_scan = true;
    } else if (code == 0xC8 || (code >= 0xF0 && code <= 0xFD) || code < 0xC0) {
      fail(ErrorKind::BadMarker, "unsupported marker");
    }
    // APPn and COM are skipped.
  }

  if (!have_frame || !have_scan) fail(ErrorKind::BadMarker, "no frame or no scan before EOI");

  CoefficientGrid& g = result.grid;
  g.width = st.width;
  g.height = st.height;
  g.color = ColorPath::ycbcr;
  g.block_size = 8;
  auto table = [&](int id) -> const TableMatrix& {
    const auto it = quant.find(id);
    if (it == quant.end()) fail(ErrorKind::BadMarker, "component references undefined quantization table");
    return it->second;
  };
  g.table.luma = table(st.components[0].quant_table);
  if (st.components.size() == 3) {
    g.table.chroma = table(st.components[1].quant_table);
    if (table(st.components[2].quant_table) != g.table.chroma)
      fail(ErrorKind::InvalidArgument, "Cb and Cr use different quantization tables");
  } else {
    const int other = st.components[0].quant_table == 0 ? 1 : 0;
    if (quant.count(other)) {
      g.table.chroma = quant[other];
    } else {
      // Only a luma table: take the standard chroma table of the matching quality, if any.
      g.table.chroma = g.table.luma;
      for (int qf = 1; qf <= 100; ++qf) {
        const QuantTable candidate = table_for_qf(qf);
        if (candidate.luma == g.table.luma) {
          g.table.chroma = candidate.chroma;
          break;
        }
      }
    }
  }
  g.table.validate();
  g.table.quality_factor = match_quality_factor(g.table.luma, g.table.chroma);
  g.channels = std::move(planes);
  return result;
}

}  // namespace jpegcons
