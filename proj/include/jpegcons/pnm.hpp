#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "jpegcons/image.hpp"

namespace jpegcons {

// Binary PGM (P5) / PPM (P6) with maxval 255.
PixelImage read_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pnm(const PixelImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline PixelImage load_pnm(const std::filesystem::path& path) { return read_pnm(read_file(path)); }
inline void save_pnm(const std::filesystem::path& path, const PixelImage& img) {
  write_file(path, write_pnm(img));
}

}  // namespace jpegcons
