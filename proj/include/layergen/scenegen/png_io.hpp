#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace layergen::png {

// 8-bit grayscale (channels = 1) or RGB (channels = 3), rows top to bottom.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;  // interleaved, width * height * channels
};

// Minimal non-interlaced PNG codec over zlib. write emits filter-0 rows at a
// fixed compression level, so identical pixels give identical bytes. read
// handles 8-bit gray/RGB with all five row filters.
void write(const std::string& path, const Image& img);
Image read(const std::string& path);

std::vector<std::uint8_t> encode(const Image& img);
Image decode(const std::uint8_t* data, std::size_t size);

}  // namespace layergen::png
