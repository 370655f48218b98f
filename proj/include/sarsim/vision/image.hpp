#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace sarsim::vision {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB triples, 3*width*height

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(3u * w * h, 0) {}

    static RgbImage solid(int w, int h, std::array<std::uint8_t, 3> rgb);

    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + 3u * (static_cast<std::size_t>(y) * width + x);
    }
    std::uint8_t* at(int x, int y) {
        return pixels.data() + 3u * (static_cast<std::size_t>(y) * width + x);
    }
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, width*height

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// Binary PPM (P6, maxval 255).
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const RgbImage& img, const std::filesystem::path& path);

}  // namespace sarsim::vision
