#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sarsim/geometry.hpp"
#include "sarsim/vision/image.hpp"
#include "sarsim/vision/kernels.hpp"

namespace sarsim::vision {

struct ColorThresholds {
    std::string color_name;
    ChannelRange rgb;
    ChannelRange hls;
    ChannelRange lab;
};

struct Blob {
    double cx = 0.0;  // pixels, image coordinates (origin top-left)
    double cy = 0.0;
    double radius = 0.0;  // equivalent-area radius, pixels
    int area = 0;         // pixel count
    std::string color_name;
};

inline constexpr std::uint8_t kDefaultBinarizeThreshold = 140;
inline constexpr int kDefaultMinBlobArea = 25;

// Threshold the image in RGB, HLS, and LAB, then merge the three binary masks
// into a weighted gray image (weights 0.2989 / 0.5870 / 0.1140).
GrayImage threshold_merge(const RgbImage& img, const ColorThresholds& th);

// Binarize, label 8-connected components, fit equivalent-area circles.
// Components smaller than min_area are dropped; result sorted by area
// descending (ties keep top-left-first scan order).
std::vector<Blob> detect_blobs(const GrayImage& gray,
                               std::uint8_t binarize_threshold = kDefaultBinarizeThreshold,
                               int min_area = kDefaultMinBlobArea,
                               std::string_view color_name = "");

// Blob nearest the image center; ties broken by larger area, then lower (y, x).
std::optional<Blob> select_closest(std::span<const Blob> blobs, const Vec2& image_center);

struct SeedRegion {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

// Per-colorspace min/max over the seed region, widened by tolerance*255 and
// clamped. Throws std::invalid_argument if the region leaves the image or
// covers fewer than 9 pixels.
ColorThresholds auto_calibrate_thresholds(const RgbImage& img, const SeedRegion& region,
                                          double tolerance, std::string color_name);

}  // namespace sarsim::vision
