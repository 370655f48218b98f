#include "sarsim/vision/colorspace.hpp"

#include <algorithm>
#include <cmath>

namespace sarsim::vision {

namespace {

std::uint8_t round_u8(double v) {
    const double r = std::floor(v + 0.5);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

double srgb_to_linear(std::uint8_t c8) {
    static const auto table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table[c8];
}

}  // namespace

std::array<std::uint8_t, 3> rgb_to_hls(const Rgb8& rgb) {
    const int r = rgb[0], g = rgb[1], b = rgb[2];
    const int maxc = std::max({r, g, b});
    const int minc = std::min({r, g, b});
    const double l = (maxc + minc) / 510.0;
    if (maxc == minc) {
        return {0, round_u8(l * 255.0), 0};
    }
    const double d = maxc - minc;
    const double s = (maxc + minc) <= 255 ? d / (maxc + minc) : d / (510 - maxc - minc);
    double h_deg = 0.0;
    if (maxc == r) {
        h_deg = 60.0 * std::fmod((g - b) / d, 6.0);
        if (h_deg < 0.0) h_deg += 360.0;
    } else if (maxc == g) {
        h_deg = 60.0 * ((b - r) / d + 2.0);
    } else {
        h_deg = 60.0 * ((r - g) / d + 4.0);
    }
    return {round_u8(h_deg * 255.0 / 360.0), round_u8(l * 255.0), round_u8(s * 255.0)};
}

std::array<std::uint8_t, 3> rgb_to_lab(const Rgb8& rgb) {
    const double rl = srgb_to_linear(rgb[0]);
    const double gl = srgb_to_linear(rgb[1]);
    const double bl = srgb_to_linear(rgb[2]);

    const double x = 0.412453 * rl + 0.357580 * gl + 0.180423 * bl;
    const double y = 0.212671 * rl + 0.715160 * gl + 0.072169 * bl;
    const double z = 0.019334 * rl + 0.119193 * gl + 0.950227 * bl;

    // White point = matrix row sums, so pure white maps exactly to L=100, a=b=0.
    const double xn = 0.412453 + 0.357580 + 0.180423;
    const double yn = 0.212671 + 0.715160 + 0.072169;
    const double zn = 0.019334 + 0.119193 + 0.950227;

    auto f = [](double t) {
        return t > 0.008856 ? std::cbrt(t) : 7.787 * t + 16.0 / 116.0;
    };
    const double fx = f(x / xn);
    const double fy = f(y / yn);
    const double fz = f(z / zn);

    const double L = 116.0 * fy - 16.0;
    const double a = 500.0 * (fx - fy);
    const double b2 = 200.0 * (fy - fz);

    return {round_u8(L * 255.0 / 100.0), round_u8(a + 128.0), round_u8(b2 + 128.0)};
}

}  // namespace sarsim::vision
