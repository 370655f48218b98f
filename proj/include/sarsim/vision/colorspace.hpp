#pragma once

#include <array>
#include <cstdint>

namespace sarsim::vision {

using Rgb8 = std::array<std::uint8_t, 3>;

// Hexcone HLS. H is scaled from [0, 360) degrees to [0, 255]; L and S are
// scaled to [0, 255]. Rounding is half-up, pinned by golden tests.
std::array<std::uint8_t, 3> rgb_to_hls(const Rgb8& rgb);

// sRGB -> linear (gamma 2.4 with linear toe) -> XYZ (D65) -> CIELAB.
// L is scaled from [0, 100] to [0, 255]; a and b are offset by +128 and
// clamped. Rounding is half-up, pinned by golden tests.
std::array<std::uint8_t, 3> rgb_to_lab(const Rgb8& rgb);

}  // namespace sarsim::vision
