#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sarsim::vision {

struct ChannelRange {
    std::array<std::uint8_t, 3> lo{0, 0, 0};
    std::array<std::uint8_t, 3> hi{255, 255, 255};
};

// Per-pixel kernels over planar channel buffers. Each has a scalar reference
// implementation and an AVX2 variant; the active backend is picked at runtime
// and the variants are byte-identical by test.
namespace kernels {

// out[i] = 255 if every channel of pixel i lies within [lo, hi], else 0.
using MaskInRangeFn = void (*)(const std::uint8_t* c0, const std::uint8_t* c1,
                               const std::uint8_t* c2, std::size_t n,
                               const ChannelRange& range, std::uint8_t* out);

// out[i] = round(0.2989*hls[i] + 0.5870*lab[i] + 0.1140*rgb[i]) for binary
// (0/255) mask inputs; output alphabet {0, 29, 76, 105, 150, 179, 226, 255}.
using MergeMasksFn = void (*)(const std::uint8_t* hls, const std::uint8_t* lab,
                              const std::uint8_t* rgb, std::size_t n, std::uint8_t* out);

// out[i] = 255 if gray[i] >= threshold, else 0.
using BinarizeFn = void (*)(const std::uint8_t* gray, std::size_t n,
                            std::uint8_t threshold, std::uint8_t* out);

struct Backend {
    const char* name;
    MaskInRangeFn mask_in_range;
    MergeMasksFn merge_masks;
    BinarizeFn binarize;
};

const Backend& scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend();
#endif

bool avx2_supported();

// "auto" (default), "scalar", or "avx2". Throws std::invalid_argument for
// unknown or unsupported names.
void set_active_backend(const std::string& name);
const Backend& active_backend();
std::vector<std::string> available_backends();

}  // namespace kernels

}  // namespace sarsim::vision
