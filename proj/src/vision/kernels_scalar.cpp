#include "sarsim/vision/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace sarsim::vision::kernels {

namespace {

void mask_in_range_scalar(const std::uint8_t* c0, const std::uint8_t* c1,
                          const std::uint8_t* c2, std::size_t n, const ChannelRange& r,
                          std::uint8_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const bool in = c0[i] >= r.lo[0] && c0[i] <= r.hi[0] && c1[i] >= r.lo[1] &&
                        c1[i] <= r.hi[1] && c2[i] >= r.lo[2] && c2[i] <= r.hi[2];
        out[i] = in ? 255 : 0;
    }
}

void merge_masks_scalar(const std::uint8_t* hls, const std::uint8_t* lab,
                        const std::uint8_t* rgb, std::size_t n, std::uint8_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double v = 0.2989 * hls[i] + 0.5870 * lab[i] + 0.1140 * rgb[i];
        const double r = std::floor(v + 0.5);
        out[i] = static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
    }
}

void binarize_scalar(const std::uint8_t* gray, std::size_t n, std::uint8_t threshold,
                     std::uint8_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = gray[i] >= threshold ? 255 : 0;
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend{"scalar", mask_in_range_scalar, merge_masks_scalar,
                                 binarize_scalar};
    return backend;
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {

const Backend* g_active = nullptr;

const Backend* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) return &avx2_backend();
#endif
    return &scalar_backend();
}

}  // namespace

void set_active_backend(const std::string& name) {
    if (name == "auto") {
        g_active = pick_auto();
        return;
    }
    if (name == "scalar") {
        g_active = &scalar_backend();
        return;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_supported()) {
            throw std::invalid_argument("avx2 backend not supported on this CPU");
        }
        g_active = &avx2_backend();
        return;
    }
#endif
    throw std::invalid_argument("unknown vision backend: " + name);
}

const Backend& active_backend() {
    if (g_active == nullptr) g_active = pick_auto();
    return *g_active;
}

std::vector<std::string> available_backends() {
    std::vector<std::string> names{"scalar"};
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported()) names.push_back("avx2");
#endif
    return names;
}

}  // namespace sarsim::vision::kernels
