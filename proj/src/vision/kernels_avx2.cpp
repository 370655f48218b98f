#include "sarsim/vision/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace sarsim::vision::kernels {

namespace {

// x >= lo for unsigned bytes: max(x, lo) == x.
inline __m256i cmpge_epu8(__m256i x, __m256i lo) {
    return _mm256_cmpeq_epi8(_mm256_max_epu8(x, lo), x);
}

// x <= hi for unsigned bytes: min(x, hi) == x.
inline __m256i cmple_epu8(__m256i x, __m256i hi) {
    return _mm256_cmpeq_epi8(_mm256_min_epu8(x, hi), x);
}

void mask_in_range_avx2(const std::uint8_t* c0, const std::uint8_t* c1,
                        const std::uint8_t* c2, std::size_t n, const ChannelRange& r,
                        std::uint8_t* out) {
    const __m256i lo0 = _mm256_set1_epi8(static_cast<char>(r.lo[0]));
    const __m256i hi0 = _mm256_set1_epi8(static_cast<char>(r.hi[0]));
    const __m256i lo1 = _mm256_set1_epi8(static_cast<char>(r.lo[1]));
    const __m256i hi1 = _mm256_set1_epi8(static_cast<char>(r.hi[1]));
    const __m256i lo2 = _mm256_set1_epi8(static_cast<char>(r.lo[2]));
    const __m256i hi2 = _mm256_set1_epi8(static_cast<char>(r.hi[2]));

    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i x0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(c0 + i));
        const __m256i x1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(c1 + i));
        const __m256i x2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(c2 + i));
        __m256i m = _mm256_and_si256(cmpge_epu8(x0, lo0), cmple_epu8(x0, hi0));
        m = _mm256_and_si256(m, _mm256_and_si256(cmpge_epu8(x1, lo1), cmple_epu8(x1, hi1)));
        m = _mm256_and_si256(m, _mm256_and_si256(cmpge_epu8(x2, lo2), cmple_epu8(x2, hi2)));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), m);
    }
    for (; i < n; ++i) {
        const bool in = c0[i] >= r.lo[0] && c0[i] <= r.hi[0] && c1[i] >= r.lo[1] &&
                        c1[i] <= r.hi[1] && c2[i] >= r.lo[2] && c2[i] <= r.hi[2];
        out[i] = in ? 255 : 0;
    }
}

// For binary inputs, round(w*255) per mask and summing matches the scalar
// float expression on all 8 input combinations (checked by equivalence tests):
// 0.2989*255 -> 76, 0.5870*255 -> 150, 0.1140*255 -> 29, total 255.
void merge_masks_avx2(const std::uint8_t* hls, const std::uint8_t* lab,
                      const std::uint8_t* rgb, std::size_t n, std::uint8_t* out) {
    const __m256i w_hls = _mm256_set1_epi8(76);
    const __m256i w_lab = _mm256_set1_epi8(static_cast<char>(150));
    const __m256i w_rgb = _mm256_set1_epi8(29);

    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i h = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hls + i));
        const __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lab + i));
        const __m256i r = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rgb + i));
        __m256i v = _mm256_and_si256(h, w_hls);
        v = _mm256_add_epi8(v, _mm256_and_si256(l, w_lab));
        v = _mm256_add_epi8(v, _mm256_and_si256(r, w_rgb));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), v);
    }
    for (; i < n; ++i) {
        out[i] = static_cast<std::uint8_t>((hls[i] & 76) + (lab[i] & 150) + (rgb[i] & 29));
    }
}

void binarize_avx2(const std::uint8_t* gray, std::size_t n, std::uint8_t threshold,
                   std::uint8_t* out) {
    const __m256i t = _mm256_set1_epi8(static_cast<char>(threshold));
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(gray + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), cmpge_epu8(x, t));
    }
    for (; i < n; ++i) {
        out[i] = gray[i] >= threshold ? 255 : 0;
    }
}

}  // namespace

const Backend& avx2_backend() {
    static const Backend backend{"avx2", mask_in_range_avx2, merge_masks_avx2, binarize_avx2};
    return backend;
}

}  // namespace sarsim::vision::kernels

#endif  // x86-64
