#include "sarsim/vision/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sarsim/vision/colorspace.hpp"

namespace sarsim::vision {

GrayImage threshold_merge(const RgbImage& img, const ColorThresholds& th) {
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;

    // Deinterleave RGB and convert per pixel into planar channel buffers.
    std::vector<std::uint8_t> planes(9 * n);
    std::uint8_t* rgb_p[3] = {&planes[0], &planes[n], &planes[2 * n]};
    std::uint8_t* hls_p[3] = {&planes[3 * n], &planes[4 * n], &planes[5 * n]};
    std::uint8_t* lab_p[3] = {&planes[6 * n], &planes[7 * n], &planes[8 * n]};
    for (std::size_t i = 0; i < n; ++i) {
        const Rgb8 px{img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2]};
        const auto hls = rgb_to_hls(px);
        const auto lab = rgb_to_lab(px);
        for (int c = 0; c < 3; ++c) {
            rgb_p[c][i] = px[c];
            hls_p[c][i] = hls[c];
            lab_p[c][i] = lab[c];
        }
    }

    const auto& backend = kernels::active_backend();
    std::vector<std::uint8_t> m_rgb(n), m_hls(n), m_lab(n);
    backend.mask_in_range(rgb_p[0], rgb_p[1], rgb_p[2], n, th.rgb, m_rgb.data());
    backend.mask_in_range(hls_p[0], hls_p[1], hls_p[2], n, th.hls, m_hls.data());
    backend.mask_in_range(lab_p[0], lab_p[1], lab_p[2], n, th.lab, m_lab.data());

    GrayImage out(img.width, img.height);
    backend.merge_masks(m_hls.data(), m_lab.data(), m_rgb.data(), n, out.pixels.data());
    return out;
}

std::vector<Blob> detect_blobs(const GrayImage& gray, std::uint8_t binarize_threshold,
                               int min_area, std::string_view color_name) {
    const int w = gray.width;
    const int h = gray.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<std::uint8_t> bin(n);
    kernels::active_backend().binarize(gray.pixels.data(), n, binarize_threshold, bin.data());

    std::vector<std::uint8_t> visited(n, 0);
    std::vector<std::size_t> stack;
    std::vector<Blob> blobs;

    for (std::size_t start = 0; start < n; ++start) {
        if (bin[start] == 0 || visited[start]) continue;
        stack.clear();
        stack.push_back(start);
        visited[start] = 1;
        double sum_x = 0.0, sum_y = 0.0;
        int area = 0;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(idx % w);
            const int y = static_cast<int>(idx / w);
            sum_x += x;
            sum_y += y;
            ++area;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (bin[nidx] != 0 && !visited[nidx]) {
                        visited[nidx] = 1;
                        stack.push_back(nidx);
                    }
                }
            }
        }
        if (area < min_area) continue;
        Blob b;
        b.cx = sum_x / area;
        b.cy = sum_y / area;
        b.area = area;
        b.radius = std::sqrt(area / kPi);
        b.color_name = std::string(color_name);
        blobs.push_back(std::move(b));
    }

    std::stable_sort(blobs.begin(), blobs.end(),
                     [](const Blob& a, const Blob& b) { return a.area > b.area; });
    return blobs;
}

std::optional<Blob> select_closest(std::span<const Blob> blobs, const Vec2& image_center) {
    const Blob* best = nullptr;
    double best_d = 0.0;
    for (const Blob& b : blobs) {
        const double d = std::hypot(b.cx - image_center.x, b.cy - image_center.y);
        if (best == nullptr) {
            best = &b;
            best_d = d;
            continue;
        }
        if (d < best_d) {
            best = &b;
            best_d = d;
        } else if (d == best_d) {
            const bool wins = b.area > best->area ||
                              (b.area == best->area &&
                               std::pair(b.cy, b.cx) < std::pair(best->cy, best->cx));
            if (wins) {
                best = &b;
                best_d = d;
            }
        }
    }
    if (best == nullptr) return std::nullopt;
    return *best;
}

ColorThresholds auto_calibrate_thresholds(const RgbImage& img, const SeedRegion& region,
                                          double tolerance, std::string color_name) {
    if (region.width <= 0 || region.height <= 0 || region.x < 0 || region.y < 0 ||
        region.x + region.width > img.width || region.y + region.height > img.height) {
        throw std::invalid_argument("auto_calibrate: seed region must lie inside the image");
    }
    if (region.width * region.height < 9) {
        throw std::invalid_argument("auto_calibrate: seed region must cover at least 9 pixels");
    }

    std::array<std::uint8_t, 3> lo_rgb{255, 255, 255}, hi_rgb{0, 0, 0};
    std::array<std::uint8_t, 3> lo_hls{255, 255, 255}, hi_hls{0, 0, 0};
    std::array<std::uint8_t, 3> lo_lab{255, 255, 255}, hi_lab{0, 0, 0};

    for (int y = region.y; y < region.y + region.height; ++y) {
        for (int x = region.x; x < region.x + region.width; ++x) {
            const std::uint8_t* p = img.at(x, y);
            const Rgb8 px{p[0], p[1], p[2]};
            const auto hls = rgb_to_hls(px);
            const auto lab = rgb_to_lab(px);
            for (int c = 0; c < 3; ++c) {
                lo_rgb[c] = std::min(lo_rgb[c], px[c]);
                hi_rgb[c] = std::max(hi_rgb[c], px[c]);
                lo_hls[c] = std::min(lo_hls[c], hls[c]);
                hi_hls[c] = std::max(hi_hls[c], hls[c]);
                lo_lab[c] = std::min(lo_lab[c], lab[c]);
                hi_lab[c] = std::max(hi_lab[c], lab[c]);
            }
        }
    }

    const double widen = tolerance * 255.0;
    auto widen_range = [widen](const std::array<std::uint8_t, 3>& lo,
                               const std::array<std::uint8_t, 3>& hi) {
        ChannelRange r;
        for (int c = 0; c < 3; ++c) {
            const double l = std::floor(lo[c] - widen + 0.5);
            const double h = std::floor(hi[c] + widen + 0.5);
            r.lo[c] = static_cast<std::uint8_t>(std::clamp(l, 0.0, 255.0));
            r.hi[c] = static_cast<std::uint8_t>(std::clamp(h, 0.0, 255.0));
        }
        return r;
    };

    ColorThresholds th;
    th.color_name = std::move(color_name);
    th.rgb = widen_range(lo_rgb, hi_rgb);
    th.hls = widen_range(lo_hls, hi_hls);
    th.lab = widen_range(lo_lab, hi_lab);
    return th;
}

}  // namespace sarsim::vision
