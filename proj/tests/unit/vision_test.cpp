#include "sarsim/vision/colorspace.hpp"
#include "sarsim/vision/detector.hpp"
#include "sarsim/vision/image.hpp"
#include "sarsim/vision/kernels.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "sarsim/rng.hpp"

using namespace sarsim;
using namespace sarsim::vision;
using Catch::Approx;

namespace {

void render_disk_gray(GrayImage& img, double cx, double cy, double r, std::uint8_t value = 255) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r * r) img.at(x, y) = value;
        }
    }
}

void render_disk_rgb(RgbImage& img, double cx, double cy, double r,
                     std::array<std::uint8_t, 3> color) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r * r) {
                auto* p = img.at(x, y);
                p[0] = color[0];
                p[1] = color[1];
                p[2] = color[2];
            }
        }
    }
}

struct GoldenTriple {
    Rgb8 in;
    std::array<std::uint8_t, 3> out;
};

}  // namespace

TEST_CASE("hls conversion matches golden triples", "[vision]") {
    const GoldenTriple cases[] = {
        {{255, 255, 255}, {0, 255, 0}},  {{0, 0, 0}, {0, 0, 0}},
        {{255, 0, 0}, {0, 128, 255}},    {{0, 255, 0}, {85, 128, 255}},
        {{0, 0, 255}, {170, 128, 255}},  {{255, 255, 0}, {43, 128, 255}},
        {{200, 30, 30}, {0, 115, 188}},  {{20, 90, 20}, {85, 55, 162}},
        {{128, 128, 128}, {0, 128, 0}},
    };
    for (const auto& c : cases) {
        CAPTURE(int(c.in[0]), int(c.in[1]), int(c.in[2]));
        const auto got = rgb_to_hls(c.in);
        REQUIRE(int(got[0]) == int(c.out[0]));
        REQUIRE(int(got[1]) == int(c.out[1]));
        REQUIRE(int(got[2]) == int(c.out[2]));
    }
}

TEST_CASE("lab conversion matches golden triples", "[vision]") {
    const GoldenTriple cases[] = {
        {{0, 0, 0}, {0, 128, 128}},      {{255, 255, 255}, {255, 128, 128}},
        {{255, 0, 0}, {136, 208, 195}},  {{0, 255, 0}, {224, 42, 211}},
        {{0, 0, 255}, {82, 207, 20}},    {{255, 255, 0}, {248, 106, 222}},
        {{200, 30, 30}, {110, 191, 173}}, {{20, 90, 20}, {84, 92, 161}},
        {{128, 128, 128}, {137, 128, 128}},
    };
    for (const auto& c : cases) {
        CAPTURE(int(c.in[0]), int(c.in[1]), int(c.in[2]));
        const auto got = rgb_to_lab(c.in);
        REQUIRE(int(got[0]) == int(c.out[0]));
        REQUIRE(int(got[1]) == int(c.out[1]));
        REQUIRE(int(got[2]) == int(c.out[2]));
    }
}

TEST_CASE("merge weights produce the exact 8-value alphabet", "[vision]") {
    const std::set<int> alphabet{0, 29, 76, 105, 150, 179, 226, 255};
    for (const auto& backend :
         {std::string("scalar"), std::string("avx2")}) {
        if (backend == "avx2" && !kernels::avx2_supported()) continue;
        const auto& b = backend == "avx2" ? kernels::avx2_backend() : kernels::scalar_backend();
        std::set<int> seen;
        for (int h : {0, 255}) {
            for (int l : {0, 255}) {
                for (int r : {0, 255}) {
                    std::uint8_t hb = h, lb = l, rb = r, out = 0;
                    b.merge_masks(&hb, &lb, &rb, 1, &out);
                    seen.insert(out);
                    REQUIRE(alphabet.count(out) == 1);
                }
            }
        }
        REQUIRE(seen == alphabet);
    }
}

TEST_CASE("merge combination values match the weighted sum", "[vision]") {
    const auto& b = kernels::scalar_backend();
    auto merge1 = [&](bool h, bool l, bool r) {
        std::uint8_t hb = h ? 255 : 0, lb = l ? 255 : 0, rb = r ? 255 : 0, out = 0;
        b.merge_masks(&hb, &lb, &rb, 1, &out);
        return int(out);
    };
    REQUIRE(merge1(true, true, true) == 255);
    REQUIRE(merge1(false, true, false) == 150);
    REQUIRE(merge1(true, false, false) == 76);
    REQUIRE(merge1(false, false, true) == 29);
    REQUIRE(merge1(true, true, false) == 226);
    REQUIRE(merge1(false, true, true) == 179);
    REQUIRE(merge1(true, false, true) == 105);
    REQUIRE(merge1(false, false, false) == 0);
}

TEST_CASE("avx2 kernels are byte-identical to scalar", "[vision][simd]") {
    if (!kernels::avx2_supported()) {
        SUCCEED("no AVX2 on this machine");
        return;
    }
    const auto& s = kernels::scalar_backend();
    const auto& v = kernels::avx2_backend();
    Rng rng(77, "simd-equiv");

    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 5000));
        std::vector<std::uint8_t> c0(n), c1(n), c2(n);
        for (std::size_t i = 0; i < n; ++i) {
            c0[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
            c1[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
            c2[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        }
        ChannelRange r;
        for (int c = 0; c < 3; ++c) {
            const int a = static_cast<int>(rng.uniform_int(0, 255));
            const int b = static_cast<int>(rng.uniform_int(0, 255));
            r.lo[c] = static_cast<std::uint8_t>(std::min(a, b));
            r.hi[c] = static_cast<std::uint8_t>(std::max(a, b));
        }

        std::vector<std::uint8_t> out_s(n), out_v(n);
        s.mask_in_range(c0.data(), c1.data(), c2.data(), n, r, out_s.data());
        v.mask_in_range(c0.data(), c1.data(), c2.data(), n, r, out_v.data());
        REQUIRE(out_s == out_v);

        // Binary mask inputs for the merge kernel.
        std::vector<std::uint8_t> mh(n), ml(n), mr(n);
        for (std::size_t i = 0; i < n; ++i) {
            mh[i] = rng.bernoulli(0.5) ? 255 : 0;
            ml[i] = rng.bernoulli(0.5) ? 255 : 0;
            mr[i] = rng.bernoulli(0.5) ? 255 : 0;
        }
        s.merge_masks(mh.data(), ml.data(), mr.data(), n, out_s.data());
        v.merge_masks(mh.data(), ml.data(), mr.data(), n, out_v.data());
        REQUIRE(out_s == out_v);

        const auto threshold = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        s.binarize(c0.data(), n, threshold, out_s.data());
        v.binarize(c0.data(), n, threshold, out_v.data());
        REQUIRE(out_s == out_v);
    }
}

TEST_CASE("backend selection", "[vision]") {
    REQUIRE_THROWS_AS(kernels::set_active_backend("neon"), std::invalid_argument);
    kernels::set_active_backend("scalar");
    REQUIRE(std::string(kernels::active_backend().name) == "scalar");
    kernels::set_active_backend("auto");
    const auto names = kernels::available_backends();
    REQUIRE_FALSE(names.empty());
    REQUIRE(names[0] == "scalar");
}

TEST_CASE("threshold_merge scores each colorspace mask", "[vision]") {
    // A red-ish image and thresholds tuned around it.
    const RgbImage img = RgbImage::solid(8, 8, {200, 30, 30});
    ColorThresholds th;
    th.color_name = "red";
    const auto hls = rgb_to_hls({200, 30, 30});
    const auto lab = rgb_to_lab({200, 30, 30});

    SECTION("passing all three masks gives 255") {
        th.rgb = {{190, 20, 20}, {210, 40, 40}};
        th.hls = {{0, uint8_t(hls[1] - 5), uint8_t(hls[2] - 5)},
                  {10, uint8_t(hls[1] + 5), uint8_t(hls[2] + 5)}};
        th.lab = {{uint8_t(lab[0] - 5), uint8_t(lab[1] - 5), uint8_t(lab[2] - 5)},
                  {uint8_t(lab[0] + 5), uint8_t(lab[1] + 5), uint8_t(lab[2] + 5)}};
        const GrayImage g = threshold_merge(img, th);
        for (auto v : g.pixels) REQUIRE(int(v) == 255);
    }
    SECTION("passing only LAB gives 150") {
        th.rgb = {{0, 0, 0}, {1, 1, 1}};    // excludes the image
        th.hls = {{200, 0, 0}, {210, 1, 1}};
        th.lab = {{uint8_t(lab[0] - 5), uint8_t(lab[1] - 5), uint8_t(lab[2] - 5)},
                  {uint8_t(lab[0] + 5), uint8_t(lab[1] + 5), uint8_t(lab[2] + 5)}};
        const GrayImage g = threshold_merge(img, th);
        for (auto v : g.pixels) REQUIRE(int(v) == 150);
    }
    SECTION("passing none gives 0") {
        th.rgb = {{0, 0, 0}, {1, 1, 1}};
        th.hls = {{200, 0, 0}, {210, 1, 1}};
        th.lab = {{0, 0, 0}, {1, 1, 1}};
        const GrayImage g = threshold_merge(img, th);
        for (auto v : g.pixels) REQUIRE(int(v) == 0);
    }
}

TEST_CASE("threshold_merge output stays in the alphabet", "[vision]") {
    const std::set<int> alphabet{0, 29, 76, 105, 150, 179, 226, 255};
    Rng rng(31, "alphabet-prop");
    for (int iter = 0; iter < 20; ++iter) {
        RgbImage img(37, 23);
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        ColorThresholds th;
        auto rand_range = [&] {
            ChannelRange r;
            for (int c = 0; c < 3; ++c) {
                const int a = static_cast<int>(rng.uniform_int(0, 255));
                const int b = static_cast<int>(rng.uniform_int(0, 255));
                r.lo[c] = static_cast<std::uint8_t>(std::min(a, b));
                r.hi[c] = static_cast<std::uint8_t>(std::max(a, b));
            }
            return r;
        };
        th.rgb = rand_range();
        th.hls = rand_range();
        th.lab = rand_range();
        const GrayImage g = threshold_merge(img, th);
        for (auto v : g.pixels) REQUIRE(alphabet.count(v) == 1);
    }
}

TEST_CASE("detect_blobs on synthetic rasters", "[vision]") {
    SECTION("all-zero image yields nothing") {
        const GrayImage g(64, 64);
        REQUIRE(detect_blobs(g).empty());
    }
    SECTION("single disk is recovered") {
        GrayImage g(200, 160);
        render_disk_gray(g, 100.0, 80.0, 20.0);
        const auto blobs = detect_blobs(g);
        REQUIRE(blobs.size() == 1);
        REQUIRE(blobs[0].cx == Approx(100.0).margin(0.5));
        REQUIRE(blobs[0].cy == Approx(80.0).margin(0.5));
        REQUIRE(blobs[0].radius == Approx(20.0).margin(1.0));
        REQUIRE(blobs[0].area >= 25);
    }
    SECTION("two disjoint disks sort by area, larger first") {
        GrayImage g(200, 160);
        render_disk_gray(g, 50.0, 50.0, 10.0);
        render_disk_gray(g, 150.0, 100.0, 25.0);
        const auto blobs = detect_blobs(g);
        REQUIRE(blobs.size() == 2);
        REQUIRE(blobs[0].radius > blobs[1].radius);
        REQUIRE(blobs[0].cx == Approx(150.0).margin(0.5));
        REQUIRE(blobs[1].cx == Approx(50.0).margin(0.5));
    }
    SECTION("diagonal touching pixels form one 8-connected component") {
        GrayImage g(8, 8);
        g.at(2, 2) = 255;
        g.at(3, 3) = 255;
        const auto blobs = detect_blobs(g, 140, 1);
        REQUIRE(blobs.size() == 1);
        REQUIRE(blobs[0].area == 2);
    }
    SECTION("components below min_area are dropped") {
        GrayImage g(64, 64);
        render_disk_gray(g, 20.0, 20.0, 2.0);  // ~13 px
        REQUIRE(detect_blobs(g, 140, 25).empty());
        REQUIRE(detect_blobs(g, 140, 5).size() == 1);
    }
    SECTION("binarize threshold gates alphabet values") {
        GrayImage g(16, 16);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 16; ++x) g.at(x, y) = 150;  // LAB-only score
        }
        for (int y = 8; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) g.at(x, y) = 105;  // HLS+RGB score
        }
        const auto blobs = detect_blobs(g, 140, 25);
        REQUIRE(blobs.size() == 1);
        REQUIRE(blobs[0].area == 16 * 8);
    }
}

TEST_CASE("disk recovery property over random placements", "[vision]") {
    Rng rng(101, "disk-prop");
    for (int iter = 0; iter < 200; ++iter) {
        const double r = rng.uniform(5.0, 50.0);
        GrayImage g(256, 200);
        const double cx = rng.uniform(r + 2.0, 256.0 - r - 2.0);
        const double cy = rng.uniform(r + 2.0, 200.0 - r - 2.0);
        render_disk_gray(g, cx, cy, r);
        const auto blobs = detect_blobs(g);
        CAPTURE(cx, cy, r);
        REQUIRE(blobs.size() == 1);
        REQUIRE(std::hypot(blobs[0].cx - cx, blobs[0].cy - cy) < 0.5);
        REQUIRE(std::abs(blobs[0].radius - r) / r < 0.05);
    }
}

TEST_CASE("detector is deterministic across runs and backends", "[vision]") {
    GrayImage g(128, 128);
    render_disk_gray(g, 40.0, 40.0, 12.0);
    render_disk_gray(g, 90.0, 70.0, 18.0);

    auto snapshot = [&] {
        std::vector<std::tuple<double, double, double, int>> v;
        for (const auto& b : detect_blobs(g)) v.emplace_back(b.cx, b.cy, b.radius, b.area);
        return v;
    };

    kernels::set_active_backend("scalar");
    const auto a = snapshot();
    const auto b = snapshot();
    REQUIRE(a == b);
    if (kernels::avx2_supported()) {
        kernels::set_active_backend("avx2");
        REQUIRE(snapshot() == a);
    }
    kernels::set_active_backend("auto");
}

TEST_CASE("select_closest picks by distance, then area, then position", "[vision]") {
    REQUIRE_FALSE(select_closest({}, {320, 240}).has_value());

    std::vector<Blob> blobs;
    Blob b;
    b.cx = 370;  b.cy = 240; b.area = 100; b.radius = 5.6; blobs.push_back(b);  // 50 px
    b.cx = 350;  b.cy = 240; b.area = 100; blobs.push_back(b);                  // 30 px
    b.cx = 400;  b.cy = 240; b.area = 100; blobs.push_back(b);                  // 80 px
    auto sel = select_closest(blobs, {320, 240});
    REQUIRE(sel.has_value());
    REQUIRE(sel->cx == 350.0);

    blobs.clear();
    b.cx = 300; b.cy = 240; b.area = 400; blobs.push_back(b);
    b.cx = 340; b.cy = 240; b.area = 900; blobs.push_back(b);  // same 20 px distance
    sel = select_closest(blobs, {320, 240});
    REQUIRE(sel->area == 900);

    blobs.clear();
    b.cx = 300; b.cy = 240; b.area = 400; blobs.push_back(b);
    b.cx = 320; b.cy = 220; b.area = 400; blobs.push_back(b);  // equidistant, same area
    sel = select_closest(blobs, {320, 240});
    REQUIRE(sel->cy == 220.0);  // lower (y, x) wins
}

TEST_CASE("auto_calibrate_thresholds widens per-space extrema", "[vision]") {
    const RgbImage img = RgbImage::solid(32, 32, {200, 30, 30});

    SECTION("zero tolerance pins lower = upper") {
        const auto th = auto_calibrate_thresholds(img, {4, 4, 8, 8}, 0.0, "red");
        REQUIRE(th.color_name == "red");
        REQUIRE(th.rgb.lo == th.rgb.hi);
        REQUIRE(int(th.rgb.lo[0]) == 200);
        REQUIRE(int(th.rgb.lo[1]) == 30);
        const auto hls = rgb_to_hls({200, 30, 30});
        const auto lab = rgb_to_lab({200, 30, 30});
        REQUIRE(th.hls.lo == hls);
        REQUIRE(th.lab.lo == lab);
    }
    SECTION("tolerance 0.1 widens by 25.5 with clamping") {
        const auto th = auto_calibrate_thresholds(img, {4, 4, 8, 8}, 0.1, "red");
        REQUIRE(int(th.rgb.lo[0]) == 175);  // 200 - 25.5 rounded half-up
        REQUIRE(int(th.rgb.hi[0]) == 226);  // 200 + 25.5 rounded half-up
        REQUIRE(int(th.rgb.lo[1]) == 5);    // 30 - 25.5
        REQUIRE(int(th.rgb.hi[1]) == 56);
        const auto hls = rgb_to_hls({200, 30, 30});
        REQUIRE(int(th.hls.lo[0]) == 0);  // 0 - 25.5 clamps
        REQUIRE(int(th.hls.hi[1]) == int(hls[1]) + 26);
    }
    SECTION("region validation") {
        REQUIRE_THROWS_AS(auto_calibrate_thresholds(img, {30, 30, 8, 8}, 0.1, "red"),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(auto_calibrate_thresholds(img, {-1, 0, 8, 8}, 0.1, "red"),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(auto_calibrate_thresholds(img, {0, 0, 2, 2}, 0.1, "red"),
                          std::invalid_argument);
    }
}

TEST_CASE("end-to-end recall on seeded scenes", "[vision]") {
    // Thresholds calibrated from a solid patch of the object color.
    const std::array<std::uint8_t, 3> color{200, 30, 30};
    const RgbImage patch = RgbImage::solid(8, 8, color);
    const auto th = auto_calibrate_thresholds(patch, {0, 0, 8, 8}, 0.05, "red");

    Rng rng(55, "recall-prop");
    int rendered = 0, detected = 0;
    for (int scene = 0; scene < 500; ++scene) {
        RgbImage img(160, 120);
        const int k = static_cast<int>(rng.uniform_int(1, 3));
        std::vector<std::array<double, 3>> disks;
        for (int i = 0; i < k; ++i) {
            for (int attempt = 0; attempt < 50; ++attempt) {
                const double r = rng.uniform(6.0, 18.0);
                const double cx = rng.uniform(r + 2.0, 160.0 - r - 2.0);
                const double cy = rng.uniform(r + 2.0, 120.0 - r - 2.0);
                bool ok = true;
                for (const auto& d : disks) {
                    if (std::hypot(cx - d[0], cy - d[1]) < r + d[2] + 4.0) ok = false;
                }
                if (ok) {
                    disks.push_back({cx, cy, r});
                    break;
                }
            }
        }
        for (const auto& d : disks) render_disk_rgb(img, d[0], d[1], d[2], color);

        const auto blobs = detect_blobs(threshold_merge(img, th));
        for (const auto& d : disks) {
            ++rendered;
            for (const auto& b : blobs) {
                if (std::hypot(b.cx - d[0], b.cy - d[1]) < d[2] * 0.5) {
                    ++detected;
                    break;
                }
            }
        }
    }
    REQUIRE(rendered > 500);
    REQUIRE(static_cast<double>(detected) / rendered >= 0.99);

    // Blank scenes must never produce a detection.
    const RgbImage blank(160, 120);
    REQUIRE(detect_blobs(threshold_merge(blank, th)).empty());
}

TEST_CASE("ppm round trip and error handling", "[vision]") {
    const auto dir = std::filesystem::temp_directory_path();

    SECTION("write then read gives identical bytes") {
        Rng rng(13, "ppm");
        RgbImage img(31, 17);
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const auto path = dir / "sarsim_test.ppm";
        write_ppm(img, path);
        const RgbImage back = read_ppm(path);
        REQUIRE(back.width == img.width);
        REQUIRE(back.height == img.height);
        REQUIRE(back.pixels == img.pixels);
        std::filesystem::remove(path);
    }
    SECTION("header comments are skipped") {
        const auto path = dir / "sarsim_comment.ppm";
        {
            std::ofstream out(path, std::ios::binary);
            out << "P6\n# a comment\n2 1\n255\n";
            const char data[] = {10, 20, 30, 40, 50, 60};
            out.write(data, 6);
        }
        const RgbImage img = read_ppm(path);
        REQUIRE(img.width == 2);
        REQUIRE(int(img.at(1, 0)[2]) == 60);
        std::filesystem::remove(path);
    }
    SECTION("bad magic and truncation are rejected") {
        const auto path = dir / "sarsim_bad.ppm";
        {
            std::ofstream out(path, std::ios::binary);
            out << "P5\n2 1\n255\n";
        }
        REQUIRE_THROWS_AS(read_ppm(path), std::runtime_error);
        {
            std::ofstream out(path, std::ios::binary);
            out << "P6\n2 1\n255\n";
            out.put(1);
        }
        REQUIRE_THROWS_AS(read_ppm(path), std::runtime_error);
        std::filesystem::remove(path);
        REQUIRE_THROWS_AS(read_ppm(dir / "sarsim_missing.ppm"), std::runtime_error);
    }
}
