#include "sarsim/localization.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sarsim/rng.hpp"

using namespace sarsim;
using Catch::Approx;

namespace {

const CalibrationModel kDefault{};

double ulp_of(double x) { return std::ldexp(std::numeric_limits<double>::epsilon(), std::ilogb(x)); }

}  // namespace

TEST_CASE("radial model evaluates the default polynomial exactly", "[localization]") {
    REQUIRE(radial_ground_distance(0.0, kDefault) == 0.0);
    const double d100 = radial_ground_distance(100.0, kDefault);
    REQUIRE(std::abs(d100 - 49.27966) <= ulp_of(49.27966));
    REQUIRE(radial_ground_distance(240.0, kDefault) == Approx(178.875504).epsilon(1e-12));
    REQUIRE(radial_ground_distance(320.0, kDefault) == Approx(284.675392).epsilon(1e-12));
}

TEST_CASE("radial model is odd and monotone", "[localization]") {
    for (double p : {1.0, 17.5, 100.0, 319.0}) {
        REQUIRE(radial_ground_distance(-p, kDefault) == -radial_ground_distance(p, kDefault));
    }
    double prev = -1.0;
    for (double p = 0.0; p <= 320.0; p += 0.5) {
        const double d = radial_ground_distance(p, kDefault);
        REQUIRE(d > prev);
        prev = d;
    }
}

TEST_CASE("invert_radial round-trips the forward model", "[localization]") {
    for (double p : {0.0, 1.0, 50.0, 100.0, 240.0, 320.0}) {
        const double d = radial_ground_distance(p, kDefault);
        REQUIRE(invert_radial(d, kDefault) == Approx(p).margin(1e-6));
    }
    REQUIRE(invert_radial(49.28, kDefault) == Approx(100.0).margin(0.01));
    REQUIRE(invert_radial(0.0, kDefault) == 0.0);
    REQUIRE(invert_radial(-5.0, kDefault) == 0.0);
}

TEST_CASE("pixel_to_body maps image axes to body axes", "[localization]") {
    const BodyOffset c = pixel_to_body_at_calibration({0.0, 0.0, 0}, kDefault);
    REQUIRE(c.right == 0.0);
    REQUIRE(c.forward == 0.0);

    const BodyOffset r = pixel_to_body_at_calibration({100.0, 0.0, 1}, kDefault);
    REQUIRE(std::abs(r.right - 49.27966) <= ulp_of(49.27966));
    REQUIRE(r.forward == 0.0);

    const BodyOffset l = pixel_to_body_at_calibration({-100.0, 0.0, 2}, kDefault);
    REQUIRE(l.right == -r.right);
}

TEST_CASE("scale_to_altitude applies the altitude ratio", "[localization]") {
    const BodyOffset d{2.0, 3.0};
    const BodyOffset same = scale_to_altitude(d, kDefault.h_c, kDefault);
    REQUIRE(same.right == 2.0);
    REQUIRE(same.forward == 3.0);

    const BodyOffset twice = scale_to_altitude(d, 2.0 * kDefault.h_c, kDefault);
    REQUIRE(twice.right == 4.0);
    REQUIRE(twice.forward == 6.0);

    const BodyOffset half = scale_to_altitude({49.27966, 0.0}, 2.5, kDefault);
    REQUIRE(half.right == Approx(24.63983).epsilon(1e-12));
    REQUIRE(half.forward == 0.0);

    REQUIRE_THROWS_AS(scale_to_altitude(d, 0.0, kDefault), std::invalid_argument);
    REQUIRE_THROWS_AS(scale_to_altitude(d, -1.0, kDefault), std::invalid_argument);
}

TEST_CASE("altitude scaling composes", "[localization]") {
    Rng rng(17, "loc-prop");
    for (int i = 0; i < 1000; ++i) {
        const BodyOffset d{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        const double h1 = rng.uniform(0.5, 15.0);
        const double h2 = rng.uniform(0.5, 15.0);
        CalibrationModel at_h1 = kDefault;
        at_h1.h_c = h1;
        const BodyOffset two_step = scale_to_altitude(scale_to_altitude(d, h1, kDefault), h2, at_h1);
        const BodyOffset one_step = scale_to_altitude(d, h2, kDefault);
        REQUIRE(two_step.right == Approx(one_step.right).margin(1e-12));
        REQUIRE(two_step.forward == Approx(one_step.forward).margin(1e-12));
    }
}

TEST_CASE("detection_to_setpoint composes the full chain", "[localization]") {
    const EnuPosition pose{0.0, 0.0, kDefault.h_c};

    SECTION("centered detection returns the current position") {
        const EnuPosition sp = detection_to_setpoint({0, 0, 0}, {3, 4, 7}, Heading(1.1), 7.0, kDefault);
        REQUIRE(sp.x == 3.0);
        REQUIRE(sp.y == 4.0);
        REQUIRE(sp.z == 7.0);
    }
    SECTION("north-facing at calibration altitude") {
        const EnuPosition sp =
            detection_to_setpoint({100, 0, 0}, pose, Heading(0.0), kDefault.h_c, kDefault);
        REQUIRE(sp.x == Approx(49.27966).epsilon(1e-12));
        REQUIRE(sp.y == Approx(0.0).margin(1e-12));
        REQUIRE(sp.z == kDefault.h_c);
    }
    SECTION("east-facing rotates the offset") {
        const EnuPosition sp =
            detection_to_setpoint({100, 0, 0}, pose, Heading(kPi / 2.0), kDefault.h_c, kDefault);
        REQUIRE(sp.x == Approx(0.0).margin(1e-12));
        REQUIRE(sp.y == Approx(-49.27966).epsilon(1e-12));
    }
    SECTION("unit multiplier converts table units to meters") {
        CalibrationModel cm = kDefault;
        cm.units_to_meters = 0.01;
        const EnuPosition sp = detection_to_setpoint({100, 0, 0}, pose, Heading(0.0), cm.h_c, cm);
        REQUIRE(sp.x == Approx(0.4927966).epsilon(1e-12));
    }
    SECTION("invalid altitude propagates") {
        REQUIRE_THROWS_AS(detection_to_setpoint({1, 1, 0}, pose, Heading(0.0), 0.0, kDefault),
                          std::invalid_argument);
    }
}

TEST_CASE("fit_calibration recovers exact coefficients", "[localization]") {
    std::vector<CalibrationSample> samples;
    for (double p : {50.0, 100.0, 150.0, 200.0}) {
        samples.push_back({p, radial_ground_distance(p, kDefault)});
    }
    const CalibrationFit fit = fit_calibration(samples);
    REQUIRE(fit.a == Approx(kDefault.a).margin(1e-9));
    REQUIRE(fit.b == Approx(kDefault.b).margin(1e-9));
    REQUIRE(fit.rms == Approx(0.0).margin(1e-9));
}

TEST_CASE("fit_calibration handles a degenerate quadratic", "[localization]") {
    std::vector<CalibrationSample> samples;
    for (double p : {10.0, 20.0, 30.0, 40.0}) {
        samples.push_back({p, 0.3 * p});
    }
    const CalibrationFit fit = fit_calibration(samples);
    REQUIRE(fit.a == Approx(0.0).margin(1e-9));
    REQUIRE(fit.b == Approx(0.3).margin(1e-9));
}

TEST_CASE("fit_calibration rejects bad input", "[localization]") {
    REQUIRE_THROWS_AS(fit_calibration(std::vector<CalibrationSample>{{50, 16}, {100, 49}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(fit_calibration(std::vector<CalibrationSample>{{50, 16}, {-1, 2}, {100, 49}}),
                      std::invalid_argument);
    // Only one distinct positive pixel value: a and b cannot be separated.
    REQUIRE_THROWS_AS(fit_calibration(std::vector<CalibrationSample>{{0, 0}, {100, 49}, {100, 49}}),
                      std::runtime_error);
}

TEST_CASE("fit_calibration is identity over random models", "[localization]") {
    Rng rng(23, "fit-prop");
    for (int i = 0; i < 500; ++i) {
        CalibrationModel m = kDefault;
        m.a = rng.uniform(1e-4, 1e-2);
        m.b = rng.uniform(0.1, 1.0);
        std::vector<CalibrationSample> samples;
        for (double p : {25.0, 75.0, 125.0, 175.0, 225.0}) {
            samples.push_back({p, radial_ground_distance(p, m)});
        }
        const CalibrationFit fit = fit_calibration(samples);
        REQUIRE(fit.a == Approx(m.a).margin(1e-9));
        REQUIRE(fit.b == Approx(m.b).margin(1e-9));
    }
}

TEST_CASE("calibration CSV loader", "[localization]") {
    const auto dir = std::filesystem::temp_directory_path();

    SECTION("round-trips a well-formed file") {
        const auto path = dir / "sarsim_cal_ok.csv";
        {
            std::ofstream out(path);
            out << "pixels,meters\n50,16.13\n100,49.28\n\n150,87.45\n";
        }
        const auto samples = load_calibration_csv(path);
        REQUIRE(samples.size() == 3);
        REQUIRE(samples[0].pixels == 50.0);
        REQUIRE(samples[2].ground == Approx(87.45));
        std::filesystem::remove(path);
    }
    SECTION("rejects a wrong header") {
        const auto path = dir / "sarsim_cal_hdr.csv";
        {
            std::ofstream out(path);
            out << "px,m\n50,16.13\n";
        }
        REQUIRE_THROWS_WITH(load_calibration_csv(path),
                            Catch::Matchers::ContainsSubstring("pixels,meters"));
        std::filesystem::remove(path);
    }
    SECTION("reports the offending line") {
        const auto path = dir / "sarsim_cal_bad.csv";
        {
            std::ofstream out(path);
            out << "pixels,meters\n50,16.13\nnot-a-number,2\n";
        }
        REQUIRE_THROWS_WITH(load_calibration_csv(path), Catch::Matchers::ContainsSubstring(":3"));
        std::filesystem::remove(path);
    }
    SECTION("missing file") {
        REQUIRE_THROWS_AS(load_calibration_csv(dir / "sarsim_does_not_exist.csv"),
                          std::runtime_error);
    }
}
