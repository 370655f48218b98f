#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "sarsim/geometry.hpp"

namespace sarsim {

// Empirical camera-to-ground model: radial pixel displacement maps to ground
// displacement through a quadratic with no constant term, calibrated at
// altitude h_c and scaled linearly for other altitudes.
struct CalibrationModel {
    double a = 0.0018037;   // ground units per pixel^2
    double b = 0.3124266;   // ground units per pixel
    double h_c = 5.0;       // calibration altitude, m
    // Multiplier taking the calibration table's ground units to meters when
    // producing ENU set-points (1.0 = table already in meters, 0.01 = cm).
    double units_to_meters = 1.0;
    int image_width = 640;
    int image_height = 480;
};

struct PixelDetection {
    double x_pixels = 0.0;  // signed, right of image center
    double y_pixels = 0.0;  // signed, up of image center
    std::uint64_t frame_id = 0;
};

// Signed radial ground displacement at the calibration altitude:
// sign(p) * (a*p^2 + b*|p|), in the table's ground units.
double radial_ground_distance(double pixels, const CalibrationModel& model);

// Inverse of radial_ground_distance for non-negative displacements (bisection).
double invert_radial(double ground_units, const CalibrationModel& model);

BodyOffset pixel_to_body_at_calibration(const PixelDetection& det,
                                        const CalibrationModel& model);

// (h_actual / h_c) * d, componentwise. Throws std::invalid_argument if
// h_actual <= 0.
BodyOffset scale_to_altitude(const BodyOffset& d_hc, double h_actual,
                             const CalibrationModel& model);

// Full pixel -> ENU chain. The returned z equals the current UAV z; altitude
// is commanded separately. Applies model.units_to_meters.
EnuPosition detection_to_setpoint(const PixelDetection& det, const EnuPosition& uav_pose,
                                  Heading heading, double h_agl,
                                  const CalibrationModel& model);

struct CalibrationSample {
    double pixels = 0.0;
    double ground = 0.0;
};

struct CalibrationFit {
    double a = 0.0;
    double b = 0.0;
    double rms = 0.0;
};

// Least-squares fit of d = a*p^2 + b*p through the origin. Throws
// std::invalid_argument for fewer than 3 samples or negative pixel values,
// std::runtime_error when the system is rank-deficient (fewer than two
// distinct positive pixel values).
CalibrationFit fit_calibration(std::span<const CalibrationSample> samples);

// CSV with exact header "pixels,meters"; one sample per line.
std::vector<CalibrationSample> load_calibration_csv(const std::filesystem::path& path);

}  // namespace sarsim
