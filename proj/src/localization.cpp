#include "sarsim/localization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sarsim {

double radial_ground_distance(double pixels, const CalibrationModel& model) {
    const double p = std::abs(pixels);
    const double d = model.a * (p * p) + model.b * p;
    return pixels < 0.0 ? -d : d;
}

double invert_radial(double ground_units, const CalibrationModel& model) {
    if (ground_units <= 0.0) return 0.0;
    double hi = 1.0;
    while (radial_ground_distance(hi, model) < ground_units && hi < 1e9) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (radial_ground_distance(mid, model) < ground_units) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

BodyOffset pixel_to_body_at_calibration(const PixelDetection& det,
                                        const CalibrationModel& model) {
    return {
        .right = radial_ground_distance(det.x_pixels, model),
        .forward = radial_ground_distance(det.y_pixels, model),
    };
}

BodyOffset scale_to_altitude(const BodyOffset& d_hc, double h_actual,
                             const CalibrationModel& model) {
    if (h_actual <= 0.0) {
        throw std::invalid_argument("scale_to_altitude: altitude must be positive");
    }
    const double ratio = h_actual / model.h_c;
    return {d_hc.right * ratio, d_hc.forward * ratio};
}

EnuPosition detection_to_setpoint(const PixelDetection& det, const EnuPosition& uav_pose,
                                  Heading heading, double h_agl,
                                  const CalibrationModel& model) {
    const BodyOffset at_hc = pixel_to_body_at_calibration(det, model);
    const BodyOffset at_h = scale_to_altitude(at_hc, h_agl, model);
    const BodyOffset meters{at_h.right * model.units_to_meters,
                            at_h.forward * model.units_to_meters};
    return body_to_enu(uav_pose, meters, heading);
}

CalibrationFit fit_calibration(std::span<const CalibrationSample> samples) {
    if (samples.size() < 3) {
        throw std::invalid_argument("fit_calibration: need at least 3 samples");
    }
    double distinct[2] = {-1.0, -1.0};
    int n_distinct = 0;
    for (const auto& s : samples) {
        if (s.pixels < 0.0) {
            throw std::invalid_argument("fit_calibration: pixel values must be >= 0");
        }
        if (s.pixels > 0.0 && n_distinct < 2 && s.pixels != distinct[0] &&
            s.pixels != distinct[1]) {
            distinct[n_distinct++] = s.pixels;
        }
    }
    if (n_distinct < 2) {
        throw std::runtime_error("fit_calibration: rank-deficient sample set");
    }

    // Normal equations for the two-column design matrix [p^2, p].
    double s4 = 0, s3 = 0, s2 = 0, d2 = 0, d1 = 0;
    for (const auto& s : samples) {
        const double p = s.pixels;
        const double p2 = p * p;
        s4 += p2 * p2;
        s3 += p2 * p;
        s2 += p2;
        d2 += s.ground * p2;
        d1 += s.ground * p;
    }
    const double det = s4 * s2 - s3 * s3;
    if (std::abs(det) < 1e-12 * std::max(1.0, s4 * s2)) {
        throw std::runtime_error("fit_calibration: rank-deficient sample set");
    }
    CalibrationFit fit;
    fit.a = (d2 * s2 - d1 * s3) / det;
    fit.b = (s4 * d1 - s3 * d2) / det;

    double sse = 0.0;
    for (const auto& s : samples) {
        const double r = s.ground - (fit.a * s.pixels * s.pixels + fit.b * s.pixels);
        sse += r * r;
    }
    fit.rms = std::sqrt(sse / static_cast<double>(samples.size()));
    return fit;
}

std::vector<CalibrationSample> load_calibration_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open calibration file: " + path.string());
    }
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
            s.pop_back();
        }
        std::size_t i = 0;
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        return s.substr(i);
    };

    std::string line;
    if (!std::getline(in, line) || strip(line) != "pixels,meters") {
        throw std::runtime_error(path.string() + ": expected header \"pixels,meters\"");
    }
    std::vector<CalibrationSample> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = strip(line);
        if (s.empty()) continue;
        const auto comma = s.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected two comma-separated values");
        }
        try {
            std::size_t used = 0;
            const double px = std::stod(s.substr(0, comma), &used);
            const double m = std::stod(s.substr(comma + 1), &used);
            out.push_back({px, m});
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed number");
        }
    }
    return out;
}

}  // namespace sarsim
