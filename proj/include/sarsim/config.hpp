#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sarsim/geometry.hpp"
#include "sarsim/gripper.hpp"
#include "sarsim/localization.hpp"
#include "sarsim/mission.hpp"
#include "sarsim/planner.hpp"

namespace sarsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FieldConfig {
    GeoPoint origin{22.317, 39.104};
    double width_m = 90.0;
    double height_m = 60.0;
    Vec2 drop_zone_min{37.0, 5.0};
    Vec2 drop_zone_max{53.0, 15.0};
    PartitionMode partition_mode = PartitionMode::Strips;
    double trapezoid_skew = 0.5;
};

struct KinematicsConfig {
    double max_speed_xy_mps = 3.0;
    double max_speed_z_mps = 1.0;
    double max_accel_mps2 = 2.0;
    double kp = 1.0;
};

struct ObjectsConfig {
    int per_partition = 2;
    double mass_g = 135.0;
    double radius_m = 0.05;
    bool ferrous = true;
    double stand_height_m = 0.3;
    double partition_margin_m = 2.0;  // min distance from the partition boundary
    double drop_zone_margin_m = 6.0;  // min distance from the drop zone
    double min_spacing_m = 5.0;       // min distance between objects
    std::vector<std::string> colors{"red", "green"};
};

struct SensorModel {
    double gps_noise_sigma_m = 0.3;
    double lidar_noise_sigma_m = 0.02;
    double detection_fov_deg = 170.0;
    double per_frame_detection_prob = 0.9;
    double pixel_noise_px = 1.0;
    double wind_mean_mps = 0.0;
    double wind_gust_mps = 0.0;
};

struct CommsParams {
    std::string transport = "sim";  // "sim" or "udp"
    double period_s = 0.1;
    double loss_prob = 0.0;
    double latency_s = 0.0;
    double jitter_s = 0.0;
    double staleness_timeout_s = 2.0;
    double drop_zone_margin_m = 2.0;  // zone inflation for the position rule
    double grant_delay_s = 0.5;       // settle time before the first arbitration
    int message_id = 222;
};

struct ScanParams {
    double altitude_m = 8.0;
    double lane_spacing_m = 0.0;  // 0 derives the spacing from the camera footprint
    double inset_m = 1.0;
    double arrive_radius_m = 0.5;
    double transit_altitude_m = 10.0;
    double lateral_speed_mps = 1.5;  // xy cap while picking
    double drop_altitude_m = 2.0;
    double zone_avoid_margin_m = 0.6;  // clearance for non-Drop flight around the zone
    int drop_retry_limit = 3;
    double release_retry_delay_s = 0.3;
};

struct SimParams {
    double dt_s = 0.05;
    double time_budget_s = 1200.0;
};

struct RunConfig {
    FieldConfig field;
    int uav_count = 3;
    KinematicsConfig kinematics;
    ObjectsConfig objects;
    SensorModel sensors;
    Gripper::Config gripper;
    CommsParams comms;
    PickingConfig picking;
    CalibrationModel calibration;
    ScanParams scan;
    SimParams sim;
};

// Built-in defaults: 3 UAVs, 90 x 60 m field, 2 objects per partition on
// 0.3 m stands, centimeter-unit camera calibration.
RunConfig default_config();

// Strict parser: unknown keys and type mismatches raise ConfigError with a
// dotted key path. Missing keys keep their defaults.
RunConfig config_from_json_text(const std::string& text,
                                const std::string& source_name = "<config>");
RunConfig load_config_file(const std::string& path);

// Serializes every key the parser accepts; parse(serialize(cfg)) == cfg.
std::string config_to_json_text(const RunConfig& cfg);

// Cross-module invariant checks (field geometry, probability ranges, mass
// limit, cone shape, ...). Throws ConfigError.
void validate_config(const RunConfig& cfg);

// Field geometry in planner terms, derived from the config.
FieldMapParams field_map_params(const RunConfig& cfg);

}  // namespace sarsim
