#include "sarsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sarsim {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Tracks which keys were consumed so leftovers can be rejected by path.
class ObjReader {
public:
    ObjReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    template <typename T>
    void get(const char* key, T& out) {
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        seen_.insert(key);
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path_ + "." + key + ": wrong type");
        }
    }

    void get_vec2(const char* key, Vec2& out) {
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        seen_.insert(key);
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
            !(*it)[1].is_number()) {
            throw ConfigError(path_ + "." + key + ": expected [x, y]");
        }
        out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    }

    const json* sub(const char* key) {
        const auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(path_ + "." + key + ": unknown key");
            }
        }
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void parse_field(const json& j, const std::string& path, FieldConfig& out) {
    ObjReader r(j, path);
    if (const json* origin = r.sub("origin")) {
        ObjReader ro(*origin, path + ".origin");
        ro.get("lat_deg", out.origin.lat_deg);
        ro.get("lon_deg", out.origin.lon_deg);
        ro.finish();
    }
    r.get("width_m", out.width_m);
    r.get("height_m", out.height_m);
    if (const json* zone = r.sub("drop_zone")) {
        ObjReader rz(*zone, path + ".drop_zone");
        rz.get_vec2("min", out.drop_zone_min);
        rz.get_vec2("max", out.drop_zone_max);
        rz.finish();
    }
    std::string mode = out.partition_mode == PartitionMode::Strips ? "strips" : "trapezoid";
    r.get("partition_mode", mode);
    if (mode == "strips") {
        out.partition_mode = PartitionMode::Strips;
    } else if (mode == "trapezoid") {
        out.partition_mode = PartitionMode::Trapezoid;
    } else {
        throw ConfigError(path + ".partition_mode: expected \"strips\" or \"trapezoid\"");
    }
    r.get("trapezoid_skew", out.trapezoid_skew);
    r.finish();
}

void parse_kinematics(const json& j, const std::string& path, KinematicsConfig& out) {
    ObjReader r(j, path);
    r.get("max_speed_xy_mps", out.max_speed_xy_mps);
    r.get("max_speed_z_mps", out.max_speed_z_mps);
    r.get("max_accel_mps2", out.max_accel_mps2);
    r.get("kp", out.kp);
    r.finish();
}

void parse_objects(const json& j, const std::string& path, ObjectsConfig& out) {
    ObjReader r(j, path);
    r.get("per_partition", out.per_partition);
    r.get("mass_g", out.mass_g);
    r.get("radius_m", out.radius_m);
    r.get("ferrous", out.ferrous);
    r.get("stand_height_m", out.stand_height_m);
    r.get("partition_margin_m", out.partition_margin_m);
    r.get("drop_zone_margin_m", out.drop_zone_margin_m);
    r.get("min_spacing_m", out.min_spacing_m);
    r.get("colors", out.colors);
    r.finish();
}

void parse_sensors(const json& j, const std::string& path, SensorModel& out) {
    ObjReader r(j, path);
    r.get("gps_noise_sigma_m", out.gps_noise_sigma_m);
    r.get("lidar_noise_sigma_m", out.lidar_noise_sigma_m);
    r.get("detection_fov_deg", out.detection_fov_deg);
    r.get("per_frame_detection_prob", out.per_frame_detection_prob);
    r.get("pixel_noise_px", out.pixel_noise_px);
    r.get("wind_mean_mps", out.wind_mean_mps);
    r.get("wind_gust_mps", out.wind_gust_mps);
    r.finish();
}

void parse_gripper(const json& j, const std::string& path, Gripper::Config& out) {
    ObjReader r(j, path);
    r.get("success_prob_pick", out.success_prob_pick);
    r.get("success_prob_drop", out.success_prob_drop);
    r.get("release_pulse_s", out.release_pulse_s);
    r.get("cycle_period_s", out.cycle_period_s);
    r.get("servo_power_w", out.servo_power_w);
    r.get("max_lift_g", out.max_lift_g);
    r.finish();
}

void parse_comms(const json& j, const std::string& path, CommsParams& out) {
    ObjReader r(j, path);
    r.get("transport", out.transport);
    r.get("period_s", out.period_s);
    r.get("loss_prob", out.loss_prob);
    r.get("latency_s", out.latency_s);
    r.get("jitter_s", out.jitter_s);
    r.get("staleness_timeout_s", out.staleness_timeout_s);
    r.get("drop_zone_margin_m", out.drop_zone_margin_m);
    r.get("grant_delay_s", out.grant_delay_s);
    r.get("message_id", out.message_id);
    r.finish();
}

void parse_picking(const json& j, const std::string& path, PickingConfig& out) {
    ObjReader r(j, path);
    r.get("alpha", out.alpha);
    r.get("confidence_init", out.confidence_init);
    r.get("confidence_high", out.confidence_high);
    r.get("confidence_low", out.confidence_low);
    r.get("descend_speed_mps", out.descend_speed_mps);
    r.get("ascend_speed_mps", out.ascend_speed_mps);
    r.get("max_recover_episodes", out.max_recover_episodes);
    r.get("contact_radius_m", out.contact_radius_m);
    r.get("contact_slack_m", out.contact_slack_m);
    r.get("verify_timeout_s", out.verify_timeout_s);
    r.get("recover_climb_m", out.recover_climb_m);
    r.get("recover_bump_m", out.recover_bump_m);
    r.get("recover_patience_s", out.recover_patience_s);
    if (const json* cone = r.sub("cone")) {
        ObjReader rc(*cone, path + ".cone");
        rc.get("apex_altitude_m", out.cone.apex_altitude);
        rc.get("apex_radius_m", out.cone.apex_radius);
        rc.get("top_altitude_m", out.cone.top_altitude);
        rc.get("top_radius_m", out.cone.top_radius);
        rc.finish();
    }
    r.finish();
}

void parse_calibration(const json& j, const std::string& path, CalibrationModel& out) {
    ObjReader r(j, path);
    r.get("a", out.a);
    r.get("b", out.b);
    r.get("h_c_m", out.h_c);
    r.get("units_to_meters", out.units_to_meters);
    r.get("image_width_px", out.image_width);
    r.get("image_height_px", out.image_height);
    r.finish();
}

void parse_scan(const json& j, const std::string& path, ScanParams& out) {
    ObjReader r(j, path);
    r.get("altitude_m", out.altitude_m);
    r.get("lane_spacing_m", out.lane_spacing_m);
    r.get("inset_m", out.inset_m);
    r.get("arrive_radius_m", out.arrive_radius_m);
    r.get("transit_altitude_m", out.transit_altitude_m);
    r.get("lateral_speed_mps", out.lateral_speed_mps);
    r.get("drop_altitude_m", out.drop_altitude_m);
    r.get("zone_avoid_margin_m", out.zone_avoid_margin_m);
    r.get("drop_retry_limit", out.drop_retry_limit);
    r.get("release_retry_delay_s", out.release_retry_delay_s);
    r.finish();
}

void parse_sim(const json& j, const std::string& path, SimParams& out) {
    ObjReader r(j, path);
    r.get("dt_s", out.dt_s);
    r.get("time_budget_s", out.time_budget_s);
    r.finish();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.calibration.units_to_meters = 0.01;  // the camera was calibrated in centimeters
    cfg.picking.stand_height_m = cfg.objects.stand_height_m;
    return cfg;
}

RunConfig config_from_json_text(const std::string& text, const std::string& source_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source_name + ": " + e.what());
    }

    RunConfig cfg = default_config();
    ObjReader r(j, source_name);
    if (const json* s = r.sub("field")) parse_field(*s, source_name + ".field", cfg.field);
    r.get("uav_count", cfg.uav_count);
    if (const json* s = r.sub("kinematics")) {
        parse_kinematics(*s, source_name + ".kinematics", cfg.kinematics);
    }
    if (const json* s = r.sub("objects")) parse_objects(*s, source_name + ".objects", cfg.objects);
    if (const json* s = r.sub("sensors")) parse_sensors(*s, source_name + ".sensors", cfg.sensors);
    if (const json* s = r.sub("gripper")) parse_gripper(*s, source_name + ".gripper", cfg.gripper);
    if (const json* s = r.sub("comms")) parse_comms(*s, source_name + ".comms", cfg.comms);
    if (const json* s = r.sub("picking")) parse_picking(*s, source_name + ".picking", cfg.picking);
    if (const json* s = r.sub("calibration")) {
        parse_calibration(*s, source_name + ".calibration", cfg.calibration);
    }
    if (const json* s = r.sub("scan")) parse_scan(*s, source_name + ".scan", cfg.scan);
    if (const json* s = r.sub("sim")) parse_sim(*s, source_name + ".sim", cfg.sim);
    r.finish();

    cfg.picking.stand_height_m = cfg.objects.stand_height_m;
    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str(), path);
}

std::string config_to_json_text(const RunConfig& cfg) {
    ordered_json j;
    j["field"] = {
        {"origin", {{"lat_deg", cfg.field.origin.lat_deg}, {"lon_deg", cfg.field.origin.lon_deg}}},
        {"width_m", cfg.field.width_m},
        {"height_m", cfg.field.height_m},
        {"drop_zone",
         {{"min", {cfg.field.drop_zone_min.x, cfg.field.drop_zone_min.y}},
          {"max", {cfg.field.drop_zone_max.x, cfg.field.drop_zone_max.y}}}},
        {"partition_mode",
         cfg.field.partition_mode == PartitionMode::Strips ? "strips" : "trapezoid"},
        {"trapezoid_skew", cfg.field.trapezoid_skew},
    };
    j["uav_count"] = cfg.uav_count;
    j["kinematics"] = {
        {"max_speed_xy_mps", cfg.kinematics.max_speed_xy_mps},
        {"max_speed_z_mps", cfg.kinematics.max_speed_z_mps},
        {"max_accel_mps2", cfg.kinematics.max_accel_mps2},
        {"kp", cfg.kinematics.kp},
    };
    j["objects"] = {
        {"per_partition", cfg.objects.per_partition},
        {"mass_g", cfg.objects.mass_g},
        {"radius_m", cfg.objects.radius_m},
        {"ferrous", cfg.objects.ferrous},
        {"stand_height_m", cfg.objects.stand_height_m},
        {"partition_margin_m", cfg.objects.partition_margin_m},
        {"drop_zone_margin_m", cfg.objects.drop_zone_margin_m},
        {"min_spacing_m", cfg.objects.min_spacing_m},
        {"colors", cfg.objects.colors},
    };
    j["sensors"] = {
        {"gps_noise_sigma_m", cfg.sensors.gps_noise_sigma_m},
        {"lidar_noise_sigma_m", cfg.sensors.lidar_noise_sigma_m},
        {"detection_fov_deg", cfg.sensors.detection_fov_deg},
        {"per_frame_detection_prob", cfg.sensors.per_frame_detection_prob},
        {"pixel_noise_px", cfg.sensors.pixel_noise_px},
        {"wind_mean_mps", cfg.sensors.wind_mean_mps},
        {"wind_gust_mps", cfg.sensors.wind_gust_mps},
    };
    j["gripper"] = {
        {"success_prob_pick", cfg.gripper.success_prob_pick},
        {"success_prob_drop", cfg.gripper.success_prob_drop},
        {"release_pulse_s", cfg.gripper.release_pulse_s},
        {"cycle_period_s", cfg.gripper.cycle_period_s},
        {"servo_power_w", cfg.gripper.servo_power_w},
        {"max_lift_g", cfg.gripper.max_lift_g},
    };
    j["comms"] = {
        {"transport", cfg.comms.transport},
        {"period_s", cfg.comms.period_s},
        {"loss_prob", cfg.comms.loss_prob},
        {"latency_s", cfg.comms.latency_s},
        {"jitter_s", cfg.comms.jitter_s},
        {"staleness_timeout_s", cfg.comms.staleness_timeout_s},
        {"drop_zone_margin_m", cfg.comms.drop_zone_margin_m},
        {"grant_delay_s", cfg.comms.grant_delay_s},
        {"message_id", cfg.comms.message_id},
    };
    j["picking"] = {
        {"alpha", cfg.picking.alpha},
        {"confidence_init", cfg.picking.confidence_init},
        {"confidence_high", cfg.picking.confidence_high},
        {"confidence_low", cfg.picking.confidence_low},
        {"descend_speed_mps", cfg.picking.descend_speed_mps},
        {"ascend_speed_mps", cfg.picking.ascend_speed_mps},
        {"max_recover_episodes", cfg.picking.max_recover_episodes},
        {"contact_radius_m", cfg.picking.contact_radius_m},
        {"contact_slack_m", cfg.picking.contact_slack_m},
        {"verify_timeout_s", cfg.picking.verify_timeout_s},
        {"recover_climb_m", cfg.picking.recover_climb_m},
        {"recover_bump_m", cfg.picking.recover_bump_m},
        {"recover_patience_s", cfg.picking.recover_patience_s},
        {"cone",
         {{"apex_altitude_m", cfg.picking.cone.apex_altitude},
          {"apex_radius_m", cfg.picking.cone.apex_radius},
          {"top_altitude_m", cfg.picking.cone.top_altitude},
          {"top_radius_m", cfg.picking.cone.top_radius}}},
    };
    j["calibration"] = {
        {"a", cfg.calibration.a},
        {"b", cfg.calibration.b},
        {"h_c_m", cfg.calibration.h_c},
        {"units_to_meters", cfg.calibration.units_to_meters},
        {"image_width_px", cfg.calibration.image_width},
        {"image_height_px", cfg.calibration.image_height},
    };
    j["scan"] = {
        {"altitude_m", cfg.scan.altitude_m},
        {"lane_spacing_m", cfg.scan.lane_spacing_m},
        {"inset_m", cfg.scan.inset_m},
        {"arrive_radius_m", cfg.scan.arrive_radius_m},
        {"transit_altitude_m", cfg.scan.transit_altitude_m},
        {"lateral_speed_mps", cfg.scan.lateral_speed_mps},
        {"drop_altitude_m", cfg.scan.drop_altitude_m},
        {"zone_avoid_margin_m", cfg.scan.zone_avoid_margin_m},
        {"drop_retry_limit", cfg.scan.drop_retry_limit},
        {"release_retry_delay_s", cfg.scan.release_retry_delay_s},
    };
    j["sim"] = {
        {"dt_s", cfg.sim.dt_s},
        {"time_budget_s", cfg.sim.time_budget_s},
    };
    return j.dump(2) + "\n";
}

FieldMapParams field_map_params(const RunConfig& cfg) {
    return FieldMapParams{
        Polygon::axis_aligned_rect({0.0, 0.0}, {cfg.field.width_m, cfg.field.height_m}),
        Polygon::axis_aligned_rect(cfg.field.drop_zone_min, cfg.field.drop_zone_max),
        cfg.field.origin,
        cfg.uav_count,
        cfg.field.partition_mode,
        cfg.field.trapezoid_skew,
    };
}

void validate_config(const RunConfig& cfg) {
    require(cfg.uav_count >= 1 && cfg.uav_count <= 250, "uav_count: expected 1..250");
    require(cfg.field.width_m > 0.0 && cfg.field.height_m > 0.0,
            "field: width_m and height_m must be positive");
    require(cfg.field.drop_zone_min.x < cfg.field.drop_zone_max.x &&
                cfg.field.drop_zone_min.y < cfg.field.drop_zone_max.y,
            "field.drop_zone: min must be component-wise below max");
    require(cfg.field.trapezoid_skew >= 0.0 && cfg.field.trapezoid_skew < 1.0,
            "field.trapezoid_skew: expected [0,1)");

    require(cfg.kinematics.max_speed_xy_mps > 0.0 && cfg.kinematics.max_speed_z_mps > 0.0 &&
                cfg.kinematics.max_accel_mps2 > 0.0 && cfg.kinematics.kp > 0.0,
            "kinematics: speeds, acceleration and kp must be positive");

    require(cfg.objects.per_partition >= 0, "objects.per_partition: must be >= 0");
    require(cfg.objects.mass_g > 0.0 && cfg.objects.mass_g <= 500.0,
            "objects.mass_g: expected (0, 500]");
    require(cfg.objects.radius_m > 0.0, "objects.radius_m: must be positive");
    require(cfg.objects.stand_height_m >= 0.0, "objects.stand_height_m: must be >= 0");
    require(!cfg.objects.colors.empty(), "objects.colors: need at least one color");

    require(cfg.sensors.gps_noise_sigma_m >= 0.0 && cfg.sensors.lidar_noise_sigma_m >= 0.0 &&
                cfg.sensors.pixel_noise_px >= 0.0,
            "sensors: noise sigmas must be >= 0");
    require(cfg.sensors.per_frame_detection_prob >= 0.0 &&
                cfg.sensors.per_frame_detection_prob <= 1.0,
            "sensors.per_frame_detection_prob: expected [0,1]");

    require(cfg.gripper.success_prob_pick >= 0.0 && cfg.gripper.success_prob_pick <= 1.0 &&
                cfg.gripper.success_prob_drop >= 0.0 && cfg.gripper.success_prob_drop <= 1.0,
            "gripper: success probabilities must be in [0,1]");
    require(cfg.gripper.release_pulse_s > 0.0 &&
                cfg.gripper.cycle_period_s >= cfg.gripper.release_pulse_s,
            "gripper: cycle period must cover the release pulse");

    require(cfg.comms.transport == "sim" || cfg.comms.transport == "udp",
            "comms.transport: expected \"sim\" or \"udp\"");
    require(cfg.comms.period_s > 0.0, "comms.period_s: must be positive");
    require(cfg.comms.loss_prob >= 0.0 && cfg.comms.loss_prob <= 1.0,
            "comms.loss_prob: expected [0,1]");
    require(cfg.comms.latency_s >= 0.0 && cfg.comms.jitter_s >= 0.0,
            "comms: latency and jitter must be >= 0");
    require(cfg.comms.staleness_timeout_s > 0.0, "comms.staleness_timeout_s: must be positive");
    require(cfg.comms.message_id >= 0 && cfg.comms.message_id <= 255,
            "comms.message_id: expected 0..255");

    try {
        validate_cone(cfg.picking.cone);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("picking.cone: ") + e.what());
    }
    require(cfg.picking.alpha > 0.0 && cfg.picking.alpha <= 1.0,
            "picking.alpha: expected (0,1]");
    require(cfg.picking.confidence_low < cfg.picking.confidence_high,
            "picking: confidence_low must be below confidence_high");
    require(cfg.picking.descend_speed_mps > 0.0 && cfg.picking.ascend_speed_mps > 0.0,
            "picking: descend and ascend speeds must be positive");

    require(cfg.calibration.h_c > 0.0 && cfg.calibration.units_to_meters > 0.0,
            "calibration: h_c_m and units_to_meters must be positive");
    require(cfg.calibration.image_width > 0 && cfg.calibration.image_height > 0,
            "calibration: image dimensions must be positive");

    require(cfg.scan.altitude_m > 0.0 && cfg.scan.transit_altitude_m > 0.0,
            "scan: altitudes must be positive");
    require(cfg.scan.lane_spacing_m >= 0.0, "scan.lane_spacing_m: must be >= 0");
    require(cfg.scan.inset_m >= 0.0 && cfg.scan.arrive_radius_m > 0.0,
            "scan: inset must be >= 0 and arrive radius positive");
    require(cfg.scan.drop_altitude_m > 0.0, "scan.drop_altitude_m: must be positive");
    require(cfg.scan.zone_avoid_margin_m >= 0.0, "scan.zone_avoid_margin_m: must be >= 0");
    require(cfg.scan.drop_retry_limit >= 0, "scan.drop_retry_limit: must be >= 0");

    require(cfg.sim.dt_s > 0.0 && cfg.sim.dt_s <= 0.1, "sim.dt_s: expected (0, 0.1]");
    require(cfg.sim.time_budget_s > 0.0, "sim.time_budget_s: must be positive");

    try {
        build_field_map(field_map_params(cfg));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field: ") + e.what());
    }
}

}  // namespace sarsim
