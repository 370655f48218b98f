#include "sarsim/log.hpp"

#include <json.hpp>

namespace sarsim {

namespace {

using nlohmann::ordered_json;

ordered_json position_array(const EnuPosition& p) {
    return ordered_json::array({p.x, p.y, p.z});
}

}  // namespace

std::string metrics_to_json(const Metrics& m) {
    ordered_json j;
    j["completion_time_s"] = m.completion_time_s;
    j["picks_attempted"] = m.picks_attempted;
    j["picks_succeeded"] = m.picks_succeeded;
    j["drop_zone_violations"] = m.drop_zone_violations;
    if (m.min_pairwise_distance_m) {
        j["min_pairwise_distance_m"] = *m.min_pairwise_distance_m;
    } else {
        j["min_pairwise_distance_m"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string hex_dump(const std::uint8_t* data, std::size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0F]);
    }
    return out;
}

void MissionLog::state_transition(const TransitionRecord& rec) {
    if (!out_) return;
    ordered_json j;
    j["t"] = rec.t;
    j["uav"] = rec.uav_id;
    j["kind"] = "state_transition";
    j["from"] = to_string(rec.from);
    j["event"] = to_string(rec.event);
    j["to"] = to_string(rec.to);
    j["handled"] = rec.handled;
    *out_ << j.dump() << '\n';
}

void MissionLog::detection(double t, int uav, const PixelDetection& px,
                           const EnuPosition& estimate) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = uav;
    j["kind"] = "detection";
    j["px"] = px.x_pixels;
    j["py"] = px.y_pixels;
    j["estimate"] = position_array(estimate);
    *out_ << j.dump() << '\n';
}

void MissionLog::telemetry(double t, int uav, const EnuPosition& pos,
                           const EnuPosition& setpoint, MissionState state,
                           const std::optional<PickPhase>& phase, bool gripper,
                           const std::optional<double>& distance_to_object) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = uav;
    j["kind"] = "setpoint";
    j["pos"] = position_array(pos);
    j["sp"] = position_array(setpoint);
    j["state"] = to_string(state);
    if (phase) {
        j["phase"] = to_string(*phase);
    } else {
        j["phase"] = nullptr;
    }
    j["gripper"] = gripper ? 1 : 0;
    if (distance_to_object) {
        j["dist"] = *distance_to_object;
    } else {
        j["dist"] = nullptr;
    }
    *out_ << j.dump() << '\n';
}

void MissionLog::gripper_event(double t, int uav, const std::string& op, bool success,
                               bool feedback, const std::optional<double>& distance_to_object) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = uav;
    j["kind"] = "gripper";
    j["op"] = op;
    j["success"] = success;
    j["feedback"] = feedback ? 1 : 0;
    if (distance_to_object) {
        j["dist"] = *distance_to_object;
    } else {
        j["dist"] = nullptr;
    }
    *out_ << j.dump() << '\n';
}

void MissionLog::comms_tx(double t, int uav, const std::uint8_t* frame, std::size_t len) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = uav;
    j["kind"] = "comms_tx";
    j["frame"] = hex_dump(frame, len);
    *out_ << j.dump() << '\n';
}

void MissionLog::comms_rx(double t, int uav, const DecodeResult& result,
                          const std::uint8_t* frame, std::size_t len) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = uav;
    j["kind"] = "comms_rx";
    j["ok"] = result.message.has_value();
    if (result.message) {
        j["from"] = result.message->uav_id;
        j["state_code"] = result.message->state_code;
        j["seq"] = result.sequence;
    } else {
        j["error"] = to_string(result.error);
    }
    j["frame"] = hex_dump(frame, len);
    *out_ << j.dump() << '\n';
}

void MissionLog::violation(double t, const std::string& rule, const std::vector<int>& uavs,
                           double value) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = uavs.empty() ? -1 : uavs.front();
    j["kind"] = "violation";
    j["rule"] = rule;
    j["uavs"] = uavs;
    j["value"] = value;
    *out_ << j.dump() << '\n';
}

void MissionLog::metric(double t, const Metrics& m) {
    if (!out_) return;
    ordered_json j;
    j["t"] = t;
    j["uav"] = -1;
    j["kind"] = "metric";
    j["complete"] = m.complete;
    j["completion_time_s"] = m.completion_time_s;
    j["picks_attempted"] = m.picks_attempted;
    j["picks_succeeded"] = m.picks_succeeded;
    j["drop_zone_violations"] = m.drop_zone_violations;
    j["separation_violations"] = m.separation_violations;
    j["objects_delivered"] = m.objects_delivered;
    if (m.min_pairwise_distance_m) {
        j["min_pairwise_distance_m"] = *m.min_pairwise_distance_m;
    } else {
        j["min_pairwise_distance_m"] = nullptr;
    }
    *out_ << j.dump() << '\n';
}

}  // namespace sarsim
