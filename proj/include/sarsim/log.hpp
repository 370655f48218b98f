#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "sarsim/comms.hpp"
#include "sarsim/geometry.hpp"
#include "sarsim/localization.hpp"
#include "sarsim/mission.hpp"

namespace sarsim {

// Per-run counters. The five metrics-file fields are the contract consumed
// by batch summaries; the rest are internal bookkeeping.
struct Metrics {
    bool complete = false;
    double completion_time_s = 0.0;
    long picks_attempted = 0;
    long picks_succeeded = 0;
    long drop_zone_violations = 0;
    long separation_violations = 0;
    long objects_delivered = 0;
    std::optional<double> min_pairwise_distance_m;

    long safety_violations() const { return drop_zone_violations + separation_violations; }
};

// The metrics record written beside the mission log:
// completion_time_s, picks_attempted, picks_succeeded, drop_zone_violations,
// min_pairwise_distance_m.
std::string metrics_to_json(const Metrics& m);

std::string hex_dump(const std::uint8_t* data, std::size_t len);

// JSONL mission log: one record per line, each with t, uav and kind fields.
// A null stream disables output so call sites stay unconditional.
class MissionLog {
public:
    explicit MissionLog(std::ostream* out = nullptr) : out_(out) {}

    bool enabled() const { return out_ != nullptr; }

    void state_transition(const TransitionRecord& rec);
    void detection(double t, int uav, const PixelDetection& px, const EnuPosition& estimate);
    void telemetry(double t, int uav, const EnuPosition& pos, const EnuPosition& setpoint,
                   MissionState state, const std::optional<PickPhase>& phase, bool gripper,
                   const std::optional<double>& distance_to_object);
    void gripper_event(double t, int uav, const std::string& op, bool success, bool feedback,
                       const std::optional<double>& distance_to_object);
    void comms_tx(double t, int uav, const std::uint8_t* frame, std::size_t len);
    void comms_rx(double t, int uav, const DecodeResult& result, const std::uint8_t* frame,
                  std::size_t len);
    void violation(double t, const std::string& rule, const std::vector<int>& uavs,
                   double value);
    void metric(double t, const Metrics& m);

private:
    std::ostream* out_;
};

}  // namespace sarsim
