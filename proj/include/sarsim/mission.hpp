#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sarsim/geometry.hpp"
#include "sarsim/planner.hpp"

namespace sarsim {

// Top-level mission states. The numeric codes go out over the wire in the
// status message, so they are fixed.
enum class MissionState : std::uint8_t {
    TakeoffAndGoToStart = 1,
    ObjectSearch = 2,
    ObjectPicking = 3,
    GoToDrop = 4,
    WaitingToDrop = 5,
    Drop = 6,
    GoHomeAndLand = 7,
    Landed = 8,
};
inline constexpr int kMissionStateCount = 8;

enum class EventKind : std::uint8_t {
    ObjectDetected,
    ObjectLost,
    PickConfirmed,
    PickAborted,
    DropConfirmed,
    DropFaulted,
    ArrivedAtWaypoint,
    DropZoneGranted,
    DropZoneDenied,
    ScanExhausted,
    Tick,
};
inline constexpr int kEventKindCount = 11;

enum class MissionAction : std::uint8_t {
    None,
    ResumeScanning,
    EnterPicking,
    FlyToWaitingSpot,
    RequestDropSlot,
    HoldAtWaitingSpot,
    EnterDropZone,
    FlyHome,
    MarkLanded,
};

const char* to_string(MissionState s);
const char* to_string(EventKind e);
const char* to_string(MissionAction a);

std::optional<MissionState> mission_state_from_code(std::uint8_t code);

struct TransitionResult {
    MissionState next;
    MissionAction action = MissionAction::None;
    bool handled = false;  // false for the explicit no-op pairs
};

// Total transition function: every (state, event) pair yields a result, the
// pairs outside the mission flow staying put with no action.
TransitionResult transition(MissionState state, EventKind event);

struct TransitionRecord {
    double t = 0.0;
    int uav_id = 0;
    MissionState from;
    EventKind event;
    MissionState to;
    bool handled = false;
};

// Per-agent state holder. Non-Tick events are passed to the logger whether
// or not they changed anything, so the log shows ignored events too.
class MissionFsm {
public:
    using Logger = std::function<void(const TransitionRecord&)>;

    explicit MissionFsm(int uav_id, Logger logger = nullptr);

    MissionAction handle(double t, EventKind event);

    MissionState state() const { return state_; }
    double state_entry_time() const { return entry_time_; }
    int uav_id() const { return uav_id_; }

private:
    int uav_id_;
    MissionState state_ = MissionState::TakeoffAndGoToStart;
    double entry_time_ = 0.0;
    Logger logger_;
};

// Linear funnel the UAV must stay inside while descending onto an object:
// wide at scan altitude, narrowing to the pad-contact radius near the stand.
struct DescendingCone {
    double apex_altitude = 0.5;
    double apex_radius = 0.10;
    double top_altitude = 8.0;
    double top_radius = 1.5;

    double radius_at(double h) const;
};

void validate_cone(const DescendingCone& cone);

enum class PickPhase : std::uint8_t {
    LateralTrack,
    Descend,
    Recover,
    Verify,
    PickedConfirmed,
    Aborted,
};

const char* to_string(PickPhase p);

struct PickingConfig {
    DescendingCone cone{};
    double alpha = 0.2;             // detection-frequency EMA weight
    double confidence_init = 0.5;
    double confidence_high = 0.7;   // descend gate
    double confidence_low = 0.3;    // recover trigger
    double descend_speed_mps = 0.4;
    double ascend_speed_mps = 0.6;
    int max_recover_episodes = 5;   // negative means retry forever
    double stand_height_m = 0.3;
    double contact_radius_m = 0.10;
    double contact_slack_m = 0.06;
    double verify_timeout_s = 4.0;
    double recover_climb_m = 2.0;   // first recover target above current altitude
    double recover_bump_m = 1.0;    // extra climb per stalled recover
    double recover_patience_s = 2.0;
};

struct PickingStatus {
    PickPhase phase = PickPhase::LateralTrack;
    double confidence = 0.5;
    double last_seen_altitude = 0.0;
    EnuPosition last_seen_position{};
    int recover_episodes = 0;
};

// Nested controller active while the mission state is ObjectPicking. Drives
// the vehicle over the object, descends inside the cone when confidence is
// high, recovers altitude when the object drops out of view, and requests a
// gripper attempt during the final verify approach.
class PickingController {
public:
    PickingController(const PickingConfig& cfg, const EnuPosition& entry_pose,
                      const EnuPosition& initial_object_estimate);

    struct StepResult {
        EnuPosition setpoint;
        bool attempt_pick = false;
    };

    // One control tick. `object_estimate` is the localized object position
    // for this frame if the camera saw it.
    StepResult step(double dt, const std::optional<EnuPosition>& object_estimate,
                    const EnuPosition& pose);

    void confirm_pick();  // gripper feedback went 0 -> 1
    void fail_attempt();  // gripper attempt returned no engagement

    PickPhase phase() const { return status_.phase; }
    const PickingStatus& status() const { return status_; }
    double commanded_altitude() const { return commanded_z_; }

private:
    void enter_recover();

    PickingConfig cfg_;
    PickingStatus status_;
    double commanded_z_;
    double recover_target_z_ = 0.0;
    double time_in_phase_ = 0.0;
    double at_target_s_ = 0.0;
};

// Walks the boustrophedon path during ObjectSearch. The agent reports
// arrivals; detections are accepted only when the localized object lies in
// the agent's own partition (boundary inclusive).
class ScanFollower {
public:
    explicit ScanFollower(const ScanPath* path);

    struct Step {
        EnuPosition setpoint;
        std::optional<EnuPosition> accepted_detection;
        bool exhausted = false;
    };

    Step step(const EnuPosition& pose, double arrive_radius,
              const std::optional<EnuPosition>& localized_detection,
              const Polygon& own_partition);

    void resume_from(const EnuPosition& where);
    bool exhausted() const { return exhausted_; }
    EnuPosition target() const;

private:
    const ScanPath* path_;
    PathCursor cursor_;
    bool heading_to_entry_ = false;
    bool exhausted_ = false;
};

}  // namespace sarsim
