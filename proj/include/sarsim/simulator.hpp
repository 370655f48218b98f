#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sarsim/comms.hpp"
#include "sarsim/config.hpp"
#include "sarsim/gripper.hpp"
#include "sarsim/localization.hpp"
#include "sarsim/log.hpp"
#include "sarsim/mission.hpp"
#include "sarsim/planner.hpp"
#include "sarsim/rng.hpp"

namespace sarsim {

enum class ObjectStatus : std::uint8_t { InField, Carried, InDropZone };
const char* to_string(ObjectStatus s);

struct SimObject {
    PayloadSpec payload;
    EnuPosition position;  // z is the top of the stand while in the field
    double stand_height = 0.3;
    ObjectStatus status = ObjectStatus::InField;
    int carrier = -1;  // uav id while Carried
    int home_partition = -1;
    std::string color;
};

struct SimOptions {
    std::ostream* log_stream = nullptr;
    bool log_telemetry = true;
    bool log_comms = true;
    // Fault injection for oracle sensitivity tests.
    bool bypass_arbitration = false;
    std::optional<std::vector<Polygon>> partition_override;
};

struct RunResult {
    Metrics metrics;
    int exit_code = 0;  // 0 success, 1 safety violation, 3 sim-time budget exceeded
};

// One UAV: flight state, controllers, gripper and comms endpoint. Fields are
// public for test inspection; the engine owns the lifecycle.
struct Agent {
    Agent(int id, const RunConfig& cfg, const ScanPath* path, std::uint64_t seed,
          MissionLog* log);

    int id;
    MissionFsm fsm;
    std::optional<PickingController> picking;
    ScanFollower scanner;
    Gripper gripper;
    PeerTable peers;
    CommsScheduler status_clock;
    Rng sensor_rng;
    Rng gripper_rng;
    Rng wind_rng;

    EnuPosition pos;     // truth
    EnuPosition belief;  // GPS + rangefinder estimate, refreshed every tick
    EnuPosition vel;     // commanded velocity (wind drift excluded)
    Heading heading;
    Vec2 wind;
    Vec2 gps_bias;       // slowly wandering position error (plus white jitter)

    std::deque<EnuPosition> route;       // pending transit waypoints
    std::deque<Vec2> scan_detour;        // drop-zone avoidance for the active lane
    std::optional<EnuPosition> last_scan_target;
    std::optional<EnuPosition> resume_anchor;  // lane position of the last accepted detection
    EnuPosition setpoint;
    std::uint8_t seq = 0;
    int delivered = 0;
    int target_object = -1;              // object carried (or being dropped)
    double next_arbitration = 0.0;
    double next_release_try = 0.0;
    int release_attempts = 0;
    bool committed_to_zone = false;
};

class Simulation {
public:
    Simulation(const RunConfig& cfg, std::uint64_t seed, const SimOptions& opts = {});

    void step();
    RunResult run();

    double now() const { return clock_; }
    bool complete() const { return complete_; }
    const Metrics& metrics() const { return metrics_; }
    const RunConfig& config() const { return cfg_; }
    const FieldMap& field() const { return map_; }
    const std::vector<ScanPath>& scan_paths() const { return paths_; }
    const std::vector<SimObject>& objects() const { return objects_; }
    const Agent& agent(int i) const { return *agents_[i]; }
    int agent_count() const { return static_cast<int>(agents_.size()); }

private:
    void place_objects(Rng& rng);
    void sense(Agent& a);
    void receive(Agent& a);
    void act(Agent& a);
    void broadcast(Agent& a);
    void integrate(Agent& a);
    void check_oracles();
    void check_complete();

    void plan_transit(Agent& a, const EnuPosition& goal);
    void plan_scan_leg(Agent& a, const EnuPosition& target);
    bool follow_route(Agent& a);  // true when the final waypoint is reached
    void apply_action(Agent& a, MissionAction action);
    void act_search(Agent& a);
    void act_picking(Agent& a);
    void act_waiting(Agent& a);
    void act_drop(Agent& a);
    bool drop_entry_conflict(const Agent& a) const;
    std::optional<PixelDetection> synthesize_detection(Agent& a);
    SimObject* nearest_in_field(const EnuPosition& from);
    std::uint32_t state_entry_ms(const Agent& a) const;
    EnuPosition waiting_hold_spot(int id) const;

    RunConfig cfg_;
    SimOptions opts_;
    MissionLog log_;
    FieldMap map_;
    Polygon avoid_zone_;        // drop zone grown by the transit avoidance margin
    Polygon arbitration_zone_;  // drop zone grown by the comms position margin
    std::vector<ScanPath> paths_;
    std::vector<SimObject> objects_;
    std::vector<std::unique_ptr<Agent>> agents_;
    std::unique_ptr<SimNetwork> net_;
    Rng net_rng_;
    double clock_ = 0.0;
    std::uint64_t tick_ = 0;
    bool complete_ = false;
    Metrics metrics_;
};

// Convenience wrapper used by the CLI and batch runner.
RunResult run_mission(const RunConfig& cfg, std::uint64_t seed, const SimOptions& opts = {});

}  // namespace sarsim
