#include "sarsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace sarsim {

namespace {

// Truth-side pad contact window around the stand top. The controller's own
// attempt gates (on the noisy belief) are tighter, so belief noise decides
// the marginal cases instead of the physics.
constexpr double kContactBelow = 0.10;
constexpr double kContactAbove = 0.12;

constexpr double kAirborneZ = 0.2;       // above this a UAV counts as airborne
constexpr double kScanAltBand = 0.5;     // |z - scan altitude| window for the separation rule
constexpr double kMinSeparation = 3.0;   // pairwise distance floor while scanning
constexpr double kGpsBiasTau = 45.0;     // correlation time of the wandering GPS error, s
constexpr double kGpsWhiteFrac = 1.0 / 6.0;  // white jitter as a fraction of the GPS sigma
constexpr double kWindTau = 2.0;         // wind random-walk correlation time, s
constexpr double kCameraMinAgl = 0.12;   // camera is blind closer to the object than this
constexpr double kTouchdownZ = 0.15;     // belief altitude that counts as landed
constexpr double kCarryHang = 0.1;       // carried object hangs this far below the UAV
constexpr double kHeadingSpeed = 0.5;    // horizontal speed that updates the heading
constexpr double kDetourLead = 0.5;      // lane legs leave the lane this far before the zone buffer

FieldMap build_map_checked(const RunConfig& cfg) {
    validate_config(cfg);
    return build_field_map(field_map_params(cfg));
}

}  // namespace

const char* to_string(ObjectStatus s) {
    switch (s) {
        case ObjectStatus::InField: return "in_field";
        case ObjectStatus::Carried: return "carried";
        case ObjectStatus::InDropZone: return "in_drop_zone";
    }
    return "?";
}

Agent::Agent(int id_, const RunConfig& cfg, const ScanPath* path, std::uint64_t seed,
             MissionLog* log)
    : id(id_),
      fsm(id_, log && log->enabled()
                    ? MissionFsm::Logger([log](const TransitionRecord& r) { log->state_transition(r); })
                    : MissionFsm::Logger{}),
      scanner(path),
      gripper(cfg.gripper),
      peers(cfg.comms.staleness_timeout_s),
      status_clock(cfg.comms.period_s),
      sensor_rng(seed, "sensor", static_cast<std::uint64_t>(id_)),
      gripper_rng(seed, "gripper", static_cast<std::uint64_t>(id_)),
      wind_rng(seed, "wind", static_cast<std::uint64_t>(id_)) {}

Simulation::Simulation(const RunConfig& cfg, std::uint64_t seed, const SimOptions& opts)
    : cfg_(cfg),
      opts_(opts),
      log_(opts.log_stream),
      map_(build_map_checked(cfg)),
      // The configured margin is the required true clearance; the planner
      // flies on GPS, so it adds a navigation allowance on top.
      avoid_zone_(map_.drop_zone.inflate(cfg.scan.zone_avoid_margin_m +
                                         4.0 * cfg.sensors.gps_noise_sigma_m)),
      arbitration_zone_(map_.drop_zone.inflate(cfg.comms.drop_zone_margin_m)),
      net_rng_(seed, "net") {
    if (cfg_.comms.transport != "sim")
        throw ConfigError(
            "comms.transport: the mission runner only drives the in-process transport");
    if (opts_.partition_override) {
        if (opts_.partition_override->size() != map_.partitions.size())
            throw ConfigError("partition override must supply one polygon per UAV");
        map_.partitions = *opts_.partition_override;
    }

    const double spacing = cfg_.scan.lane_spacing_m > 0.0
                               ? cfg_.scan.lane_spacing_m
                               : default_lane_spacing(cfg_.calibration, cfg_.scan.altitude_m);
    paths_.reserve(map_.partitions.size());
    for (std::size_t i = 0; i < map_.partitions.size(); ++i) {
        paths_.push_back(generate_scan_path(map_.partitions[i], spacing, cfg_.scan.altitude_m,
                                            cfg_.scan.inset_m, map_.home_spots[i].xy()));
    }

    Rng place_rng(seed, "place");
    place_objects(place_rng);

    net_ = std::make_unique<SimNetwork>(
        NetworkConfig{cfg_.comms.loss_prob, cfg_.comms.latency_s, cfg_.comms.jitter_s},
        &net_rng_, cfg_.uav_count);

    agents_.reserve(static_cast<std::size_t>(cfg_.uav_count));
    for (int i = 0; i < cfg_.uav_count; ++i) {
        agents_.push_back(std::make_unique<Agent>(i, cfg_, &paths_[i], seed, &log_));
        Agent& a = *agents_.back();
        a.pos = map_.home_spots[i];
        a.belief = a.pos;
        a.setpoint = a.pos;
        a.gps_bias = Vec2{a.sensor_rng.normal(0.0, cfg_.sensors.gps_noise_sigma_m),
                          a.sensor_rng.normal(0.0, cfg_.sensors.gps_noise_sigma_m)};
        plan_transit(a, a.scanner.target());
    }
}

void Simulation::place_objects(Rng& rng) {
    const ObjectsConfig& oc = cfg_.objects;
    for (std::size_t part = 0; part < map_.partitions.size(); ++part) {
        Polygon inner = [&] {
            try {
                return map_.partitions[part].inset(oc.partition_margin_m);
            } catch (const std::exception& e) {
                throw ConfigError("objects: partition " + std::to_string(part) +
                                  " too small for the placement margin (" + e.what() + ")");
            }
        }();
        const auto [lo, hi] = inner.bounding_box();
        for (int k = 0; k < oc.per_partition; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                Vec2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
                if (!point_in_polygon(p, inner)) continue;
                if (point_in_polygon(p, map_.drop_zone)) continue;
                if (distance_to_boundary(p, map_.drop_zone) < oc.drop_zone_margin_m) continue;
                bool spaced = true;
                for (const SimObject& other : objects_) {
                    if (std::hypot(p.x - other.position.x, p.y - other.position.y) <
                        oc.min_spacing_m) {
                        spaced = false;
                        break;
                    }
                }
                if (!spaced) continue;
                SimObject obj;
                obj.payload = PayloadSpec{oc.mass_g, oc.radius_m, oc.ferrous};
                obj.position = EnuPosition{p.x, p.y, oc.stand_height_m};
                obj.stand_height = oc.stand_height_m;
                obj.home_partition = static_cast<int>(part);
                obj.color = oc.colors[objects_.size() % oc.colors.size()];
                objects_.push_back(std::move(obj));
                placed = true;
            }
            if (!placed)
                throw ConfigError("objects: no room to place object " + std::to_string(k) +
                                  " in partition " + std::to_string(part) +
                                  "; relax the margins or spacing");
        }
    }
}

void Simulation::sense(Agent& a) {
    const SensorModel& sm = cfg_.sensors;
    const double decay = std::exp(-cfg_.sim.dt_s / kGpsBiasTau);
    const double kick = sm.gps_noise_sigma_m * std::sqrt(1.0 - decay * decay);
    a.gps_bias.x = a.gps_bias.x * decay + a.sensor_rng.normal(0.0, kick);
    a.gps_bias.y = a.gps_bias.y * decay + a.sensor_rng.normal(0.0, kick);
    const double white = sm.gps_noise_sigma_m * kGpsWhiteFrac;
    a.belief.x = a.pos.x + a.gps_bias.x + a.sensor_rng.normal(0.0, white);
    a.belief.y = a.pos.y + a.gps_bias.y + a.sensor_rng.normal(0.0, white);
    a.belief.z = std::max(0.0, a.pos.z + a.sensor_rng.normal(0.0, sm.lidar_noise_sigma_m));
}

void Simulation::receive(Agent& a) {
    for (const auto& frame : net_->poll(a.id, clock_)) {
        DecodeResult r = decode_frame(frame.data(), frame.size(),
                                      static_cast<std::uint8_t>(cfg_.comms.message_id));
        if (r.message) a.peers.update(*r.message, clock_);
        if (opts_.log_comms) log_.comms_rx(clock_, a.id, r, frame.data(), frame.size());
    }
}

void Simulation::broadcast(Agent& a) {
    if (!a.status_clock.due(clock_)) return;
    CoordMessage msg =
        make_status_message(static_cast<std::uint8_t>(a.id), enu_to_geo(a.belief, map_.origin),
                            a.fsm.state(), state_entry_ms(a));
    auto frame = encode_frame(msg, a.seq++, static_cast<std::uint8_t>(cfg_.comms.message_id));
    net_->broadcast(a.id, frame.data(), frame.size(), clock_);
    if (opts_.log_comms) log_.comms_tx(clock_, a.id, frame.data(), frame.size());
}

void Simulation::act(Agent& a) {
    switch (a.fsm.state()) {
        case MissionState::TakeoffAndGoToStart:
            if (follow_route(a))
                apply_action(a, a.fsm.handle(clock_, EventKind::ArrivedAtWaypoint));
            break;
        case MissionState::ObjectSearch:
            act_search(a);
            break;
        case MissionState::ObjectPicking:
            act_picking(a);
            break;
        case MissionState::GoToDrop:
            if (follow_route(a))
                apply_action(a, a.fsm.handle(clock_, EventKind::ArrivedAtWaypoint));
            break;
        case MissionState::WaitingToDrop:
            act_waiting(a);
            break;
        case MissionState::Drop:
            act_drop(a);
            break;
        case MissionState::GoHomeAndLand:
            if (follow_route(a)) {
                const EnuPosition& home = map_.home_spots[a.id];
                a.setpoint = EnuPosition{home.x, home.y, 0.0};
                if (a.belief.z < kTouchdownZ)
                    apply_action(a, a.fsm.handle(clock_, EventKind::ArrivedAtWaypoint));
            }
            break;
        case MissionState::Landed:
            a.setpoint = a.pos;
            break;
    }
}

void Simulation::apply_action(Agent& a, MissionAction action) {
    switch (action) {
        case MissionAction::None:
            break;
        case MissionAction::ResumeScanning:
            if (a.resume_anchor) {
                a.scanner.resume_from(*a.resume_anchor);
                a.resume_anchor.reset();
                plan_transit(a, a.scanner.target());
            } else {
                a.route.clear();
                a.scan_detour.clear();
                a.last_scan_target.reset();
            }
            break;
        case MissionAction::EnterPicking:
            break;  // the picking controller is armed at the detection site
        case MissionAction::FlyToWaitingSpot:
            plan_transit(a, waiting_hold_spot(a.id));
            break;
        case MissionAction::RequestDropSlot:
            a.next_arbitration = clock_ + cfg_.comms.grant_delay_s;
            a.setpoint = waiting_hold_spot(a.id);
            break;
        case MissionAction::HoldAtWaitingSpot:
            break;  // act_waiting pins the set-point every tick
        case MissionAction::EnterDropZone:
            a.route.clear();
            a.scan_detour.clear();
            a.last_scan_target.reset();
            a.route.push_back(
                EnuPosition{map_.drop_spot.x, map_.drop_spot.y, cfg_.scan.altitude_m});
            a.route.push_back(
                EnuPosition{map_.drop_spot.x, map_.drop_spot.y, cfg_.scan.drop_altitude_m});
            a.committed_to_zone = false;
            a.release_attempts = 0;
            a.next_release_try = 0.0;
            break;
        case MissionAction::FlyHome:
            plan_transit(a, map_.home_spots[a.id]);
            break;
        case MissionAction::MarkLanded:
            a.vel = EnuPosition{};
            a.pos.z = 0.0;
            a.setpoint = a.pos;
            break;
    }
}

void Simulation::act_search(Agent& a) {
    if (a.delivered >= cfg_.objects.per_partition) {
        apply_action(a, a.fsm.handle(clock_, EventKind::ScanExhausted));
        return;
    }
    if (!a.route.empty() && !follow_route(a)) return;

    std::optional<PixelDetection> det = synthesize_detection(a);
    std::optional<EnuPosition> estimate;
    const double h_agl = a.belief.z - cfg_.objects.stand_height_m;
    if (det && h_agl > 0.05) {
        estimate = detection_to_setpoint(*det, a.belief, a.heading, h_agl, cfg_.calibration);
        log_.detection(clock_, a.id, *det, *estimate);
    }

    ScanFollower::Step step =
        a.scanner.step(a.belief, cfg_.scan.arrive_radius_m, estimate, map_.partitions[a.id]);
    if (step.accepted_detection) {
        a.resume_anchor = a.belief;
        apply_action(a, a.fsm.handle(clock_, EventKind::ObjectDetected));
        a.picking.emplace(cfg_.picking, a.belief, *step.accepted_detection);
        a.setpoint = a.belief;  // brake over the detection
        return;
    }
    if (step.exhausted) {
        // Lap finished with the quota unmet: missed detections, run the lanes again.
        a.scanner = ScanFollower(&paths_[a.id]);
        plan_transit(a, a.scanner.target());
        return;
    }
    plan_scan_leg(a, step.setpoint);
}

void Simulation::act_picking(Agent& a) {
    std::optional<PixelDetection> det = synthesize_detection(a);
    std::optional<EnuPosition> estimate;
    const double h_agl = a.belief.z - cfg_.objects.stand_height_m;
    if (det && h_agl > 0.05) {
        estimate = detection_to_setpoint(*det, a.belief, a.heading, h_agl, cfg_.calibration);
        log_.detection(clock_, a.id, *det, *estimate);
    }

    PickingController::StepResult res = a.picking->step(cfg_.sim.dt_s, estimate, a.belief);
    a.setpoint = res.setpoint;

    if (res.attempt_pick && !a.gripper.release_active(clock_)) {
        SimObject* obj = nearest_in_field(a.pos);
        bool contact = false;
        std::optional<double> dist;
        if (obj) {
            const double lateral =
                std::hypot(a.pos.x - obj->position.x, a.pos.y - obj->position.y);
            dist = lateral;
            contact = lateral <= cfg_.picking.contact_radius_m + cfg_.picking.contact_slack_m &&
                      a.pos.z >= obj->position.z - kContactBelow &&
                      a.pos.z <= obj->position.z + kContactAbove;
        }
        metrics_.picks_attempted++;
        Gripper::Result result =
            a.gripper.attempt_pick(clock_, contact, obj ? obj->payload : PayloadSpec{}, a.gripper_rng);
        log_.gripper_event(clock_, a.id, "pick", result.changed, result.feedback, dist);
        if (result.changed) {
            metrics_.picks_succeeded++;
            obj->status = ObjectStatus::Carried;
            obj->carrier = a.id;
            a.target_object = static_cast<int>(obj - objects_.data());
            a.picking->confirm_pick();
            apply_action(a, a.fsm.handle(clock_, EventKind::PickConfirmed));
            a.picking.reset();
            return;
        }
        a.picking->fail_attempt();
    }

    if (a.picking->phase() == PickPhase::Aborted) {
        apply_action(a, a.fsm.handle(clock_, EventKind::PickAborted));
        a.picking.reset();
    }
}

void Simulation::act_waiting(Agent& a) {
    a.setpoint = waiting_hold_spot(a.id);
    if (clock_ + 1e-12 < a.next_arbitration) return;

    Arbitration verdict;
    if (opts_.bypass_arbitration) {
        verdict = Arbitration::Granted;
    } else {
        ArbitrationInputs in;
        in.own_id = static_cast<std::uint8_t>(a.id);
        in.own_request_ms = state_entry_ms(a);
        in.fresh_peers = a.peers.fresh_peers(clock_);
        in.inflated_drop_zone = &arbitration_zone_;
        in.origin = map_.origin;
        verdict = arbitrate(in);
    }
    if (verdict == Arbitration::Granted) {
        apply_action(a, a.fsm.handle(clock_, EventKind::DropZoneGranted));
    } else {
        apply_action(a, a.fsm.handle(clock_, EventKind::DropZoneDenied));
        a.next_arbitration = clock_ + cfg_.comms.grant_delay_s;
    }
}

void Simulation::act_drop(Agent& a) {
    if (!a.committed_to_zone) {
        if (point_in_polygon(a.belief.xy(), map_.drop_zone)) {
            a.committed_to_zone = true;
        } else if (!opts_.bypass_arbitration && drop_entry_conflict(a)) {
            a.setpoint = a.belief;  // hold short of the zone until the conflict clears
            return;
        }
    }
    if (!follow_route(a)) return;
    a.setpoint = EnuPosition{map_.drop_spot.x, map_.drop_spot.y, cfg_.scan.drop_altitude_m};

    if (!a.gripper.engaged()) {
        // Nothing on the hook (already released): confirm and move on.
        apply_action(a, a.fsm.handle(clock_, EventKind::DropConfirmed));
        return;
    }
    if (clock_ + 1e-12 < a.next_release_try) return;

    Gripper::Result result = a.gripper.command_release(clock_, a.gripper_rng);
    log_.gripper_event(clock_, a.id, "release", result.changed, result.feedback, std::nullopt);
    if (result.changed) {
        if (a.target_object >= 0) {
            SimObject& obj = objects_[static_cast<std::size_t>(a.target_object)];
            obj.position = EnuPosition{a.pos.x, a.pos.y, 0.0};
            obj.carrier = -1;
            obj.status = point_in_polygon(obj.position.xy(), map_.drop_zone)
                             ? ObjectStatus::InDropZone
                             : ObjectStatus::InField;
            if (obj.status == ObjectStatus::InDropZone) {
                a.delivered++;
                metrics_.objects_delivered++;
            }
            a.target_object = -1;
        }
        apply_action(a, a.fsm.handle(clock_, EventKind::DropConfirmed));
    } else if (++a.release_attempts > cfg_.scan.drop_retry_limit) {
        apply_action(a, a.fsm.handle(clock_, EventKind::DropFaulted));
    } else {
        a.next_release_try = clock_ + cfg_.scan.release_retry_delay_s;
    }
}

bool Simulation::drop_entry_conflict(const Agent& a) const {
    const std::uint32_t own_ms = state_entry_ms(a);
    for (const PeerRecord& p : a.peers.fresh_peers(clock_)) {
        if (p.last.uav_id == a.id) continue;
        const auto state = mission_state_from_code(p.last.state_code);
        if (!state) continue;
        if (*state == MissionState::Drop &&
            (p.last.timestamp_ms < own_ms ||
             (p.last.timestamp_ms == own_ms && p.last.uav_id < a.id)))
            return true;
        GeoPoint g{p.last.lat_1e7 / 1e7, p.last.lon_1e7 / 1e7};
        if (point_in_polygon(geo_to_enu(g, map_.origin).xy(), map_.drop_zone)) return true;
    }
    return false;
}

std::optional<PixelDetection> Simulation::synthesize_detection(Agent& a) {
    const CalibrationModel& cal = cfg_.calibration;
    const double sin_t = std::sin(a.heading.radians());
    const double cos_t = std::cos(a.heading.radians());
    const double tan_half_fov =
        std::tan(cfg_.sensors.detection_fov_deg * std::numbers::pi / 360.0);

    const SimObject* best = nullptr;
    double best_ground = 0.0;
    double best_px = 0.0;
    double best_py = 0.0;
    for (const SimObject& o : objects_) {
        if (o.status != ObjectStatus::InField) continue;
        const double h = a.pos.z - o.position.z;
        if (h < kCameraMinAgl) continue;
        const double e = o.position.x - a.pos.x;
        const double n = o.position.y - a.pos.y;
        const double ground = std::hypot(e, n);
        if (ground > h * tan_half_fov) continue;
        const double fwd = e * sin_t + n * cos_t;
        const double right = e * cos_t - n * sin_t;
        const double scale = cal.units_to_meters * h / cal.h_c;  // meters per table unit
        const double px = std::copysign(invert_radial(std::abs(right) / scale, cal), right);
        const double py = std::copysign(invert_radial(std::abs(fwd) / scale, cal), fwd);
        if (std::abs(px) > cal.image_width / 2.0 || std::abs(py) > cal.image_height / 2.0)
            continue;
        if (!best || ground < best_ground) {
            best = &o;
            best_ground = ground;
            best_px = px;
            best_py = py;
        }
    }
    if (!best) return std::nullopt;
    if (!a.sensor_rng.bernoulli(cfg_.sensors.per_frame_detection_prob)) return std::nullopt;

    PixelDetection det;
    det.x_pixels = best_px + a.sensor_rng.normal(0.0, cfg_.sensors.pixel_noise_px);
    det.y_pixels = best_py + a.sensor_rng.normal(0.0, cfg_.sensors.pixel_noise_px);
    det.frame_id = tick_;
    return det;
}

SimObject* Simulation::nearest_in_field(const EnuPosition& from) {
    SimObject* best = nullptr;
    double best_d = 0.0;
    for (SimObject& o : objects_) {
        if (o.status != ObjectStatus::InField) continue;
        const double d = std::hypot(from.x - o.position.x, from.y - o.position.y);
        if (!best || d < best_d) {
            best = &o;
            best_d = d;
        }
    }
    return best;
}

void Simulation::plan_transit(Agent& a, const EnuPosition& goal) {
    a.route.clear();
    a.scan_detour.clear();
    a.last_scan_target.reset();
    const double cruise = cfg_.scan.transit_altitude_m;
    a.route.push_back(EnuPosition{a.belief.x, a.belief.y, cruise});
    for (const Vec2& c : route_around(a.belief.xy(), goal.xy(), avoid_zone_))
        a.route.push_back(EnuPosition{c.x, c.y, cruise});
    a.route.push_back(EnuPosition{goal.x, goal.y, cruise});
    a.route.push_back(goal);
}

void Simulation::plan_scan_leg(Agent& a, const EnuPosition& target) {
    const bool changed = !a.last_scan_target ||
                         horizontal_distance(*a.last_scan_target, target) > 1e-9 ||
                         a.last_scan_target->z != target.z;
    if (changed) {
        // Follow the lane up to the drop-zone buffer, go around, rejoin the
        // lane. Detouring from the leg start would cut a diagonal across the
        // partition and leave a coverage shadow next to the zone.
        a.scan_detour.clear();
        const Vec2 from = a.belief.xy();
        const Vec2 to = target.xy();
        const Vec2 dir = to - from;
        const auto span = clip_line(avoid_zone_.inflate(kDetourLead), from, dir);
        if (span && span->first < 1.0 && span->second > 0.0) {
            const double t_in = std::max(span->first, 0.0);
            const double t_out = std::min(span->second, 1.0);
            const Vec2 p_in{from.x + dir.x * t_in, from.y + dir.y * t_in};
            const Vec2 p_out{from.x + dir.x * t_out, from.y + dir.y * t_out};
            if (span->first > 0.0) a.scan_detour.push_back(p_in);
            for (const Vec2& c : route_around(p_in, p_out, avoid_zone_))
                a.scan_detour.push_back(c);
            if (span->second < 1.0) a.scan_detour.push_back(p_out);
        }
        a.last_scan_target = target;
    }
    while (!a.scan_detour.empty() &&
           std::hypot(a.belief.x - a.scan_detour.front().x,
                      a.belief.y - a.scan_detour.front().y) < cfg_.scan.arrive_radius_m)
        a.scan_detour.pop_front();
    if (!a.scan_detour.empty())
        a.setpoint = EnuPosition{a.scan_detour.front().x, a.scan_detour.front().y, target.z};
    else
        a.setpoint = target;
}

bool Simulation::follow_route(Agent& a) {
    while (!a.route.empty() &&
           distance3d(a.belief, a.route.front()) <= cfg_.scan.arrive_radius_m)
        a.route.pop_front();
    if (a.route.empty()) return true;
    a.setpoint = a.route.front();
    return false;
}

void Simulation::integrate(Agent& a) {
    if (a.fsm.state() == MissionState::Landed) {
        a.vel = EnuPosition{};
        return;
    }
    const double dt = cfg_.sim.dt_s;
    const KinematicsConfig& kin = cfg_.kinematics;
    const double cap_xy = a.fsm.state() == MissionState::ObjectPicking
                              ? std::min(cfg_.scan.lateral_speed_mps, kin.max_speed_xy_mps)
                              : kin.max_speed_xy_mps;

    double vx = kin.kp * (a.setpoint.x - a.belief.x);
    double vy = kin.kp * (a.setpoint.y - a.belief.y);
    double vz = kin.kp * (a.setpoint.z - a.belief.z);
    double h = std::hypot(vx, vy);
    if (h > cap_xy) {
        vx *= cap_xy / h;
        vy *= cap_xy / h;
    }
    vz = std::clamp(vz, -kin.max_speed_z_mps, kin.max_speed_z_mps);

    const double dv = kin.max_accel_mps2 * dt;
    vx = std::clamp(vx, a.vel.x - dv, a.vel.x + dv);
    vy = std::clamp(vy, a.vel.y - dv, a.vel.y + dv);
    vz = std::clamp(vz, a.vel.z - dv, a.vel.z + dv);
    h = std::hypot(vx, vy);
    if (h > cap_xy) {
        vx *= cap_xy / h;
        vy *= cap_xy / h;
    }
    vz = std::clamp(vz, -kin.max_speed_z_mps, kin.max_speed_z_mps);
    a.vel = EnuPosition{vx, vy, vz};

    // Wind drifts as a mean-reverting random walk and is added on top of the
    // commanded velocity; the speed limits bound the command, not the drift.
    const double decay = std::exp(-dt / kWindTau);
    const double kick = cfg_.sensors.wind_gust_mps * std::sqrt(1.0 - decay * decay);
    const double mean_x = cfg_.sensors.wind_mean_mps;
    a.wind.x = mean_x + (a.wind.x - mean_x) * decay + a.wind_rng.normal(0.0, kick);
    a.wind.y = a.wind.y * decay + a.wind_rng.normal(0.0, kick);

    a.pos.x += (vx + a.wind.x) * dt;
    a.pos.y += (vy + a.wind.y) * dt;
    a.pos.z = std::max(0.0, a.pos.z + vz * dt);
    if (std::hypot(vx, vy) > kHeadingSpeed) a.heading = Heading(std::atan2(vx, vy));

    if (a.target_object >= 0) {
        SimObject& obj = objects_[static_cast<std::size_t>(a.target_object)];
        if (obj.status == ObjectStatus::Carried)
            obj.position = EnuPosition{a.pos.x, a.pos.y, std::max(0.0, a.pos.z - kCarryHang)};
    }
}

void Simulation::check_oracles() {
    std::vector<int> inside;
    for (const auto& up : agents_) {
        const Agent& a = *up;
        if (a.pos.z > kAirborneZ && point_in_polygon(a.pos.xy(), map_.drop_zone))
            inside.push_back(a.id);
    }
    if (inside.size() > 1) {
        metrics_.drop_zone_violations++;
        log_.violation(clock_, "drop_zone_mutex", inside, static_cast<double>(inside.size()));
    }

    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const Agent& x = *agents_[i];
        const bool x_air = x.pos.z > kAirborneZ;
        const bool x_scanning = std::abs(x.pos.z - cfg_.scan.altitude_m) <= kScanAltBand &&
                                point_in_polygon(x.pos.xy(), map_.partitions[x.id]);
        for (std::size_t j = i + 1; j < agents_.size(); ++j) {
            const Agent& y = *agents_[j];
            const double d = distance3d(x.pos, y.pos);
            if (x_air && y.pos.z > kAirborneZ) {
                if (!metrics_.min_pairwise_distance_m || d < *metrics_.min_pairwise_distance_m)
                    metrics_.min_pairwise_distance_m = d;
            }
            const bool y_scanning = std::abs(y.pos.z - cfg_.scan.altitude_m) <= kScanAltBand &&
                                    point_in_polygon(y.pos.xy(), map_.partitions[y.id]);
            if (x_scanning && y_scanning && d < kMinSeparation) {
                metrics_.separation_violations++;
                log_.violation(clock_, "min_separation", {x.id, y.id}, d);
            }
        }
    }
}

void Simulation::check_complete() {
    if (complete_) return;
    for (const auto& up : agents_)
        if (up->fsm.state() != MissionState::Landed) return;
    for (const SimObject& o : objects_)
        if (o.status != ObjectStatus::InDropZone) return;
    complete_ = true;
    metrics_.complete = true;
    metrics_.completion_time_s = clock_;
}

std::uint32_t Simulation::state_entry_ms(const Agent& a) const {
    return static_cast<std::uint32_t>(std::llround(a.fsm.state_entry_time() * 1000.0));
}

EnuPosition Simulation::waiting_hold_spot(int id) const {
    const EnuPosition& spot = map_.waiting_spots[static_cast<std::size_t>(id)];
    const Vec2 c = map_.drop_zone.centroid();
    Vec2 dir{spot.x - c.x, spot.y - c.y};
    const double n = dir.norm();
    dir = n < 1e-9 ? Vec2{0.0, -1.0} : dir * (1.0 / n);
    const double back = cfg_.comms.drop_zone_margin_m + 1.5;
    return EnuPosition{spot.x + dir.x * back, spot.y + dir.y * back, cfg_.scan.altitude_m};
}

void Simulation::step() {
    for (const auto& up : agents_) {
        Agent& a = *up;
        sense(a);
        receive(a);
        act(a);
        broadcast(a);
        integrate(a);
    }
    clock_ += cfg_.sim.dt_s;
    ++tick_;
    check_oracles();
    if (opts_.log_telemetry && log_.enabled()) {
        for (const auto& up : agents_) {
            Agent& a = *up;
            std::optional<double> dist;
            if (a.fsm.state() == MissionState::ObjectPicking) {
                if (const SimObject* o = nearest_in_field(a.pos))
                    dist = std::hypot(a.pos.x - o->position.x, a.pos.y - o->position.y);
            }
            std::optional<PickPhase> phase;
            if (a.picking) phase = a.picking->phase();
            log_.telemetry(clock_, a.id, a.pos, a.setpoint, a.fsm.state(), phase,
                           a.gripper.feedback(), dist);
        }
    }
    check_complete();
}

RunResult Simulation::run() {
    const auto max_ticks =
        static_cast<std::uint64_t>(std::llround(cfg_.sim.time_budget_s / cfg_.sim.dt_s));
    while (!complete_ && tick_ < max_ticks) step();
    if (!complete_) metrics_.completion_time_s = clock_;
    log_.metric(clock_, metrics_);
    RunResult out;
    out.metrics = metrics_;
    out.exit_code = metrics_.safety_violations() > 0 ? 1 : (complete_ ? 0 : 3);
    return out;
}

RunResult run_mission(const RunConfig& cfg, std::uint64_t seed, const SimOptions& opts) {
    Simulation sim(cfg, seed, opts);
    return sim.run();
}

}  // namespace sarsim
