#include "sarsim/mission.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sarsim {

const char* to_string(MissionState s) {
    switch (s) {
        case MissionState::TakeoffAndGoToStart: return "TakeoffAndGoToStart";
        case MissionState::ObjectSearch: return "ObjectSearch";
        case MissionState::ObjectPicking: return "ObjectPicking";
        case MissionState::GoToDrop: return "GoToDrop";
        case MissionState::WaitingToDrop: return "WaitingToDrop";
        case MissionState::Drop: return "Drop";
        case MissionState::GoHomeAndLand: return "GoHomeAndLand";
        case MissionState::Landed: return "Landed";
    }
    return "?";
}

const char* to_string(EventKind e) {
    switch (e) {
        case EventKind::ObjectDetected: return "ObjectDetected";
        case EventKind::ObjectLost: return "ObjectLost";
        case EventKind::PickConfirmed: return "PickConfirmed";
        case EventKind::PickAborted: return "PickAborted";
        case EventKind::DropConfirmed: return "DropConfirmed";
        case EventKind::DropFaulted: return "DropFaulted";
        case EventKind::ArrivedAtWaypoint: return "ArrivedAtWaypoint";
        case EventKind::DropZoneGranted: return "DropZoneGranted";
        case EventKind::DropZoneDenied: return "DropZoneDenied";
        case EventKind::ScanExhausted: return "ScanExhausted";
        case EventKind::Tick: return "Tick";
    }
    return "?";
}

const char* to_string(MissionAction a) {
    switch (a) {
        case MissionAction::None: return "None";
        case MissionAction::ResumeScanning: return "ResumeScanning";
        case MissionAction::EnterPicking: return "EnterPicking";
        case MissionAction::FlyToWaitingSpot: return "FlyToWaitingSpot";
        case MissionAction::RequestDropSlot: return "RequestDropSlot";
        case MissionAction::HoldAtWaitingSpot: return "HoldAtWaitingSpot";
        case MissionAction::EnterDropZone: return "EnterDropZone";
        case MissionAction::FlyHome: return "FlyHome";
        case MissionAction::MarkLanded: return "MarkLanded";
    }
    return "?";
}

const char* to_string(PickPhase p) {
    switch (p) {
        case PickPhase::LateralTrack: return "LateralTrack";
        case PickPhase::Descend: return "Descend";
        case PickPhase::Recover: return "Recover";
        case PickPhase::Verify: return "Verify";
        case PickPhase::PickedConfirmed: return "PickedConfirmed";
        case PickPhase::Aborted: return "Aborted";
    }
    return "?";
}

std::optional<MissionState> mission_state_from_code(std::uint8_t code) {
    if (code < 1 || code > kMissionStateCount) return std::nullopt;
    return static_cast<MissionState>(code);
}

TransitionResult transition(MissionState state, EventKind event) {
    using S = MissionState;
    using E = EventKind;
    using A = MissionAction;
    switch (state) {
        case S::TakeoffAndGoToStart:
            if (event == E::ArrivedAtWaypoint) return {S::ObjectSearch, A::ResumeScanning, true};
            break;
        case S::ObjectSearch:
            if (event == E::ObjectDetected) return {S::ObjectPicking, A::EnterPicking, true};
            if (event == E::ScanExhausted) return {S::GoHomeAndLand, A::FlyHome, true};
            break;
        case S::ObjectPicking:
            if (event == E::PickConfirmed) return {S::GoToDrop, A::FlyToWaitingSpot, true};
            if (event == E::PickAborted) return {S::ObjectSearch, A::ResumeScanning, true};
            break;
        case S::GoToDrop:
            if (event == E::ArrivedAtWaypoint) return {S::WaitingToDrop, A::RequestDropSlot, true};
            break;
        case S::WaitingToDrop:
            if (event == E::DropZoneGranted) return {S::Drop, A::EnterDropZone, true};
            if (event == E::DropZoneDenied) return {S::WaitingToDrop, A::HoldAtWaitingSpot, true};
            break;
        case S::Drop:
            if (event == E::DropConfirmed) return {S::ObjectSearch, A::ResumeScanning, true};
            if (event == E::DropFaulted) return {S::GoHomeAndLand, A::FlyHome, true};
            break;
        case S::GoHomeAndLand:
            if (event == E::ArrivedAtWaypoint) return {S::Landed, A::MarkLanded, true};
            break;
        case S::Landed:
            break;
    }
    return {state, MissionAction::None, false};
}

MissionFsm::MissionFsm(int uav_id, Logger logger)
    : uav_id_(uav_id), logger_(std::move(logger)) {}

MissionAction MissionFsm::handle(double t, EventKind event) {
    const TransitionResult r = transition(state_, event);
    if (event != EventKind::Tick && logger_) {
        logger_({t, uav_id_, state_, event, r.next, r.handled});
    }
    if (r.next != state_) {
        state_ = r.next;
        entry_time_ = t;
    }
    return r.action;
}

double DescendingCone::radius_at(double h) const {
    if (h <= apex_altitude) return apex_radius;
    if (h >= top_altitude) return top_radius;
    const double f = (h - apex_altitude) / (top_altitude - apex_altitude);
    return apex_radius + (top_radius - apex_radius) * f;
}

void validate_cone(const DescendingCone& cone) {
    if (!(cone.top_altitude > cone.apex_altitude) || cone.apex_altitude < 0.0) {
        throw std::invalid_argument("cone: need top_altitude > apex_altitude >= 0");
    }
    if (!(cone.top_radius > cone.apex_radius) || cone.apex_radius <= 0.0) {
        throw std::invalid_argument("cone: need top_radius > apex_radius > 0");
    }
}

PickingController::PickingController(const PickingConfig& cfg, const EnuPosition& entry_pose,
                                     const EnuPosition& initial_object_estimate)
    : cfg_(cfg), commanded_z_(entry_pose.z) {
    validate_cone(cfg.cone);
    if (cfg.alpha <= 0.0 || cfg.alpha > 1.0) {
        throw std::invalid_argument("picking: alpha must be in (0,1]");
    }
    if (!(cfg.confidence_low < cfg.confidence_high)) {
        throw std::invalid_argument("picking: confidence thresholds must satisfy low < high");
    }
    status_.confidence = std::clamp(cfg.confidence_init, 0.0, 1.0);
    status_.last_seen_altitude = entry_pose.z;
    status_.last_seen_position = initial_object_estimate;
}

void PickingController::enter_recover() {
    ++status_.recover_episodes;
    if (cfg_.max_recover_episodes >= 0 &&
        status_.recover_episodes > cfg_.max_recover_episodes) {
        status_.phase = PickPhase::Aborted;
        return;
    }
    status_.phase = PickPhase::Recover;
    double target = std::max(status_.last_seen_altitude, commanded_z_ + cfg_.recover_climb_m);
    target = std::min(target, cfg_.cone.top_altitude);
    recover_target_z_ = std::max(target, commanded_z_);
    time_in_phase_ = 0.0;
    at_target_s_ = 0.0;
}

PickingController::StepResult PickingController::step(
    double dt, const std::optional<EnuPosition>& object_estimate, const EnuPosition& pose) {
    const bool seen = object_estimate.has_value();
    status_.confidence = std::clamp(
        (1.0 - cfg_.alpha) * status_.confidence + cfg_.alpha * (seen ? 1.0 : 0.0), 0.0, 1.0);
    if (seen) {
        status_.last_seen_position = *object_estimate;
        status_.last_seen_altitude = pose.z;
    }
    time_in_phase_ += dt;

    const Vec2 target_xy = status_.last_seen_position.xy();
    const double lateral_error = (pose.xy() - target_xy).norm();
    bool attempt = false;

    switch (status_.phase) {
        case PickPhase::LateralTrack:
            if (status_.confidence <= cfg_.confidence_low) {
                enter_recover();
            } else if (status_.confidence >= cfg_.confidence_high &&
                       lateral_error < cfg_.cone.radius_at(pose.z)) {
                status_.phase = PickPhase::Descend;
                time_in_phase_ = 0.0;
            }
            break;
        case PickPhase::Descend:
            if (status_.confidence <= cfg_.confidence_low) {
                enter_recover();
            } else if (lateral_error >= cfg_.cone.radius_at(pose.z)) {
                status_.phase = PickPhase::LateralTrack;
                time_in_phase_ = 0.0;
            } else {
                commanded_z_ = std::max(commanded_z_ - cfg_.descend_speed_mps * dt,
                                        cfg_.cone.apex_altitude);
                if (commanded_z_ <= cfg_.cone.apex_altitude + 1e-9 &&
                    pose.z <= cfg_.cone.apex_altitude + 0.1) {
                    status_.phase = PickPhase::Verify;
                    time_in_phase_ = 0.0;
                }
            }
            break;
        case PickPhase::Verify:
            commanded_z_ = std::max(commanded_z_ - cfg_.descend_speed_mps * dt,
                                    cfg_.stand_height_m);
            if (lateral_error <= cfg_.contact_radius_m &&
                pose.z <= cfg_.stand_height_m + cfg_.contact_slack_m &&
                pose.z >= cfg_.stand_height_m - 0.05) {
                attempt = true;
            }
            if (time_in_phase_ > cfg_.verify_timeout_s) {
                enter_recover();
            }
            break;
        case PickPhase::Recover:
            commanded_z_ = std::min(commanded_z_ + cfg_.ascend_speed_mps * dt,
                                    recover_target_z_);
            if (status_.confidence >= cfg_.confidence_high) {
                status_.phase = PickPhase::LateralTrack;
                time_in_phase_ = 0.0;
            } else if (commanded_z_ >= recover_target_z_ - 1e-9 &&
                       pose.z >= recover_target_z_ - 0.2) {
                at_target_s_ += dt;
                if (at_target_s_ > cfg_.recover_patience_s) {
                    const double bumped = std::min(recover_target_z_ + cfg_.recover_bump_m,
                                                   cfg_.cone.top_altitude);
                    ++status_.recover_episodes;
                    if (cfg_.max_recover_episodes >= 0 &&
                        status_.recover_episodes > cfg_.max_recover_episodes) {
                        status_.phase = PickPhase::Aborted;
                    } else {
                        recover_target_z_ = std::max(bumped, recover_target_z_);
                        at_target_s_ = 0.0;
                    }
                }
            }
            break;
        case PickPhase::PickedConfirmed:
        case PickPhase::Aborted:
            break;
    }

    return {{target_xy.x, target_xy.y, commanded_z_}, attempt};
}

void PickingController::confirm_pick() {
    if (status_.phase != PickPhase::Aborted) {
        status_.phase = PickPhase::PickedConfirmed;
    }
}

void PickingController::fail_attempt() {
    if (status_.phase == PickPhase::Verify) {
        enter_recover();
    }
}

ScanFollower::ScanFollower(const ScanPath* path) : path_(path) {
    if (!path_ || path_->waypoints.empty()) {
        throw std::invalid_argument("scan follower: empty path");
    }
    cursor_.next_index = 0;
    cursor_.entry = path_->waypoints.front();
}

EnuPosition ScanFollower::target() const {
    if (heading_to_entry_) return cursor_.entry;
    const std::size_t i = std::min(cursor_.next_index, path_->waypoints.size() - 1);
    return path_->waypoints[i];
}

void ScanFollower::resume_from(const EnuPosition& where) {
    cursor_ = resume_point(*path_, where);
    heading_to_entry_ = true;
    exhausted_ = false;
}

ScanFollower::Step ScanFollower::step(const EnuPosition& pose, double arrive_radius,
                                      const std::optional<EnuPosition>& localized_detection,
                                      const Polygon& own_partition) {
    Step out;
    if (localized_detection &&
        point_in_polygon(localized_detection->xy(), own_partition)) {
        out.accepted_detection = localized_detection;
    }

    if (!exhausted_ && distance3d(pose, target()) <= arrive_radius) {
        if (heading_to_entry_) {
            heading_to_entry_ = false;
        } else if (cursor_.next_index + 1 < path_->waypoints.size()) {
            ++cursor_.next_index;
        } else {
            exhausted_ = true;
        }
    }
    out.setpoint = target();
    out.exhausted = exhausted_;
    return out;
}

}  // namespace sarsim
