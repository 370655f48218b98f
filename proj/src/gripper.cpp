#include "sarsim/gripper.hpp"

namespace sarsim {

Gripper::Gripper(const Config& cfg) : cfg_(cfg) {
    if (cfg.success_prob_pick < 0.0 || cfg.success_prob_pick > 1.0 ||
        cfg.success_prob_drop < 0.0 || cfg.success_prob_drop > 1.0) {
        throw std::invalid_argument("gripper: success probabilities must be in [0,1]");
    }
    if (cfg.release_pulse_s <= 0.0 || cfg.cycle_period_s < cfg.release_pulse_s) {
        throw std::invalid_argument("gripper: cycle period must cover the release pulse");
    }
    if (cfg.servo_power_w < 0.0 || cfg.max_lift_g <= 0.0) {
        throw std::invalid_argument("gripper: power and lift limit must be positive");
    }
}

Gripper::Result Gripper::attempt_pick(double t, bool contact, const PayloadSpec& payload,
                                      Rng& rng) {
    if (release_active(t)) {
        throw GripperFault("gripper: pick commanded while release pulse active");
    }
    release_end_ = -1.0;
    if (engaged_) {
        return {true, false};
    }
    if (!contact || !payload.ferrous || payload.mass_g > cfg_.max_lift_g) {
        return {false, false};
    }
    if (rng.bernoulli(cfg_.success_prob_pick)) {
        engaged_ = true;
        return {true, true};
    }
    return {false, false};
}

Gripper::Result Gripper::command_release(double t, Rng& rng) {
    release_end_ = t + cfg_.release_pulse_s;
    if (!engaged_) {
        return {false, false};
    }
    if (rng.bernoulli(cfg_.success_prob_drop)) {
        engaged_ = false;
        return {false, true};
    }
    return {true, false};
}

double Gripper::power_draw(double t) const {
    return release_active(t) ? cfg_.servo_power_w : 0.0;
}

double Gripper::cycle_average_power() const {
    return cfg_.servo_power_w * cfg_.release_pulse_s / cfg_.cycle_period_s;
}

}  // namespace sarsim
