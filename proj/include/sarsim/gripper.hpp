#pragma once

#include <stdexcept>

#include "sarsim/rng.hpp"

namespace sarsim {

// Object the gripper may be asked to lift. Mission objects are validated
// against the config limits elsewhere; the gripper itself only cares about
// the physical lift limit.
struct PayloadSpec {
    double mass_g = 135.0;
    double radius_m = 0.05;
    bool ferrous = true;
};

// Thrown when a command arrives while the release horns are still extended.
struct GripperFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Push-button style electro-permanent gripper. Feedback is a single bit that
// mirrors the engaged state: a successful pick flips it 0 -> 1, a successful
// release flips it 1 -> 0. The release horns stay extended for a short pulse
// during which pick commands are rejected.
class Gripper {
public:
    struct Config {
        double success_prob_pick = 0.97;
        double success_prob_drop = 1.0;
        double release_pulse_s = 0.2;
        double cycle_period_s = 1.0;
        double servo_power_w = 17.4;
        double max_lift_g = 760.0;
    };

    struct Result {
        bool feedback = false;
        bool changed = false;
    };

    Gripper() : Gripper(Config{}) {}
    explicit Gripper(const Config& cfg);

    // Attempts to magnetize onto the payload at time t. Succeeds only with
    // pad contact on a ferrous payload within the lift limit; otherwise the
    // attempt fails without consuming randomness. Throws GripperFault while
    // the release pulse is active.
    Result attempt_pick(double t, bool contact, const PayloadSpec& payload, Rng& rng);

    // Fires the release pulse at time t. Releasing while disengaged is a
    // no-op (Result.changed == false).
    Result command_release(double t, Rng& rng);

    bool engaged() const { return engaged_; }
    bool feedback() const { return engaged_; }
    bool release_active(double t) const { return t < release_end_; }

    // Instantaneous electrical draw: the magnet holds with zero power, only
    // the release servo pulse draws current.
    double power_draw(double t) const;

    // Average draw over one nominal release cycle (pulse on, rest of the
    // cycle idle).
    double cycle_average_power() const;

    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    bool engaged_ = false;
    double release_end_ = -1.0;
};

}  // namespace sarsim
