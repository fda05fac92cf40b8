#pragma once

#include <cstdint>
#include <string>

#include "eabf/arrival.hpp"

namespace eabf {

/// EAB-BF parameter pair: a device passes the barring test with probability
/// `barring_factor`, otherwise it waits exactly `backoff_ms` and retries.
struct BarringSetting {
    double barring_factor = 1.0;
    std::int64_t backoff_ms = 5;

    bool operator==(const BarringSetting&) const = default;
};

/// Human-readable label such as "EAB(0.7,8000ms)".
std::string to_string(const BarringSetting& setting);

/// RACH timing, preamble pool and device population of one cell. All times
/// are milliseconds.
struct Scenario {
    ActivationProfile profile{};
    std::int64_t rach_period_ms = 5;
    std::int64_t collision_backoff_window_ms = 20;
    int preamble_count = 54;
    double mean_rach_time_ms = 24.0;
    double collision_realization_ms = 5.0;

    /// Backoff after a collision is uniform on [0, W-1] ms; its mean is taken
    /// as W / 2.
    double mean_collision_backoff_ms() const {
        return static_cast<double>(collision_backoff_window_ms) / 2.0;
    }

    /// W / r_p: number of RACH slots a collided device may return in.
    std::int64_t backoff_window_slots() const { return collision_backoff_window_ms / rach_period_ms; }

    /// Throws DomainError when an invariant does not hold.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Checks the setting on its own and against the scenario's slot grid.
void validate(const BarringSetting& setting, const Scenario& scenario);

/// T_eab / r_p; requires a validated pair.
inline std::int64_t backoff_slots(const BarringSetting& setting, const Scenario& scenario) {
    return setting.backoff_ms / scenario.rach_period_ms;
}

}  // namespace eabf
