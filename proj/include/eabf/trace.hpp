#pragma once

#include <cstdint>
#include <vector>

namespace eabf {

/// Expected per-slot quantities produced by the analytic recursion.
struct SlotRow {
    std::int64_t slot = 0;
    double attempts = 0.0;
    double collisions = 0.0;
    double successes = 0.0;
    double cumulative_successes = 0.0;
};

struct SlotTrace {
    std::vector<SlotRow> rows;

    bool empty() const noexcept { return rows.empty(); }
    std::size_t size() const noexcept { return rows.size(); }
    double total_attempts() const;
    double total_collisions() const;
};

/// QoS and energy summary of one barring setting.
struct MetricsReport {
    double success_probability = 0.0;
    double collision_probability = 0.0;
    double mean_attempts = 0.0;
    double mean_access_delay_ms = 0.0;
    double mean_cycle_energy_j = 0.0;
    std::int64_t slot_count = 0;

    bool operator==(const MetricsReport&) const = default;
};

}  // namespace eabf
