#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eabf/energy.hpp"
#include "eabf/model.hpp"

namespace eabf {

enum class DeviceState { pending_activation, eab_backoff, collision_backoff, ready, done };

struct DeviceRecord {
    double activation_time_ms = 0.0;
    DeviceState state = DeviceState::pending_activation;
    std::int64_t next_action_slot = 0;
    int attempt_count = 0;
    int eab_failures = 0;
    std::optional<double> completion_time_ms;

    bool operator==(const DeviceRecord&) const = default;
};

/// Timing of the contention-resolution step of a successful attempt.
enum class ContentionTiming {
    /// Every success adds the scenario's mean RACH time.
    mean,
    /// Uniform on [0, contention_window_ms].
    sampled,
};

struct SimOptions {
    /// Demote successes beyond the RAR window's capacity to collisions.
    bool rar_window_truncation = false;
    ContentionTiming contention_timing = ContentionTiming::mean;
    double contention_window_ms = 48.0;
    std::int64_t slot_cap = 2'000'000;
    /// Worker threads for replications; 0 lets the runtime decide.
    int threads = 0;

    bool operator==(const SimOptions&) const = default;
};

/// Realized history of one access cycle.
struct CycleOutcome {
    std::uint64_t seed = 0;
    /// Index k holds slot k + 1.
    std::vector<int> attempts;
    std::vector<int> collisions;
    std::vector<int> successes;
    std::vector<DeviceRecord> devices;
    std::int64_t total_attempts = 0;
    std::int64_t total_collisions = 0;
    std::int64_t total_eab_draws = 0;
    std::int64_t total_eab_passes = 0;
    /// Counts of sampled collision backoffs, one bin per millisecond of [0, W-1].
    std::vector<std::int64_t> backoff_histogram;
    double energy_j = 0.0;

    std::int64_t slot_count() const noexcept { return static_cast<std::int64_t>(attempts.size()); }
    /// Successful transmissions over all transmissions.
    double success_probability() const;
    /// Mean over devices of completion - activation.
    double mean_access_delay_ms() const;
};

/// Simulates one access cycle of `scenario.profile.population` devices.
/// Throws SimulationError (carrying `seed`) at the slot cap.
CycleOutcome run_cycle(const BarringSetting& setting, const Scenario& scenario, const EnergyConfig& energy,
                       const SimOptions& options, std::uint64_t seed);

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;

    bool operator==(const Estimate&) const = default;
};

/// Per-slot mean over replications; slots past a replication's end count as 0.
struct SlotCurve {
    std::vector<double> mean;
    std::vector<double> standard_error;

    bool operator==(const SlotCurve&) const = default;
};

struct MonteCarloReport {
    std::int64_t replications = 0;
    std::uint64_t master_seed = 0;
    SlotCurve attempts;
    SlotCurve collisions;
    SlotCurve successes;
    Estimate success_probability;
    Estimate mean_access_delay_ms;
    Estimate cycle_energy_j;
    std::int64_t total_eab_draws = 0;
    std::int64_t total_eab_passes = 0;
    std::vector<std::int64_t> backoff_histogram;

    std::size_t slot_count() const noexcept { return attempts.mean.size(); }
    bool operator==(const MonteCarloReport&) const = default;
};

/// Seed of replication `index` under `master_seed`.
std::uint64_t replication_seed(std::uint64_t master_seed, std::int64_t index);

/// Runs independent replications (in parallel when allowed) and aggregates
/// them in replication order, so the report does not depend on scheduling.
MonteCarloReport run_monte_carlo(const BarringSetting& setting, const Scenario& scenario,
                                 const EnergyConfig& energy, const SimOptions& options,
                                 std::int64_t replications, std::uint64_t master_seed);

}  // namespace eabf
