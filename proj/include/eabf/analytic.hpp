#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eabf/model.hpp"
#include "eabf/trace.hpp"

namespace eabf {

/// How the number of EAB backoff generations Q is chosen for slot i in the
/// literal attempts sum, with q = T_eab / r_p.
enum class QIndexing {
    /// Q = floor((i - 1) / q), so that Qq + 1 <= i <= (Q + 1)q.
    interval,
    /// Q = floor(i / q). Differs from `interval` only when q divides i, where
    /// the extra generation references slot 0 and contributes nothing.
    floor_ratio,
};

/// E[A_i] evaluated as the literal double sum over EAB generations j and the
/// collision-backoff window. `arrivals[k]` is lambda_{k+1}; `collisions[k]`
/// is E[C_{k+1}] and must cover every slot below `slot_index`. Indices out of
/// range contribute 0. Cost grows with i / q; run_recursion uses an
/// equivalent O(1)-per-slot form.
double expected_attempts(std::int64_t slot_index, std::span<const double> arrivals,
                         std::span<const double> collisions, const BarringSetting& setting,
                         const Scenario& scenario, QIndexing indexing = QIndexing::interval);

/// E[C] = a - a (1 - 1/K)^(a - 1), clamped to [0, a].
double expected_collisions(double expected_attempts, int preamble_count);

struct RecursionOptions {
    /// Stop once population - E[cumulative successes] drops below this.
    double termination_residual = 0.5;
    std::int64_t slot_cap = 2'000'000;
    /// Evaluate every slot with the literal sum of expected_attempts instead
    /// of the running recurrence. Quadratic; for cross-checks only.
    bool literal_sum = false;
    QIndexing indexing = QIndexing::interval;

    bool operator==(const RecursionOptions&) const = default;
};

/// Steps the expected-value recursion one slot at a time without storing
/// history beyond what the recurrence needs.
class SlotRecursion {
public:
    SlotRecursion(const BarringSetting& setting, const Scenario& scenario,
                  std::vector<double> arrivals, RecursionOptions options = {});

    /// Advances to the next slot and returns its row.
    const SlotRow& step();

    /// True once the residual population is below the termination threshold.
    bool finished() const noexcept;
    bool capped() const noexcept { return row_.slot >= options_.slot_cap; }
    const SlotRow& current() const noexcept { return row_; }

private:
    double arrival(std::int64_t slot) const noexcept;

    BarringSetting setting_;
    Scenario scenario_;
    std::vector<double> arrivals_;
    RecursionOptions options_;
    std::int64_t backoff_slots_;
    std::int64_t window_slots_;
    double pass_;
    double fail_;
    double no_collision_log_;
    // Ring buffers indexed by slot modulo their length.
    std::vector<double> offered_;     // Gamma_i: E[devices taking the EAB test in slot i]
    std::vector<double> collisions_;  // E[C_i] over the last W / r_p slots
    std::vector<double> collision_history_;  // full E[C] history, literal_sum only
    double window_collisions_ = 0.0;
    SlotRow row_{};
};

/// Runs the recursion from slot 1 until termination; arrivals come from the
/// scenario's activation profile. Throws NonConvergenceError at the slot cap.
SlotTrace run_recursion(const BarringSetting& setting, const Scenario& scenario,
                        RecursionOptions options = {});

/// As above with explicit per-slot new arrivals (`arrivals[k]` = lambda_{k+1}).
SlotTrace run_recursion(const BarringSetting& setting, const Scenario& scenario,
                        std::vector<double> arrivals, RecursionOptions options = {});

/// 1 - sum E[C_i] / sum E[A_i].
double success_probability(const SlotTrace& trace);

/// 1 / P_S.
double mean_attempts(double success_probability);

/// E[T_rach] + (1 - P)/P * T_eab * E[N_A] + (E[N_A] - 1)(E[T_R] + W/2), ms.
double mean_access_delay(const BarringSetting& setting, const Scenario& scenario, double mean_attempts);

/// Fills the QoS fields of a report (energy is left at zero).
MetricsReport qos_metrics(const SlotTrace& trace, const BarringSetting& setting, const Scenario& scenario);

}  // namespace eabf
