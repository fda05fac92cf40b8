#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eabf/analytic.hpp"
#include "eabf/energy.hpp"
#include "eabf/model.hpp"
#include "eabf/trace.hpp"

namespace eabf {

/// Rectangular (barring factor x backoff) search grid. Barring factors are
/// low, low + step, ..., high; a zero factor is skipped since no device would
/// ever pass the test.
struct GridSpec {
    double barring_factor_step = 0.01;
    double barring_factor_low = 0.0;
    double barring_factor_high = 1.0;
    std::int64_t backoff_min_ms = 100;
    std::int64_t backoff_max_ms = 20000;
    std::int64_t backoff_step_ms = 100;

    void validate(const Scenario& scenario) const;
    std::vector<double> barring_factors() const;
    std::vector<std::int64_t> backoffs() const;
    /// All settings, barring factor major and backoff minor.
    std::vector<BarringSetting> settings() const;

    bool operator==(const GridSpec&) const = default;
};

struct ConstraintSpec {
    double min_success_probability = 0.0;
    double max_delay_ms = std::numeric_limits<double>::infinity();

    void validate() const;
    bool satisfied_by(const MetricsReport& metrics) const;

    bool operator==(const ConstraintSpec&) const = default;
};

struct EvaluationOptions {
    RecursionOptions recursion{};
    CycleEnergyOptions energy{};

    bool operator==(const EvaluationOptions&) const = default;
};

/// Recursion, success probability, mean attempts, delay and cycle energy of
/// one setting, streamed slot by slot. Throws NonConvergenceError.
MetricsReport evaluate_setting(const BarringSetting& setting, const Scenario& scenario,
                               const EnergyConfig& energy, const EvaluationOptions& options = {});

/// One sweep row: metrics, or the reason evaluation failed.
struct SweepRow {
    BarringSetting setting;
    std::optional<MetricsReport> metrics;
    std::string error;

    bool ok() const noexcept { return metrics.has_value(); }
    bool operator==(const SweepRow&) const = default;
};

using SweepTable = std::vector<SweepRow>;

/// Memoizes evaluate_setting for a fixed scenario and energy model. Safe to
/// share between threads.
class Evaluator {
public:
    Evaluator(Scenario scenario, EnergyConfig energy, EvaluationOptions options = {});

    SweepRow evaluate(const BarringSetting& setting) const;

    const Scenario& scenario() const noexcept { return scenario_; }
    const EnergyConfig& energy() const noexcept { return energy_; }
    std::size_t cached() const;

private:
    SweepRow compute(const BarringSetting& setting) const;

    Scenario scenario_;
    EnergyConfig energy_;
    EvaluationOptions options_;
    std::vector<double> arrivals_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<double, std::int64_t>, SweepRow> cache_;
};

struct SweepOptions {
    int threads = 0;
};

/// Evaluates every grid point; failures are recorded per row.
SweepTable sweep_grid(const GridSpec& grid, const Evaluator& evaluator, SweepOptions options = {});
SweepTable sweep_grid(const GridSpec& grid, const Scenario& scenario, const EnergyConfig& energy,
                      SweepOptions options = {});

struct OptimumRecord {
    BarringSetting setting;
    double min_energy_j = 0.0;
    double max_success_probability = 0.0;
    double min_delay_ms = 0.0;
    ConstraintSpec constraint;
    /// False when no row met the constraint; the record is then the best-effort
    /// row with the highest success probability.
    bool feasible = false;

    bool operator==(const OptimumRecord&) const = default;
};

/// Lowest-energy row meeting the constraint. Ties go to higher P_S, then
/// lower delay, then smaller T_eab, then smaller P_eab.
OptimumRecord minimize_energy(const SweepTable& table, const ConstraintSpec& constraint);

/// minimize_energy for each lower bound in ascending `p_min_values`.
std::vector<OptimumRecord> tradeoff_curve(const SweepTable& table, std::span<const double> p_min_values,
                                          double max_delay_ms);

struct Baseline {
    BarringSetting setting;
    MetricsReport metrics;
};

/// Relative gains of an optimum over one baseline; positive is better.
struct GainRow {
    OptimumRecord record;
    BarringSetting baseline;
    double success_gain = 0.0;
    double energy_gain = 0.0;
    double delay_gain = 0.0;
};

std::vector<GainRow> gains_vs_baseline(std::span<const OptimumRecord> records, std::span<const Baseline> baselines);

/// EAB(0.5,16 s), EAB(0.7,8 s) and EAB(0.9,4 s).
std::vector<BarringSetting> standard_settings();

}  // namespace eabf
