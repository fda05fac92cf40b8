#include "eabf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eabf/errors.hpp"

namespace eabf {

namespace {

// Snaps low + k * step to a 1e-12 lattice so 0.07 prints and compares as 0.07.
double snap(double x) { return std::round(x * 1e12) / 1e12; }

// Strict "a is a better optimum than b" under the documented tie-break.
bool better(const SweepRow& a, const SweepRow& b) {
    const auto& ma = *a.metrics;
    const auto& mb = *b.metrics;
    return std::make_tuple(ma.mean_cycle_energy_j, -ma.success_probability, ma.mean_access_delay_ms,
                           a.setting.backoff_ms, a.setting.barring_factor) <
           std::make_tuple(mb.mean_cycle_energy_j, -mb.success_probability, mb.mean_access_delay_ms,
                           b.setting.backoff_ms, b.setting.barring_factor);
}

// Best effort when nothing is feasible: highest P_S, then lower energy.
bool more_successful(const SweepRow& a, const SweepRow& b) {
    const auto& ma = *a.metrics;
    const auto& mb = *b.metrics;
    return std::make_tuple(-ma.success_probability, ma.mean_cycle_energy_j, ma.mean_access_delay_ms,
                           a.setting.backoff_ms, a.setting.barring_factor) <
           std::make_tuple(-mb.success_probability, mb.mean_cycle_energy_j, mb.mean_access_delay_ms,
                           b.setting.backoff_ms, b.setting.barring_factor);
}

OptimumRecord record_of(const SweepRow& row, const ConstraintSpec& constraint, bool feasible) {
    OptimumRecord r;
    r.setting = row.setting;
    r.min_energy_j = row.metrics->mean_cycle_energy_j;
    r.max_success_probability = row.metrics->success_probability;
    r.min_delay_ms = row.metrics->mean_access_delay_ms;
    r.constraint = constraint;
    r.feasible = feasible;
    return r;
}

}  // namespace

void GridSpec::validate(const Scenario& scenario) const {
    if (!(barring_factor_step > 0.0)) throw DomainError("grid: barring factor step must be positive");
    if (!(barring_factor_low >= 0.0 && barring_factor_high <= 1.0 && barring_factor_low <= barring_factor_high))
        throw DomainError(fmt::format("grid: barring factor range [{}, {}] must be a non-empty subset of [0, 1]",
                                      barring_factor_low, barring_factor_high));
    if (backoff_step_ms < 1) throw DomainError("grid: backoff step must be positive");
    if (backoff_min_ms < 1 || backoff_max_ms < backoff_min_ms)
        throw DomainError(fmt::format("grid: backoff range [{}, {}] ms is empty", backoff_min_ms, backoff_max_ms));
    const auto period = scenario.rach_period_ms;
    if (backoff_min_ms % period != 0 || backoff_step_ms % period != 0)
        throw DomainError(fmt::format("grid: backoff values must be multiples of the RACH period {} ms", period));
    if (barring_factors().empty()) throw DomainError("grid: no positive barring factor in range");
}

std::vector<double> GridSpec::barring_factors() const {
    std::vector<double> out;
    const auto count = static_cast<std::int64_t>(
        std::floor((barring_factor_high - barring_factor_low) / barring_factor_step + 1e-9)) + 1;
    for (std::int64_t k = 0; k < count; ++k) {
        const double p = snap(barring_factor_low + static_cast<double>(k) * barring_factor_step);
        if (p > 0.0 && p <= 1.0) out.push_back(p);
    }
    return out;
}

std::vector<std::int64_t> GridSpec::backoffs() const {
    std::vector<std::int64_t> out;
    for (auto t = backoff_min_ms; t <= backoff_max_ms; t += backoff_step_ms) out.push_back(t);
    return out;
}

std::vector<BarringSetting> GridSpec::settings() const {
    std::vector<BarringSetting> out;
    const auto times = backoffs();
    for (double p : barring_factors())
        for (auto t : times) out.push_back({p, t});
    return out;
}

void ConstraintSpec::validate() const {
    if (!(min_success_probability >= 0.0 && min_success_probability <= 1.0))
        throw DomainError(fmt::format("constraint: minimum success probability must lie in [0, 1], got {}",
                                      min_success_probability));
    if (!(max_delay_ms > 0.0))
        throw DomainError(fmt::format("constraint: maximum delay must be positive, got {}", max_delay_ms));
}

bool ConstraintSpec::satisfied_by(const MetricsReport& metrics) const {
    return metrics.success_probability >= min_success_probability && metrics.mean_access_delay_ms <= max_delay_ms;
}

namespace {

MetricsReport evaluate_with(const BarringSetting& setting, const Scenario& scenario, const EnergyConfig& energy,
                            std::vector<double> arrivals, const EvaluationOptions& options) {
    energy.validate();
    SlotRecursion recursion(setting, scenario, std::move(arrivals), options.recursion);
    double attempts = 0.0;
    double collisions = 0.0;
    double joules = 0.0;
    while (true) {
        const auto& row = recursion.step();
        attempts += row.attempts;
        collisions += row.collisions;
        const double r = options.energy.round_successes ? std::round(row.successes) : row.successes;
        joules += rar_burst_energy(std::max(r, 0.0), energy);
        if (recursion.finished()) break;
        if (recursion.capped())
            throw NonConvergenceError(
                fmt::format("{}: recursion reached the {}-slot cap", to_string(setting), options.recursion.slot_cap),
                options.recursion.slot_cap);
    }
    if (!(attempts > 0.0)) throw DomainError(fmt::format("{}: no attempts in trace", to_string(setting)));

    MetricsReport report;
    report.success_probability = 1.0 - collisions / attempts;
    report.collision_probability = 1.0 - report.success_probability;
    report.mean_attempts = mean_attempts(report.success_probability);
    report.mean_access_delay_ms = mean_access_delay(setting, scenario, report.mean_attempts);
    report.mean_cycle_energy_j = joules;
    report.slot_count = recursion.current().slot;
    return report;
}

}  // namespace

MetricsReport evaluate_setting(const BarringSetting& setting, const Scenario& scenario, const EnergyConfig& energy,
                               const EvaluationOptions& options) {
    scenario.validate();
    return evaluate_with(setting, scenario, energy,
                         access_intensities(scenario.profile, static_cast<double>(scenario.rach_period_ms)), options);
}

Evaluator::Evaluator(Scenario scenario, EnergyConfig energy, EvaluationOptions options)
    : scenario_(std::move(scenario)), energy_(std::move(energy)), options_(options) {
    scenario_.validate();
    energy_.validate();
    arrivals_ = access_intensities(scenario_.profile, static_cast<double>(scenario_.rach_period_ms));
}

SweepRow Evaluator::compute(const BarringSetting& setting) const {
    SweepRow row{setting, std::nullopt, {}};
    try {
        row.metrics = evaluate_with(setting, scenario_, energy_, arrivals_, options_);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

SweepRow Evaluator::evaluate(const BarringSetting& setting) const {
    const auto key = std::make_pair(setting.barring_factor, setting.backoff_ms);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto row = compute(setting);
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, std::move(row)).first->second;
}

std::size_t Evaluator::cached() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

SweepTable sweep_grid(const GridSpec& grid, const Evaluator& evaluator, SweepOptions options) {
    grid.validate(evaluator.scenario());
    const auto settings = grid.settings();
    SweepTable table(settings.size());
    const auto count = static_cast<std::int64_t>(settings.size());
#ifdef _OPENMP
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
#else
    (void)options;
#endif
    for (std::int64_t k = 0; k < count; ++k)
        table[static_cast<std::size_t>(k)] = evaluator.evaluate(settings[static_cast<std::size_t>(k)]);
    return table;
}

SweepTable sweep_grid(const GridSpec& grid, const Scenario& scenario, const EnergyConfig& energy,
                      SweepOptions options) {
    return sweep_grid(grid, Evaluator(scenario, energy), options);
}

OptimumRecord minimize_energy(const SweepTable& table, const ConstraintSpec& constraint) {
    constraint.validate();
    if (table.empty()) throw DomainError("minimize_energy: empty table");

    const SweepRow* best = nullptr;
    for (const auto& row : table)
        if (row.ok() && constraint.satisfied_by(*row.metrics) && (!best || better(row, *best))) best = &row;
    if (best) return record_of(*best, constraint, true);

    // Nothing feasible: prefer rows that at least meet the delay bound.
    for (const auto& row : table)
        if (row.ok() && row.metrics->mean_access_delay_ms <= constraint.max_delay_ms &&
            (!best || more_successful(row, *best)))
            best = &row;
    if (!best)
        for (const auto& row : table)
            if (row.ok() && (!best || more_successful(row, *best))) best = &row;
    if (!best) throw DomainError("minimize_energy: no row of the table was evaluated successfully");
    return record_of(*best, constraint, false);
}

std::vector<OptimumRecord> tradeoff_curve(const SweepTable& table, std::span<const double> p_min_values,
                                          double max_delay_ms) {
    if (!std::is_sorted(p_min_values.begin(), p_min_values.end()))
        throw DomainError("tradeoff_curve: success-probability bounds must be sorted ascending");
    std::vector<OptimumRecord> out;
    out.reserve(p_min_values.size());
    for (double p_min : p_min_values) out.push_back(minimize_energy(table, ConstraintSpec{p_min, max_delay_ms}));
    return out;
}

std::vector<GainRow> gains_vs_baseline(std::span<const OptimumRecord> records, std::span<const Baseline> baselines) {
    std::vector<GainRow> out;
    out.reserve(records.size() * baselines.size());
    for (const auto& record : records) {
        for (const auto& base : baselines) {
            const auto& m = base.metrics;
            GainRow g;
            g.record = record;
            g.baseline = base.setting;
            g.success_gain = (record.max_success_probability - m.success_probability) / m.success_probability;
            g.energy_gain = (m.mean_cycle_energy_j - record.min_energy_j) / m.mean_cycle_energy_j;
            g.delay_gain = (m.mean_access_delay_ms - record.min_delay_ms) / m.mean_access_delay_ms;
            out.push_back(g);
        }
    }
    return out;
}

std::vector<BarringSetting> standard_settings() { return {{0.5, 16000}, {0.7, 8000}, {0.9, 4000}}; }

}  // namespace eabf
