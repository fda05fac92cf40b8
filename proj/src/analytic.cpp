#include "eabf/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "eabf/errors.hpp"

namespace eabf {

namespace {

// a - a * exp((a - 1) * log(1 - 1/K)), with the K = 1 limit handled
// separately since log(0) is -inf.
double collisions_for(double attempts, int preamble_count, double no_collision_log) {
    if (attempts <= 0.0) return 0.0;
    if (preamble_count == 1) {
        // 0^(a-1): 1 at a = 1, 0 above, unbounded below and clamped to 0.
        return attempts > 1.0 ? attempts : 0.0;
    }
    const double survivors = attempts * std::exp((attempts - 1.0) * no_collision_log);
    return std::clamp(attempts - survivors, 0.0, attempts);
}

double at_or_zero(std::span<const double> values, std::int64_t slot) {
    if (slot < 1 || slot > static_cast<std::int64_t>(values.size())) return 0.0;
    return values[static_cast<std::size_t>(slot - 1)];
}

}  // namespace

double expected_attempts(std::int64_t slot_index, std::span<const double> arrivals,
                         std::span<const double> collisions, const BarringSetting& setting,
                         const Scenario& scenario, QIndexing indexing) {
    validate(setting, scenario);
    if (slot_index < 1) throw DomainError(fmt::format("expected_attempts: slot index must be >= 1, got {}", slot_index));
    if (static_cast<std::int64_t>(collisions.size()) < slot_index - 1)
        throw DomainError(fmt::format("expected_attempts: collision history covers {} slots, need {}",
                                      collisions.size(), slot_index - 1));

    const std::int64_t q = backoff_slots(setting, scenario);
    const std::int64_t w = scenario.backoff_window_slots();
    const std::int64_t generations =
        indexing == QIndexing::interval ? (slot_index - 1) / q : slot_index / q;
    const double pass = setting.barring_factor;
    const double per_slot_return = static_cast<double>(scenario.rach_period_ms) /
                                   static_cast<double>(scenario.collision_backoff_window_ms);

    double total = 0.0;
    for (std::int64_t j = 0; j <= generations; ++j) {
        const std::int64_t base = slot_index - j * q;
        double returning = 0.0;
        for (std::int64_t l = slot_index - (j * q + w); l <= slot_index - (j * q + 1); ++l)
            returning += per_slot_return * at_or_zero(collisions, l);
        total += pass * std::pow(1.0 - pass, static_cast<double>(j)) * (at_or_zero(arrivals, base) + returning);
    }
    return total;
}

double expected_collisions(double expected_attempts, int preamble_count) {
    if (!(expected_attempts >= 0.0)) throw DomainError("expected_collisions: attempts must be nonnegative");
    if (preamble_count < 1) throw DomainError("expected_collisions: preamble count must be >= 1");
    const double log_keep = preamble_count == 1 ? 0.0 : std::log1p(-1.0 / preamble_count);
    return collisions_for(expected_attempts, preamble_count, log_keep);
}

SlotRecursion::SlotRecursion(const BarringSetting& setting, const Scenario& scenario,
                             std::vector<double> arrivals, RecursionOptions options)
    : setting_(setting), scenario_(scenario), arrivals_(std::move(arrivals)), options_(options) {
    validate(setting_, scenario_);
    if (!(options_.termination_residual > 0.0))
        throw DomainError("recursion: termination residual must be positive");
    if (options_.slot_cap < 1) throw DomainError("recursion: slot cap must be positive");
    backoff_slots_ = backoff_slots(setting_, scenario_);
    window_slots_ = scenario_.backoff_window_slots();
    pass_ = setting_.barring_factor;
    fail_ = 1.0 - pass_;
    no_collision_log_ = scenario_.preamble_count == 1 ? 0.0 : std::log1p(-1.0 / scenario_.preamble_count);
    offered_.assign(static_cast<std::size_t>(backoff_slots_), 0.0);
    collisions_.assign(static_cast<std::size_t>(window_slots_), 0.0);
}

double SlotRecursion::arrival(std::int64_t slot) const noexcept { return at_or_zero(arrivals_, slot); }

const SlotRow& SlotRecursion::step() {
    const std::int64_t i = row_.slot + 1;

    double attempts;
    if (options_.literal_sum) {
        attempts = expected_attempts(i, arrivals_, collision_history_, setting_, scenario_, options_.indexing);
    } else {
        // Gamma_i = lambda_i + (r_p / W) sum_{l=i-w}^{i-1} E[C_l] + (1 - P) Gamma_{i-q}
        const double returning = std::accumulate(collisions_.begin(), collisions_.end(), 0.0) /
                                 static_cast<double>(window_slots_);
        auto& offered = offered_[static_cast<std::size_t>(i % backoff_slots_)];
        offered = arrival(i) + returning + fail_ * offered;
        attempts = pass_ * offered;
    }

    const double collided = collisions_for(attempts, scenario_.preamble_count, no_collision_log_);
    collisions_[static_cast<std::size_t>(i % window_slots_)] = collided;
    if (options_.literal_sum) collision_history_.push_back(collided);

    row_.slot = i;
    row_.attempts = attempts;
    row_.collisions = collided;
    row_.successes = attempts - collided;
    row_.cumulative_successes += row_.successes;
    return row_;
}

bool SlotRecursion::finished() const noexcept {
    return static_cast<double>(scenario_.profile.population) - row_.cumulative_successes <
           options_.termination_residual;
}

SlotTrace run_recursion(const BarringSetting& setting, const Scenario& scenario, RecursionOptions options) {
    scenario.validate();
    return run_recursion(setting, scenario,
                         access_intensities(scenario.profile, static_cast<double>(scenario.rach_period_ms)),
                         options);
}

SlotTrace run_recursion(const BarringSetting& setting, const Scenario& scenario,
                        std::vector<double> arrivals, RecursionOptions options) {
    SlotRecursion recursion(setting, scenario, std::move(arrivals), options);
    SlotTrace trace;
    while (true) {
        trace.rows.push_back(recursion.step());
        if (recursion.finished()) break;
        if (recursion.capped())
            throw NonConvergenceError(
                fmt::format("{}: recursion reached the {}-slot cap with {:.3f} devices outstanding",
                            to_string(setting), options.slot_cap,
                            static_cast<double>(scenario.profile.population) -
                                recursion.current().cumulative_successes),
                options.slot_cap);
    }
    return trace;
}

double success_probability(const SlotTrace& trace) {
    if (trace.empty()) throw DomainError("success_probability: empty trace");
    const double attempts = trace.total_attempts();
    if (!(attempts > 0.0)) throw DomainError("success_probability: trace has no attempts");
    return 1.0 - trace.total_collisions() / attempts;
}

double mean_attempts(double success_probability) {
    if (!(success_probability > 0.0 && success_probability <= 1.0))
        throw DomainError(fmt::format("mean_attempts: success probability must lie in (0, 1], got {}",
                                      success_probability));
    return 1.0 / success_probability;
}

double mean_access_delay(const BarringSetting& setting, const Scenario& scenario, double mean_attempts) {
    if (!(setting.barring_factor > 0.0 && setting.barring_factor <= 1.0))
        throw DomainError(fmt::format("mean_access_delay: barring factor must lie in (0, 1], got {}",
                                      setting.barring_factor));
    if (!(mean_attempts >= 1.0))
        throw DomainError(fmt::format("mean_access_delay: mean attempts must be >= 1, got {}", mean_attempts));
    const double p = setting.barring_factor;
    const double eab_wait = (1.0 - p) / p * static_cast<double>(setting.backoff_ms) * mean_attempts;
    const double retry_wait =
        (mean_attempts - 1.0) * (scenario.collision_realization_ms + scenario.mean_collision_backoff_ms());
    return scenario.mean_rach_time_ms + eab_wait + retry_wait;
}

MetricsReport qos_metrics(const SlotTrace& trace, const BarringSetting& setting, const Scenario& scenario) {
    MetricsReport report;
    report.success_probability = success_probability(trace);
    report.collision_probability = 1.0 - report.success_probability;
    report.mean_attempts = mean_attempts(report.success_probability);
    report.mean_access_delay_ms = mean_access_delay(setting, scenario, report.mean_attempts);
    report.slot_count = static_cast<std::int64_t>(trace.size());
    return report;
}

double SlotTrace::total_attempts() const {
    double sum = 0.0;
    for (const auto& row : rows) sum += row.attempts;
    return sum;
}

double SlotTrace::total_collisions() const {
    double sum = 0.0;
    for (const auto& row : rows) sum += row.collisions;
    return sum;
}

}  // namespace eabf
