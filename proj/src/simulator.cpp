#include "eabf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eabf/errors.hpp"
#include "eabf/rng.hpp"

namespace eabf {

namespace {

// Stream reserved for cycle-level draws (RAR truncation); device streams use
// indices 0..N-1.
constexpr std::uint64_t kCycleStream = std::numeric_limits<std::uint64_t>::max();

Estimate estimate_of(const std::vector<double>& samples) {
    Estimate e;
    const auto n = static_cast<double>(samples.size());
    if (samples.empty()) return e;
    e.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - e.mean) * (x - e.mean);
        e.standard_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

// Running integer sums of a per-slot count; exact, so merge order is irrelevant.
struct CountMoments {
    std::vector<std::int64_t> sum;
    std::vector<std::int64_t> sum_sq;

    void add(const std::vector<int>& counts) {
        if (counts.size() > sum.size()) {
            sum.resize(counts.size(), 0);
            sum_sq.resize(counts.size(), 0);
        }
        for (std::size_t k = 0; k < counts.size(); ++k) {
            sum[k] += counts[k];
            sum_sq[k] += static_cast<std::int64_t>(counts[k]) * counts[k];
        }
    }

    SlotCurve curve(std::int64_t replications, std::size_t slots) const {
        SlotCurve c;
        c.mean.assign(slots, 0.0);
        c.standard_error.assign(slots, 0.0);
        const auto n = static_cast<double>(replications);
        for (std::size_t k = 0; k < sum.size() && k < slots; ++k) {
            const double s = static_cast<double>(sum[k]);
            c.mean[k] = s / n;
            if (replications > 1) {
                const double var = std::max(0.0, (static_cast<double>(sum_sq[k]) - s * s / n) / (n - 1.0));
                c.standard_error[k] = std::sqrt(var / n);
            }
        }
        return c;
    }
};

}  // namespace

double CycleOutcome::success_probability() const {
    if (total_attempts == 0) return 1.0;
    return static_cast<double>(total_attempts - total_collisions) / static_cast<double>(total_attempts);
}

double CycleOutcome::mean_access_delay_ms() const {
    if (devices.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& d : devices) sum += d.completion_time_ms.value_or(0.0) - d.activation_time_ms;
    return sum / static_cast<double>(devices.size());
}

CycleOutcome run_cycle(const BarringSetting& setting, const Scenario& scenario, const EnergyConfig& energy,
                       const SimOptions& options, std::uint64_t seed) {
    validate(setting, scenario);
    energy.validate();
    if (options.slot_cap < 1) throw DomainError("simulator: slot cap must be positive");

    const auto population = static_cast<std::size_t>(scenario.profile.population);
    const std::int64_t period = scenario.rach_period_ms;
    const std::int64_t eab_slots = backoff_slots(setting, scenario);
    const std::int64_t window_ms = scenario.collision_backoff_window_ms;
    const auto realization_ms = static_cast<std::int64_t>(std::floor(scenario.collision_realization_ms));
    const std::int64_t max_return = std::max<std::int64_t>(1, (realization_ms + window_ms - 1) / period);
    const auto ring_size = static_cast<std::size_t>(std::max(eab_slots, max_return) + 1);
    const auto preambles = static_cast<std::uint64_t>(scenario.preamble_count);
    const std::size_t rar_capacity =
        static_cast<std::size_t>(max_rars_per_subframe(energy)) * static_cast<std::size_t>(energy.rar_window_subframes);

    CycleOutcome out;
    out.seed = seed;
    out.devices.resize(population);
    out.backoff_histogram.assign(static_cast<std::size_t>(window_ms), 0);

    std::vector<SplitMix64> streams;
    streams.reserve(population);
    SplitMix64 cycle_rng(derive_seed(seed, kCycleStream));

    // Activation: inverse-CDF draw, then the slot closing its interval.
    const std::int64_t activation_slots =
        activation_slot_count(scenario.profile, static_cast<double>(period));
    std::vector<std::uint32_t> arrivals_per_slot(static_cast<std::size_t>(activation_slots) + 2, 0);
    for (std::size_t d = 0; d < population; ++d) {
        auto& rng = streams.emplace_back(derive_seed(seed, d));
        auto& dev = out.devices[d];
        dev.activation_time_ms = activation_quantile(uniform01(rng), scenario.profile);
        const auto slot = static_cast<std::int64_t>(std::ceil(dev.activation_time_ms / static_cast<double>(period)));
        dev.next_action_slot = std::clamp<std::int64_t>(slot, 1, activation_slots);
        ++arrivals_per_slot[static_cast<std::size_t>(dev.next_action_slot)];
    }
    // Counting sort of devices by activation slot.
    std::vector<std::uint32_t> arrival_offset(arrivals_per_slot.size() + 1, 0);
    std::partial_sum(arrivals_per_slot.begin(), arrivals_per_slot.end(), arrival_offset.begin() + 1);
    std::vector<std::uint32_t> arrival_order(population);
    {
        auto cursor = arrival_offset;
        for (std::size_t d = 0; d < population; ++d)
            arrival_order[cursor[static_cast<std::size_t>(out.devices[d].next_action_slot)]++] =
                static_cast<std::uint32_t>(d);
    }

    std::vector<std::vector<std::uint32_t>> ring(ring_size);
    std::vector<std::uint32_t> ready;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> transmitting;  // (device, preamble)
    std::vector<std::uint32_t> winners;
    std::vector<std::uint32_t> losers;
    std::vector<std::uint16_t> preamble_load(static_cast<std::size_t>(preambles), 0);

    std::size_t done = 0;
    std::int64_t slot = 0;
    while (done < population) {
        ++slot;
        if (slot > options.slot_cap)
            throw SimulationError(fmt::format("{}: cycle reached the {}-slot cap with {} devices outstanding",
                                              to_string(setting), options.slot_cap, population - done),
                                  seed);

        ready.clear();
        if (slot <= activation_slots) {
            const auto s = static_cast<std::size_t>(slot);
            ready.insert(ready.end(), arrival_order.begin() + arrival_offset[s],
                         arrival_order.begin() + arrival_offset[s + 1]);
        }
        auto& due = ring[static_cast<std::size_t>(slot) % ring_size];
        ready.insert(ready.end(), due.begin(), due.end());
        due.clear();

        transmitting.clear();
        for (const auto d : ready) {
            auto& dev = out.devices[d];
            auto& rng = streams[d];
            dev.state = DeviceState::ready;
            ++out.total_eab_draws;
            if (uniform01(rng) < setting.barring_factor) {
                ++out.total_eab_passes;
                ++dev.attempt_count;
                const auto preamble = static_cast<std::uint32_t>(uniform_below(rng, preambles));
                transmitting.emplace_back(d, preamble);
                ++preamble_load[preamble];
            } else {
                ++dev.eab_failures;
                dev.state = DeviceState::eab_backoff;
                dev.next_action_slot = slot + eab_slots;
                ring[static_cast<std::size_t>(dev.next_action_slot) % ring_size].push_back(d);
            }
        }

        winners.clear();
        losers.clear();
        for (const auto& [d, preamble] : transmitting) (preamble_load[preamble] == 1 ? winners : losers).push_back(d);
        for (const auto& [d, preamble] : transmitting) preamble_load[preamble] = 0;

        if (options.rar_window_truncation && winners.size() > rar_capacity) {
            // Move a uniformly chosen excess to the tail, then demote it.
            const std::size_t excess = winners.size() - rar_capacity;
            for (std::size_t k = 0; k < excess; ++k) {
                const std::size_t last = winners.size() - 1 - k;
                const auto pick = static_cast<std::size_t>(uniform_below(cycle_rng, last + 1));
                std::swap(winners[pick], winners[last]);
            }
            losers.insert(losers.end(), winners.end() - static_cast<std::ptrdiff_t>(excess), winners.end());
            winners.resize(rar_capacity);
        }

        for (const auto d : winners) {
            auto& dev = out.devices[d];
            const double resolution = options.contention_timing == ContentionTiming::mean
                                          ? scenario.mean_rach_time_ms
                                          : options.contention_window_ms * uniform01(streams[d]);
            dev.state = DeviceState::done;
            dev.next_action_slot = slot;
            dev.completion_time_ms = static_cast<double>(slot * period) + resolution;
        }
        for (const auto d : losers) {
            auto& dev = out.devices[d];
            const auto backoff = static_cast<std::int64_t>(uniform_below(streams[d], static_cast<std::uint64_t>(window_ms)));
            ++out.backoff_histogram[static_cast<std::size_t>(backoff)];
            // The device learns of the collision after T_R, waits the backoff and
            // takes the EAB test at the last slot boundary the wait has reached.
            dev.state = DeviceState::collision_backoff;
            dev.next_action_slot = slot + std::max<std::int64_t>(1, (realization_ms + backoff) / period);
            ring[static_cast<std::size_t>(dev.next_action_slot) % ring_size].push_back(d);
        }

        done += winners.size();
        out.total_attempts += static_cast<std::int64_t>(transmitting.size());
        out.total_collisions += static_cast<std::int64_t>(losers.size());
        out.attempts.push_back(static_cast<int>(transmitting.size()));
        out.collisions.push_back(static_cast<int>(losers.size()));
        out.successes.push_back(static_cast<int>(winners.size()));
        out.energy_j += rar_burst_energy(static_cast<double>(winners.size()), energy);
    }
    return out;
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::int64_t index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

MonteCarloReport run_monte_carlo(const BarringSetting& setting, const Scenario& scenario,
                                 const EnergyConfig& energy, const SimOptions& options,
                                 std::int64_t replications, std::uint64_t master_seed) {
    if (replications < 1)
        throw DomainError(fmt::format("run_monte_carlo: replications must be >= 1, got {}", replications));
    validate(setting, scenario);
    energy.validate();

    struct Summary {
        double success_probability = 0.0;
        double delay_ms = 0.0;
        double energy_j = 0.0;
        std::int64_t eab_draws = 0;
        std::int64_t eab_passes = 0;
        std::vector<std::int64_t> backoffs;
    };
    std::vector<Summary> summaries(static_cast<std::size_t>(replications));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(replications));
    CountMoments attempts, collisions, successes;

#ifdef _OPENMP
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::int64_t r = 0; r < replications; ++r) {
        const auto k = static_cast<std::size_t>(r);
        try {
            const auto outcome = run_cycle(setting, scenario, energy, options, replication_seed(master_seed, r));
            summaries[k] = Summary{outcome.success_probability(), outcome.mean_access_delay_ms(), outcome.energy_j,
                                   outcome.total_eab_draws, outcome.total_eab_passes, outcome.backoff_histogram};
#ifdef _OPENMP
#pragma omp critical(eabf_monte_carlo_merge)
#endif
            {
                attempts.add(outcome.attempts);
                collisions.add(outcome.collisions);
                successes.add(outcome.successes);
            }
        } catch (...) {
            failures[k] = std::current_exception();
        }
    }
    // Lowest failing replication wins, independent of thread scheduling.
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    MonteCarloReport report;
    report.replications = replications;
    report.master_seed = master_seed;
    const std::size_t slots = attempts.sum.size();
    report.attempts = attempts.curve(replications, slots);
    report.collisions = collisions.curve(replications, slots);
    report.successes = successes.curve(replications, slots);

    std::vector<double> ps, delay, cycle_energy;
    report.backoff_histogram.assign(static_cast<std::size_t>(scenario.collision_backoff_window_ms), 0);
    for (const auto& s : summaries) {
        ps.push_back(s.success_probability);
        delay.push_back(s.delay_ms);
        cycle_energy.push_back(s.energy_j);
        report.total_eab_draws += s.eab_draws;
        report.total_eab_passes += s.eab_passes;
        for (std::size_t b = 0; b < s.backoffs.size(); ++b) report.backoff_histogram[b] += s.backoffs[b];
    }
    report.success_probability = estimate_of(ps);
    report.mean_access_delay_ms = estimate_of(delay);
    report.cycle_energy_j = estimate_of(cycle_energy);
    return report;
}

}  // namespace eabf
