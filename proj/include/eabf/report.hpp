#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eabf/config.hpp"
#include "eabf/simulator.hpp"
#include "eabf/trace.hpp"

namespace eabf {

/// Analytic minus simulated per-slot means, for attempts, collisions and
/// successes (in that order).
struct SlotDeviation {
    std::int64_t slot = 0;
    std::array<double, 3> analytic{};
    std::array<double, 3> simulated{};
    std::array<double, 3> standard_error{};
    /// (analytic - simulated) / deviation_scale.
    std::array<double, 3> z{};
};

/// Standard error used to judge one slot: the sample standard error, but no
/// less than 1 / replications, the resolution of a mean over that many runs.
double deviation_scale(double standard_error, std::int64_t replications);

/// One row per slot up to the longer of the two histories; the shorter one is
/// padded with zeros.
std::vector<SlotDeviation> slot_deviations(const SlotTrace& analytic, const MonteCarloReport& simulated);

/// Fraction of slots with |z| <= k, per quantity.
struct Agreement {
    std::array<double, 3> fraction{};
    std::int64_t slots = 0;
};

Agreement agreement(const std::vector<SlotDeviation>& deviations, double k = 3.0);

/// Files written and per-item failures of one command.
struct CommandResult {
    std::vector<std::string> files;
    std::vector<std::string> failures;

    int exit_code() const noexcept { return failures.empty() ? 0 : 1; }
};

/// Every command creates `config.output_dir` first and writes its CSVs there;
/// `log` receives a human-readable summary. Failures of single settings are
/// collected, not thrown.
CommandResult cmd_analyze(const RunConfig& config, std::ostream& log);
CommandResult cmd_simulate(const RunConfig& config, std::ostream& log);
CommandResult cmd_optimize(const RunConfig& config, std::ostream& log);
CommandResult cmd_compare(const RunConfig& config, std::ostream& log);

/// File-name tag of a setting, e.g. "p0.7_t8000".
std::string setting_tag(const BarringSetting& setting);

}  // namespace eabf
