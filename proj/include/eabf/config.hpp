#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eabf/analytic.hpp"
#include "eabf/energy.hpp"
#include "eabf/model.hpp"
#include "eabf/optimizer.hpp"
#include "eabf/simulator.hpp"

namespace eabf {

struct SimConfig {
    std::int64_t replications = 500;
    std::uint64_t master_seed = 1;
    SimOptions options{};

    bool operator==(const SimConfig&) const = default;
};

struct ConstraintConfig {
    /// Lower bounds on P_S, ascending.
    std::vector<double> p_min_values;
    double max_delay_ms = 50000.0;

    bool operator==(const ConstraintConfig&) const = default;
};

/// Fully resolved, validated run configuration.
struct RunConfig {
    Scenario scenario{};
    EnergyConfig energy{};
    EvaluationOptions evaluation{};
    /// Settings for analyze, simulate and compare.
    std::vector<BarringSetting> settings;
    /// Reference settings for the gains table.
    std::vector<BarringSetting> baselines;
    std::optional<GridSpec> grid;
    ConstraintConfig constraints{};
    SimConfig sim{};
    std::string output_dir = "out";

    /// Grid used by optimize: the configured one or the default grid.
    GridSpec effective_grid() const { return grid.value_or(GridSpec{}); }

    /// Checks the configuration as a whole; throws ConfigError naming the field.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Defaults: the four reference settings, the three standard baselines and
/// P_min = 0, 0.01, ..., 1.
RunConfig default_config();

/// Parses an INI document with sections [scenario], [energy], [eab], [grid],
/// [sim], [constraints] and [output]. Missing keys take defaults; unknown
/// sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every result-affecting field in a fixed order, one `section.key = value`
/// per line. Excludes the output directory and thread count.
std::string canonical_text(const RunConfig& config);

/// 64-bit FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// "0.5:16000, 0.7:8000" -> settings.
std::vector<BarringSetting> parse_settings(const std::string& text, const std::string& field);

/// "0.5, 0.7" (list) or "0:1:0.01" (low:high:step, inclusive) -> values.
std::vector<double> parse_value_list(const std::string& text, const std::string& field);

}  // namespace eabf
