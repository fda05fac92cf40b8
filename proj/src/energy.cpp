#include "eabf/energy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "eabf/errors.hpp"

namespace eabf {

namespace {

constexpr double kPrbBandwidthMhz = 0.180;
// Guards floor() against representation error at exact integer ratios.
constexpr double kFloorSlack = 1e-9;

}  // namespace

int EnergyConfig::rar_physical_bits() const {
    return static_cast<int>(std::ceil(kRarInformationBits / mcs_rate - kFloorSlack));
}

double EnergyConfig::rars_per_prb() const {
    return 2.0 * data_symbols_per_prb * mcs_rate / kRarInformationBits;
}

double EnergyConfig::prb_pairs_per_rar() const {
    return kRarInformationBits / (2.0 * data_symbols_per_prb * mcs_rate);
}

void EnergyConfig::validate() const {
    if (!(bandwidth_mhz > 0.0)) throw DomainError(fmt::format("energy: bandwidth must be positive, got {}", bandwidth_mhz));
    if (!(mcs_rate > 0.0 && mcs_rate <= 0.930))
        throw DomainError(fmt::format("energy: MCS rate must lie in (0, 0.930], got {}", mcs_rate));
    if (data_symbols_per_prb < 1)
        throw DomainError(fmt::format("energy: data symbols per PRB must be positive, got {}", data_symbols_per_prb));
    if (prb_per_subframe < 1)
        throw DomainError(fmt::format("energy: PRBs per subframe must be positive, got {}", prb_per_subframe));
    if (prb_per_subframe > prb_limit_for_bandwidth(bandwidth_mhz))
        throw DomainError(fmt::format("energy: {} PRBs exceed the {} MHz limit of {}", prb_per_subframe,
                                      bandwidth_mhz, prb_limit_for_bandwidth(bandwidth_mhz)));
    if (rar_window_subframes < 1)
        throw DomainError(fmt::format("energy: RAR window must be positive, got {}", rar_window_subframes));
    if (!(fixed_power_w >= 0.0)) throw DomainError("energy: fixed power must be nonnegative");
    if (!(prb_transmit_power_w >= 0.0)) throw DomainError("energy: per-PRB transmit power must be nonnegative");
    if (!(pa_efficiency > 0.0 && pa_efficiency <= 1.0))
        throw DomainError(fmt::format("energy: amplifier efficiency must lie in (0, 1], got {}", pa_efficiency));
}

int prb_limit_for_bandwidth(double bandwidth_mhz) {
    return static_cast<int>(std::floor(bandwidth_mhz / kPrbBandwidthMhz + kFloorSlack));
}

int max_rars_per_subframe(const EnergyConfig& config) {
    const double raw = 2.0 * config.data_symbols_per_prb * config.mcs_rate * config.prb_per_subframe /
                       kRarInformationBits;
    const auto fitting = static_cast<int>(std::floor(raw + kFloorSlack));
    return std::min(fitting, kMaxRarsPerSubframeCap);
}

std::int64_t rar_subframes(double successes, int max_per_subframe) {
    if (max_per_subframe < 1)
        throw DomainError(fmt::format("rar_subframes: capacity must be >= 1, got {}", max_per_subframe));
    if (!(successes >= 0.0)) throw DomainError("rar_subframes: successes must be nonnegative");
    if (successes == 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(successes / max_per_subframe));
}

double tti_energy(double prb_pairs, const EnergyConfig& config) {
    if (!(prb_pairs >= 0.0)) throw DomainError("tti_energy: PRB pairs must be nonnegative");
    return (config.fixed_power_w + prb_pairs * config.pa_efficiency * config.prb_transmit_power_w) * 1e-3;
}

double rar_burst_energy(double successes, const EnergyConfig& config) {
    if (!(successes >= 0.0)) throw DomainError("rar_burst_energy: successes must be nonnegative");
    const int cap = max_rars_per_subframe(config);
    const auto charged = std::min<std::int64_t>(rar_subframes(successes, cap), config.rar_window_subframes);
    const double per_rar = config.prb_pairs_per_rar();
    double energy = 0.0;
    for (std::int64_t j = 1; j <= charged; ++j) {
        const double sent = std::min(successes - static_cast<double>(j - 1) * cap, static_cast<double>(cap));
        energy += tti_energy(sent * per_rar, config);
    }
    return energy;
}

double cycle_energy(const SlotTrace& trace, const EnergyConfig& config, CycleEnergyOptions options) {
    double total = 0.0;
    for (const auto& row : trace.rows) {
        const double r = options.round_successes ? std::round(row.successes) : row.successes;
        total += rar_burst_energy(std::max(r, 0.0), config);
    }
    return total;
}

}  // namespace eabf
