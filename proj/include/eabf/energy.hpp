#pragma once

#include <cstdint>

#include "eabf/trace.hpp"

namespace eabf {

/// Size of one RAR (MAC subheader + payload) in information bits.
inline constexpr int kRarInformationBits = 56;
/// Hard per-subframe RAR cap: 2216 information bits / 56 bits.
inline constexpr int kMaxRarsPerSubframeCap = 39;

/// Downlink RAR capacity and linear eNodeB power model.
struct EnergyConfig {
    double bandwidth_mhz = 5.0;
    double mcs_rate = 0.930;
    int data_symbols_per_prb = 120;
    int prb_per_subframe = 25;
    int rar_window_subframes = 5;
    double fixed_power_w = 170.0;
    double prb_transmit_power_w = 0.8;
    double pa_efficiency = 0.3;

    /// ceil(56 / M_cs): physical bits occupied by one RAR.
    int rar_physical_bits() const;
    /// 2 D_s M_cs / 56, unrounded (informational, 3.985 for the defaults).
    double rars_per_prb() const;
    /// PRB pairs occupied by one RAR: 56 / (2 D_s M_cs).
    double prb_pairs_per_rar() const;

    void validate() const;

    bool operator==(const EnergyConfig&) const = default;
};

/// Upper bound on PRBs for a bandwidth: floor(B / 180 kHz).
int prb_limit_for_bandwidth(double bandwidth_mhz);

/// N_max^rar = min(floor(2 D_s M_cs N_prb / 56), 39).
int max_rars_per_subframe(const EnergyConfig& config);

/// N_sf = ceil(successes / max_per_subframe); 0 when nothing is sent.
std::int64_t rar_subframes(double successes, int max_per_subframe);

/// Energy of one 1 ms TTI carrying `prb_pairs` PRB pairs, in joules.
double tti_energy(double prb_pairs, const EnergyConfig& config);

/// Energy to send RARs to `successes` devices, charging at most the RAR
/// window; successes may be fractional (expected values).
double rar_burst_energy(double successes, const EnergyConfig& config);

struct CycleEnergyOptions {
    /// Round each slot's expected successes to the nearest integer before
    /// charging (diagnostic; the default feeds the real value through).
    bool round_successes = false;

    bool operator==(const CycleEnergyOptions&) const = default;
};

/// Sum of rar_burst_energy over the trace's per-slot expected successes.
double cycle_energy(const SlotTrace& trace, const EnergyConfig& config,
                    CycleEnergyOptions options = {});

}  // namespace eabf
