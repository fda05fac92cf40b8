#pragma once

#include <cstdint>
#include <vector>

namespace eabf {

/// Beta-shaped activation profile of one access cycle: every one of
/// `population` devices wakes up once in [0, activation_span_ms].
struct ActivationProfile {
    double alpha = 3.0;
    double beta_shape = 4.0;
    double activation_span_ms = 10000.0;
    std::int64_t population = 30000;

    /// Throws DomainError on nonpositive shapes, span or population.
    void validate() const;

    bool operator==(const ActivationProfile&) const = default;
};

/// Activation density p(t) in devices-fraction per millisecond.
double activation_density(double t_ms, const ActivationProfile& profile);

/// P(activation <= t) for the truncated beta profile.
double activation_cdf(double t_ms, const ActivationProfile& profile);

/// Inverse of activation_cdf; `u` in [0, 1].
double activation_quantile(double u, const ActivationProfile& profile);

/// Number of RACH slots whose interval overlaps the activation span, i.e.
/// ceil(T_A / r_p).
std::int64_t activation_slot_count(const ActivationProfile& profile, double rach_period_ms);

/// Expected number of devices activated in interval i = (t_{i-1}, t_i],
/// t_i = i * r_p, clamped to the activation span. Zero beyond the span.
double access_intensity(std::int64_t slot_index, const ActivationProfile& profile,
                        double rach_period_ms);

/// access_intensity for slots 1..activation_slot_count(); element k holds
/// slot k + 1.
std::vector<double> access_intensities(const ActivationProfile& profile, double rach_period_ms);

}  // namespace eabf
