#include "eabf/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "eabf/errors.hpp"

namespace eabf {

void ActivationProfile::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("activation profile: alpha must be positive, got " + std::to_string(alpha));
    if (!(beta_shape > 0.0) || !std::isfinite(beta_shape))
        throw DomainError("activation profile: beta must be positive, got " + std::to_string(beta_shape));
    if (!(activation_span_ms > 0.0) || !std::isfinite(activation_span_ms))
        throw DomainError("activation profile: activation span must be positive, got " +
                          std::to_string(activation_span_ms));
    if (population < 1)
        throw DomainError("activation profile: population must be at least 1, got " +
                          std::to_string(population));
}

double activation_density(double t_ms, const ActivationProfile& profile) {
    profile.validate();
    const double span = profile.activation_span_ms;
    if (!(t_ms >= 0.0 && t_ms <= span))
        throw DomainError("activation_density: t = " + std::to_string(t_ms) + " ms outside [0, " +
                          std::to_string(span) + "]");
    // ibeta_derivative is the standard beta pdf on [0, 1].
    return boost::math::ibeta_derivative(profile.alpha, profile.beta_shape, t_ms / span) / span;
}

double activation_cdf(double t_ms, const ActivationProfile& profile) {
    profile.validate();
    const double x = std::clamp(t_ms / profile.activation_span_ms, 0.0, 1.0);
    return boost::math::ibeta(profile.alpha, profile.beta_shape, x);
}

double activation_quantile(double u, const ActivationProfile& profile) {
    if (!(u >= 0.0 && u <= 1.0))
        throw DomainError("activation_quantile: u = " + std::to_string(u) + " outside [0, 1]");
    return profile.activation_span_ms * boost::math::ibeta_inv(profile.alpha, profile.beta_shape, u);
}

std::int64_t activation_slot_count(const ActivationProfile& profile, double rach_period_ms) {
    if (!(rach_period_ms > 0.0))
        throw DomainError("RACH period must be positive, got " + std::to_string(rach_period_ms));
    return static_cast<std::int64_t>(std::ceil(profile.activation_span_ms / rach_period_ms - 1e-12));
}

double access_intensity(std::int64_t slot_index, const ActivationProfile& profile,
                        double rach_period_ms) {
    profile.validate();
    if (!(rach_period_ms > 0.0))
        throw DomainError("access_intensity: RACH period must be positive, got " +
                          std::to_string(rach_period_ms));
    if (slot_index < 1)
        throw DomainError("access_intensity: slot index must be >= 1, got " +
                          std::to_string(slot_index));

    const double span = profile.activation_span_ms;
    const double lo = static_cast<double>(slot_index - 1) * rach_period_ms;
    if (lo >= span) return 0.0;
    const double hi = std::min(static_cast<double>(slot_index) * rach_period_ms, span);
    const double x0 = lo / span;
    const double x1 = hi / span;

    const double a = profile.alpha;
    const double b = profile.beta_shape;
    // Upper-tail differences avoid cancellation against 1 near the end of the span.
    const double mass = x0 >= 0.5 ? boost::math::ibetac(a, b, x0) - boost::math::ibetac(a, b, x1)
                                  : boost::math::ibeta(a, b, x1) - boost::math::ibeta(a, b, x0);
    return static_cast<double>(profile.population) * std::max(mass, 0.0);
}

std::vector<double> access_intensities(const ActivationProfile& profile, double rach_period_ms) {
    const auto slots = activation_slot_count(profile, rach_period_ms);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(slots));
    for (std::int64_t i = 1; i <= slots; ++i) out.push_back(access_intensity(i, profile, rach_period_ms));
    return out;
}

}  // namespace eabf
