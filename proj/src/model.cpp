#include "eabf/model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "eabf/errors.hpp"

namespace eabf {

std::string to_string(const BarringSetting& setting) {
    return fmt::format("EAB({:g},{}ms)", setting.barring_factor, setting.backoff_ms);
}

void Scenario::validate() const {
    profile.validate();
    if (rach_period_ms < 1)
        throw DomainError(fmt::format("scenario: RACH period must be a positive integer, got {}", rach_period_ms));
    if (collision_backoff_window_ms < 1)
        throw DomainError(fmt::format("scenario: collision backoff window must be positive, got {}",
                                      collision_backoff_window_ms));
    if (collision_backoff_window_ms % rach_period_ms != 0)
        throw DomainError(fmt::format(
            "scenario: collision backoff window W = {} ms is not a multiple of the RACH period {} ms",
            collision_backoff_window_ms, rach_period_ms));
    if (preamble_count < 1)
        throw DomainError(fmt::format("scenario: preamble count must be >= 1, got {}", preamble_count));
    if (!(mean_rach_time_ms >= 0.0) || !std::isfinite(mean_rach_time_ms))
        throw DomainError("scenario: mean RACH time must be nonnegative");
    if (!(collision_realization_ms >= 0.0) || !std::isfinite(collision_realization_ms))
        throw DomainError("scenario: collision realization time must be nonnegative");
}

void validate(const BarringSetting& setting, const Scenario& scenario) {
    scenario.validate();
    if (!(setting.barring_factor > 0.0 && setting.barring_factor <= 1.0))
        throw DomainError(fmt::format("barring factor must lie in (0, 1], got {}", setting.barring_factor));
    if (setting.backoff_ms < 1)
        throw DomainError(fmt::format("EAB backoff must be positive, got {} ms", setting.backoff_ms));
    if (setting.backoff_ms % scenario.rach_period_ms != 0)
        throw DomainError(fmt::format("EAB backoff T_eab = {} ms is not a multiple of the RACH period {} ms",
                                      setting.backoff_ms, scenario.rach_period_ms));
}

}  // namespace eabf
