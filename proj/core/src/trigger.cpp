#include "homsim/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "homsim/errors.hpp"
#include "homsim/random.hpp"

namespace homsim {

std::string_view to_string(DivisionMode mode) noexcept {
    return mode == DivisionMode::random_divider ? "random_divider" : "fixed_divider";
}

DivisionMode parse_division_mode(std::string_view name) {
    if (name == "random_divider") return DivisionMode::random_divider;
    if (name == "fixed_divider") return DivisionMode::fixed_divider;
    throw DomainError("unknown trigger division mode '" + std::string(name) + "'");
}

void TriggerConfig::validate() const {
    if (!(laser_rep_rate_mhz > 0.0) || !(max_trigger_rate_mhz > 0.0) || !(trigger_rate_mhz > 0.0)) {
        throw DomainError("trigger rates must be positive");
    }
    if (max_trigger_rate_mhz > laser_rep_rate_mhz) {
        throw DomainError("maximum trigger rate exceeds the laser repetition rate");
    }
    if (effective_rate_mhz() > max_trigger_rate_mhz * (1.0 + 1e-12)) {
        throw DomainError("trigger rate exceeds the detectors' maximum trigger rate");
    }
}

std::uint64_t TriggerConfig::fixed_period() const noexcept {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(laser_rep_rate_mhz / trigger_rate_mhz)));
}

double TriggerConfig::acceptance_probability() const noexcept {
    return std::min(1.0, trigger_rate_mhz / laser_rep_rate_mhz);
}

double TriggerConfig::effective_rate_mhz() const noexcept {
    if (division == DivisionMode::fixed_divider) return laser_rep_rate_mhz / static_cast<double>(fixed_period());
    return trigger_rate_mhz;
}

std::vector<std::uint64_t> run_trigger_stream(const TriggerConfig& trigger, std::size_t n_triggers,
                                              std::uint64_t seed) {
    trigger.validate();
    std::vector<std::uint64_t> pulses;
    pulses.reserve(n_triggers);
    if (trigger.division == DivisionMode::fixed_divider) {
        const std::uint64_t period = trigger.fixed_period();
        for (std::size_t k = 0; k < n_triggers; ++k) pulses.push_back((k + 1) * period - 1);
        return pulses;
    }
    // Independent per-pulse acceptance: gaps are geometric.
    Rng rng(derive_seed(seed, 0x7419));
    std::geometric_distribution<std::uint64_t> gap(trigger.acceptance_probability());
    std::uint64_t pulse = 0;
    for (std::size_t k = 0; k < n_triggers; ++k) {
        pulse += gap(rng);
        pulses.push_back(pulse);
        ++pulse;
    }
    return pulses;
}

}  // namespace homsim
