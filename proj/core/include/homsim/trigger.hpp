#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace homsim {

enum class DivisionMode { random_divider, fixed_divider };

[[nodiscard]] std::string_view to_string(DivisionMode mode) noexcept;
[[nodiscard]] DivisionMode parse_division_mode(std::string_view name);

/// Downsampling of the laser clock to a rate the gated detectors accept.
struct TriggerConfig {
    double laser_rep_rate_mhz = 76.0;
    double max_trigger_rate_mhz = 1.0;
    double trigger_rate_mhz = 0.6;
    DivisionMode division = DivisionMode::random_divider;

    /// Requires 0 < effective rate <= max trigger rate <= laser rate.
    void validate() const;

    /// Pulses between accepted triggers in fixed-divider mode.
    [[nodiscard]] std::uint64_t fixed_period() const noexcept;
    [[nodiscard]] double acceptance_probability() const noexcept;
    [[nodiscard]] double effective_rate_mhz() const noexcept;
};

/// Laser-pulse indices of the first `n_triggers` accepted triggers.
[[nodiscard]] std::vector<std::uint64_t> run_trigger_stream(const TriggerConfig& trigger, std::size_t n_triggers,
                                                            std::uint64_t seed);

}  // namespace homsim
