#pragma once

#include <string_view>
#include <vector>

namespace homsim {

/// `fixed` emits exactly round(mu) pairs every pulse; it expresses
/// deterministic limits in tests.
enum class NumberDistribution { thermal, poissonian, fixed };

[[nodiscard]] std::string_view to_string(NumberDistribution d) noexcept;
[[nodiscard]] NumberDistribution parse_number_distribution(std::string_view name);

struct EmissionModel {
    double mean_pairs_per_pulse = 0.05;
    NumberDistribution distribution = NumberDistribution::thermal;
    int max_photon_number = 8;

    void validate() const;
};

struct BrightnessSpec {
    double pairs_per_s_per_pm_per_mw = 1.6e3;
    double filter_fwhm_pm = 250.0;
    double pump_power_mw = 1.0;
    double repetition_rate_mhz = 76.0;

    void validate() const;
};

/// mu = brightness * bandwidth * power / repetition rate.
[[nodiscard]] double mean_pairs_per_pulse(const BrightnessSpec& spec);

/// p(n) for n = 0 .. max_photon_number, truncated and renormalized.
[[nodiscard]] std::vector<double> photon_number_distribution(const EmissionModel& model);

}  // namespace homsim
