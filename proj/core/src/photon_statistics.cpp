#include "homsim/photon_statistics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "homsim/errors.hpp"

namespace homsim {

std::string_view to_string(NumberDistribution d) noexcept {
    switch (d) {
        case NumberDistribution::thermal: return "thermal";
        case NumberDistribution::poissonian: return "poissonian";
        case NumberDistribution::fixed: return "fixed";
    }
    return "thermal";
}

NumberDistribution parse_number_distribution(std::string_view name) {
    if (name == "thermal") return NumberDistribution::thermal;
    if (name == "poissonian") return NumberDistribution::poissonian;
    if (name == "fixed") return NumberDistribution::fixed;
    throw DomainError("unknown number distribution '" + std::string(name) + "'");
}

void EmissionModel::validate() const {
    if (!(mean_pairs_per_pulse >= 0.0) || !std::isfinite(mean_pairs_per_pulse)) {
        throw DomainError("mean pairs per pulse must be finite and non-negative");
    }
    if (max_photon_number < 1) throw DomainError("photon-number truncation must be at least 1");
    if (distribution == NumberDistribution::fixed &&
        std::lround(mean_pairs_per_pulse) > max_photon_number) {
        throw DomainError("fixed pair number exceeds the truncation");
    }
}

void BrightnessSpec::validate() const {
    if (!(pairs_per_s_per_pm_per_mw > 0.0) || !(filter_fwhm_pm > 0.0) || !(pump_power_mw > 0.0) ||
        !(repetition_rate_mhz > 0.0)) {
        throw DomainError("brightness spec fields must all be positive");
    }
}

double mean_pairs_per_pulse(const BrightnessSpec& spec) {
    spec.validate();
    return spec.pairs_per_s_per_pm_per_mw * spec.filter_fwhm_pm * spec.pump_power_mw /
           (spec.repetition_rate_mhz * 1e6);
}

std::vector<double> photon_number_distribution(const EmissionModel& model) {
    model.validate();
    const double mu = model.mean_pairs_per_pulse;
    const auto size = static_cast<std::size_t>(model.max_photon_number) + 1;
    std::vector<double> p(size, 0.0);
    switch (model.distribution) {
        case NumberDistribution::thermal: {
            // p(n) = mu^n / (1 + mu)^(n + 1)
            const double ratio = mu / (1.0 + mu);
            double term = 1.0 / (1.0 + mu);
            for (auto& v : p) {
                v = term;
                term *= ratio;
            }
            break;
        }
        case NumberDistribution::poissonian: {
            double term = std::exp(-mu);
            for (std::size_t n = 0; n < size; ++n) {
                p[n] = term;
                term *= mu / static_cast<double>(n + 1);
            }
            break;
        }
        case NumberDistribution::fixed:
            p[static_cast<std::size_t>(std::lround(mu))] = 1.0;
            break;
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= total;
    return p;
}

}  // namespace homsim
