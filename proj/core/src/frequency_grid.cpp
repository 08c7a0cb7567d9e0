#include "homsim/frequency_grid.hpp"

#include <cmath>
#include <string>

#include "homsim/errors.hpp"
#include "homsim/units.hpp"

namespace homsim {

FrequencyGrid::FrequencyGrid(double center_rad_s, double span_rad_s, std::size_t n_points)
    : center_(center_rad_s), span_(span_rad_s), n_(n_points) {
    if (n_points < kMinPoints) {
        throw DomainError("frequency grid needs at least " + std::to_string(kMinPoints) + " points, got " +
                          std::to_string(n_points));
    }
    if (!(span_rad_s > 0.0) || !std::isfinite(span_rad_s)) {
        throw DomainError("frequency grid span must be positive and finite");
    }
    if (!(center_rad_s > 0.5 * span_rad_s) || !std::isfinite(center_rad_s)) {
        throw DomainError("frequency grid must lie at positive frequencies");
    }
}

FrequencyGrid FrequencyGrid::around_wavelength(double center_nm, double span_pm, std::size_t n_points) {
    return FrequencyGrid(angular_frequency_from_wavelength(center_nm), angular_bandwidth(span_pm, center_nm),
                         n_points);
}

bool FrequencyGrid::matches(const FrequencyGrid& other, double rel_tol) const noexcept {
    if (n_ != other.n_) return false;
    const auto close = [rel_tol](double a, double b) { return std::abs(a - b) <= rel_tol * std::abs(a); };
    return close(center_, other.center_) && close(span_, other.span_);
}

}  // namespace homsim
