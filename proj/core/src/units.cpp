#include "homsim/units.hpp"

#include <cmath>
#include <string>

#include "homsim/errors.hpp"

namespace homsim {

double angular_frequency_from_wavelength(double wavelength_nm) {
    if (!(wavelength_nm > 0.0)) {
        throw DomainError("wavelength must be positive, got " + std::to_string(wavelength_nm) + " nm");
    }
    return 2.0 * kPi * kSpeedOfLight / (wavelength_nm * kNanometre);
}

double wavelength_from_angular_frequency(double omega) {
    if (!(omega > 0.0)) {
        throw DomainError("angular frequency must be positive");
    }
    return 2.0 * kPi * kSpeedOfLight / omega / kNanometre;
}

double angular_bandwidth(double fwhm_pm, double center_nm) {
    if (!(fwhm_pm > 0.0) || !(center_nm > 0.0)) {
        throw DomainError("bandwidth and center wavelength must be positive");
    }
    const double lambda = center_nm * kNanometre;
    return 2.0 * kPi * kSpeedOfLight * (fwhm_pm * kPicometre) / (lambda * lambda);
}

double coherence_time(double fwhm_pm, double center_nm) {
    if (!(fwhm_pm > 0.0) || !(center_nm > 0.0)) {
        throw DomainError("coherence_time: bandwidth and wavelength must be positive");
    }
    const double lambda = center_nm * kNanometre;
    const double dlambda = fwhm_pm * kPicometre;
    return 0.44 * lambda * lambda / (kSpeedOfLight * dlambda) / kPicosecond;
}

}  // namespace homsim
