#include "homsim/spectral_amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "homsim/errors.hpp"
#include "homsim/units.hpp"

namespace homsim {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

}  // namespace

std::string_view to_string(LineShape shape) noexcept {
    switch (shape) {
        case LineShape::gaussian: return "gaussian";
        case LineShape::lorentzian: return "lorentzian";
        case LineShape::flattop: return "flattop";
        case LineShape::custom: return "custom";
    }
    return "custom";
}

LineShape parse_line_shape(std::string_view name) {
    if (name == "gaussian") return LineShape::gaussian;
    if (name == "lorentzian") return LineShape::lorentzian;
    if (name == "flattop") return LineShape::flattop;
    if (name == "custom") return LineShape::custom;
    throw DomainError("unknown line shape '" + std::string(name) + "'");
}

double LineProfile::amplitude(double omega) const noexcept {
    const double x = (omega - center) / fwhm;
    switch (shape) {
        case LineShape::gaussian: return std::exp(-2.0 * kLn2 * x * x);
        case LineShape::lorentzian: return 1.0 / std::sqrt(1.0 + 4.0 * x * x);
        case LineShape::flattop: return std::abs(x) <= 0.5 ? 1.0 : 0.0;
        case LineShape::custom: break;
    }
    return 0.0;
}

double LineProfile::intensity_integral() const noexcept {
    switch (shape) {
        case LineShape::gaussian: return fwhm * std::sqrt(kPi / (4.0 * kLn2));
        case LineShape::lorentzian: return 0.5 * kPi * fwhm;
        case LineShape::flattop: return fwhm;
        case LineShape::custom: break;
    }
    return 0.0;
}

void FilterSpec::validate() const {
    if (!(center_wavelength_nm > 0.0)) throw DomainError("filter center wavelength must be positive");
    if (!(fwhm_pm > 0.0)) throw DomainError("filter FWHM must be positive");
    if (!(peak_transmission > 0.0 && peak_transmission <= 1.0)) {
        throw DomainError("filter peak transmission must lie in (0, 1]");
    }
    if (shape == LineShape::custom) throw DomainError("filters need an analytic line shape");
}

SpectralAmplitude::SpectralAmplitude(FrequencyGrid grid, std::vector<std::complex<double>> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ConfigurationError("spectral amplitude size does not match its grid");
    }
    for (const auto& v : values_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw DomainError("spectral amplitude contains non-finite values");
        }
    }
}

SpectralAmplitude::SpectralAmplitude(FrequencyGrid grid, LineProfile profile, double scale)
    : grid_(grid), values_(grid.size()), profile_(profile), scale_(scale) {
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        values_[k] = scale_ * profile.amplitude(grid_.omega(k));
    }
}

double SpectralAmplitude::norm_squared() const noexcept {
    const double sum = std::accumulate(values_.begin(), values_.end(), 0.0,
                                       [](double acc, const std::complex<double>& v) { return acc + std::norm(v); });
    return sum * grid_.step();
}

bool SpectralAmplitude::is_normalized(double rel_tol) const noexcept {
    return std::abs(norm_squared() - 1.0) <= rel_tol;
}

double SpectralAmplitude::total_intensity() const noexcept {
    if (profile_) return scale_ * scale_ * profile_->intensity_integral();
    return norm_squared();
}

std::complex<double> SpectralAmplitude::at(double omega) const noexcept {
    if (profile_) return scale_ * profile_->amplitude(omega);
    if (!grid_.contains(omega)) return {0.0, 0.0};
    const double pos = (omega - grid_.front()) / grid_.step();
    const auto lo = std::min(static_cast<std::size_t>(pos), grid_.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    return (1.0 - frac) * values_[lo] + frac * values_[lo + 1];
}

SpectralAmplitude make_pump_spectrum(const FrequencyGrid& grid, double center_nm, double fwhm_pm, LineShape shape) {
    if (shape == LineShape::custom) throw DomainError("pump spectrum needs an analytic line shape");
    const LineProfile profile{shape, angular_frequency_from_wavelength(center_nm),
                              angular_bandwidth(fwhm_pm, center_nm)};
    if (!grid.contains(profile.center - 3.0 * profile.fwhm) || !grid.contains(profile.center + 3.0 * profile.fwhm)) {
        throw CoverageError("pump grid must cover center +/- 3 FWHM");
    }
    const SpectralAmplitude unit(grid, profile, 1.0);
    const double norm = unit.norm_squared();
    if (!(norm > 0.0)) throw DegenerateInputError("pump spectrum vanishes on its grid");
    return SpectralAmplitude(grid, profile, 1.0 / std::sqrt(norm));
}

SpectralAmplitude make_filter_amplitude(const FrequencyGrid& grid, const FilterSpec& filter) {
    filter.validate();
    const LineProfile profile{filter.shape, angular_frequency_from_wavelength(filter.center_wavelength_nm),
                              angular_bandwidth(filter.fwhm_pm, filter.center_wavelength_nm)};
    if (!grid.contains(profile.center)) {
        throw CoverageError("filter centered at " + std::to_string(filter.center_wavelength_nm) +
                            " nm lies outside the grid");
    }
    return SpectralAmplitude(grid, profile, std::sqrt(filter.peak_transmission));
}

}  // namespace homsim
