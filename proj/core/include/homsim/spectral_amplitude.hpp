#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "homsim/frequency_grid.hpp"

namespace homsim {

enum class LineShape { gaussian, lorentzian, flattop, custom };

[[nodiscard]] std::string_view to_string(LineShape shape) noexcept;
/// Throws DomainError on an unknown name.
[[nodiscard]] LineShape parse_line_shape(std::string_view name);

/// Real line profile with unit peak amplitude whose *intensity* has the
/// requested FWHM (rad/s).
struct LineProfile {
    LineShape shape = LineShape::gaussian;
    double center = 0.0;
    double fwhm = 0.0;

    [[nodiscard]] double amplitude(double omega) const noexcept;
    /// Integral of amplitude^2 over the whole real line.
    [[nodiscard]] double intensity_integral() const noexcept;
};

/// Band-pass transmission, e.g. a fiber Bragg grating behind a circulator.
struct FilterSpec {
    double center_wavelength_nm = 1550.0;
    double fwhm_pm = 250.0;
    LineShape shape = LineShape::gaussian;
    double peak_transmission = 1.0;

    /// Throws DomainError on non-positive widths or transmission outside (0, 1].
    void validate() const;
};

/// Complex amplitude sampled on a frequency grid.
///
/// Amplitudes built from an analytic profile keep it, so they can be
/// evaluated off-grid exactly; custom amplitudes interpolate linearly and
/// vanish outside the grid.
class SpectralAmplitude {
public:
    SpectralAmplitude(FrequencyGrid grid, std::vector<std::complex<double>> values);
    SpectralAmplitude(FrequencyGrid grid, LineProfile profile, double scale);

    [[nodiscard]] const FrequencyGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<std::complex<double>>& values() const noexcept { return values_; }
    [[nodiscard]] LineShape shape() const noexcept { return profile_ ? profile_->shape : LineShape::custom; }
    [[nodiscard]] const std::optional<LineProfile>& profile() const noexcept { return profile_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    /// Sum of |value|^2 times the grid step.
    [[nodiscard]] double norm_squared() const noexcept;
    [[nodiscard]] bool is_normalized(double rel_tol = 1e-9) const noexcept;

    /// Integral of |amplitude|^2 over all frequencies: analytic when a
    /// profile is attached, otherwise the on-grid sum.
    [[nodiscard]] double total_intensity() const noexcept;

    [[nodiscard]] std::complex<double> at(double omega) const noexcept;

    /// Center used for phase-matching offsets: profile center, else grid center.
    [[nodiscard]] double center() const noexcept { return profile_ ? profile_->center : grid_.center(); }

private:
    FrequencyGrid grid_;
    std::vector<std::complex<double>> values_;
    std::optional<LineProfile> profile_;
    double scale_ = 1.0;
};

/// Normalized pump envelope. The grid must cover center +/- 3 FWHM.
[[nodiscard]] SpectralAmplitude make_pump_spectrum(const FrequencyGrid& grid, double center_nm, double fwhm_pm,
                                                   LineShape shape = LineShape::gaussian);

/// Amplitude transmission sqrt(T(omega)); peak value sqrt(peak_transmission).
[[nodiscard]] SpectralAmplitude make_filter_amplitude(const FrequencyGrid& grid, const FilterSpec& filter);

}  // namespace homsim
