#pragma once

// Internal convention: angular frequency in rad/s, time in seconds.
// Public entry points take nm, pm, ps, ns, mW and MHz as named in each
// parameter.

namespace homsim {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kNanometre = 1e-9;
inline constexpr double kPicometre = 1e-12;
inline constexpr double kPicosecond = 1e-12;
inline constexpr double kNanosecond = 1e-9;
inline constexpr double kMegahertz = 1e6;

/// Ratio between the FWHM and the standard deviation of a gaussian.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

[[nodiscard]] double angular_frequency_from_wavelength(double wavelength_nm);
[[nodiscard]] double wavelength_from_angular_frequency(double omega);

/// Angular-frequency width of a band of `fwhm_pm` centered at `center_nm`
/// (first-order conversion 2*pi*c*dlambda/lambda^2).
[[nodiscard]] double angular_bandwidth(double fwhm_pm, double center_nm);

/// Coherence time 0.44 * lambda^2 / (c * dlambda) of a gaussian-filtered
/// photon, in ps. Throws DomainError for non-positive inputs.
[[nodiscard]] double coherence_time(double fwhm_pm, double center_nm);

}  // namespace homsim
