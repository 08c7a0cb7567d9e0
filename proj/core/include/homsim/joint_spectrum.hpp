#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "homsim/frequency_grid.hpp"
#include "homsim/spectral_amplitude.hpp"

namespace homsim {

enum class Arm { signal, idler };

/// Phase-matching envelope as a function of the half-difference frequency
/// (omega_s - omega_i) / 2, parameterized by the signal-side band it
/// produces under a monochromatic pump.
struct PhaseMatching {
    double center_nm = 1536.0;
    double fwhm_nm = 50.0;
    LineShape shape = LineShape::gaussian;
};

/// Biphoton amplitude f(omega_s, omega_i); rows index the signal grid.
///
/// Values are scaled so that the integral of |f|^2 over the full plane is 1
/// before filtering. norm_squared() is the on-grid weight: 1 for an
/// unfiltered JSA whose grids cover the phase-matching band, and the
/// surviving pair fraction after filtering.
class JointSpectralAmplitude {
public:
    JointSpectralAmplitude(FrequencyGrid signal_grid, FrequencyGrid idler_grid, Eigen::MatrixXcd values);

    [[nodiscard]] const FrequencyGrid& signal_grid() const noexcept { return signal_grid_; }
    [[nodiscard]] const FrequencyGrid& idler_grid() const noexcept { return idler_grid_; }
    [[nodiscard]] const Eigen::MatrixXcd& values() const noexcept { return values_; }
    [[nodiscard]] double norm_squared() const noexcept;

    [[nodiscard]] JointSpectralAmplitude scaled(std::complex<double> factor) const;

private:
    FrequencyGrid signal_grid_;
    FrequencyGrid idler_grid_;
    Eigen::MatrixXcd values_;
};

/// values(ws, wi) = pump(ws + wi) * phase_matching((ws - wi) / 2).
[[nodiscard]] JointSpectralAmplitude build_jsa(const SpectralAmplitude& pump, const PhaseMatching& phase_matching,
                                               const FrequencyGrid& signal_grid, const FrequencyGrid& idler_grid);

[[nodiscard]] JointSpectralAmplitude apply_filters(const JointSpectralAmplitude& jsa, const FilterSpec& signal_filter,
                                                   const FilterSpec& idler_filter);

/// Pointwise product with arbitrary sampled transmissions on the JSA grids.
[[nodiscard]] JointSpectralAmplitude apply_filters(const JointSpectralAmplitude& jsa,
                                                   const SpectralAmplitude& signal_transmission,
                                                   const SpectralAmplitude& idler_transmission);

struct SchmidtSpectrum {
    /// Descending singular values of the normalized discretized JSA,
    /// with sum of squares equal to 1.
    std::vector<double> coefficients;

    [[nodiscard]] std::size_t count() const noexcept { return coefficients.size(); }
    /// Sum of lambda_k^4: purity of either heralded photon.
    [[nodiscard]] double purity() const noexcept;
    /// K = 1 / sum lambda_k^4.
    [[nodiscard]] double schmidt_number() const noexcept { return 1.0 / purity(); }
};

/// Throws DegenerateInputError for a zero JSA.
[[nodiscard]] SchmidtSpectrum schmidt_decompose(const JointSpectralAmplitude& jsa);

/// Unit-trace density operator over the sample modes of a frequency grid.
class DensityMatrix {
public:
    DensityMatrix(FrequencyGrid grid, Eigen::MatrixXcd rho);

    [[nodiscard]] const FrequencyGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    [[nodiscard]] double trace() const noexcept { return rho_.trace().real(); }
    [[nodiscard]] double purity() const noexcept;

private:
    FrequencyGrid grid_;
    Eigen::MatrixXcd rho_;
};

/// Reduced state of `heralded_arm` after tracing out its twin.
[[nodiscard]] DensityMatrix heralded_state(const JointSpectralAmplitude& jsa, Arm heralded_arm);

}  // namespace homsim
