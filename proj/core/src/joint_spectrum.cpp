#include "homsim/joint_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "homsim/errors.hpp"
#include "homsim/units.hpp"

namespace homsim {

namespace {

Eigen::MatrixXcd normalized_matrix(const JointSpectralAmplitude& jsa) {
    const double norm = jsa.values().norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DegenerateInputError("JSA has zero norm");
    return jsa.values() / norm;
}

}  // namespace

JointSpectralAmplitude::JointSpectralAmplitude(FrequencyGrid signal_grid, FrequencyGrid idler_grid,
                                               Eigen::MatrixXcd values)
    : signal_grid_(signal_grid), idler_grid_(idler_grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != signal_grid_.size() ||
        static_cast<std::size_t>(values_.cols()) != idler_grid_.size()) {
        throw ConfigurationError("JSA shape does not match its grids");
    }
    if (!values_.allFinite()) throw DomainError("JSA contains non-finite values");
}

double JointSpectralAmplitude::norm_squared() const noexcept {
    return values_.squaredNorm() * signal_grid_.step() * idler_grid_.step();
}

JointSpectralAmplitude JointSpectralAmplitude::scaled(std::complex<double> factor) const {
    return {signal_grid_, idler_grid_, values_ * factor};
}

JointSpectralAmplitude build_jsa(const SpectralAmplitude& pump, const PhaseMatching& phase_matching,
                                 const FrequencyGrid& signal_grid, const FrequencyGrid& idler_grid) {
    if (!(phase_matching.fwhm_nm > 0.0)) throw DomainError("phase-matching FWHM must be positive");
    if (phase_matching.shape == LineShape::custom) {
        throw ConfigurationError("phase matching needs an analytic line shape");
    }
    const double pump_center = pump.center();
    const double sum_lo = signal_grid.front() + idler_grid.front();
    const double sum_hi = signal_grid.back() + idler_grid.back();
    if (pump_center < sum_lo || pump_center > sum_hi) {
        throw ConfigurationError("pump center is outside the sum-frequency range of the signal/idler grids");
    }
    if (!pump.profile() && (pump.grid().back() < sum_lo || pump.grid().front() > sum_hi)) {
        throw ConfigurationError("sampled pump grid does not overlap the sum-frequency range");
    }

    const LineProfile pm{phase_matching.shape,
                         angular_frequency_from_wavelength(phase_matching.center_nm) - 0.5 * pump_center,
                         angular_bandwidth(phase_matching.fwhm_nm * 1e3, phase_matching.center_nm)};

    // The map (ws, wi) -> (ws + wi, (ws - wi) / 2) has unit Jacobian, so the
    // full-plane weight factorizes.
    const double full_plane = pump.total_intensity() * pm.intensity_integral();
    if (!(full_plane > 0.0)) throw DegenerateInputError("pump or phase matching has zero weight");
    const double inv_norm = 1.0 / std::sqrt(full_plane);

    const auto ns = static_cast<Eigen::Index>(signal_grid.size());
    const auto ni = static_cast<Eigen::Index>(idler_grid.size());
    Eigen::MatrixXcd values(ns, ni);
    for (Eigen::Index j = 0; j < ni; ++j) {
        const double wi = idler_grid.omega(static_cast<std::size_t>(j));
        for (Eigen::Index k = 0; k < ns; ++k) {
            const double ws = signal_grid.omega(static_cast<std::size_t>(k));
            values(k, j) = pump.at(ws + wi) * pm.amplitude(0.5 * (ws - wi)) * inv_norm;
        }
    }
    return {signal_grid, idler_grid, std::move(values)};
}

JointSpectralAmplitude apply_filters(const JointSpectralAmplitude& jsa, const FilterSpec& signal_filter,
                                     const FilterSpec& idler_filter) {
    return apply_filters(jsa, make_filter_amplitude(jsa.signal_grid(), signal_filter),
                         make_filter_amplitude(jsa.idler_grid(), idler_filter));
}

JointSpectralAmplitude apply_filters(const JointSpectralAmplitude& jsa, const SpectralAmplitude& signal_transmission,
                                     const SpectralAmplitude& idler_transmission) {
    if (!signal_transmission.grid().matches(jsa.signal_grid()) ||
        !idler_transmission.grid().matches(jsa.idler_grid())) {
        throw ConfigurationError("filter grids do not match the JSA grids");
    }
    const auto& ts = signal_transmission.values();
    const auto& ti = idler_transmission.values();
    Eigen::MatrixXcd values = jsa.values();
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        for (Eigen::Index k = 0; k < values.rows(); ++k) {
            values(k, j) *= ts[static_cast<std::size_t>(k)] * ti[static_cast<std::size_t>(j)];
        }
    }
    return {jsa.signal_grid(), jsa.idler_grid(), std::move(values)};
}

double SchmidtSpectrum::purity() const noexcept {
    double sum = 0.0;
    for (double c : coefficients) sum += c * c * c * c;
    return sum;
}

SchmidtSpectrum schmidt_decompose(const JointSpectralAmplitude& jsa) {
    const Eigen::MatrixXcd f = normalized_matrix(jsa);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(f);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double total = sv.squaredNorm();
    SchmidtSpectrum out;
    out.coefficients.reserve(static_cast<std::size_t>(sv.size()));
    for (Eigen::Index k = 0; k < sv.size(); ++k) out.coefficients.push_back(sv[k] / std::sqrt(total));
    std::sort(out.coefficients.begin(), out.coefficients.end(), std::greater<>());
    return out;
}

DensityMatrix::DensityMatrix(FrequencyGrid grid, Eigen::MatrixXcd rho) : grid_(grid), rho_(std::move(rho)) {
    if (static_cast<std::size_t>(rho_.rows()) != grid_.size() || rho_.rows() != rho_.cols()) {
        throw ConfigurationError("density matrix shape does not match its grid");
    }
}

double DensityMatrix::purity() const noexcept {
    // Tr(rho^2) = sum |rho_jk|^2 for Hermitian rho.
    return rho_.squaredNorm();
}

DensityMatrix heralded_state(const JointSpectralAmplitude& jsa, Arm heralded_arm) {
    const Eigen::MatrixXcd f = normalized_matrix(jsa);
    if (heralded_arm == Arm::signal) {
        return {jsa.signal_grid(), f * f.adjoint()};
    }
    return {jsa.idler_grid(), (f.adjoint() * f).transpose()};
}

}  // namespace homsim
