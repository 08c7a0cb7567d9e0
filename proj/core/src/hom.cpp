#include "homsim/hom.hpp"

#include <algorithm>
#include <cmath>

#include "homsim/errors.hpp"
#include "homsim/units.hpp"

namespace homsim {

namespace {

void require_common_grid(const DensityMatrix& a, const DensityMatrix& b) {
    if (!a.grid().matches(b.grid(), 1e-9)) {
        throw ConfigurationError("HOM interference needs both states on a common frequency grid");
    }
}

}  // namespace

double hom_coincidence_probability(const DensityMatrix& a, const DensityMatrix& b, double delay_ps) {
    require_common_grid(a, b);
    const auto& ra = a.matrix();
    const auto& rb = b.matrix();
    const auto n = ra.rows();
    const double t = delay_ps * kPicosecond;
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        phase[static_cast<std::size_t>(k)] = std::polar(1.0, a.grid().offset(static_cast<std::size_t>(k)) * t);
    }
    std::complex<double> trace{0.0, 0.0};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            trace += ra(j, k) * phase[static_cast<std::size_t>(k)] * rb(k, j) *
                     std::conj(phase[static_cast<std::size_t>(j)]);
        }
    }
    return std::clamp(0.5 * (1.0 - trace.real()), 0.0, 0.5);
}

DelayOverlap::DelayOverlap(const DensityMatrix& a, const DensityMatrix& b) : step_(a.grid().step()) {
    require_common_grid(a, b);
    const auto& ra = a.matrix();
    const auto& rb = b.matrix();
    const auto n = ra.rows();
    coeffs_.assign(static_cast<std::size_t>(n), {0.0, 0.0});
    for (Eigen::Index m = 0; m < n; ++m) {
        std::complex<double> c{0.0, 0.0};
        for (Eigen::Index j = 0; j + m < n; ++j) c += ra(j, j + m) * rb(j + m, j);
        coeffs_[static_cast<std::size_t>(m)] = c;
    }
}

double DelayOverlap::overlap(double delay_ps, double jitter_sigma_ps) const noexcept {
    const double theta = step_ * delay_ps * kPicosecond;
    const double damp = 0.5 * std::pow(step_ * jitter_sigma_ps * kPicosecond, 2);
    // Incremental rotation, re-anchored every 64 terms to bound rounding drift.
    const std::complex<double> rot = std::polar(1.0, theta);
    std::complex<double> phase{1.0, 0.0};
    double sum = coeffs_[0].real();
    for (std::size_t m = 1; m < coeffs_.size(); ++m) {
        phase = (m & 63U) == 0 ? std::polar(1.0, theta * static_cast<double>(m)) : phase * rot;
        const double weight = damp > 0.0 ? std::exp(-damp * static_cast<double>(m * m)) : 1.0;
        sum += 2.0 * weight * (coeffs_[m] * phase).real();
    }
    return sum;
}

double DelayOverlap::coincidence_probability(double delay_ps, double jitter_sigma_ps) const noexcept {
    return std::clamp(0.5 * (1.0 - overlap(delay_ps, jitter_sigma_ps)), 0.0, 0.5);
}

double DelayOverlap::period_ps() const noexcept { return 2.0 * kPi / step_ / kPicosecond; }

std::vector<DipPoint> analytic_dip_curve(const DensityMatrix& a, const DensityMatrix& b,
                                         std::span<const double> delays_ps, double jitter_sigma_ps) {
    if (!std::is_sorted(delays_ps.begin(), delays_ps.end())) throw DomainError("delay list must be sorted");
    const DelayOverlap kernel(a, b);
    std::vector<DipPoint> curve;
    curve.reserve(delays_ps.size());
    for (double d : delays_ps) curve.push_back({d, kernel.coincidence_probability(d, jitter_sigma_ps)});
    return curve;
}

}  // namespace homsim
