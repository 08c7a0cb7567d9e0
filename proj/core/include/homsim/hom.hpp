#pragma once

#include <complex>
#include <span>
#include <vector>

#include "homsim/joint_spectrum.hpp"

namespace homsim {

/// Coincidence probability across the two outputs of a 50/50 beam splitter
/// for photons in states `a` and `b`, with `b` delayed by `delay_ps`:
/// P = (1 - Tr[rho_a D rho_b D^dagger]) / 2, D = diag(exp(i omega delay)).
/// Direct O(n^2) evaluation; throws ConfigurationError on mismatched grids.
[[nodiscard]] double hom_coincidence_probability(const DensityMatrix& a, const DensityMatrix& b, double delay_ps);

/// Precomputed form of Tr[rho_a D(t) rho_b D(t)^dagger] as a function of the
/// delay. On a uniform grid the trace only depends on the index difference
/// m = k - j, so it collapses to a trigonometric sum over 2n - 1 terms,
/// which also gives gaussian delay smearing in closed form.
class DelayOverlap {
public:
    DelayOverlap(const DensityMatrix& a, const DensityMatrix& b);

    /// Tr[rho_a D rho_b D^dagger] at `delay_ps`, averaged over a gaussian
    /// delay jitter of standard deviation `jitter_sigma_ps`.
    [[nodiscard]] double overlap(double delay_ps, double jitter_sigma_ps = 0.0) const noexcept;

    [[nodiscard]] double coincidence_probability(double delay_ps, double jitter_sigma_ps = 0.0) const noexcept;

    /// 1 - P(0) / P(infinity) = overlap(0).
    [[nodiscard]] double visibility(double jitter_sigma_ps = 0.0) const noexcept {
        return overlap(0.0, jitter_sigma_ps);
    }

    /// Delay at which the sampled spectrum aliases back onto itself.
    [[nodiscard]] double period_ps() const noexcept;

private:
    double step_;
    // coeffs_[m] for m = 0 .. n-1; negative m are the conjugates.
    std::vector<std::complex<double>> coeffs_;
};

struct DipPoint {
    double delay_ps;
    double probability;
};

/// Pointwise coincidence probabilities; `delays_ps` must be sorted.
[[nodiscard]] std::vector<DipPoint> analytic_dip_curve(const DensityMatrix& a, const DensityMatrix& b,
                                                       std::span<const double> delays_ps, double jitter_sigma_ps = 0.0);

}  // namespace homsim
