#pragma once

// Independent oracles shared by the unit and acceptance suites. None of
// these call into the code they check beyond unit conversion.

#include <cmath>
#include <functional>

#include "homsim/coincidence_mc.hpp"
#include "homsim/units.hpp"

namespace homsim::testing {

/// Two sources with the published spectral setup and detector figures.
inline LinkConfig reference_link() {
    LinkConfig link;
    link.emission.mean_pairs_per_pulse = 0.05;
    return link;
}

/// Heralded purity of an all-gaussian filtered JSA in closed form.
///
/// |f|^2 ~ exp(-4 ln2 (a x^2 + 2 c x y + b y^2)) with x, y the signal and
/// idler detunings; the reduced state of a bivariate gaussian has purity
/// sqrt(1 - c^2 / (a b)).
inline double gaussian_purity(double pump_nm, double pump_pm, double pm_center_nm, double pm_nm, double signal_nm,
                              double signal_pm, double idler_nm, double idler_pm) {
    const double gp = angular_bandwidth(pump_pm, pump_nm);
    const double gpm = angular_bandwidth(pm_nm * 1e3, pm_center_nm);
    const double gs = angular_bandwidth(signal_pm, signal_nm);
    const double gi = angular_bandwidth(idler_pm, idler_nm);
    const double inv_p = 1.0 / (gp * gp);
    const double inv_pm = 1.0 / (4.0 * gpm * gpm);
    const double a = inv_p + inv_pm + 1.0 / (gs * gs);
    const double b = inv_p + inv_pm + 1.0 / (gi * gi);
    const double c = inv_p - inv_pm;
    return std::sqrt(1.0 - c * c / (a * b));
}

inline double reference_gaussian_purity() {
    return gaussian_purity(768.0, 250.0, 1536.0, 50.0, 1534.6, 250.0, 1537.4, 800.0);
}

/// Dip FWHM of two pure gaussian photons with intensity bandwidth
/// `fwhm_pm`: sqrt(2) times their transform-limited intensity duration.
inline double gaussian_dip_fwhm_ps(double fwhm_pm, double center_nm) {
    const double tbp = 2.0 * std::log(2.0) / kPi;
    const double dnu = kSpeedOfLight * fwhm_pm * kPicometre / std::pow(center_nm * kNanometre, 2);
    return std::sqrt(2.0) * tbp / dnu / kPicosecond;
}

/// Full width at half depth of a symmetric dip f(t) with minimum at t = 0
/// and plateau f(inf), by bisection on [0, t_max].
inline double dip_fwhm(const std::function<double(double)>& f, double plateau, double t_max) {
    const double half = 0.5 * (f(0.0) + plateau);
    double lo = 0.0;
    double hi = t_max;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < half ? lo : hi) = mid;
    }
    return 2.0 * 0.5 * (lo + hi);
}

/// Two-sided binomial z-score of k successes in n trials at probability p.
inline double binomial_z(double k, double n, double p) {
    const double sd = std::sqrt(n * p * (1.0 - p));
    return sd > 0.0 ? (k - n * p) / sd : (k == n * p ? 0.0 : 1e300);
}

}  // namespace homsim::testing

namespace homsim::testing {

/// Pump far broader than both filters: the filtered JSA is nearly
/// separable and the heralded photons nearly pure.
inline SourceConfig pure_source() {
    SourceConfig s;
    s.pump_fwhm_pm = 20000.0;
    return s;
}

inline CountingSetup ideal_counting() {
    CountingSetup c;
    for (auto& d : c.detectors) {
        d.quantum_efficiency = 1.0;
        d.dark_prob_per_ns = 0.0;
    }
    return c;
}

}  // namespace homsim::testing
