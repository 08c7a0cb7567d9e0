#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "homsim/errors.hpp"
#include "homsim/hom.hpp"
#include "homsim/joint_spectrum.hpp"
#include "homsim/source.hpp"
#include "homsim/units.hpp"
#include "support.hpp"

using namespace homsim;
using cplx = std::complex<double>;

namespace {

FrequencyGrid grid_nm(double center_nm, double span_pm, std::size_t n = 512) {
    return FrequencyGrid::around_wavelength(center_nm, span_pm, n);
}

// Numerical intensity FWHM of a sampled amplitude, by linear interpolation
// of the half-maximum crossings.
double sampled_fwhm(const SpectralAmplitude& a) {
    const auto& v = a.values();
    std::vector<double> I(v.size());
    std::transform(v.begin(), v.end(), I.begin(), [](cplx z) { return std::norm(z); });
    const auto peak = std::max_element(I.begin(), I.end());
    const double half = 0.5 * *peak;
    const std::size_t k0 = static_cast<std::size_t>(peak - I.begin());
    std::size_t l = k0;
    while (l > 0 && I[l - 1] >= half) --l;
    std::size_t r = k0;
    while (r + 1 < I.size() && I[r + 1] >= half) ++r;
    const double step = a.grid().step();
    const double left = a.grid().omega(l) - step * (I[l] - half) / (I[l] - I[l - 1]);
    const double right = a.grid().omega(r) + step * (I[r] - half) / (I[r] - I[r + 1]);
    return right - left;
}

DensityMatrix pure_state(const FrequencyGrid& g, const std::function<cplx(double)>& psi) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) v(static_cast<Eigen::Index>(k)) = psi(g.omega(k));
    v /= v.norm();
    return DensityMatrix(g, v * v.adjoint());
}

JointSpectralAmplitude separable_jsa(const FrequencyGrid& gs, const FrequencyGrid& gi) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(gs.size()), static_cast<Eigen::Index>(gi.size()));
    const double ws = 0.1 * gs.span();
    const double wi = 0.2 * gi.span();
    for (std::size_t r = 0; r < gs.size(); ++r) {
        for (std::size_t c = 0; c < gi.size(); ++c) {
            const double x = gs.offset(r) / ws;
            const double y = gi.offset(c) / wi;
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::exp(-x * x) * std::exp(-y * y) * std::polar(1.0, 0.3 * x);
        }
    }
    return JointSpectralAmplitude(gs, gi, m);
}

}  // namespace

TEST_SUITE("coherence_time") {
    TEST_CASE("table values") {
        CHECK(coherence_time(250.0, 1550.0) == doctest::Approx(14.1).epsilon(5e-3));
        CHECK(coherence_time(10.0, 1550.0) == doctest::Approx(352.0).epsilon(5e-3));
        CHECK(coherence_time(5000.0, 1310.0) == doctest::Approx(0.503).epsilon(5e-3));
    }

    TEST_CASE("closed form") {
        const double lam = 1550e-9;
        CHECK(coherence_time(250.0, 1550.0) == doctest::Approx(0.44 * lam * lam / (kSpeedOfLight * 250e-12) * 1e12));
    }

    TEST_CASE("doubling the bandwidth halves it exactly") {
        for (double w : {1.0, 10.0, 250.0, 800.0, 5000.0}) {
            CHECK(coherence_time(2.0 * w, 1536.0) == coherence_time(w, 1536.0) / 2.0);
        }
    }

    TEST_CASE("non-positive input") {
        CHECK_THROWS_AS((void)coherence_time(0.0, 1550.0), DomainError);
        CHECK_THROWS_AS((void)coherence_time(250.0, -1.0), DomainError);
    }
}

TEST_SUITE("frequency_grid") {
    TEST_CASE("uniform and symmetric") {
        const FrequencyGrid g(1e15, 1e12, 64);
        CHECK(g.omega(0) == doctest::Approx(g.front()));
        CHECK(g.omega(63) == doctest::Approx(g.back()));
        CHECK(g.omega(10) - g.omega(9) == doctest::Approx(g.step()));
        CHECK(g.offset(0) == doctest::Approx(-g.offset(63)));
    }

    TEST_CASE("invalid grids") {
        CHECK_THROWS_AS(FrequencyGrid(1e15, 1e12, 15), DomainError);
        CHECK_THROWS_AS(FrequencyGrid(1e15, 0.0, 64), DomainError);
    }
}

TEST_SUITE("make_pump_spectrum") {
    const FrequencyGrid g = grid_nm(768.0, 2000.0, 1024);

    TEST_CASE("peak at the pump frequency") {
        const SpectralAmplitude p = make_pump_spectrum(g, 768.0, 250.0);
        const auto& v = p.values();
        const auto k = static_cast<std::size_t>(
            std::max_element(v.begin(), v.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) -
            v.begin());
        CHECK(std::abs(g.omega(k) - angular_frequency_from_wavelength(768.0)) <= g.step());
    }

    TEST_CASE("sampled FWHM equals the requested width within a step") {
        for (LineShape s : {LineShape::gaussian, LineShape::lorentzian}) {
            const SpectralAmplitude p = make_pump_spectrum(grid_nm(768.0, 6000.0, 2048), 768.0, 250.0, s);
            CHECK(std::abs(sampled_fwhm(p) - angular_bandwidth(250.0, 768.0)) <= p.grid().step());
        }
    }

    TEST_CASE("normalized") {
        CHECK(make_pump_spectrum(g, 768.0, 250.0).norm_squared() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(make_pump_spectrum(g, 768.0, 250.0).is_normalized());
    }

    TEST_CASE("grid too narrow") {
        CHECK_THROWS_AS((void)make_pump_spectrum(grid_nm(768.0, 1000.0), 768.0, 250.0), CoverageError);
    }
}

TEST_SUITE("make_filter_amplitude") {
    const FrequencyGrid g = grid_nm(1534.6, 4000.0, 2001);

    TEST_CASE("unit peak for a lossless gaussian") {
        const SpectralAmplitude f = make_filter_amplitude(g, {1534.6, 250.0, LineShape::gaussian, 1.0});
        double peak = 0.0;
        for (cplx v : f.values()) peak = std::max(peak, std::abs(v));
        CHECK(peak == doctest::Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("peak amplitude is the root of the transmission") {
        const SpectralAmplitude f = make_filter_amplitude(g, {1534.6, 250.0, LineShape::gaussian, 0.81});
        CHECK(std::abs(f.at(angular_frequency_from_wavelength(1534.6))) == doctest::Approx(0.9));
    }

    TEST_CASE("flattop passes exactly its FWHM window") {
        const FilterSpec spec{1534.6, 250.0, LineShape::flattop, 1.0};
        const SpectralAmplitude f = make_filter_amplitude(g, spec);
        const double w = angular_bandwidth(250.0, 1534.6);
        const double c = angular_frequency_from_wavelength(1534.6);
        double lo = 1e300;
        double hi = -1e300;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (std::norm(f.values()[k]) >= 0.5) {
                lo = std::min(lo, g.omega(k));
                hi = std::max(hi, g.omega(k));
            }
        }
        CHECK(std::abs((hi - lo) - w) <= 2.0 * g.step());
        CHECK(std::abs(0.5 * (hi + lo) - c) <= g.step());
    }

    TEST_CASE("lorentzian is at half transmission a half width away") {
        const FilterSpec spec{1534.6, 250.0, LineShape::lorentzian, 1.0};
        const SpectralAmplitude f = make_filter_amplitude(g, spec);
        const double c = angular_frequency_from_wavelength(1534.6);
        const double w = angular_bandwidth(250.0, 1534.6);
        CHECK(std::norm(f.at(c + 0.5 * w)) == doctest::Approx(0.5).epsilon(0.01));
        CHECK(std::norm(f.at(c - 0.5 * w)) == doctest::Approx(0.5).epsilon(0.01));
    }

    TEST_CASE("center outside the grid") {
        CHECK_THROWS_AS((void)make_filter_amplitude(g, {1540.0, 250.0, LineShape::gaussian, 1.0}), CoverageError);
    }

    TEST_CASE("invalid specs") {
        CHECK_THROWS_AS((void)make_filter_amplitude(g, {1534.6, 0.0, LineShape::gaussian, 1.0}), DomainError);
        CHECK_THROWS_AS((void)make_filter_amplitude(g, {1534.6, 250.0, LineShape::gaussian, 1.5}), DomainError);
        CHECK_THROWS_AS((void)make_filter_amplitude(g, {1534.6, 250.0, LineShape::gaussian, 0.0}), DomainError);
    }
}

TEST_SUITE("build_jsa") {
    // Wide enough to hold most of the 50 nm phase-matching band.
    const FrequencyGrid wide = grid_nm(1536.0, 160000.0, 512);
    const FrequencyGrid pump_grid = grid_nm(768.0, 2000.0, 257);
    const SpectralAmplitude pump = make_pump_spectrum(pump_grid, 768.0, 250.0);

    TEST_CASE("pump envelope enforces energy conservation") {
        const JointSpectralAmplitude j = build_jsa(pump, {}, wide, wide);
        const double peak = j.values().cwiseAbs().maxCoeff();
        const double wp = angular_frequency_from_wavelength(768.0);
        const double gp = angular_bandwidth(250.0, 768.0);
        double worst = 0.0;
        for (std::size_t r = 0; r < wide.size(); ++r) {
            for (std::size_t c = 0; c < wide.size(); ++c) {
                if (std::abs(wide.omega(r) + wide.omega(c) - wp) >= 5.0 * gp) {
                    worst = std::max(worst, std::abs(j.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
                }
            }
        }
        CHECK(worst < 1e-4 * peak);
    }

    TEST_CASE("symmetric configuration peaks at degeneracy") {
        const FrequencyGrid g = grid_nm(1536.0, 8000.0, 129);
        const JointSpectralAmplitude j = build_jsa(pump, {}, g, g);
        Eigen::Index r = 0;
        Eigen::Index c = 0;
        j.values().cwiseAbs().maxCoeff(&r, &c);
        CHECK(r == 64);
        CHECK(c == 64);
    }

    TEST_CASE("normalized before filtering when the grids hold the band") {
        const FrequencyGrid huge = grid_nm(1536.0, 400000.0, 1024);
        const JointSpectralAmplitude j = build_jsa(pump, {1536.0, 50.0, LineShape::gaussian}, huge, huge);
        CHECK(j.norm_squared() == doctest::Approx(1.0).epsilon(2e-3));
    }

    TEST_CASE("unfiltered state is strongly correlated") {
        const JointSpectralAmplitude j = build_jsa(pump, {}, wide, wide);
        CHECK(schmidt_decompose(j).schmidt_number() > 10.0);
    }

    TEST_CASE("pump outside the sum range") {
        const FrequencyGrid far = grid_nm(1300.0, 2000.0, 64);
        CHECK_THROWS_AS((void)build_jsa(pump, {}, far, far), ConfigurationError);
    }
}

TEST_SUITE("apply_filters") {
    const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
    const SourceConfig src{};

    TEST_CASE("a transparent filter changes nothing") {
        const FrequencyGrid gs = grid_nm(1534.6, 2000.0, 128);
        const FrequencyGrid gi = grid_nm(1537.4, 2000.0, 128);
        const FrequencyGrid pg = grid_nm(768.0, 2000.0, 257);
        const JointSpectralAmplitude j = build_jsa(make_pump_spectrum(pg, 768.0, 250.0), {}, gs, gi);
        const JointSpectralAmplitude f =
            apply_filters(j, {1534.6, 1e7, LineShape::flattop, 1.0}, {1537.4, 1e7, LineShape::flattop, 1.0});
        CHECK((f.values() - j.values()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(f.norm_squared() == doctest::Approx(j.norm_squared()).epsilon(1e-9));
    }

    TEST_CASE("published filters keep a small fraction of the pairs") {
        const double kept = ref.a.jsa.norm_squared();
        CHECK(kept < 0.05);
        const double crude = 250.0 / 50000.0;
        CHECK(kept > crude / 5.0);
        CHECK(kept < crude * 5.0);
    }

    TEST_CASE("filtering twice equals filtering with the squared amplitude") {
        const JointSpectralAmplitude& j = ref.a.jsa;
        const SpectralAmplitude ts = make_filter_amplitude(j.signal_grid(), src.signal_filter);
        const SpectralAmplitude ti = make_filter_amplitude(j.idler_grid(), src.idler_filter);
        auto square = [](const SpectralAmplitude& a) {
            std::vector<cplx> v = a.values();
            for (auto& x : v) x *= x;
            return SpectralAmplitude(a.grid(), std::move(v));
        };
        const JointSpectralAmplitude twice = apply_filters(apply_filters(j, ts, ti), ts, ti);
        const JointSpectralAmplitude squared = apply_filters(j, square(ts), square(ti));
        CHECK((twice.values() - squared.values()).cwiseAbs().maxCoeff() <= 1e-12 * j.values().cwiseAbs().maxCoeff());
    }

    TEST_CASE("grids must match") {
        const FrequencyGrid other = grid_nm(1534.6, 999.0, 512);
        const SpectralAmplitude t = make_filter_amplitude(other, src.signal_filter);
        CHECK_THROWS_AS((void)apply_filters(ref.a.jsa, t, t), ConfigurationError);
    }
}

TEST_SUITE("schmidt_decompose") {
    const FrequencyGrid gs = grid_nm(1534.6, 2000.0, 96);
    const FrequencyGrid gi = grid_nm(1537.4, 3000.0, 80);

    TEST_CASE("separable JSA has a single mode") {
        const SchmidtSpectrum s = schmidt_decompose(separable_jsa(gs, gi));
        CHECK(s.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.coefficients[1] < 1e-6);
    }

    TEST_CASE("coefficients are descending and square-normalized") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const SchmidtSpectrum s = schmidt_decompose(ref.a.jsa);
        double sum = 0.0;
        for (std::size_t k = 0; k < s.count(); ++k) {
            sum += s.coefficients[k] * s.coefficients[k];
            CHECK(s.coefficients[k] >= 0.0);
            if (k > 0) CHECK(s.coefficients[k] <= s.coefficients[k - 1]);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    }

    TEST_CASE("published setup matches the gaussian closed form") {
        // For a bivariate gaussian the Schmidt weights are geometric,
        // lambda_n^2 = (1 - x) x^n with x = (1 - P) / (1 + P).
        const double purity = testing::reference_gaussian_purity();
        CHECK(purity == doctest::Approx(0.988444).epsilon(1e-6));
        const double x = (1.0 - purity) / (1.0 + purity);
        const SchmidtSpectrum s = schmidt_decompose(build_link_spectra(SourceConfig{}, SourceConfig{}).a.jsa);
        CHECK(s.coefficients[0] * s.coefficients[0] == doctest::Approx(1.0 - x).epsilon(1e-6));
        CHECK(s.coefficients[1] * s.coefficients[1] == doctest::Approx((1.0 - x) * x).epsilon(1e-4));
        CHECK(s.purity() == doctest::Approx(purity).epsilon(1e-8));
    }

    TEST_CASE("zero JSA") {
        const JointSpectralAmplitude zero(gs, gi, Eigen::MatrixXcd::Zero(96, 80));
        CHECK_THROWS_AS((void)schmidt_decompose(zero), DegenerateInputError);
        CHECK_THROWS_AS((void)heralded_state(zero, Arm::signal), DegenerateInputError);
    }
}

TEST_SUITE("heralded_state") {
    const FrequencyGrid gs = grid_nm(1534.6, 2000.0, 96);
    const FrequencyGrid gi = grid_nm(1537.4, 3000.0, 80);

    TEST_CASE("unit trace and hermitian") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        for (Arm arm : {Arm::signal, Arm::idler}) {
            const DensityMatrix rho = heralded_state(ref.a.jsa, arm);
            CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-8));
            CHECK((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        }
    }

    TEST_CASE("separable JSA gives a pure state") {
        CHECK(heralded_state(separable_jsa(gs, gi), Arm::signal).purity() == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(heralded_state(separable_jsa(gs, gi), Arm::idler).purity() == doctest::Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("purity equals the Schmidt sum on both arms") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const double s = schmidt_decompose(ref.a.jsa).purity();
        CHECK(heralded_state(ref.a.jsa, Arm::signal).purity() == doctest::Approx(s).epsilon(1e-10));
        CHECK(heralded_state(ref.a.jsa, Arm::idler).purity() == doctest::Approx(s).epsilon(1e-10));
    }

    TEST_CASE("published setup purity is the closed-form value") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        CHECK(ref.a.interfering_state.purity() == doctest::Approx(testing::reference_gaussian_purity()).epsilon(1e-6));
    }
}

TEST_SUITE("hom_coincidence_probability") {
    const FrequencyGrid g = grid_nm(1534.6, 2000.0, 256);
    const double c = angular_frequency_from_wavelength(1534.6);
    const double w = angular_bandwidth(250.0, 1534.6);
    const DensityMatrix pure = pure_state(g, [](double om) {
        const double x = (om - c) / w;
        return cplx(std::exp(-2.0 * std::log(2.0) * x * x), 0.0);
    });

    TEST_CASE("identical pure photons coalesce") {
        CHECK(hom_coincidence_probability(pure, pure, 0.0) == doctest::Approx(0.0).epsilon(1e-6));
    }

    TEST_CASE("distinguishable at large delay") {
        const double tau = coherence_time(250.0, 1534.6);
        CHECK(hom_coincidence_probability(pure, pure, 20.0 * tau) == doctest::Approx(0.5).epsilon(1e-3));
    }

    TEST_CASE("published setup at zero delay") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const double p = hom_coincidence_probability(ref.a.interfering_state, ref.b.interfering_state, 0.0);
        CHECK(p == doctest::Approx(0.5 * (1.0 - testing::reference_gaussian_purity())).epsilon(1e-6));
    }

    TEST_CASE("mismatched grids") {
        const DensityMatrix other = pure_state(grid_nm(1534.6, 2100.0, 256), [](double) { return cplx(1.0); });
        CHECK_THROWS_AS((void)hom_coincidence_probability(pure, other, 0.0), ConfigurationError);
    }

    TEST_CASE("fast overlap equals the direct trace") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        for (double d : {-37.0, -12.5, -3.0, 0.0, 1.25, 7.0, 19.0, 60.0}) {
            CHECK(ref.overlap.coincidence_probability(d) ==
                  doctest::Approx(hom_coincidence_probability(ref.a.interfering_state, ref.b.interfering_state, d))
                      .epsilon(1e-9));
        }
    }

    TEST_CASE("jitter smearing equals numerical averaging over the delay") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const double sigma = 3.0;
        for (double d : {0.0, 8.0, 20.0}) {
            double sum = 0.0;
            double wsum = 0.0;
            for (int i = -4000; i <= 4000; ++i) {
                const double j = i * 8.0 * sigma / 4000.0;
                const double wgt = std::exp(-0.5 * j * j / (sigma * sigma));
                sum += wgt * ref.overlap.overlap(d + j);
                wsum += wgt;
            }
            CHECK(ref.overlap.overlap(d, sigma) == doctest::Approx(sum / wsum).epsilon(1e-9));
        }
    }
}

TEST_SUITE("analytic_dip_curve") {
    TEST_CASE("symmetric configuration gives a symmetric dip") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const std::vector<double> delays{-25.0, -10.0, -2.0, 0.0, 2.0, 10.0, 25.0};
        const auto curve = analytic_dip_curve(ref.a.interfering_state, ref.b.interfering_state, delays);
        for (std::size_t k = 0; k < delays.size(); ++k) {
            CHECK(curve[k].probability == doctest::Approx(curve[delays.size() - 1 - k].probability).epsilon(1e-9));
        }
    }

    TEST_CASE("published setup visibility is the closed-form purity") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const std::vector<double> delays{0.0, 500.0};
        const auto curve = analytic_dip_curve(ref.a.interfering_state, ref.b.interfering_state, delays);
        CHECK(1.0 - curve[0].probability / curve[1].probability ==
              doctest::Approx(testing::reference_gaussian_purity()).epsilon(1e-5));
    }

    TEST_CASE("pure gaussian photons: width is sqrt(2) times the pulse duration") {
        const FrequencyGrid g = grid_nm(1534.6, 2000.0, 512);
        const double c = angular_frequency_from_wavelength(1534.6);
        const double w = angular_bandwidth(250.0, 1534.6);
        const DensityMatrix pure = pure_state(g, [&](double om) {
            const double x = (om - c) / w;
            return cplx(std::exp(-2.0 * std::log(2.0) * x * x), 0.0);
        });
        const DelayOverlap o(pure, pure);
        const double width = testing::dip_fwhm([&](double t) { return o.coincidence_probability(t); }, 0.5, 100.0);
        CHECK(width == doctest::Approx(testing::gaussian_dip_fwhm_ps(250.0, 1534.6)).epsilon(1e-4));
    }

    TEST_CASE("unsorted delays") {
        const LinkSpectra ref = build_link_spectra(SourceConfig{}, SourceConfig{});
        const std::vector<double> delays{1.0, 0.0};
        CHECK_THROWS_AS((void)analytic_dip_curve(ref.a.interfering_state, ref.b.interfering_state, delays),
                        DomainError);
    }
}

TEST_CASE("phase-matching shape barely matters at this bandwidth ratio") {
    SourceConfig flat;
    flat.phase_matching.shape = LineShape::flattop;
    const double v_gauss = build_link_spectra(SourceConfig{}, SourceConfig{}).visibility();
    const double v_flat = build_link_spectra(flat, flat).visibility();
    CHECK(std::abs(v_gauss - v_flat) < 1e-3);
}
