// Randomized checks of the identities every configuration must satisfy.
#include <doctest.h>

#include <cmath>
#include <random>

#include "homsim/coincidence_mc.hpp"
#include "homsim/coincidence_model.hpp"
#include "homsim/hom.hpp"
#include "homsim/joint_spectrum.hpp"
#include "homsim/source.hpp"
#include "support.hpp"

using namespace homsim;

namespace {

constexpr int kTrials = 12;
constexpr GridConfig kSmallGrid{128, 4.0};

LineShape random_shape(std::mt19937_64& rng) {
    constexpr LineShape shapes[] = {LineShape::gaussian, LineShape::lorentzian, LineShape::flattop};
    return shapes[rng() % 3];
}

SourceConfig random_source(std::mt19937_64& rng, bool gaussian_only = false) {
    std::uniform_real_distribution<double> width(50.0, 1500.0);
    std::uniform_real_distribution<double> detune(-0.5, 0.5);
    SourceConfig s;
    s.pump_fwhm_pm = width(rng);
    s.signal_filter.fwhm_pm = width(rng);
    s.idler_filter.fwhm_pm = width(rng);
    s.signal_filter.center_wavelength_nm += detune(rng);
    s.idler_filter.center_wavelength_nm = 1.0 / (1.0 / s.pump_center_nm - 1.0 / s.signal_filter.center_wavelength_nm);
    if (!gaussian_only) {
        s.signal_filter.shape = random_shape(rng);
        s.idler_filter.shape = random_shape(rng);
    }
    if (rng() & 1U) s.interfering_arm = Arm::idler;
    return s;
}

struct Built {
    JointSpectralAmplitude jsa;
    DensityMatrix rho;
};

Built build(const SourceConfig& s, const GridConfig& grid = kSmallGrid) {
    const LinkSpectra l = build_link_spectra(s, s, grid);
    return {l.a.jsa, l.a.interfering_state};
}

}  // namespace

TEST_SUITE("properties") {
    TEST_CASE("normalization: Schmidt weights and heralded states have unit norm") {
        std::mt19937_64 rng(101);
        for (int t = 0; t < kTrials; ++t) {
            const Built b = build(random_source(rng));
            const SchmidtSpectrum sp = schmidt_decompose(b.jsa);
            double sum = 0.0;
            for (double l : sp.coefficients) sum += l * l;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(b.rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(b.jsa.norm_squared() > 0.0);
            CHECK(b.jsa.norm_squared() <= 1.0 + 1e-9);
        }
    }

    TEST_CASE("Schmidt identity: partial-trace purity equals the SVD sum") {
        std::mt19937_64 rng(202);
        for (int t = 0; t < kTrials; ++t) {
            const Built b = build(random_source(rng));
            CHECK(std::abs(b.rho.purity() - schmidt_decompose(b.jsa).purity()) < 1e-6);
        }
    }

    TEST_CASE("Schmidt identity holds for arbitrary complex JSAs") {
        std::mt19937_64 rng(203);
        std::normal_distribution<double> n;
        const FrequencyGrid g(1.2e15, 1e12, 24);
        for (int t = 0; t < kTrials; ++t) {
            Eigen::MatrixXcd m(24, 24);
            for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {n(rng), n(rng)};
            const JointSpectralAmplitude jsa(g, g, m);
            CHECK(std::abs(heralded_state(jsa, Arm::signal).purity() - schmidt_decompose(jsa).purity()) < 1e-6);
            CHECK(std::abs(heralded_state(jsa, Arm::idler).purity() - schmidt_decompose(jsa).purity()) < 1e-6);
        }
    }

    TEST_CASE("visibility-purity identity for two copies of one source") {
        std::mt19937_64 rng(303);
        for (int t = 0; t < kTrials; ++t) {
            const SourceConfig s = random_source(rng);
            const LinkSpectra l = build_link_spectra(s, s, kSmallGrid);
            const double p0 = hom_coincidence_probability(l.a.interfering_state, l.b.interfering_state, 0.0);
            CHECK(std::abs((1.0 - 2.0 * p0) - l.a.interfering_state.purity()) < 1e-6);
        }
    }

    TEST_CASE("phase invariance: a global phase changes no probability") {
        std::mt19937_64 rng(404);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        for (int t = 0; t < kTrials; ++t) {
            const Built b = build(random_source(rng));
            const JointSpectralAmplitude rotated = b.jsa.scaled(std::polar(1.0, phase(rng)));
            const Built c{rotated, heralded_state(rotated, Arm::signal)};
            const DensityMatrix ref = heralded_state(b.jsa, Arm::signal);
            CHECK(std::abs(schmidt_decompose(rotated).purity() - schmidt_decompose(b.jsa).purity()) < 1e-12);
            for (double d : {0.0, 3.0, -11.0}) {
                CHECK(std::abs(hom_coincidence_probability(c.rho, ref, d) - hom_coincidence_probability(ref, ref, d)) <
                      1e-12);
            }
        }
    }

    TEST_CASE("source exchange: P(a, b, d) = P(b, a, -d)") {
        std::mt19937_64 rng(505);
        std::uniform_real_distribution<double> delay(-40.0, 40.0);
        for (int t = 0; t < kTrials; ++t) {
            SourceConfig a = random_source(rng);
            SourceConfig b = random_source(rng);
            b.interfering_arm = a.interfering_arm;
            const LinkSpectra l = build_link_spectra(a, b, kSmallGrid);
            for (int k = 0; k < 4; ++k) {
                const double d = delay(rng);
                const double ab = hom_coincidence_probability(l.a.interfering_state, l.b.interfering_state, d);
                const double ba = hom_coincidence_probability(l.b.interfering_state, l.a.interfering_state, -d);
                CHECK(std::abs(ab - ba) < 1e-9);
            }
        }
    }

    TEST_CASE("grid convergence: 256 to 512 points moves default visibility < 1e-4") {
        const SourceConfig s;
        const double v256 = build_link_spectra(s, s, {256, 4.0}).visibility();
        const double v512 = build_link_spectra(s, s, {512, 4.0}).visibility();
        CHECK(std::abs(v512 - v256) < 1e-4);
    }

    TEST_CASE("grid convergence on random gaussian sources") {
        std::mt19937_64 rng(606);
        for (int t = 0; t < 4; ++t) {
            const SourceConfig s = random_source(rng, true);
            const double v256 = build_link_spectra(s, s, {256, 4.0}).visibility();
            const double v512 = build_link_spectra(s, s, {512, 4.0}).visibility();
            CHECK(std::abs(v512 - v256) < 1e-4);
        }
    }

    TEST_CASE("monotone filtering: narrower interfering filter never lowers visibility") {
        for (const LineShape shape : {LineShape::gaussian, LineShape::lorentzian, LineShape::flattop}) {
            double previous = 0.0;
            for (double w : {800.0, 400.0, 200.0, 100.0, 50.0}) {
                SourceConfig s;
                s.signal_filter.fwhm_pm = w;
                s.signal_filter.shape = shape;
                const double v = build_link_spectra(s, s, {256, 4.0}).visibility();
                CHECK(v + 1e-9 >= previous);
                previous = v;
            }
        }
    }

    TEST_CASE("monotone filtering on random sources") {
        std::mt19937_64 rng(707);
        for (int t = 0; t < 6; ++t) {
            SourceConfig s = random_source(rng, true);
            double previous = 0.0;
            for (double w : {800.0, 400.0, 200.0, 100.0, 50.0}) {
                (s.interfering_arm == Arm::signal ? s.signal_filter : s.idler_filter).fwhm_pm = w;
                const double v = build_link_spectra(s, s, {256, 4.0}).visibility();
                CHECK(v + 1e-9 >= previous);
                previous = v;
            }
        }
    }

    TEST_CASE("jitter never increases visibility") {
        std::mt19937_64 rng(808);
        for (int t = 0; t < kTrials; ++t) {
            const SourceConfig s = random_source(rng);
            const LinkSpectra l = build_link_spectra(s, s, kSmallGrid);
            double previous = l.visibility();
            for (double j : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
                const double v = l.visibility(j);
                CHECK(v <= previous + 1e-12);
                previous = v;
            }
        }
    }

    TEST_CASE("raw visibility never exceeds net") {
        std::mt19937_64 rng(909);
        std::uniform_real_distribution<double> mu(1e-3, 0.1);
        std::uniform_real_distribution<double> net(0.5, 1.0);
        std::uniform_real_distribution<double> eta(0.02, 1.0);
        for (int t = 0; t < 50; ++t) {
            EmissionModel e;
            e.mean_pairs_per_pulse = mu(rng);
            if (rng() & 1U) e.distribution = NumberDistribution::poissonian;
            CountingSetup c;
            for (auto& d : c.detectors) d.quantum_efficiency = eta(rng);
            const double v = net(rng);
            CHECK(predict_raw_visibility(v, e, c) <= v + 1e-12);
        }
    }

    TEST_CASE("fitted raw visibility stays below net within 2 sigma on the default configuration") {
        LinkConfig link = testing::reference_link();
        link.grid = {256, 4.0};
        std::vector<double> delays;
        for (int i = 0; i < 15; ++i) delays.push_back(-30.0 + 60.0 * i / 14.0);
        for (std::uint64_t seed : {1ULL, 2ULL}) {
            const DipScanResult r = dip_scan(link, delays, 50'000'000, seed);
            REQUIRE_FALSE(r.fit_failed());
            const double sigma = std::hypot(r.fit_raw->error.visibility, r.fit_net->error.visibility);
            CHECK(r.fit_raw->value.visibility <= r.fit_net->value.visibility + 2.0 * sigma);
        }
    }

    TEST_CASE("bit-identical reruns for any worker count") {
        LinkConfig link = testing::reference_link();
        link.grid = {128, 4.0};
        const std::vector<double> delays{-30.0, -15.0, 0.0, 15.0, 30.0};
        const std::uint64_t n = 3 * kTriggersPerBatch + 12345;
        const DipScanResult one = dip_scan(link, delays, n, 77, 1);
        for (unsigned w : {2U, 5U, 0U}) {
            const DipScanResult other = dip_scan(link, delays, n, 77, w);
            for (std::size_t i = 0; i < delays.size(); ++i) {
                const auto& x = one.points[i];
                const auto& y = other.points[i];
                CHECK(x.fourfold == y.fourfold);
                CHECK(x.twofold_a == y.twofold_a);
                CHECK(x.twofold_b == y.twofold_b);
                CHECK(x.accidental_fourfold == y.accidental_fourfold);
                CHECK(x.single_pair_events == y.single_pair_events);
                CHECK(x.single_pair_cross == y.single_pair_cross);
            }
        }
    }
}
