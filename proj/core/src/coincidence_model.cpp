#include "homsim/coincidence_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "homsim/errors.hpp"

namespace homsim {

void DetectorModel::validate() const {
    if (!(quantum_efficiency >= 0.0 && quantum_efficiency <= 1.0)) {
        throw DomainError("detector efficiency must lie in [0, 1]");
    }
    if (!(dark_prob_per_ns >= 0.0)) throw DomainError("dark count probability must be non-negative");
    if (!(gate_width_ns > 0.0)) throw DomainError("gate width must be positive");
    if (!(timing_jitter_sigma_ps >= 0.0)) throw DomainError("timing jitter must be non-negative");
}

double DetectorModel::dark_probability(double window_ns) const noexcept {
    return std::min(1.0, dark_prob_per_ns * std::min(window_ns, gate_width_ns));
}

void CountingSetup::validate() const {
    for (const auto& d : detectors) d.validate();
    for (double t : arm_transmissions) {
        if (!(t > 0.0 && t <= 1.0)) throw DomainError("arm transmissions must lie in (0, 1]");
    }
    if (!(coincidence_window_ns > 0.0)) throw DomainError("coincidence window must be positive");
}

namespace {

double binomial_pmf(int n, int k, double p) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

/// Probability that a detector clicks with m photons impinging.
double click(double dark, double efficiency, int m) {
    return 1.0 - (1.0 - dark) * std::pow(1.0 - efficiency, m);
}

struct PortOutcome {
    double both = 0.0;
    double first = 0.0;
    double second = 0.0;
};

}  // namespace

CoincidenceProbabilities enumerate_coincidences(const EmissionModel& model, const CountingSetup& setup,
                                                double cross_probability) {
    setup.validate();
    if (!(cross_probability >= 0.0 && cross_probability <= 1.0)) {
        throw DomainError("cross probability must lie in [0, 1]");
    }
    const std::vector<double> p = photon_number_distribution(model);
    const int n_max = std::min(model.max_photon_number, kEnumerationMaxPhotons);

    const double dark_ha = setup.dark_probability(kHeraldA);
    const double dark_hb = setup.dark_probability(kHeraldB);
    const double dark_1 = setup.dark_probability(kOutput1);
    const double dark_2 = setup.dark_probability(kOutput2);
    const double eta_ha = setup.herald_detection(kHeraldA, kArmHeraldA);
    const double eta_hb = setup.herald_detection(kHeraldB, kArmHeraldB);
    const double eta_1 = setup.detectors[kOutput1].quantum_efficiency;
    const double eta_2 = setup.detectors[kOutput2].quantum_efficiency;
    const double t_a = setup.arm_transmissions[kArmInterferingA];
    const double t_b = setup.arm_transmissions[kArmInterferingB];

    const auto ports = [&](int m1, int m2) {
        const double c1 = click(dark_1, eta_1, m1);
        const double c2 = click(dark_2, eta_2, m2);
        return PortOutcome{c1 * c2, c1, c2};
    };
    const auto accumulate = [](PortOutcome& acc, const PortOutcome& o, double w) {
        acc.both += w * o.both;
        acc.first += w * o.first;
        acc.second += w * o.second;
    };

    CoincidenceProbabilities out;
    for (int na = 0; na <= n_max; ++na) {
        const double herald_a = click(dark_ha, eta_ha, na);
        for (int nb = 0; nb <= n_max; ++nb) {
            const double w = p[static_cast<std::size_t>(na)] * p[static_cast<std::size_t>(nb)];
            if (w == 0.0) continue;
            const double herald_b = click(dark_hb, eta_hb, nb);
            PortOutcome all;
            PortOutcome accidental;
            for (int ka = 0; ka <= na; ++ka) {
                const double wa = binomial_pmf(na, ka, t_a);
                for (int kb = 0; kb <= nb; ++kb) {
                    const double wk = wa * binomial_pmf(nb, kb, t_b);
                    PortOutcome o;
                    if (ka == 1 && kb == 1) {
                        accumulate(o, ports(1, 1), cross_probability);
                        accumulate(o, ports(2, 0), 0.5 * (1.0 - cross_probability));
                        accumulate(o, ports(0, 2), 0.5 * (1.0 - cross_probability));
                    } else {
                        const int k = ka + kb;
                        for (int m1 = 0; m1 <= k; ++m1) accumulate(o, ports(m1, k - m1), binomial_pmf(k, m1, 0.5));
                        accumulate(accidental, o, wk);
                    }
                    accumulate(all, o, wk);
                }
            }
            out.fourfold += w * herald_a * herald_b * all.both;
            out.fourfold_accidental += w * herald_a * herald_b * accidental.both;
            out.twofold_a += w * herald_a * all.first;
            out.twofold_b += w * herald_b * all.second;
            out.herald_a += w * herald_a;
            out.herald_b += w * herald_b;
        }
    }
    return out;
}

FourfoldTerms fourfold_terms(const EmissionModel& model, const CountingSetup& setup) {
    const auto bunched = enumerate_coincidences(model, setup, 0.0);
    const auto crossed = enumerate_coincidences(model, setup, 1.0);
    return {bunched.fourfold, crossed.fourfold - bunched.fourfold};
}

double predict_raw_visibility(double net_visibility, const EmissionModel& model, const CountingSetup& setup) {
    if (!(net_visibility >= 0.0 && net_visibility <= 1.0)) throw DomainError("net visibility must lie in [0, 1]");
    const FourfoldTerms t = fourfold_terms(model, setup);
    const double baseline = t.accidental + t.interfering;
    if (!(baseline > 0.0)) return net_visibility;
    const double floor = t.accidental + (1.0 - net_visibility) * t.interfering;
    return 1.0 - floor / baseline;
}

double accidental_rate(const EmissionModel& model, const CountingSetup& setup, double trigger_rate_mhz) {
    if (!(trigger_rate_mhz > 0.0)) throw DomainError("trigger rate must be positive");
    return trigger_rate_mhz * 1e6 * enumerate_coincidences(model, setup, 0.0).fourfold;
}

PairRates effective_pair_rate(const CountingSetup& setup, double trigger_rate_mhz, const EmissionModel& model,
                              double cross_probability) {
    if (!(trigger_rate_mhz > 0.0)) throw DomainError("trigger rate must be positive");
    const auto p = enumerate_coincidences(model, setup, cross_probability);
    const double r = trigger_rate_mhz * 1e6;
    return {r * p.twofold_a, r * p.twofold_b, r * p.fourfold, r * p.fourfold_accidental};
}

ExcessLossFit fit_excess_transmission(const CountingSetup& setup, double trigger_rate_mhz, const EmissionModel& model,
                                      double target_twofold_a_per_s) {
    const auto rates_at = [&](double t) {
        CountingSetup scaled = setup;
        for (auto& v : scaled.arm_transmissions) v *= t;
        return effective_pair_rate(scaled, trigger_rate_mhz, model);
    };
    double lo = 1e-9;
    double hi = 1.0;
    if (rates_at(hi).twofold_a_per_s < target_twofold_a_per_s) {
        throw DomainError("target two-fold rate exceeds the lossless prediction");
    }
    if (rates_at(lo).twofold_a_per_s > target_twofold_a_per_s) {
        throw DomainError("target two-fold rate lies below the dark-count floor");
    }
    // Two-fold rate increases monotonically with transmission.
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = std::sqrt(lo * hi);
        (rates_at(mid).twofold_a_per_s < target_twofold_a_per_s ? lo : hi) = mid;
    }
    const double t = std::sqrt(lo * hi);
    return {t, rates_at(t)};
}

}  // namespace homsim
