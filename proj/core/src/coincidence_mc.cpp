#include "homsim/coincidence_mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "homsim/errors.hpp"
#include "homsim/random.hpp"
#include "homsim/units.hpp"

namespace homsim {

namespace {

double click_probability(double dark, double efficiency, int photons) {
    return 1.0 - (1.0 - dark) * std::pow(1.0 - efficiency, photons);
}

unsigned resolve_workers(unsigned workers) {
    if (workers > 0) return workers;
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n); each index is handled exactly once.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    const unsigned w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
}

std::uint64_t batch_count(std::uint64_t n_triggers) {
    return (n_triggers + kTriggersPerBatch - 1) / kTriggersPerBatch;
}

}  // namespace

void LinkConfig::validate() const {
    source_a.validate();
    source_b.validate();
    emission.validate();
    counting.validate();
    trigger.validate();
    if (!(synchronization_jitter_sigma_ps >= 0.0)) throw DomainError("synchronization jitter must be non-negative");
    if (!std::isfinite(interfering_delay_ps)) throw DomainError("interfering delay must be finite");
}

void DelayPointCounts::add(const TriggerRecord& r) noexcept {
    ++n_triggers;
    fourfold += r.fourfold();
    twofold_a += r.twofold_a();
    twofold_b += r.twofold_b();
    accidental_fourfold += r.accidental_fourfold();
    if (r.single_pair() && (r.clicked(kHeraldA) || r.clicked(kHeraldB))) {
        ++single_pair_events;
        single_pair_cross += r.cross_output();
    }
}

void DelayPointCounts::merge(const DelayPointCounts& o) noexcept {
    n_triggers += o.n_triggers;
    fourfold += o.fourfold;
    twofold_a += o.twofold_a;
    twofold_b += o.twofold_b;
    accidental_fourfold += o.accidental_fourfold;
    single_pair_events += o.single_pair_events;
    single_pair_cross += o.single_pair_cross;
}

/// Per-batch random state and the shared event model.
struct CoincidenceSimulator::Sampler {
    const CoincidenceSimulator& sim;
    Rng rng;
    double delay_ps;
    double fixed_cross;
    std::uniform_real_distribution<double> uniform{0.0, 1.0};
    std::normal_distribution<double> jitter;

    Sampler(const CoincidenceSimulator& s, std::uint64_t seed, double scan_delay_ps)
        : sim(s),
          rng(seed),
          delay_ps(s.config_.interfering_delay_ps + scan_delay_ps),
          fixed_cross(s.cross_probability(scan_delay_ps)),
          jitter(0.0, std::max(s.config_.synchronization_jitter_sigma_ps, 1e-300)) {}

    double u() { return uniform(rng); }

    int binomial_photons(int n, double p) {
        int k = 0;
        for (int i = 0; i < n; ++i) k += u() < p;
        return k;
    }

    double single_pair_cross() {
        if (sim.config_.synchronization_jitter_sigma_ps <= 0.0) return fixed_cross;
        const double overlap = sim.spectra_.overlap.overlap(delay_ps + jitter(rng));
        return std::clamp(1.0 - overlap, 0.0, 1.0);
    }

    /// Beam splitter and output detection for a trigger whose pair numbers
    /// and herald clicks are already decided.
    TriggerRecord resolve(int na, int nb, bool herald_a, bool herald_b) {
        const CountingSetup& c = sim.config_.counting;
        TriggerRecord r;
        r.pairs_a = na;
        r.pairs_b = nb;
        r.bs_photons_a = binomial_photons(na, c.arm_transmissions[kArmInterferingA]);
        r.bs_photons_b = binomial_photons(nb, c.arm_transmissions[kArmInterferingB]);
        if (r.single_pair()) {
            if (u() < single_pair_cross()) {
                r.port_photons = {1, 1};
            } else {
                r.port_photons = u() < 0.5 ? std::array{2, 0} : std::array{0, 2};
            }
        } else {
            for (int i = 0; i < r.bs_photons_a + r.bs_photons_b; ++i) ++r.port_photons[u() < 0.5 ? 0 : 1];
        }
        const bool out1 = u() < click_probability(c.dark_probability(kOutput1),
                                                  c.detectors[kOutput1].quantum_efficiency, r.port_photons[0]);
        const bool out2 = u() < click_probability(c.dark_probability(kOutput2),
                                                  c.detectors[kOutput2].quantum_efficiency, r.port_photons[1]);
        r.fired = static_cast<std::uint8_t>((herald_a << kHeraldA) | (out1 << kOutput1) | (out2 << kOutput2) |
                                            (herald_b << kHeraldB));
        return r;
    }

    TriggerRecord brute_force(std::discrete_distribution<int>& pairs) {
        const CountingSetup& c = sim.config_.counting;
        const int na = pairs(rng);
        const int nb = pairs(rng);
        const bool ha = u() < click_probability(c.dark_probability(kHeraldA), c.herald_detection(kHeraldA, kArmHeraldA), na);
        const bool hb = u() < click_probability(c.dark_probability(kHeraldB), c.herald_detection(kHeraldB, kArmHeraldB), nb);
        return resolve(na, nb, ha, hb);
    }

    /// Sorted trigger offsets in [0, len) at which a click with per-trigger
    /// probability p occurs.
    std::vector<std::uint64_t> bernoulli_positions(double p, std::uint64_t len) {
        std::vector<std::uint64_t> pos;
        if (p <= 0.0) return pos;
        if (p >= 1.0) {
            pos.resize(len);
            for (std::uint64_t i = 0; i < len; ++i) pos[i] = i;
            return pos;
        }
        pos.reserve(static_cast<std::size_t>(1.2 * p * static_cast<double>(len)) + 16);
        std::geometric_distribution<std::uint64_t> gap(p);
        for (std::uint64_t at = gap(rng); at < len; at += 1 + gap(rng)) pos.push_back(at);
        return pos;
    }
};

CoincidenceSimulator::CoincidenceSimulator(LinkConfig config)
    : config_((config.validate(), std::move(config))),
      spectra_(build_link_spectra(config_.source_a, config_.source_b, config_.grid)),
      pmf_(photon_number_distribution(config_.emission)) {
    const CountingSetup& c = config_.counting;
    const std::array<double, 2> dark{c.dark_probability(kHeraldA), c.dark_probability(kHeraldB)};
    const std::array<double, 2> eta{c.herald_detection(kHeraldA, kArmHeraldA), c.herald_detection(kHeraldB, kArmHeraldB)};
    for (std::size_t s = 0; s < 2; ++s) {
        posterior_click_[s].resize(pmf_.size());
        posterior_silent_[s].resize(pmf_.size());
        double total = 0.0;
        for (std::size_t n = 0; n < pmf_.size(); ++n) {
            const double pc = click_probability(dark[s], eta[s], static_cast<int>(n));
            posterior_click_[s][n] = pmf_[n] * pc;
            posterior_silent_[s][n] = pmf_[n] * (1.0 - pc);
            total += pmf_[n] * pc;
        }
        herald_click_[s] = total;
    }
}

double CoincidenceSimulator::cross_probability(double delay_ps) const noexcept {
    const double overlap = spectra_.overlap.overlap(config_.interfering_delay_ps + delay_ps,
                                                    config_.synchronization_jitter_sigma_ps);
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

std::vector<TriggerRecord> CoincidenceSimulator::simulate_trigger(double delay_ps, std::size_t n_triggers,
                                                                  std::uint64_t seed) const {
    const std::vector<std::uint64_t> pulses = run_trigger_stream(config_.trigger, n_triggers, seed);
    Sampler s(*this, derive_seed(seed, 0x51A), delay_ps);
    std::discrete_distribution<int> pairs(pmf_.begin(), pmf_.end());
    std::vector<TriggerRecord> records;
    records.reserve(n_triggers);
    for (std::size_t k = 0; k < n_triggers; ++k) {
        TriggerRecord r = s.brute_force(pairs);
        r.pulse_index = pulses[k];
        records.push_back(r);
    }
    return records;
}

DelayPointCounts CoincidenceSimulator::count_brute_force(double delay_ps, std::uint64_t n_triggers, std::uint64_t seed,
                                                         unsigned workers) const {
    const std::uint64_t n_batches = batch_count(n_triggers);
    std::vector<DelayPointCounts> partial(n_batches);
    parallel_for(n_batches, workers, [&](std::size_t b) {
        Sampler s(*this, derive_seed(seed, 0xB7, b), delay_ps);
        std::discrete_distribution<int> pairs(pmf_.begin(), pmf_.end());
        const std::uint64_t len = std::min(kTriggersPerBatch, n_triggers - b * kTriggersPerBatch);
        for (std::uint64_t k = 0; k < len; ++k) partial[b].add(s.brute_force(pairs));
    });
    DelayPointCounts total;
    for (const auto& p : partial) total.merge(p);
    total.delay_ps = delay_ps;
    total.expected_cross_probability = cross_probability(delay_ps);
    return total;
}

DelayPointCounts CoincidenceSimulator::count(double delay_ps, std::uint64_t n_triggers, std::uint64_t seed,
                                             unsigned workers) const {
    const std::uint64_t n_batches = batch_count(n_triggers);
    std::vector<DelayPointCounts> partial(n_batches);
    parallel_for(n_batches, workers, [&](std::size_t b) {
        Sampler s(*this, derive_seed(seed, 0x5C, b), delay_ps);
        const std::uint64_t len = std::min(kTriggersPerBatch, n_triggers - b * kTriggersPerBatch);
        const auto clicks_a = s.bernoulli_positions(herald_click_[0], len);
        const auto clicks_b = s.bernoulli_positions(herald_click_[1], len);

        std::discrete_distribution<int> click_a, silent_a, click_b, silent_b;
        if (herald_click_[0] > 0.0) click_a = {posterior_click_[0].begin(), posterior_click_[0].end()};
        if (herald_click_[0] < 1.0) silent_a = {posterior_silent_[0].begin(), posterior_silent_[0].end()};
        if (herald_click_[1] > 0.0) click_b = {posterior_click_[1].begin(), posterior_click_[1].end()};
        if (herald_click_[1] < 1.0) silent_b = {posterior_silent_[1].begin(), posterior_silent_[1].end()};

        DelayPointCounts& out = partial[b];
        std::size_t ia = 0;
        std::size_t ib = 0;
        while (ia < clicks_a.size() || ib < clicks_b.size()) {
            const std::uint64_t at_a = ia < clicks_a.size() ? clicks_a[ia] : len;
            const std::uint64_t at_b = ib < clicks_b.size() ? clicks_b[ib] : len;
            const bool ha = at_a <= at_b;
            const bool hb = at_b <= at_a;
            const int na = ha ? click_a(s.rng) : silent_a(s.rng);
            const int nb = hb ? click_b(s.rng) : silent_b(s.rng);
            out.add(s.resolve(na, nb, ha, hb));
            ia += ha;
            ib += hb;
        }
        // Every other trigger in the batch had no herald click.
        out.n_triggers = len;
    });
    DelayPointCounts total;
    for (const auto& p : partial) total.merge(p);
    total.delay_ps = delay_ps;
    total.expected_cross_probability = cross_probability(delay_ps);
    return total;
}

DipScanResult CoincidenceSimulator::dip_scan(std::span<const double> delays_ps, std::uint64_t n_triggers_per_point,
                                             std::uint64_t seed, unsigned workers) const {
    if (delays_ps.size() < 5) throw DomainError("dip scan needs at least 5 delay points");
    if (!std::is_sorted(delays_ps.begin(), delays_ps.end())) throw DomainError("dip scan delays must be sorted");
    const FilterSpec& f = config_.source_a.interfering_filter();
    const double expected_width = coherence_time(f.fwhm_pm, f.center_wavelength_nm);
    if (delays_ps.back() - delays_ps.front() < 4.0 * expected_width) {
        throw DomainError("dip scan must span at least 4 coherence times of the interfering filter");
    }
    if (n_triggers_per_point == 0) throw DomainError("dip scan needs at least one trigger per point");

    DipScanResult result;
    result.n_triggers_per_point = n_triggers_per_point;
    result.trigger_rate_mhz = config_.trigger.effective_rate_mhz();
    result.model_visibility = spectra_.visibility(config_.synchronization_jitter_sigma_ps);
    result.points.reserve(delays_ps.size());
    for (std::size_t i = 0; i < delays_ps.size(); ++i) {
        result.points.push_back(count(delays_ps[i], n_triggers_per_point, derive_seed(seed, 0xD1, i), workers));
    }
    attach_fits(result);
    return result;
}

void attach_fits(DipScanResult& result) {
    std::vector<double> delays;
    std::vector<double> raw;
    std::vector<double> net;
    for (const auto& p : result.points) {
        delays.push_back(p.delay_ps);
        raw.push_back(static_cast<double>(p.fourfold));
        net.push_back(static_cast<double>(p.net_fourfold()));
    }
    const auto fit = [&](const std::vector<double>& y, std::optional<DipFit>& out, std::string& error) {
        try {
            out = fit_dip(delays, y, poisson_errors(y));
            error.clear();
        } catch (const Error& e) {
            out.reset();
            error = e.what();
        }
    };
    fit(raw, result.fit_raw, result.fit_raw_error);
    fit(net, result.fit_net, result.fit_net_error);
}

std::vector<TriggerRecord> simulate_trigger(const LinkConfig& link, double delay_ps, std::size_t n_triggers,
                                            std::uint64_t seed) {
    return CoincidenceSimulator(link).simulate_trigger(delay_ps, n_triggers, seed);
}

DipScanResult dip_scan(const LinkConfig& link, std::span<const double> delays_ps, std::uint64_t n_triggers_per_point,
                       std::uint64_t seed, unsigned workers) {
    return CoincidenceSimulator(link).dip_scan(delays_ps, n_triggers_per_point, seed, workers);
}

}  // namespace homsim
