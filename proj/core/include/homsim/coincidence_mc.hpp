#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homsim/detection.hpp"
#include "homsim/dip_fit.hpp"
#include "homsim/photon_statistics.hpp"
#include "homsim/source.hpp"
#include "homsim/trigger.hpp"

namespace homsim {

/// Full experiment: two sources, one beam splitter, four gated detectors.
struct LinkConfig {
    SourceConfig source_a{};
    SourceConfig source_b{};
    GridConfig grid{};
    /// Fixed path-length offset added to every scanned delay.
    double interfering_delay_ps = 0.0;
    /// Gaussian relative timing jitter between the sources, per trigger.
    double synchronization_jitter_sigma_ps = 0.0;
    EmissionModel emission{};
    CountingSetup counting{};
    TriggerConfig trigger{};
    std::uint64_t rng_seed = 1;

    void validate() const;
};

/// What happened on one accepted trigger.
struct TriggerRecord {
    std::uint64_t pulse_index = 0;
    int pairs_a = 0;
    int pairs_b = 0;
    int bs_photons_a = 0;  // photons reaching the beam splitter
    int bs_photons_b = 0;
    std::array<int, 2> port_photons{0, 0};
    std::uint8_t fired = 0;  // bit i set when DetectorSlot i clicked

    [[nodiscard]] bool clicked(std::size_t slot) const noexcept { return (fired >> slot) & 1U; }
    /// Exactly one photon from each source at the beam splitter.
    [[nodiscard]] bool single_pair() const noexcept { return bs_photons_a == 1 && bs_photons_b == 1; }
    [[nodiscard]] bool cross_output() const noexcept { return port_photons[0] > 0 && port_photons[1] > 0; }
    [[nodiscard]] bool fourfold() const noexcept { return fired == 0x0F; }
    [[nodiscard]] bool twofold_a() const noexcept { return clicked(kHeraldA) && clicked(kOutput1); }
    [[nodiscard]] bool twofold_b() const noexcept { return clicked(kHeraldB) && clicked(kOutput2); }
    [[nodiscard]] bool accidental_fourfold() const noexcept { return fourfold() && !single_pair(); }
};

/// Tallies at one delay.
struct DelayPointCounts {
    double delay_ps = 0.0;
    std::uint64_t n_triggers = 0;
    std::uint64_t fourfold = 0;
    std::uint64_t twofold_a = 0;
    std::uint64_t twofold_b = 0;
    std::uint64_t accidental_fourfold = 0;
    /// Triggers with one photon per source at the beam splitter, and how
    /// many of those left through different outputs. Counted over the
    /// triggers the sampler resolves, i.e. those with a herald click.
    std::uint64_t single_pair_events = 0;
    std::uint64_t single_pair_cross = 0;
    /// Model cross probability 2 P_c averaged over synchronization jitter.
    double expected_cross_probability = 0.0;

    void add(const TriggerRecord& r) noexcept;
    void merge(const DelayPointCounts& other) noexcept;
    [[nodiscard]] std::uint64_t net_fourfold() const noexcept { return fourfold - accidental_fourfold; }
};

struct DipScanResult {
    std::vector<DelayPointCounts> points;
    std::uint64_t n_triggers_per_point = 0;
    double trigger_rate_mhz = 0.0;
    /// Visibility of the spectral model at zero delay, including jitter.
    double model_visibility = 0.0;
    std::optional<DipFit> fit_raw;
    std::optional<DipFit> fit_net;
    std::string fit_raw_error;
    std::string fit_net_error;

    [[nodiscard]] bool fit_failed() const noexcept { return !fit_raw || !fit_net; }
};

/// Triggers per independent RNG batch. Batches are the unit of parallel
/// work, so results do not depend on the worker count.
inline constexpr std::uint64_t kTriggersPerBatch = std::uint64_t{1} << 24;

class CoincidenceSimulator {
public:
    explicit CoincidenceSimulator(LinkConfig config);

    [[nodiscard]] const LinkConfig& config() const noexcept { return config_; }
    [[nodiscard]] const LinkSpectra& spectra() const noexcept { return spectra_; }

    /// 2 P_c at the given scan delay, averaged over synchronization jitter.
    [[nodiscard]] double cross_probability(double delay_ps) const noexcept;

    /// Brute-force per-trigger simulation, one record per accepted trigger.
    [[nodiscard]] std::vector<TriggerRecord> simulate_trigger(double delay_ps, std::size_t n_triggers,
                                                              std::uint64_t seed) const;

    /// Brute-force tallies without storing records.
    [[nodiscard]] DelayPointCounts count_brute_force(double delay_ps, std::uint64_t n_triggers, std::uint64_t seed,
                                                     unsigned workers = 0) const;

    /// Same process as count_brute_force, sampled by skipping to triggers
    /// with a herald click (geometric gaps) and drawing photon numbers from
    /// their posteriors. Triggers without a herald click cannot contribute
    /// to any monitored coincidence.
    [[nodiscard]] DelayPointCounts count(double delay_ps, std::uint64_t n_triggers, std::uint64_t seed,
                                         unsigned workers = 0) const;

    /// Scan with an independent seed per point plus raw and net fits. Requires at
    /// least 5 delays spanning 4 coherence times of the interfering filter.
    [[nodiscard]] DipScanResult dip_scan(std::span<const double> delays_ps, std::uint64_t n_triggers_per_point,
                                         std::uint64_t seed, unsigned workers = 0) const;

private:
    struct Sampler;

    LinkConfig config_;
    LinkSpectra spectra_;
    std::vector<double> pmf_;
    std::array<double, 2> herald_click_{0.0, 0.0};
    std::array<std::vector<double>, 2> posterior_click_;
    std::array<std::vector<double>, 2> posterior_silent_;
};

[[nodiscard]] std::vector<TriggerRecord> simulate_trigger(const LinkConfig& link, double delay_ps,
                                                          std::size_t n_triggers, std::uint64_t seed);

[[nodiscard]] DipScanResult dip_scan(const LinkConfig& link, std::span<const double> delays_ps,
                                     std::uint64_t n_triggers_per_point, std::uint64_t seed, unsigned workers = 0);

/// Raw and net (accidental-subtracted) fits of a scan's counts.
void attach_fits(DipScanResult& result);

}  // namespace homsim
