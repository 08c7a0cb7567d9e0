#pragma once

#include "homsim/detection.hpp"
#include "homsim/photon_statistics.hpp"

namespace homsim {

/// Photon numbers per source enumerated exactly; beyond this the
/// contribution is below 1e-6 per trigger for mu <= 0.1.
inline constexpr int kEnumerationMaxPhotons = 4;

/// Per-trigger detection probabilities.
struct CoincidenceProbabilities {
    double fourfold = 0.0;
    /// Four-folds whose beam-splitter input is not one photon per source.
    double fourfold_accidental = 0.0;
    double twofold_a = 0.0;  // herald A and output 1
    double twofold_b = 0.0;  // herald B and output 2
    double herald_a = 0.0;
    double herald_b = 0.0;
};

/// Exhaustive enumeration of photon-number, loss and beam-splitter outcomes.
/// `cross_probability` is the chance that one photon from each source leaves
/// through different outputs: 2 P_c(delay), 1 for distinguishable photons.
[[nodiscard]] CoincidenceProbabilities enumerate_coincidences(const EmissionModel& model, const CountingSetup& setup,
                                                              double cross_probability);

/// The four-fold probability is affine in the cross probability q:
/// P4(q) = accidental + q * interfering.
struct FourfoldTerms {
    double accidental = 0.0;
    double interfering = 0.0;
};

[[nodiscard]] FourfoldTerms fourfold_terms(const EmissionModel& model, const CountingSetup& setup);

/// Raw visibility 1 - C(0)/C(inf) once the accidental floor is added to an
/// ideal dip of visibility `net_visibility`.
[[nodiscard]] double predict_raw_visibility(double net_visibility, const EmissionModel& model,
                                            const CountingSetup& setup);

/// Four-fold accidental rate in counts per second.
[[nodiscard]] double accidental_rate(const EmissionModel& model, const CountingSetup& setup, double trigger_rate_mhz);

struct PairRates {
    double twofold_a_per_s = 0.0;
    double twofold_b_per_s = 0.0;
    double fourfold_per_s = 0.0;
    double accidental_fourfold_per_s = 0.0;
};

/// Detected rates outside the dip (cross_probability = 1) unless told otherwise.
[[nodiscard]] PairRates effective_pair_rate(const CountingSetup& setup, double trigger_rate_mhz,
                                            const EmissionModel& model, double cross_probability = 1.0);

struct ExcessLossFit {
    double transmission = 1.0;  // applied on top of every arm transmission
    PairRates rates;
};

/// Single excess transmission, common to all four arms, that reproduces
/// `target_twofold_a_per_s`. Throws DomainError if unreachable in (0, 1].
[[nodiscard]] ExcessLossFit fit_excess_transmission(const CountingSetup& setup, double trigger_rate_mhz,
                                                    const EmissionModel& model, double target_twofold_a_per_s);

}  // namespace homsim
