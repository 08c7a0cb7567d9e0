#pragma once

#include <array>
#include <cstddef>

namespace homsim {

/// Gated, non-photon-number-resolving detector.
struct DetectorModel {
    double quantum_efficiency = 0.1;
    double dark_prob_per_ns = 1e-5;
    double gate_width_ns = 2.5;
    /// Kept for completeness; detection is resolved per gate, so it does
    /// not enter pulsed coincidence counting.
    double timing_jitter_sigma_ps = 0.0;

    void validate() const;

    /// Probability of a dark click inside a coincidence window (bounded by
    /// the gate).
    [[nodiscard]] double dark_probability(double window_ns) const noexcept;
};

/// Detector slots: heralds of each source and the two beam-splitter outputs.
enum DetectorSlot : std::size_t { kHeraldA = 0, kOutput1 = 1, kOutput2 = 2, kHeraldB = 3 };

/// Transmission slots upstream of the detectors.
enum ArmSlot : std::size_t { kArmHeraldA = 0, kArmInterferingA = 1, kArmInterferingB = 2, kArmHeraldB = 3 };

/// Detectors, arm transmissions and coincidence window of the four-fold
/// setup. Interfering-arm losses act before the beam splitter.
struct CountingSetup {
    std::array<DetectorModel, 4> detectors{};
    std::array<double, 4> arm_transmissions{1.0, 1.0, 1.0, 1.0};
    double coincidence_window_ns = 2.5;

    void validate() const;

    [[nodiscard]] double dark_probability(std::size_t slot) const noexcept {
        return detectors[slot].dark_probability(coincidence_window_ns);
    }
    /// Probability that one photon reaching the herald arm is detected.
    [[nodiscard]] double herald_detection(std::size_t herald_slot, std::size_t arm_slot) const noexcept {
        return detectors[herald_slot].quantum_efficiency * arm_transmissions[arm_slot];
    }
};

}  // namespace homsim
