#pragma once

#include <cstddef>

#include "homsim/hom.hpp"
#include "homsim/joint_spectrum.hpp"
#include "homsim/spectral_amplitude.hpp"

namespace homsim {

/// Spectral description of one filtered pair source.
struct SourceConfig {
    double pump_center_nm = 768.0;
    double pump_fwhm_pm = 250.0;
    LineShape pump_shape = LineShape::gaussian;
    /// Pulse duration, used only as the time uncertainty of the timing
    /// condition; it is not reconciled with pump_fwhm_pm.
    double pump_duration_ps = 1.2;
    PhaseMatching phase_matching{};
    FilterSpec signal_filter{1534.6, 250.0, LineShape::gaussian, 1.0};
    FilterSpec idler_filter{1537.4, 800.0, LineShape::gaussian, 1.0};
    /// Photon sent to the beam splitter; its twin is the herald.
    Arm interfering_arm = Arm::signal;

    [[nodiscard]] const FilterSpec& interfering_filter() const noexcept {
        return interfering_arm == Arm::signal ? signal_filter : idler_filter;
    }
    [[nodiscard]] const FilterSpec& herald_filter() const noexcept {
        return interfering_arm == Arm::signal ? idler_filter : signal_filter;
    }

    void validate() const;
};

struct GridConfig {
    std::size_t n_points = 512;
    /// Each axis spans +/- span_factor times the widest filter FWHM.
    double span_factor = 4.0;
};

struct SourceSpectra {
    JointSpectralAmplitude jsa;  // filtered
    DensityMatrix interfering_state;
};

/// Both sources' filtered states on a common interfering-photon grid.
struct LinkSpectra {
    SourceSpectra a;
    SourceSpectra b;
    DelayOverlap overlap;

    [[nodiscard]] double visibility(double jitter_sigma_ps = 0.0) const noexcept {
        return overlap.visibility(jitter_sigma_ps);
    }
};

/// Filtered JSA of `source` on the given interfering/herald grids.
[[nodiscard]] JointSpectralAmplitude build_source_jsa(const SourceConfig& source, const FrequencyGrid& interfering_grid,
                                                      const FrequencyGrid& herald_grid);

[[nodiscard]] LinkSpectra build_link_spectra(const SourceConfig& a, const SourceConfig& b, const GridConfig& grid = {});

}  // namespace homsim
