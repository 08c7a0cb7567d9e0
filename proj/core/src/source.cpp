#include "homsim/source.hpp"

#include <algorithm>
#include <array>

#include "homsim/errors.hpp"
#include "homsim/units.hpp"

namespace homsim {

namespace {

constexpr std::size_t kPumpGridPoints = 257;

double filter_width(const FilterSpec& f) { return angular_bandwidth(f.fwhm_pm, f.center_wavelength_nm); }

double filter_center(const FilterSpec& f) { return angular_frequency_from_wavelength(f.center_wavelength_nm); }

}  // namespace

void SourceConfig::validate() const {
    if (!(pump_center_nm > 0.0) || !(pump_fwhm_pm > 0.0)) throw DomainError("pump center and FWHM must be positive");
    if (!(pump_duration_ps >= 0.0)) throw DomainError("pump duration must be non-negative");
    if (!(phase_matching.center_nm > 0.0) || !(phase_matching.fwhm_nm > 0.0)) {
        throw DomainError("phase-matching center and FWHM must be positive");
    }
    signal_filter.validate();
    idler_filter.validate();
}

JointSpectralAmplitude build_source_jsa(const SourceConfig& source, const FrequencyGrid& interfering_grid,
                                        const FrequencyGrid& herald_grid) {
    source.validate();
    const double pump_width = angular_bandwidth(source.pump_fwhm_pm, source.pump_center_nm);
    const FrequencyGrid pump_grid(angular_frequency_from_wavelength(source.pump_center_nm), 8.0 * pump_width,
                                  kPumpGridPoints);
    const SpectralAmplitude pump =
        make_pump_spectrum(pump_grid, source.pump_center_nm, source.pump_fwhm_pm, source.pump_shape);

    const bool signal_interferes = source.interfering_arm == Arm::signal;
    const FrequencyGrid& signal_grid = signal_interferes ? interfering_grid : herald_grid;
    const FrequencyGrid& idler_grid = signal_interferes ? herald_grid : interfering_grid;
    return apply_filters(build_jsa(pump, source.phase_matching, signal_grid, idler_grid), source.signal_filter,
                         source.idler_filter);
}

LinkSpectra build_link_spectra(const SourceConfig& a, const SourceConfig& b, const GridConfig& grid) {
    a.validate();
    b.validate();
    if (!(grid.span_factor > 0.0)) throw DomainError("grid span factor must be positive");
    const std::array widths{filter_width(a.signal_filter), filter_width(a.idler_filter), filter_width(b.signal_filter),
                            filter_width(b.idler_filter)};
    const double span = 2.0 * grid.span_factor * *std::max_element(widths.begin(), widths.end());

    const double interfering_center =
        0.5 * (filter_center(a.interfering_filter()) + filter_center(b.interfering_filter()));
    const FrequencyGrid interfering_grid(interfering_center, span, grid.n_points);
    const FrequencyGrid herald_a(filter_center(a.herald_filter()), span, grid.n_points);
    const FrequencyGrid herald_b(filter_center(b.herald_filter()), span, grid.n_points);

    auto make = [&](const SourceConfig& s, const FrequencyGrid& herald) {
        JointSpectralAmplitude jsa = build_source_jsa(s, interfering_grid, herald);
        DensityMatrix rho = heralded_state(jsa, s.interfering_arm);
        return SourceSpectra{std::move(jsa), std::move(rho)};
    };
    SourceSpectra sa = make(a, herald_a);
    SourceSpectra sb = make(b, herald_b);
    DelayOverlap overlap(sa.interfering_state, sb.interfering_state);
    return {std::move(sa), std::move(sb), std::move(overlap)};
}

}  // namespace homsim
