#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homsim/source.hpp"

namespace homsim {

enum class Regime { cw, ps, fs };

[[nodiscard]] std::string_view to_string(Regime r) noexcept;
[[nodiscard]] Regime parse_regime(std::string_view name);

/// How pulse duration (or detector jitter) and synchronization jitter add up.
enum class UncertaintyCombination { quadrature, linear };

[[nodiscard]] std::string_view to_string(UncertaintyCombination c) noexcept;
[[nodiscard]] UncertaintyCombination parse_uncertainty_combination(std::string_view name);

struct ConditionResult {
    bool ok = false;
    double margin = 0.0;  // coherence time / total uncertainty
    double total_uncertainty_ps = 0.0;
};

/// Interference needs the coherence time to cover the timing uncertainty.
[[nodiscard]] ConditionResult evaluate_condition(double coherence_time_ps, double time_uncertainty_ps,
                                                 double sync_jitter_ps,
                                                 UncertaintyCombination combine = UncertaintyCombination::quadrature);

/// One comparison entry as given; unset optionals are missing data.
struct RegimeConfig {
    std::string label;
    int n_lasers = 1;
    std::optional<Regime> regime;
    /// Pulse duration, or detector timing jitter for CW.
    std::optional<double> time_uncertainty_ps;
    /// Synchronization jitter between two lasers, read as a FWHM.
    double sync_jitter_ps = 0.0;
    std::optional<double> filter_fwhm_pm;
    std::optional<double> wavelength_nm;

    std::optional<double> quoted_coherence_time_ps;
    std::optional<double> quoted_brightness;  // pairs/s/pm/mW
    std::optional<double> quoted_rate_pairs_per_s;
    std::optional<double> quoted_raw_visibility;
    std::optional<double> quoted_net_visibility;

    /// Full source description; without it no visibility is predicted.
    std::optional<SourceConfig> spectral;
};

struct RegimeRow {
    std::string label;
    int n_lasers = 1;
    Regime regime = Regime::ps;
    double time_uncertainty_ps = 0.0;
    double sync_jitter_ps = 0.0;
    double filter_fwhm_pm = 0.0;
    double wavelength_nm = 0.0;

    double coherence_time_ps = 0.0;
    double total_uncertainty_ps = 0.0;
    bool condition_ok = false;
    double condition_margin = 0.0;
    /// Pulsed rows: factor by which a filter narrower than the transform
    /// limit of the pulse cuts the pair rate (>= 1). CW rows: 1.
    double rate_penalty = 1.0;
    /// Unset when the row lacks the spectral data to build a JSA.
    std::optional<double> predicted_visibility;

    std::optional<double> quoted_coherence_time_ps;
    std::optional<double> quoted_brightness;
    std::optional<double> quoted_rate_pairs_per_s;
    std::optional<double> quoted_raw_visibility;
    std::optional<double> quoted_net_visibility;

    /// Non-empty when the row could not be evaluated; other computed
    /// fields are then meaningless.
    std::string error;

    [[nodiscard]] bool ok() const noexcept { return error.empty(); }
};

struct RegimeTableOptions {
    UncertaintyCombination combine = UncertaintyCombination::quadrature;
    GridConfig grid{};
    bool predict_visibility = true;
};

[[nodiscard]] std::vector<RegimeRow> build_table(std::span<const RegimeConfig> rows, const RegimeTableOptions& options = {});

/// Maximum visibility of two identical copies of the row's source with the
/// row's synchronization jitter smearing the dip. Unset when the row has no
/// spectral description.
[[nodiscard]] std::optional<double> predict_visibility_for_row(const RegimeConfig& row, const GridConfig& grid = {});

/// The seven published comparison entries; only the ps PPLN row carries a
/// full spectral description.
[[nodiscard]] std::vector<RegimeConfig> published_comparison_rows();

}  // namespace homsim
