#include "homsim/regime.hpp"

#include <cmath>
#include <limits>

#include "homsim/errors.hpp"
#include "homsim/units.hpp"

namespace homsim {

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::cw: return "cw";
        case Regime::ps: return "ps";
        case Regime::fs: return "fs";
    }
    return "?";
}

Regime parse_regime(std::string_view name) {
    if (name == "cw") return Regime::cw;
    if (name == "ps") return Regime::ps;
    if (name == "fs") return Regime::fs;
    throw ConfigurationError("unknown regime '" + std::string(name) + "'");
}

std::string_view to_string(UncertaintyCombination c) noexcept {
    return c == UncertaintyCombination::quadrature ? "quadrature" : "linear";
}

UncertaintyCombination parse_uncertainty_combination(std::string_view name) {
    if (name == "quadrature") return UncertaintyCombination::quadrature;
    if (name == "linear") return UncertaintyCombination::linear;
    throw ConfigurationError("unknown uncertainty combination '" + std::string(name) + "'");
}

ConditionResult evaluate_condition(double coherence_time_ps, double time_uncertainty_ps, double sync_jitter_ps,
                                   UncertaintyCombination combine) {
    if (!(coherence_time_ps >= 0.0) || !(time_uncertainty_ps >= 0.0) || !(sync_jitter_ps >= 0.0)) {
        throw DomainError("timing condition needs non-negative inputs");
    }
    ConditionResult r;
    r.total_uncertainty_ps = combine == UncertaintyCombination::quadrature
                                 ? std::hypot(time_uncertainty_ps, sync_jitter_ps)
                                 : time_uncertainty_ps + sync_jitter_ps;
    r.ok = coherence_time_ps >= r.total_uncertainty_ps;
    r.margin = r.total_uncertainty_ps > 0.0 ? coherence_time_ps / r.total_uncertainty_ps
                                            : std::numeric_limits<double>::infinity();
    return r;
}

std::optional<double> predict_visibility_for_row(const RegimeConfig& row, const GridConfig& grid) {
    if (!row.spectral) return std::nullopt;
    if (!(row.sync_jitter_ps >= 0.0)) throw DomainError("sync jitter must be non-negative");
    const LinkSpectra link = build_link_spectra(*row.spectral, *row.spectral, grid);
    return link.visibility(row.sync_jitter_ps / kFwhmPerSigma);
}

namespace {

RegimeRow evaluate_row(const RegimeConfig& c, const RegimeTableOptions& options) {
    RegimeRow row;
    row.label = c.label;
    row.n_lasers = c.n_lasers;
    row.sync_jitter_ps = c.sync_jitter_ps;
    row.quoted_coherence_time_ps = c.quoted_coherence_time_ps;
    row.quoted_brightness = c.quoted_brightness;
    row.quoted_rate_pairs_per_s = c.quoted_rate_pairs_per_s;
    row.quoted_raw_visibility = c.quoted_raw_visibility;
    row.quoted_net_visibility = c.quoted_net_visibility;

    std::string missing;
    const auto need = [&](bool present, const char* name) {
        if (!present) missing += missing.empty() ? name : std::string(", ") + name;
    };
    need(c.regime.has_value(), "regime");
    need(c.time_uncertainty_ps.has_value(), "time_uncertainty_ps");
    need(c.filter_fwhm_pm.has_value(), "filter_fwhm_pm");
    need(c.wavelength_nm.has_value(), "wavelength_nm");
    if (!missing.empty()) {
        row.error = "missing " + missing;
        return row;
    }
    row.regime = *c.regime;
    row.time_uncertainty_ps = *c.time_uncertainty_ps;
    row.filter_fwhm_pm = *c.filter_fwhm_pm;
    row.wavelength_nm = *c.wavelength_nm;

    try {
        row.coherence_time_ps = coherence_time(row.filter_fwhm_pm, row.wavelength_nm);
        const ConditionResult cond =
            evaluate_condition(row.coherence_time_ps, row.time_uncertainty_ps, row.sync_jitter_ps, options.combine);
        row.condition_ok = cond.ok;
        row.condition_margin = cond.margin;
        row.total_uncertainty_ps = cond.total_uncertainty_ps;
        // A transform-limited pulse of duration t spans 0.44 lambda^2 / (c t);
        // the filter keeps roughly filter / pulse bandwidth = 1 / margin.
        if (row.regime != Regime::cw && row.time_uncertainty_ps > 0.0) {
            row.rate_penalty = std::max(1.0, row.coherence_time_ps / row.time_uncertainty_ps);
        }
        if (options.predict_visibility) row.predicted_visibility = predict_visibility_for_row(c, options.grid);
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

RegimeConfig row(std::string label, int lasers, Regime regime, double uncertainty_ps, double jitter_ps,
                 double filter_pm, double wavelength_nm, double quoted_tau_ps) {
    RegimeConfig c;
    c.label = std::move(label);
    c.n_lasers = lasers;
    c.regime = regime;
    c.time_uncertainty_ps = uncertainty_ps;
    c.sync_jitter_ps = jitter_ps;
    c.filter_fwhm_pm = filter_pm;
    c.wavelength_nm = wavelength_nm;
    c.quoted_coherence_time_ps = quoted_tau_ps;
    return c;
}

}  // namespace

std::vector<RegimeRow> build_table(std::span<const RegimeConfig> rows, const RegimeTableOptions& options) {
    std::vector<RegimeRow> out;
    out.reserve(rows.size());
    for (const auto& c : rows) out.push_back(evaluate_row(c, options));
    return out;
}

std::vector<RegimeConfig> published_comparison_rows() {
    std::vector<RegimeConfig> rows;

    auto& geneva_cw = rows.emplace_back(row("Geneva PPLN/w", 2, Regime::cw, 70.0, 0.0, 10.0, 1550.0, 350.0));
    geneva_cw.quoted_brightness = 0.9e3;
    geneva_cw.quoted_rate_pairs_per_s = 3e-3;
    geneva_cw.quoted_net_visibility = 0.77;

    auto& nice = rows.emplace_back(row("Nice PPLN/w", 1, Regime::ps, 1.2, 0.0, 250.0, 1550.0, 14.0));
    nice.quoted_brightness = 1.6e3;
    nice.quoted_rate_pairs_per_s = 3e-1;
    nice.quoted_raw_visibility = 0.93;
    nice.quoted_net_visibility = 0.99;
    nice.spectral = SourceConfig{};

    auto& atsugi = rows.emplace_back(row("Atsugi fiber", 1, Regime::ps, 19.0, 0.0, 200.0, 1550.0, 18.0));
    atsugi.quoted_rate_pairs_per_s = 2.0;
    atsugi.quoted_raw_visibility = 0.64;

    auto& bristol = rows.emplace_back(row("Bristol fiber", 1, Regime::ps, 1.5, 0.0, 300.0, 600.0, 1.8));
    bristol.quoted_rate_pairs_per_s = 4e-1;
    bristol.quoted_raw_visibility = 0.88;

    auto& geneva_fs = rows.emplace_back(row("Geneva bulk LBO", 1, Regime::fs, 0.200, 0.0, 5000.0, 1310.0, 0.500));
    geneva_fs.quoted_rate_pairs_per_s = 7e-1;
    geneva_fs.quoted_raw_visibility = 0.77;
    geneva_fs.quoted_net_visibility = 0.84;

    auto& beijing = rows.emplace_back(row("Beijing bulk BBO", 2, Regime::fs, 0.060, 0.002, 2800.0, 800.0, 0.335));
    beijing.quoted_brightness = 1.2e-2;
    beijing.quoted_rate_pairs_per_s = 3e-2;
    beijing.quoted_raw_visibility = 0.82;

    auto& vienna = rows.emplace_back(row("Vienna bulk BBO", 2, Regime::fs, 0.050, 0.260, 400.0, 800.0, 2.3));
    vienna.quoted_rate_pairs_per_s = 1e-2;
    vienna.quoted_raw_visibility = 0.96;

    return rows;
}

}  // namespace homsim
