#include "homsim/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "homsim/coincidence_model.hpp"
#include "homsim/units.hpp"

#ifndef HOMSIM_VERSION
#define HOMSIM_VERSION "0.0.0"
#endif

namespace homsim::cli {

namespace {

using nlohmann::ordered_json;

std::string num(double v) { return format_number(v); }

ordered_json metadata(const RunConfig& config, std::string_view command, std::optional<std::uint64_t> seed) {
    ordered_json m;
    m["version"] = HOMSIM_VERSION;
    m["command"] = command;
    m["config_hash"] = config.hash_hex();
    if (seed) m["seed"] = *seed;
    ordered_json keys = ordered_json::object();
    for (const auto& [k, v] : config.values()) keys[k] = v;
    m["config"] = std::move(keys);
    return m;
}

void write_csv_metadata(std::ostream& out, const RunConfig& config, std::string_view command,
                        std::optional<std::uint64_t> seed) {
    out << "# homsim " << HOMSIM_VERSION << "\n";
    out << "# command " << command << "\n";
    out << "# config_hash " << config.hash_hex() << "\n";
    if (seed) out << "# seed " << *seed << "\n";
    for (const auto& [k, v] : config.values()) out << "# config " << k << " = " << v << "\n";
}

ordered_json fit_json(const std::optional<DipFit>& fit, const std::string& error) {
    if (!fit) return ordered_json{{"converged", false}, {"error", error}};
    return ordered_json{{"converged", true},
                        {"visibility", fit->value.visibility},
                        {"visibility_error", fit->error.visibility},
                        {"fwhm_ps", fit->value.fwhm_ps},
                        {"fwhm_error_ps", fit->error.fwhm_ps},
                        {"center_ps", fit->value.center_ps},
                        {"center_error_ps", fit->error.center_ps},
                        {"baseline", fit->value.baseline},
                        {"baseline_error", fit->error.baseline},
                        {"chi_squared", fit->chi_squared},
                        {"degrees_of_freedom", fit->degrees_of_freedom},
                        {"iterations", fit->iterations},
                        {"flagged", fit->flagged}};
}

ordered_json rates_json(const PairRates& r) {
    return ordered_json{{"twofold_a_per_s", r.twofold_a_per_s},
                        {"twofold_b_per_s", r.twofold_b_per_s},
                        {"fourfold_per_s", r.fourfold_per_s},
                        {"accidental_fourfold_per_s", r.accidental_fourfold_per_s}};
}

std::optional<double> parse_cell(std::string_view cell, const std::string& column) {
    if (cell.empty()) return std::nullopt;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || end != cell.data() + cell.size()) {
        throw ConfigurationError("regime table: bad number '" + std::string(cell) + "' in column " + column);
    }
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    while (true) {
        const auto comma = line.find(',');
        std::string_view cell = line.substr(0, comma);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return cells;
}

std::string opt_cell(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + path);
    f << content;
    if (!f) throw IoError("failed writing output file " + path);
}

}  // namespace

std::vector<double> DelayRange::values() const {
    if (n < 1) throw ConfigurationError("--delays: need at least one point");
    if (n == 1) return {min_ps};
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = min_ps + (max_ps - min_ps) * k / (n - 1);
    return v;
}

DelayRange parse_delay_range(std::string_view text) {
    std::vector<std::string> fields;
    std::string_view rest = text;
    for (int i = 0; i < 3; ++i) {
        const auto colon = rest.find(':');
        fields.emplace_back(rest.substr(0, colon));
        if (colon == std::string_view::npos) {
            rest = {};
            break;
        }
        rest.remove_prefix(colon + 1);
    }
    if (fields.size() != 3 || !rest.empty()) throw ConfigurationError("--delays: expected min:max:n");
    DelayRange r;
    const auto parse_double = [](const std::string& s, double& out) {
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && end == s.data() + s.size();
    };
    const auto [end, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), r.n);
    if (!parse_double(fields[0], r.min_ps) || !parse_double(fields[1], r.max_ps) || ec != std::errc{} ||
        end != fields[2].data() + fields[2].size() || r.n < 1 || !(r.max_ps >= r.min_ps)) {
        throw ConfigurationError("--delays: expected min:max:n with min <= max and n >= 1");
    }
    return r;
}

unsigned workers_from_environment() {
    const char* env = std::getenv("SIM_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    const std::string_view s(env);
    unsigned v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        throw ConfigurationError("SIM_THREADS must be a non-negative integer");
    }
    return v;
}

int cmd_purity(const RunConfig& config, std::ostream& out) {
    const LinkConfig link = to_link_config(config);
    const LinkSpectra spectra = build_link_spectra(link.source_a, link.source_b, link.grid);

    ordered_json report;
    report["metadata"] = metadata(config, "purity", std::nullopt);
    const auto source_json = [](const SourceSpectra& s) {
        const SchmidtSpectrum schmidt = schmidt_decompose(s.jsa);
        ordered_json j;
        ordered_json lambdas = ordered_json::array();
        for (std::size_t k = 0; k < std::min<std::size_t>(10, schmidt.coefficients.size()); ++k) {
            lambdas.push_back(schmidt.coefficients[k]);
        }
        j["schmidt_coefficients"] = std::move(lambdas);
        j["schmidt_number"] = schmidt.schmidt_number();
        j["purity"] = schmidt.purity();
        j["heralded_state_purity"] = s.interfering_state.purity();
        j["filtered_pair_fraction"] = s.jsa.norm_squared();
        return j;
    };
    report["source_a"] = source_json(spectra.a);
    report["source_b"] = source_json(spectra.b);
    report["max_visibility"] = spectra.visibility(link.synchronization_jitter_sigma_ps);
    report["coincidence_probability_at_zero_delay"] =
        spectra.overlap.coincidence_probability(link.interfering_delay_ps, link.synchronization_jitter_sigma_ps);
    out << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_dip(const RunConfig& config, const DipOptions& options, std::ostream& out, std::ostream& summary) {
    const LinkConfig link = to_link_config(config);
    const std::vector<double> delays = options.delays.values();
    if (options.triggers == 0) throw ConfigurationError("--triggers must be positive");
    const CoincidenceSimulator sim(link);
    const std::uint64_t seed = options.seed.value_or(link.rng_seed);

    ordered_json report;
    report["metadata"] = metadata(config, "dip", options.monte_carlo ? std::optional(seed) : std::nullopt);
    report["mode"] = options.monte_carlo ? "monte_carlo" : "analytic";
    report["triggers_per_point"] = options.triggers;
    report["model_visibility"] = sim.spectra().visibility(link.synchronization_jitter_sigma_ps);
    report["predicted_raw_visibility"] =
        predict_raw_visibility(sim.spectra().visibility(link.synchronization_jitter_sigma_ps), link.emission,
                               link.counting);

    std::ostringstream csv;
    write_csv_metadata(csv, config, "dip", options.monte_carlo ? std::optional(seed) : std::nullopt);
    csv << "# mode " << (options.monte_carlo ? "monte_carlo" : "analytic") << "\n";
    csv << "# triggers_per_point " << options.triggers << "\n";

    int code = kExitOk;
    if (!options.monte_carlo) {
        const double n = static_cast<double>(options.triggers);
        csv << "delay_ps,coincidence_probability,fourfold,twofold_a,twofold_b,accidentals\n";
        for (const double d : delays) {
            const double q = sim.cross_probability(d);
            const CoincidenceProbabilities p = enumerate_coincidences(link.emission, link.counting, q);
            csv << num(d) << ',' << num(0.5 * q) << ',' << num(n * p.fourfold) << ',' << num(n * p.twofold_a) << ','
                << num(n * p.twofold_b) << ',' << num(n * p.fourfold_accidental) << '\n';
        }
    } else {
        if (delays.size() < 5) throw ConfigurationError("--delays: Monte Carlo scan needs at least 5 points");
        const DipScanResult scan = sim.dip_scan(delays, options.triggers, seed, options.workers);
        csv << "delay_ps,fourfold,twofold_a,twofold_b,accidentals,n_triggers,single_pair_events,single_pair_cross,"
               "expected_cross_probability\n";
        for (const auto& p : scan.points) {
            csv << num(p.delay_ps) << ',' << p.fourfold << ',' << p.twofold_a << ',' << p.twofold_b << ','
                << p.accidental_fourfold << ',' << p.n_triggers << ',' << p.single_pair_events << ','
                << p.single_pair_cross << ',' << num(p.expected_cross_probability) << '\n';
        }
        report["trigger_rate_mhz"] = scan.trigger_rate_mhz;
        report["fit_raw"] = fit_json(scan.fit_raw, scan.fit_raw_error);
        report["fit_net"] = fit_json(scan.fit_net, scan.fit_net_error);
        report["fit_failed"] = scan.fit_failed();
        if (scan.fit_failed()) code = kExitNonConvergence;
    }
    out << csv.str();
    summary << report.dump(2) << "\n";
    return code;
}

int cmd_rates(const RunConfig& config, std::ostream& out) {
    const LinkConfig link = to_link_config(config);
    const BrightnessSpec brightness = to_brightness_spec(config);
    const double rate_mhz = link.trigger.effective_rate_mhz();
    const double target = config.number("target_twofold_per_hour") / 3600.0;

    ordered_json report;
    report["metadata"] = metadata(config, "rates", std::nullopt);
    report["mean_pairs_per_pulse"] = link.emission.mean_pairs_per_pulse;
    report["mean_pairs_per_pulse_from_brightness"] = mean_pairs_per_pulse(brightness);
    report["trigger_rate_mhz"] = rate_mhz;
    report["rates"] = rates_json(effective_pair_rate(link.counting, rate_mhz, link.emission));
    EmissionModel from_brightness = link.emission;
    from_brightness.mean_pairs_per_pulse = mean_pairs_per_pulse(brightness);
    report["rates_at_brightness_mean"] = rates_json(effective_pair_rate(link.counting, rate_mhz, from_brightness));
    report["target_twofold_per_s"] = target;
    try {
        const ExcessLossFit fit = fit_excess_transmission(link.counting, rate_mhz, link.emission, target);
        report["fitted_excess_transmission"] = fit.transmission;
        report["fitted_excess_loss_db"] = -10.0 * std::log10(fit.transmission);
        report["rates_with_fitted_excess_loss"] = rates_json(fit.rates);
    } catch (const DomainError& e) {
        report["fitted_excess_transmission"] = nullptr;
        report["fit_error"] = e.what();
    }
    out << report.dump(2) << "\n";
    return kExitOk;
}

std::vector<RegimeConfig> parse_regime_table(std::string_view csv) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(csv)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        lines.push_back(line);
    }
    std::vector<RegimeConfig> rows;
    if (lines.empty()) return rows;

    static const std::vector<std::string> known{
        "label",         "n_lasers",       "regime",           "time_uncertainty_ps", "sync_jitter_ps",
        "filter_fwhm_pm", "wavelength_nm", "quoted_coherence_time_ps", "quoted_brightness",
        "quoted_rate_pairs_per_s", "quoted_raw_visibility", "quoted_net_visibility"};
    const std::vector<std::string> header = split_csv_line(lines.front());
    for (const auto& h : header) {
        if (std::find(known.begin(), known.end(), h) == known.end()) {
            throw ConfigurationError("regime table: unknown column '" + h + "'");
        }
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> cells = split_csv_line(lines[i]);
        if (cells.size() > header.size()) {
            throw ConfigurationError("regime table: row " + std::to_string(i) + " has too many cells");
        }
        std::map<std::string, std::string> cell;
        for (std::size_t c = 0; c < cells.size(); ++c) cell[header[c]] = cells[c];
        const auto get = [&](const std::string& name) { return parse_cell(cell[name], name); };

        RegimeConfig r;
        r.label = cell["label"];
        if (const auto n = get("n_lasers")) r.n_lasers = static_cast<int>(*n);
        if (!cell["regime"].empty()) r.regime = parse_regime(cell["regime"]);
        r.time_uncertainty_ps = get("time_uncertainty_ps");
        r.sync_jitter_ps = get("sync_jitter_ps").value_or(0.0);
        r.filter_fwhm_pm = get("filter_fwhm_pm");
        r.wavelength_nm = get("wavelength_nm");
        r.quoted_coherence_time_ps = get("quoted_coherence_time_ps");
        r.quoted_brightness = get("quoted_brightness");
        r.quoted_rate_pairs_per_s = get("quoted_rate_pairs_per_s");
        r.quoted_raw_visibility = get("quoted_raw_visibility");
        r.quoted_net_visibility = get("quoted_net_visibility");
        rows.push_back(std::move(r));
    }
    return rows;
}

int cmd_regimes(const RunConfig& config, const RegimesOptions& options, std::ostream& out) {
    std::vector<RegimeConfig> configs;
    if (options.table_path.empty()) {
        configs = published_comparison_rows();
        // The one row with a full spectral description follows the run config.
        for (auto& c : configs) {
            if (c.spectral) c.spectral = to_source_config(config);
        }
    } else {
        std::ifstream f(options.table_path);
        if (!f) throw IoError("cannot read regime table " + options.table_path);
        std::ostringstream ss;
        ss << f.rdbuf();
        configs = parse_regime_table(ss.str());
    }
    const std::vector<RegimeRow> rows = build_table(configs, to_regime_options(config));

    const auto vis = [](const RegimeRow& r) {
        return r.predicted_visibility ? num(*r.predicted_visibility) : std::string("not_computable");
    };
    if (options.format == RegimesOptions::Format::csv) {
        write_csv_metadata(out, config, "regimes", std::nullopt);
        out << "label,n_lasers,regime,time_uncertainty_ps,sync_jitter_ps,filter_fwhm_pm,wavelength_nm,"
               "coherence_time_ps,quoted_coherence_time_ps,total_uncertainty_ps,condition_ok,condition_margin,"
               "rate_penalty,predicted_visibility,quoted_brightness,quoted_rate_pairs_per_s,quoted_raw_visibility,"
               "quoted_net_visibility,error\n";
        for (const auto& r : rows) {
            out << r.label << ',' << r.n_lasers << ',';
            if (r.ok()) {
                out << to_string(r.regime) << ',' << num(r.time_uncertainty_ps) << ',' << num(r.sync_jitter_ps) << ','
                    << num(r.filter_fwhm_pm) << ',' << num(r.wavelength_nm) << ',' << num(r.coherence_time_ps) << ','
                    << opt_cell(r.quoted_coherence_time_ps) << ',' << num(r.total_uncertainty_ps) << ','
                    << (r.condition_ok ? "true" : "false") << ',' << num(r.condition_margin) << ','
                    << num(r.rate_penalty) << ',' << vis(r) << ',';
            } else {
                out << ",,,,,," << opt_cell(r.quoted_coherence_time_ps) << ",,,,,,";
            }
            out << opt_cell(r.quoted_brightness) << ',' << opt_cell(r.quoted_rate_pairs_per_s) << ','
                << opt_cell(r.quoted_raw_visibility) << ',' << opt_cell(r.quoted_net_visibility) << ',' << r.error
                << '\n';
        }
        return kExitOk;
    }

    out << "homsim " << HOMSIM_VERSION << "  config " << config.hash_hex() << "  uncertainty "
        << config.word("uncertainty_combination") << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %6s %3s %12s %10s %10s %8s %11s %10s %4s %8s %8s %14s\n", "label", "lasers",
                  "reg", "t_unc[ps]", "jit[ps]", "filter[pm]", "lam[nm]", "tau_c[ps]", "quoted", "ok", "margin",
                  "penalty", "V_predicted");
    out << line;
    for (const auto& r : rows) {
        if (!r.ok()) {
            std::snprintf(line, sizeof line, "%-18s %6d  error: %s\n", r.label.c_str(), r.n_lasers, r.error.c_str());
            out << line;
            continue;
        }
        const std::string quoted = opt_cell(r.quoted_coherence_time_ps);
        std::snprintf(line, sizeof line, "%-18s %6d %3s %12.4g %10.4g %10.4g %8.4g %11.4g %10s %4s %8.3f %8.2f %14s\n",
                      r.label.c_str(), r.n_lasers, std::string(to_string(r.regime)).c_str(), r.time_uncertainty_ps,
                      r.sync_jitter_ps, r.filter_fwhm_pm, r.wavelength_nm, r.coherence_time_ps,
                      quoted.empty() ? "-" : quoted.c_str(), r.condition_ok ? "yes" : "no", r.condition_margin,
                      r.rate_penalty, vis(r).c_str());
        out << line;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Two-photon interference simulator for pulsed pair sources"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HOMSIM_VERSION);

    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "Run config (key = value); defaults when omitted");
        sub->add_option("--out,-o", out_path, "Output path (default: standard output)");
        sub->add_option("--set", overrides, "Override a config key, key=value")->take_all();
    };

    CLI::App* purity = app.add_subcommand("purity", "Schmidt spectrum, heralded purity, maximum visibility");
    common(purity);

    DipOptions dip_opts;
    std::string delays_text = "-30:30:30";
    std::string summary_path;
    std::uint64_t seed = 0;
    CLI::App* dip = app.add_subcommand("dip", "Dip scan, analytic or Monte Carlo");
    common(dip);
    auto* analytic_flag = dip->add_flag("--analytic", "Analytic model (default)");
    auto* mc_flag = dip->add_flag("--monte-carlo", dip_opts.monte_carlo, "Monte Carlo counting");
    analytic_flag->excludes(mc_flag);
    dip->add_option("--delays", delays_text, "Delay grid min:max:n in ps")->capture_default_str();
    dip->add_option("--triggers", dip_opts.triggers, "Triggers per delay point")->capture_default_str();
    auto* seed_opt = dip->add_option("--seed", seed, "RNG seed (default: rng_seed from the config)");
    dip->add_option("--summary", summary_path, "JSON summary path (default: standard error)");

    CLI::App* rates = app.add_subcommand("rates", "Pairs per pulse and detected rates");
    common(rates);

    RegimesOptions regime_opts;
    std::string format = "text";
    CLI::App* regimes = app.add_subcommand("regimes", "Timing-condition comparison table");
    common(regimes);
    regimes->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    regimes->add_option("--table", regime_opts.table_path, "CSV of rows replacing the built-in table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw ConfigurationError("--set expects key=value, got '" + o + "'");
            config.set(o.substr(0, eq), o.substr(eq + 1));
        }

        std::ostringstream out;
        int code = kExitOk;
        if (*purity) {
            code = cmd_purity(config, out);
        } else if (*dip) {
            dip_opts.delays = parse_delay_range(delays_text);
            if (*seed_opt) dip_opts.seed = seed;
            dip_opts.workers = workers_from_environment();
            std::ostringstream summary;
            code = cmd_dip(config, dip_opts, out, summary);
            if (summary_path.empty()) {
                std::cerr << summary.str();
            } else {
                write_output(summary_path, summary.str());
            }
        } else if (*rates) {
            code = cmd_rates(config, out);
        } else if (*regimes) {
            regime_opts.format = format == "csv" ? RegimesOptions::Format::csv : RegimesOptions::Format::text;
            code = cmd_regimes(config, regime_opts, out);
        }
        write_output(out_path, out.str());
        if (code == kExitNonConvergence) std::cerr << "homsim: dip fit did not converge\n";
        return code;
    } catch (const IoError& e) {
        std::cerr << "homsim: " << e.what() << "\n";
        return kExitIo;
    } catch (const FitConvergenceError& e) {
        std::cerr << "homsim: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const Error& e) {
        std::cerr << "homsim: config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace homsim::cli
