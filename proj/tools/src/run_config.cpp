#include "homsim/cli/run_config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace homsim::cli {

namespace {

using enum ValueKind;

constexpr std::array kKeys{
    KeySpec{"pump_center_nm", number, "768", {}},
    KeySpec{"pump_fwhm_pm", number, "250", {}},
    KeySpec{"pump_shape", word, "gaussian", "gaussian|lorentzian|flattop"},
    KeySpec{"pump_duration_ps", number, "1.2", {}},
    KeySpec{"phase_matching_center_nm", number, "1536", {}},
    KeySpec{"phase_matching_fwhm_nm", number, "50", {}},
    KeySpec{"phase_matching_shape", word, "gaussian", "gaussian|lorentzian|flattop"},
    KeySpec{"signal_filter_center_nm", number, "1534.6", {}},
    KeySpec{"signal_filter_fwhm_pm", number, "250", {}},
    KeySpec{"signal_filter_shape", word, "gaussian", "gaussian|lorentzian|flattop"},
    KeySpec{"signal_filter_peak_transmission", number, "1", {}},
    KeySpec{"idler_filter_center_nm", number, "1537.4", {}},
    KeySpec{"idler_filter_fwhm_pm", number, "800", {}},
    KeySpec{"idler_filter_shape", word, "gaussian", "gaussian|lorentzian|flattop"},
    KeySpec{"idler_filter_peak_transmission", number, "1", {}},
    KeySpec{"interfering_arm", word, "signal", "signal|idler"},
    KeySpec{"source_b_filter_detuning_pm", number, "0", {}},
    KeySpec{"grid_points", integer, "512", {}},
    KeySpec{"grid_span_factor", number, "4", {}},
    KeySpec{"interfering_delay_ps", number, "0", {}},
    KeySpec{"sync_jitter_sigma_ps", number, "0", {}},
    KeySpec{"mean_pairs_per_pulse", number, "0.05", {}},
    KeySpec{"number_distribution", word, "thermal", "thermal|poissonian|fixed"},
    KeySpec{"max_photon_number", integer, "8", {}},
    KeySpec{"detector_efficiency", number, "0.1", {}},
    KeySpec{"dark_prob_per_ns", number, "1e-05", {}},
    KeySpec{"gate_width_ns", number, "2.5", {}},
    KeySpec{"detector_timing_jitter_ps", number, "0", {}},
    KeySpec{"coincidence_window_ns", number, "2.5", {}},
    KeySpec{"transmission_herald_a", number, "1", {}},
    KeySpec{"transmission_interfering_a", number, "1", {}},
    KeySpec{"transmission_interfering_b", number, "1", {}},
    KeySpec{"transmission_herald_b", number, "1", {}},
    KeySpec{"laser_rep_rate_mhz", number, "76", {}},
    KeySpec{"max_trigger_rate_mhz", number, "1", {}},
    KeySpec{"trigger_rate_mhz", number, "0.6", {}},
    KeySpec{"trigger_division", word, "random_divider", "random_divider|fixed_divider"},
    KeySpec{"brightness_pairs_per_s_per_pm_per_mw", number, "1600", {}},
    KeySpec{"brightness_filter_fwhm_pm", number, "250", {}},
    KeySpec{"pump_power_mw", number, "1", {}},
    KeySpec{"target_twofold_per_hour", number, "4000", {}},
    KeySpec{"rng_seed", integer, "1", {}},
    KeySpec{"uncertainty_combination", word, "quadrature", "quadrature|linear"},
};

const KeySpec* find_key(std::string_view key) noexcept {
    for (const auto& k : kKeys) {
        if (k.key == key) return &k;
    }
    return nullptr;
}

std::string_view trim(std::string_view s) noexcept {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool allowed_word(std::string_view allowed, std::string_view value) {
    while (!allowed.empty()) {
        const auto bar = allowed.find('|');
        if (allowed.substr(0, bar) == value) return true;
        if (bar == std::string_view::npos) break;
        allowed.remove_prefix(bar + 1);
    }
    return false;
}

std::string canonical(const KeySpec& spec, std::string_view value) {
    const std::string key(spec.key);
    switch (spec.kind) {
        case number: {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || end != value.data() + value.size() || !std::isfinite(v)) {
                throw ConfigurationError(key + ": expected a finite number, got '" + std::string(value) + "'");
            }
            return format_number(v);
        }
        case integer: {
            std::int64_t v = 0;
            const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || end != value.data() + value.size()) {
                throw ConfigurationError(key + ": expected an integer, got '" + std::string(value) + "'");
            }
            return std::to_string(v);
        }
        case word:
            if (!allowed_word(spec.allowed, value)) {
                throw ConfigurationError(key + ": '" + std::string(value) + "' is not one of " +
                                         std::string(spec.allowed));
            }
            return std::string(value);
    }
    return std::string(value);
}

}  // namespace

std::span<const KeySpec> config_keys() noexcept { return kKeys; }

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc{} ? std::string(buf.data(), end) : std::string("nan");
}

RunConfig::RunConfig() {
    for (const auto& k : kKeys) values_.emplace(std::string(k.key), std::string(k.default_value));
}

RunConfig RunConfig::parse(std::string_view text) {
    RunConfig c;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigurationError("line " + std::to_string(line_no) + ": expected key = value");
        }
        try {
            c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigurationError& e) {
            throw ConfigurationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RunConfig::set(std::string_view key, std::string_view value) {
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) throw ConfigurationError("unknown key '" + std::string(key) + "'");
    values_.find(key)->second = canonical(*spec, value);
}

const std::string& RunConfig::raw(std::string_view key, ValueKind kind) const {
    const KeySpec* spec = find_key(key);
    if (spec == nullptr || spec->kind != kind) throw ConfigurationError("no such key '" + std::string(key) + "'");
    return values_.find(key)->second;
}

double RunConfig::number(std::string_view key) const {
    const std::string& s = raw(key, ValueKind::number);
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

std::int64_t RunConfig::integer(std::string_view key) const {
    const std::string& s = raw(key, ValueKind::integer);
    std::int64_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

const std::string& RunConfig::word(std::string_view key) const { return raw(key, ValueKind::word); }

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : serialize()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

SourceConfig to_source_config(const RunConfig& c) {
    SourceConfig s;
    s.pump_center_nm = c.number("pump_center_nm");
    s.pump_fwhm_pm = c.number("pump_fwhm_pm");
    s.pump_shape = parse_line_shape(c.word("pump_shape"));
    s.pump_duration_ps = c.number("pump_duration_ps");
    s.phase_matching = {c.number("phase_matching_center_nm"), c.number("phase_matching_fwhm_nm"),
                        parse_line_shape(c.word("phase_matching_shape"))};
    s.signal_filter = {c.number("signal_filter_center_nm"), c.number("signal_filter_fwhm_pm"),
                       parse_line_shape(c.word("signal_filter_shape")), c.number("signal_filter_peak_transmission")};
    s.idler_filter = {c.number("idler_filter_center_nm"), c.number("idler_filter_fwhm_pm"),
                      parse_line_shape(c.word("idler_filter_shape")), c.number("idler_filter_peak_transmission")};
    s.interfering_arm = c.word("interfering_arm") == "signal" ? Arm::signal : Arm::idler;
    return s;
}

LinkConfig to_link_config(const RunConfig& c) {
    LinkConfig link;
    link.source_a = to_source_config(c);
    link.source_b = link.source_a;
    FilterSpec& detuned = link.source_b.interfering_arm == Arm::signal ? link.source_b.signal_filter
                                                                       : link.source_b.idler_filter;
    detuned.center_wavelength_nm += c.number("source_b_filter_detuning_pm") * 1e-3;

    const std::int64_t points = c.integer("grid_points");
    if (points < 16) throw ConfigurationError("grid_points: must be at least 16");
    link.grid = {static_cast<std::size_t>(points), c.number("grid_span_factor")};
    link.interfering_delay_ps = c.number("interfering_delay_ps");
    link.synchronization_jitter_sigma_ps = c.number("sync_jitter_sigma_ps");

    link.emission.mean_pairs_per_pulse = c.number("mean_pairs_per_pulse");
    link.emission.distribution = parse_number_distribution(c.word("number_distribution"));
    link.emission.max_photon_number = static_cast<int>(c.integer("max_photon_number"));

    DetectorModel det;
    det.quantum_efficiency = c.number("detector_efficiency");
    det.dark_prob_per_ns = c.number("dark_prob_per_ns");
    det.gate_width_ns = c.number("gate_width_ns");
    det.timing_jitter_sigma_ps = c.number("detector_timing_jitter_ps");
    link.counting.detectors.fill(det);
    link.counting.coincidence_window_ns = c.number("coincidence_window_ns");
    link.counting.arm_transmissions = {c.number("transmission_herald_a"), c.number("transmission_interfering_a"),
                                       c.number("transmission_interfering_b"), c.number("transmission_herald_b")};

    link.trigger.laser_rep_rate_mhz = c.number("laser_rep_rate_mhz");
    link.trigger.max_trigger_rate_mhz = c.number("max_trigger_rate_mhz");
    link.trigger.trigger_rate_mhz = c.number("trigger_rate_mhz");
    link.trigger.division = parse_division_mode(c.word("trigger_division"));
    link.rng_seed = static_cast<std::uint64_t>(c.integer("rng_seed"));
    link.validate();
    return link;
}

BrightnessSpec to_brightness_spec(const RunConfig& c) {
    BrightnessSpec b;
    b.pairs_per_s_per_pm_per_mw = c.number("brightness_pairs_per_s_per_pm_per_mw");
    b.filter_fwhm_pm = c.number("brightness_filter_fwhm_pm");
    b.pump_power_mw = c.number("pump_power_mw");
    b.repetition_rate_mhz = c.number("laser_rep_rate_mhz");
    b.validate();
    return b;
}

RegimeTableOptions to_regime_options(const RunConfig& c) {
    RegimeTableOptions o;
    o.combine = parse_uncertainty_combination(c.word("uncertainty_combination"));
    const std::int64_t points = c.integer("grid_points");
    if (points < 16) throw ConfigurationError("grid_points: must be at least 16");
    o.grid = {static_cast<std::size_t>(points), c.number("grid_span_factor")};
    return o;
}

}  // namespace homsim::cli
