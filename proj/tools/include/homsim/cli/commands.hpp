#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "homsim/cli/run_config.hpp"

namespace homsim::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNonConvergence = 3, kExitIo = 4 };

struct DelayRange {
    double min_ps = -30.0;
    double max_ps = 30.0;
    int n = 30;

    [[nodiscard]] std::vector<double> values() const;
};

/// "min:max:n", e.g. "-30:30:30".
[[nodiscard]] DelayRange parse_delay_range(std::string_view text);

struct DipOptions {
    bool monte_carlo = false;
    DelayRange delays{};
    std::uint64_t triggers = 100'000'000;
    std::optional<std::uint64_t> seed;  // defaults to rng_seed
    unsigned workers = 0;
};

struct RegimesOptions {
    enum class Format { text, csv } format = Format::text;
    /// Optional CSV of rows replacing the built-in comparison table.
    std::string table_path;
};

/// Each writes its report to `out` and returns an ExitCode.
int cmd_purity(const RunConfig& config, std::ostream& out);
/// CSV to `out`, JSON summary with fits to `summary`.
int cmd_dip(const RunConfig& config, const DipOptions& options, std::ostream& out, std::ostream& summary);
int cmd_rates(const RunConfig& config, std::ostream& out);
int cmd_regimes(const RunConfig& config, const RegimesOptions& options, std::ostream& out);

/// Rows from a CSV with header label,n_lasers,regime,time_uncertainty_ps,
/// sync_jitter_ps,filter_fwhm_pm,wavelength_nm; empty cells are missing.
[[nodiscard]] std::vector<RegimeConfig> parse_regime_table(std::string_view csv);

/// Worker cap from SIM_THREADS (0 = all cores).
[[nodiscard]] unsigned workers_from_environment();

/// Full command line, including argv[0].
int run(int argc, char** argv);

}  // namespace homsim::cli
