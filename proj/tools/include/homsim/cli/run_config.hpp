#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "homsim/coincidence_mc.hpp"
#include "homsim/errors.hpp"
#include "homsim/photon_statistics.hpp"
#include "homsim/regime.hpp"

namespace homsim::cli {

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

enum class ValueKind { number, integer, word };

struct KeySpec {
    std::string_view key;
    ValueKind kind;
    std::string_view default_value;
    /// For words: '|'-separated allowed values.
    std::string_view allowed;
};

/// Every accepted key with its default.
[[nodiscard]] std::span<const KeySpec> config_keys() noexcept;

/// Flat `key = value` document. Lines starting with '#' are comments.
/// Every key is always present; missing keys keep their defaults.
class RunConfig {
public:
    RunConfig();

    [[nodiscard]] static RunConfig parse(std::string_view text);
    [[nodiscard]] static RunConfig load(const std::filesystem::path& path);

    /// Validates and stores the canonical form of `value`.
    void set(std::string_view key, std::string_view value);

    [[nodiscard]] double number(std::string_view key) const;
    [[nodiscard]] std::int64_t integer(std::string_view key) const;
    [[nodiscard]] const std::string& word(std::string_view key) const;

    /// Canonical text, keys sorted; parse(serialize()) == *this.
    [[nodiscard]] std::string serialize() const;
    /// FNV-1a of serialize().
    [[nodiscard]] std::uint64_t hash() const;
    [[nodiscard]] std::string hash_hex() const;

    [[nodiscard]] const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

    bool operator==(const RunConfig&) const = default;

private:
    [[nodiscard]] const std::string& raw(std::string_view key, ValueKind kind) const;

    std::map<std::string, std::string, std::less<>> values_;
};

[[nodiscard]] SourceConfig to_source_config(const RunConfig& c);
[[nodiscard]] LinkConfig to_link_config(const RunConfig& c);
[[nodiscard]] BrightnessSpec to_brightness_spec(const RunConfig& c);
[[nodiscard]] RegimeTableOptions to_regime_options(const RunConfig& c);

/// Shortest text that parses back to the same double.
[[nodiscard]] std::string format_number(double value);

}  // namespace homsim::cli
