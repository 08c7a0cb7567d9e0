#pragma once

#include <cstddef>

namespace homsim {

/// Uniform angular-frequency axis, symmetric about its center.
///
/// Sample k sits at center + (k - (n - 1) / 2) * step with
/// step = span / (n - 1), so the first and last samples are exactly
/// center -/+ span / 2.
class FrequencyGrid {
public:
    static constexpr std::size_t kMinPoints = 16;

    FrequencyGrid(double center_rad_s, double span_rad_s, std::size_t n_points);

    /// Grid centered on `center_nm` covering `span_pm` of wavelength
    /// (converted at first order about the center).
    static FrequencyGrid around_wavelength(double center_nm, double span_pm, std::size_t n_points);

    [[nodiscard]] double center() const noexcept { return center_; }
    [[nodiscard]] double span() const noexcept { return span_; }
    [[nodiscard]] double step() const noexcept { return span_ / static_cast<double>(n_ - 1); }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double front() const noexcept { return center_ - 0.5 * span_; }
    [[nodiscard]] double back() const noexcept { return center_ + 0.5 * span_; }

    [[nodiscard]] double omega(std::size_t k) const noexcept {
        return center_ + (static_cast<double>(k) - 0.5 * static_cast<double>(n_ - 1)) * step();
    }
    /// Offset of sample k from the grid center.
    [[nodiscard]] double offset(std::size_t k) const noexcept { return omega(k) - center_; }

    [[nodiscard]] bool contains(double omega) const noexcept {
        return omega >= front() && omega <= back();
    }

    /// Same center, span and size up to a relative tolerance.
    [[nodiscard]] bool matches(const FrequencyGrid& other, double rel_tol = 1e-12) const noexcept;

private:
    double center_;
    double span_;
    std::size_t n_;
};

}  // namespace homsim
