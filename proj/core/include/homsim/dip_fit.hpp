#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "homsim/errors.hpp"

namespace homsim {

struct DipParameters {
    double visibility = 0.0;
    double fwhm_ps = 0.0;
    double center_ps = 0.0;
    double baseline = 0.0;
};

/// Weighted least-squares fit of C(t) = B (1 - V exp(-(t - t0)^2 / (2 s^2))).
struct DipFit {
    DipParameters value;
    DipParameters error;
    /// Covariance of (B, V, t0, s).
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
    double chi_squared = 0.0;
    int degrees_of_freedom = 0;
    int iterations = 0;
    /// Visibility outside [0, 1].
    bool flagged = false;
};

class FitConvergenceError : public Error {
public:
    FitConvergenceError(const std::string& what, DipFit best) : Error(what), best_(std::move(best)) {}
    [[nodiscard]] const DipFit& best_iterate() const noexcept { return best_; }

private:
    DipFit best_;
};

inline constexpr int kDipFitMaxIterations = 200;
inline constexpr double kDipFitGradientTolerance = 1e-8;
/// Search box for V; results outside [0, 1] are flagged.
inline constexpr double kDipFitMinVisibility = -0.1;
inline constexpr double kDipFitMaxVisibility = 1.1;

/// Requires at least 5 points and strictly positive errors. Converges to a
/// scaled gradient norm below 1e-8 within 200 iterations or throws
/// FitConvergenceError holding the best iterate.
[[nodiscard]] DipFit fit_dip(std::span<const double> delays_ps, std::span<const double> counts,
                             std::span<const double> errors);

/// Poisson error bars sqrt(count), at least 1.
[[nodiscard]] std::vector<double> poisson_errors(std::span<const double> counts);

/// Model value at `delay_ps`.
[[nodiscard]] double dip_model(const DipParameters& p, double delay_ps) noexcept;

}  // namespace homsim
