#include "homsim/dip_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace homsim {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;

// Parameter vector order: B, V, t0, s.
using Vec4 = Eigen::Vector4d;

struct Problem {
    std::span<const double> t;
    std::span<const double> y;
    std::span<const double> sigma;
    Vec4 lower;
    Vec4 upper;

    [[nodiscard]] double chi2(const Vec4& p) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = (y[i] - model(p, t[i])) / sigma[i];
            sum += r * r;
        }
        return sum;
    }

    static double model(const Vec4& p, double t) {
        const double x = (t - p[2]) / p[3];
        return p[0] * (1.0 - p[1] * std::exp(-0.5 * x * x));
    }

    /// Jacobian of the weighted residuals (y - f) / sigma w.r.t. p, negated
    /// so that J^T J is the usual normal matrix and J^T r the descent direction.
    void linearize(const Vec4& p, Eigen::MatrixXd& jac, Eigen::VectorXd& res) const {
        const auto n = static_cast<Eigen::Index>(t.size());
        jac.resize(n, 4);
        res.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double x = (t[k] - p[2]) / p[3];
            const double g = std::exp(-0.5 * x * x);
            const double w = 1.0 / sigma[k];
            res[i] = (y[k] - p[0] * (1.0 - p[1] * g)) * w;
            jac(i, 0) = (1.0 - p[1] * g) * w;
            jac(i, 1) = -p[0] * g * w;
            jac(i, 2) = -p[0] * p[1] * g * x / p[3] * w;
            jac(i, 3) = -p[0] * p[1] * g * x * x / p[3] * w;
        }
    }

    /// Half the Hessian of chi2: J^T J minus the residual-weighted model
    /// curvature. Gauss-Newton alone converges slowly when the residuals
    /// are large next to a shallow dip.
    [[nodiscard]] Eigen::Matrix4d hessian(const Vec4& p, const Eigen::MatrixXd& jac, const Eigen::VectorXd& res) const {
        Eigen::Matrix4d h = jac.transpose() * jac;
        const double b = p[0];
        const double v = p[1];
        const double s = p[3];
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double x = (t[k] - p[2]) / s;
            const double g = std::exp(-0.5 * x * x);
            const double rw = res[static_cast<Eigen::Index>(k)] / sigma[k];
            Eigen::Matrix4d d2;
            d2(0, 0) = 0.0;
            d2(0, 1) = -g;
            d2(0, 2) = -v * g * x / s;
            d2(0, 3) = -v * g * x * x / s;
            d2(1, 1) = 0.0;
            d2(1, 2) = -b * g * x / s;
            d2(1, 3) = -b * g * x * x / s;
            d2(2, 2) = -b * v * g * (x * x - 1.0) / (s * s);
            d2(2, 3) = -b * v * g * x * (x * x - 2.0) / (s * s);
            d2(3, 3) = -b * v * g * x * x * (x * x - 3.0) / (s * s);
            h -= rw * d2.selfadjointView<Eigen::Upper>().toDenseMatrix();
        }
        return h;
    }

    [[nodiscard]] Vec4 clamp(Vec4 p) const {
        for (int j = 0; j < 4; ++j) p[j] = std::clamp(p[j], lower[j], upper[j]);
        return p;
    }

    [[nodiscard]] bool pinned(const Vec4& p, const Eigen::Vector4d& grad, int j) const {
        return (p[j] <= lower[j] && grad[j] < 0.0) || (p[j] >= upper[j] && grad[j] > 0.0);
    }

    /// Largest cosine between the residual vector and a Jacobian column,
    /// skipping components pinned against an active bound. Invariant under
    /// rescaling of counts and parameters.
    [[nodiscard]] double scaled_gradient(const Vec4& p, const Eigen::MatrixXd& jac, const Eigen::VectorXd& res) const {
        const Eigen::Vector4d grad = jac.transpose() * res;
        const double r = std::max(1.0, res.norm());
        double norm = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double col = jac.col(j).norm();
            if (pinned(p, grad, j) || !(col > 0.0)) continue;
            norm = std::max(norm, std::abs(grad[j]) / (col * r));
        }
        return norm;
    }
};

Vec4 initial_guess(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    // Baseline from the outer third of the points by distance to the minimum.
    const auto min_it = std::min_element(y.begin(), y.end());
    const auto i_min = static_cast<std::size_t>(min_it - y.begin());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(t[a] - t[i_min]) > std::abs(t[b] - t[i_min]);
    });
    const std::size_t n_outer = std::max<std::size_t>(2, n / 3);
    double baseline = 0.0;
    for (std::size_t k = 0; k < n_outer; ++k) baseline += y[order[k]];
    baseline /= static_cast<double>(n_outer);
    if (!(baseline > 0.0)) baseline = std::max(1e-12, *std::max_element(y.begin(), y.end()));

    const double depth = baseline - *min_it;
    const double vis = std::clamp(depth / baseline, 0.0, 1.0);

    // Width from the half-depth crossing nearest the minimum on each side.
    const double half = baseline - 0.5 * depth;
    double left = t.front();
    double right = t.back();
    for (std::size_t k = i_min; k-- > 0;) {
        if (y[k] >= half) {
            left = t[k];
            break;
        }
    }
    for (std::size_t k = i_min + 1; k < n; ++k) {
        if (y[k] >= half) {
            right = t[k];
            break;
        }
    }
    double s = (right - left) / kFwhmPerSigma;
    const double range = t.back() - t.front();
    if (!(s > 0.0)) s = range / 6.0;
    return {baseline, vis, t[i_min], s};
}

DipFit summarize(const Problem& prob, const Vec4& p, int iterations) {
    Eigen::MatrixXd jac;
    Eigen::VectorXd res;
    prob.linearize(p, jac, res);
    const Eigen::Matrix4d normal = jac.transpose() * jac;
    const Eigen::Matrix4d cov = normal.completeOrthogonalDecomposition().pseudoInverse();

    DipFit fit;
    fit.value = {p[1], kFwhmPerSigma * p[3], p[2], p[0]};
    fit.error = {std::sqrt(std::max(0.0, cov(1, 1))), kFwhmPerSigma * std::sqrt(std::max(0.0, cov(3, 3))),
                 std::sqrt(std::max(0.0, cov(2, 2))), std::sqrt(std::max(0.0, cov(0, 0)))};
    fit.covariance = cov;
    fit.chi_squared = res.squaredNorm();
    fit.degrees_of_freedom = static_cast<int>(prob.t.size()) - 4;
    fit.iterations = iterations;
    fit.flagged = p[1] < 0.0 || p[1] > 1.0;
    return fit;
}

}  // namespace

double dip_model(const DipParameters& p, double delay_ps) noexcept {
    const double s = p.fwhm_ps / kFwhmPerSigma;
    const double x = (delay_ps - p.center_ps) / s;
    return p.baseline * (1.0 - p.visibility * std::exp(-0.5 * x * x));
}

std::vector<double> poisson_errors(std::span<const double> counts) {
    std::vector<double> e(counts.size());
    std::transform(counts.begin(), counts.end(), e.begin(), [](double c) { return std::sqrt(std::max(c, 1.0)); });
    return e;
}

DipFit fit_dip(std::span<const double> delays_ps, std::span<const double> counts, std::span<const double> errors) {
    if (delays_ps.size() < 5) throw DomainError("dip fit needs at least 5 points");
    if (counts.size() != delays_ps.size() || errors.size() != delays_ps.size()) {
        throw DomainError("dip fit inputs have mismatched lengths");
    }
    if (!std::is_sorted(delays_ps.begin(), delays_ps.end())) throw DomainError("dip fit delays must be sorted");
    if (std::any_of(errors.begin(), errors.end(), [](double e) { return !(e > 0.0); })) {
        throw DomainError("dip fit error bars must be positive");
    }

    const double range = delays_ps.back() - delays_ps.front();
    double min_spacing = range;
    for (std::size_t i = 1; i < delays_ps.size(); ++i) {
        min_spacing = std::min(min_spacing, delays_ps[i] - delays_ps[i - 1]);
    }
    if (!(range > 0.0) || !(min_spacing > 0.0)) throw DomainError("dip fit delays must be distinct");

    const double y_max = std::max(1e-300, *std::max_element(counts.begin(), counts.end()));
    Problem prob{delays_ps, counts, errors,
                 Vec4{0.0, kDipFitMinVisibility, delays_ps.front(), 0.5 * min_spacing},
                 Vec4{100.0 * y_max, kDipFitMaxVisibility, delays_ps.back(), range}};

    Vec4 p = prob.clamp(initial_guess(delays_ps, counts));
    double chi2 = prob.chi2(p);
    double lambda = 1e-3;
    Eigen::MatrixXd jac;
    Eigen::VectorXd res;

    for (int iter = 0; iter < kDipFitMaxIterations; ++iter) {
        prob.linearize(p, jac, res);
        Eigen::Vector4d grad = jac.transpose() * res;
        if (prob.scaled_gradient(p, jac, res) < kDipFitGradientTolerance) return summarize(prob, p, iter);

        // Parameters held at a bound drop out of the step.
        const Eigen::Matrix4d gauss_newton = jac.transpose() * jac;
        Eigen::Matrix4d normal = prob.hessian(p, jac, res);
        if (normal.llt().info() != Eigen::Success) normal = gauss_newton;
        for (int j = 0; j < 4; ++j) {
            if (!prob.pinned(p, grad, j)) continue;
            grad[j] = 0.0;
            normal.row(j).setZero();
            normal.col(j).setZero();
            normal(j, j) = 1.0;
        }
        bool improved = false;
        while (lambda < 1e20) {
            Eigen::Matrix4d damped = normal;
            for (int j = 0; j < 4; ++j) damped(j, j) += lambda * std::max(gauss_newton(j, j), 1e-12);
            const Vec4 candidate = prob.clamp(p + damped.ldlt().solve(grad));
            const double chi2_candidate = prob.chi2(candidate);
            // Near the optimum chi2 changes below its own rounding; a tie is
            // then broken by the gradient.
            bool accept = chi2_candidate < chi2;
            if (!accept && chi2_candidate <= chi2 * (1.0 + 16.0 * std::numeric_limits<double>::epsilon())) {
                Eigen::MatrixXd jac_c;
                Eigen::VectorXd res_c;
                prob.linearize(candidate, jac_c, res_c);
                accept = prob.scaled_gradient(candidate, jac_c, res_c) < prob.scaled_gradient(p, jac, res);
            }
            if (accept) {
                const bool stalled = (candidate - p).cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + p.cwiseAbs().maxCoeff());
                p = candidate;
                chi2 = chi2_candidate;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = !stalled;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            prob.linearize(p, jac, res);
            if (prob.scaled_gradient(p, jac, res) < kDipFitGradientTolerance) return summarize(prob, p, iter);
            throw FitConvergenceError("dip fit stalled before reaching the gradient tolerance", summarize(prob, p, iter));
        }
    }
    throw FitConvergenceError("dip fit did not converge within 200 iterations",
                              summarize(prob, p, kDipFitMaxIterations));
}

}  // namespace homsim
