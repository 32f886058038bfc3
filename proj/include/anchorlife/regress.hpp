#pragma once

#include "anchorlife/error.hpp"
#include "anchorlife/student_t.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace anchorlife
{

/// Straight-line least-squares fit y = slope * x + intercept.
///
/// Parameters are ordered (slope, intercept) everywhere, including the
/// covariance matrix and parameter draws.
template <typename Scalar>
struct LinearFit
{
    using Params = Eigen::Matrix<Scalar, 2, 1>;
    using Covariance = Eigen::Matrix<Scalar, 2, 2>;

    Scalar slope{0};
    Scalar intercept{0};
    int n_points{0};
    Scalar residual_variance{0};
    Scalar xbar{0};
    Scalar sxx{0};
    Covariance covariance = Covariance::Zero();

    Scalar operator()(Scalar x) const { return slope * x + intercept; }
    Params params() const { return Params(slope, intercept); }
    Scalar residual_sd() const { return std::sqrt(residual_variance); }
};

using LinearFitd = LinearFit<double>;

enum class IntervalKind
{
    Prediction, ///< band for a new observation
    Confidence, ///< band for the regression mean
};

/// Ordinary least squares of y on x.
template <typename DerivedX, typename DerivedY>
LinearFit<typename DerivedX::Scalar> ols_fit(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y)
{
    using Scalar = typename DerivedX::Scalar;
    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
    const Eigen::Index n = x.size();
    if (n < 3)
        throw Error(ErrorCode::TooFewPoints, "straight-line fit needs at least 3 points");

    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    const Array xa = x.derived().template cast<Scalar>().array();
    const Array ya = y.derived().template cast<Scalar>().array();
    const Scalar xbar = xa.mean();
    const Scalar ybar = ya.mean();
    const Array dx = xa - xbar;
    const Array dy = ya - ybar;
    const Scalar sxx = dx.square().sum();
    if (!(sxx > Scalar(0)))
        throw Error(ErrorCode::DegenerateX, "all x values are equal");
    const Scalar sxy = (dx * dy).sum();

    LinearFit<Scalar> fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.n_points = static_cast<int>(n);
    fit.xbar = xbar;
    fit.sxx = sxx;
    const Scalar sse = (dy - fit.slope * dx).square().sum();
    fit.residual_variance = sse / Scalar(n - 2);
    const Scalar s2 = fit.residual_variance;
    fit.covariance(0, 0) = s2 / sxx;
    fit.covariance(0, 1) = -xbar * s2 / sxx;
    fit.covariance(1, 0) = fit.covariance(0, 1);
    fit.covariance(1, 1) = s2 * (Scalar(1) / Scalar(n) + xbar * xbar / sxx);
    return fit;
}

/// Half-width of the band around the fitted line at x0.
template <typename Scalar>
Scalar interval_half_width(const LinearFit<Scalar>& fit, Scalar x0, double level,
                           IntervalKind kind = IntervalKind::Prediction)
{
    if (!(level > 0.0 && level < 1.0))
        throw Error(ErrorCode::InvalidValue, "interval level must lie in (0, 1)");
    if (fit.residual_variance == Scalar(0))
        return Scalar(0);
    const Scalar t = Scalar(stats::student_t_quantile(0.5 * (1.0 + level), fit.n_points - 2));
    const Scalar dx = x0 - fit.xbar;
    Scalar leverage = Scalar(1) / Scalar(fit.n_points) + dx * dx / fit.sxx;
    if (kind == IntervalKind::Prediction)
        leverage += Scalar(1);
    return t * fit.residual_sd() * std::sqrt(leverage);
}

/// (lo, hi) band for a new observation (default) or for the mean response at x0.
template <typename Scalar>
std::pair<Scalar, Scalar> prediction_interval(const LinearFit<Scalar>& fit, Scalar x0, double level,
                                              IntervalKind kind = IntervalKind::Prediction)
{
    const Scalar center = fit(x0);
    const Scalar half = interval_half_width(fit, x0, level, kind);
    return {center - half, center + half};
}

} // namespace anchorlife
