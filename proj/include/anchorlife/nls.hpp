#pragma once

#include "anchorlife/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorlife
{

struct NLSConfig
{
    double relative_sse_tolerance = 1e-10;
    int max_iterations = 200;
    double initial_damping = 1e-3;
    double max_damping = 1e16;
};

template <typename Scalar>
struct NLSFit
{
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Vector params;
    Matrix covariance;
    Scalar sse{0};
    int iterations{0};
    bool converged{false};
};

using NLSFitd = NLSFit<double>;

namespace detail
{

template <typename Scalar, typename Model, typename Vector>
Scalar sum_squared_residuals(const Model& model, const Vector& params, const Vector& x, const Vector& y,
                             Vector& residuals)
{
    for (Eigen::Index i = 0; i < x.size(); ++i)
        residuals(i) = model(params, x(i)) - y(i);
    return residuals.squaredNorm();
}

/// Forward-difference Jacobian of the residual vector.
template <typename Scalar, typename Model, typename Vector, typename Matrix>
void forward_jacobian(const Model& model, const Vector& params, const Vector& x, const Vector& residuals,
                      const Vector& y, Matrix& jac)
{
    Vector shifted = params;
    for (Eigen::Index j = 0; j < params.size(); ++j)
    {
        const Scalar h = std::max(Scalar(1e-8), Scalar(1e-8) * std::abs(params(j)));
        shifted(j) = params(j) + h;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            jac(i, j) = (model(shifted, x(i)) - y(i) - residuals(i)) / h;
        shifted(j) = params(j);
    }
}

} // namespace detail

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of the sum of
/// squared residuals `model(params, x_i) - y_i`.
///
/// `model` is any callable `Scalar(const Vector& params, Scalar x)`. A fit that
/// exhausts `max_iterations` is returned with `converged == false`.
template <typename Scalar, typename Model>
NLSFit<Scalar> nls_fit(const Model& model, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& init, const NLSConfig& config = {})
{
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
    const Eigen::Index n = x.size();
    const Eigen::Index k = init.size();
    if (n < k + 1)
        throw Error(ErrorCode::TooFewPoints, "need at least one residual degree of freedom");

    Vector params = init;
    Vector residuals(n);
    Scalar sse = detail::sum_squared_residuals<Scalar>(model, params, x, y, residuals);
    if (!std::isfinite(sse))
        throw Error(ErrorCode::NonFiniteModel, "model is not finite at the initial parameters");

    Matrix jac(n, k);
    Vector trial_residuals(n);
    Scalar damping = Scalar(config.initial_damping);
    bool converged = false;
    bool need_jacobian = true;
    int iter = 0;

    while (iter < config.max_iterations)
    {
        ++iter;
        if (sse <= std::numeric_limits<Scalar>::min())
        {
            converged = true;
            break;
        }
        if (need_jacobian)
        {
            detail::forward_jacobian<Scalar>(model, params, x, residuals, y, jac);
            need_jacobian = false;
        }
        const Matrix normal = jac.transpose() * jac;
        const Vector gradient = jac.transpose() * residuals;
        Matrix damped = normal;
        for (Eigen::Index j = 0; j < k; ++j)
            damped(j, j) += damping * std::max(normal(j, j), Scalar(1e-300));
        const Vector step = damped.ldlt().solve(-gradient);
        const Vector trial = params + step;
        const Scalar trial_sse = detail::sum_squared_residuals<Scalar>(model, trial, x, y, trial_residuals);

        if (std::isfinite(trial_sse) && trial_sse < sse)
        {
            const Scalar improvement = (sse - trial_sse) / sse;
            params = trial;
            residuals = trial_residuals;
            sse = trial_sse;
            damping = std::max(damping / Scalar(10), Scalar(1e-15));
            need_jacobian = true;
            if (improvement < Scalar(config.relative_sse_tolerance))
            {
                converged = true;
                break;
            }
        }
        else
        {
            damping *= Scalar(10);
            // No descent left at machine precision: the current point is the minimum.
            if (damping > Scalar(config.max_damping))
            {
                converged = true;
                break;
            }
        }
    }

    detail::forward_jacobian<Scalar>(model, params, x, residuals, y, jac);
    const Matrix normal = jac.transpose() * jac;
    Eigen::FullPivLU<Matrix> lu(normal);
    if (!lu.isInvertible())
        throw Error(ErrorCode::SingularJacobian, "J^T J is singular at the solution");

    NLSFit<Scalar> fit;
    fit.params = params;
    fit.sse = sse;
    fit.iterations = iter;
    fit.converged = converged;
    fit.covariance = (sse / Scalar(n - k)) * lu.inverse();
    return fit;
}

} // namespace anchorlife
