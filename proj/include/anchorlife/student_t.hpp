#pragma once

namespace anchorlife::stats
{

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Inverse of I_x(a, b) in x, by bisection on [0, 1].
double incomplete_beta_inverse(double a, double b, double p);

/// Student-t CDF with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Quantile of the Student-t distribution: the t with P(T <= t) = p.
double student_t_quantile(double p, double dof);

} // namespace anchorlife::stats
