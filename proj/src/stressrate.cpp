#include "anchorlife/stressrate.hpp"

#include "anchorlife/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace anchorlife
{

namespace
{

// ln(sinh(z)) for z > 0 without overflow.
double log_sinh(double z)
{
    if (z > 20.0)
        return z + std::log1p(-std::exp(-2.0 * z)) - std::numbers::ln2;
    return std::log(std::sinh(z));
}

void check_points(const std::vector<StressRatePoint>& points, std::size_t minimum)
{
    if (points.size() < minimum)
        throw Error(ErrorCode::TooFewPoints,
                    "need at least " + std::to_string(minimum) + " stress/rate points, got " +
                        std::to_string(points.size()));
    for (const auto& p : points)
        if (!(p.stress > 0.0) || !(p.min_creep_rate > 0.0))
            throw Error(ErrorCode::InvalidValue, "stresses and rates must be positive");
}

} // namespace

std::string_view to_string(BondArea a) noexcept
{
    return a == BondArea::AsPrinted ? "as_printed" : "lateral_surface";
}

BondArea parse_bond_area(std::string_view s)
{
    if (s == "as_printed")
        return BondArea::AsPrinted;
    if (s == "lateral_surface")
        return BondArea::LateralSurface;
    throw Error(ErrorCode::InvalidValue, "unknown bond area mode '" + std::string(s) + "'");
}

std::string_view to_string(StressAxis a) noexcept
{
    return a == StressAxis::Absolute ? "absolute" : "load_level";
}

StressAxis parse_stress_axis(std::string_view s)
{
    if (s == "absolute")
        return StressAxis::Absolute;
    if (s == "load_level")
        return StressAxis::LoadLevel;
    throw Error(ErrorCode::InvalidValue, "unknown stress axis '" + std::string(s) + "'");
}

double bond_stress(double load_n, double radius_mm, double embedment_depth_mm, BondArea area)
{
    if (!(load_n > 0.0) || !(radius_mm > 0.0) || !(embedment_depth_mm > 0.0))
        throw Error(ErrorCode::NonPositiveInput, "load, radius and embedment depth must be positive");
    const double section = area == BondArea::AsPrinted ? radius_mm * radius_mm : 2.0 * radius_mm;
    return load_n / (std::numbers::pi * section * embedment_depth_mm);
}

PowerLawFit fit_power_law(const std::vector<StressRatePoint>& points, StressAxis axis)
{
    check_points(points, 3);
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd ln_stress(n), ln_rate(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        ln_stress(i) = std::log(points[static_cast<std::size_t>(i)].stress);
        ln_rate(i) = std::log(points[static_cast<std::size_t>(i)].min_creep_rate);
    }
    PowerLawFit out;
    out.fit = ols_fit(ln_stress, ln_rate);
    out.exponent_m = out.fit.slope;
    out.ln_prefactor = out.fit.intercept;
    out.axis = axis;
    return out;
}

double sinh_stress(double tau0, double c1, double c2, double rate)
{
    return tau0 * (1.0 + c1 * std::asinh(rate / c2));
}

double sinh_rate(double tau0, double c1, double c2, double stress)
{
    return c2 * std::sinh((stress / tau0 - 1.0) / c1);
}

SinhFit make_sinh(double tau0, double c1, double c2)
{
    SinhFit f;
    f.tau0 = tau0;
    f.c1 = c1;
    f.c2 = c2;
    f.nls.params = Eigen::Vector3d(std::log(tau0), std::log(c1), std::log(c2));
    f.nls.covariance = Eigen::Matrix3d::Zero();
    f.nls.converged = true;
    return f;
}

PowerLawFit make_power_law(double exponent_m, double ln_prefactor)
{
    PowerLawFit f;
    f.exponent_m = exponent_m;
    f.ln_prefactor = ln_prefactor;
    f.fit.slope = exponent_m;
    f.fit.intercept = ln_prefactor;
    return f;
}

SinhFit fit_sinh(const std::vector<StressRatePoint>& points, StressAxis axis, SinhResponse response,
                 const NLSConfig& config)
{
    check_points(points, 4);
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd stress(n), rate(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        stress(i) = points[static_cast<std::size_t>(i)].stress;
        rate(i) = points[static_cast<std::size_t>(i)].min_creep_rate;
    }

    // Starting point: plateau just under the weakest stress, c2 at the
    // geometric-mean rate, c1 from the two rate extremes.
    const double tau0_init = 0.9 * stress.minCoeff();
    const double c2_init = std::exp(rate.array().log().mean());
    Eigen::Index lo = 0, hi = 0;
    rate.minCoeff(&lo);
    rate.maxCoeff(&hi);
    double c1_sum = 0.0;
    int c1_count = 0;
    for (const Eigen::Index i : {lo, hi})
    {
        const double c1 = (stress(i) / tau0_init - 1.0) / std::asinh(rate(i) / c2_init);
        if (std::isfinite(c1) && c1 > 0.0)
        {
            c1_sum += c1;
            ++c1_count;
        }
    }
    const double c1_init = c1_count > 0 ? c1_sum / c1_count : 0.1;
    const Eigen::Vector3d init(std::log(tau0_init), std::log(c1_init), std::log(c2_init));

    SinhFit out;
    if (response == SinhResponse::Stress)
    {
        auto model = [](const Eigen::VectorXd& theta, double r) {
            return sinh_stress(std::exp(theta(0)), std::exp(theta(1)), std::exp(theta(2)), r);
        };
        out.nls = nls_fit<double>(model, rate, stress, init, config);
    }
    else
    {
        auto model = [](const Eigen::VectorXd& theta, double s) {
            const double z = (s / std::exp(theta(0)) - 1.0) / std::exp(theta(1));
            return z > 0.0 ? theta(2) + log_sinh(z) : std::numeric_limits<double>::quiet_NaN();
        };
        const Eigen::VectorXd ln_rate = rate.array().log();
        out.nls = nls_fit<double>(model, stress, ln_rate, init, config);
    }

    out.tau0 = std::exp(out.nls.params(0));
    out.c1 = std::exp(out.nls.params(1));
    out.c2 = std::exp(out.nls.params(2));
    const Eigen::Vector3d scale(out.tau0, out.c1, out.c2);
    out.covariance = scale.asDiagonal() * out.nls.covariance * scale.asDiagonal();
    out.n_points = static_cast<int>(n);
    out.axis = axis;
    return out;
}

double rate_at_stress(const PowerLawFit& fit, double stress)
{
    if (!(stress > 0.0))
        throw Error(ErrorCode::NonPositiveInput, "stress must be positive");
    return std::exp(fit.ln_prefactor + fit.exponent_m * std::log(stress));
}

double rate_at_stress(const SinhFit& fit, double stress)
{
    if (!(stress > fit.tau0))
        throw Error(ErrorCode::BelowThresholdStress, "stress at or below the damage threshold tau0");
    return sinh_rate(fit.tau0, fit.c1, fit.c2, stress);
}

double rate_at_stress(const StressRateFit& fit, double stress)
{
    return std::visit([&](const auto& f) { return rate_at_stress(f, stress); }, fit);
}

double stress_at_rate(const PowerLawFit& fit, double rate)
{
    if (!(rate > 0.0))
        throw Error(ErrorCode::NonPositiveInput, "rate must be positive");
    return std::exp((std::log(rate) - fit.ln_prefactor) / fit.exponent_m);
}

double stress_at_rate(const SinhFit& fit, double rate)
{
    if (!(rate > 0.0))
        throw Error(ErrorCode::NonPositiveInput, "rate must be positive");
    return sinh_stress(fit.tau0, fit.c1, fit.c2, rate);
}

double stress_at_rate(const StressRateFit& fit, double rate)
{
    return std::visit([&](const auto& f) { return stress_at_rate(f, rate); }, fit);
}

StressAxis axis_of(const StressRateFit& fit)
{
    return std::visit([](const auto& f) { return f.axis; }, fit);
}

} // namespace anchorlife
