#pragma once

#include "anchorlife/nls.hpp"
#include "anchorlife/regress.hpp"

#include <string_view>
#include <variant>
#include <vector>

namespace anchorlife
{

/// Area used to spread the sustained load into a uniform bond stress.
enum class BondArea
{
    AsPrinted,      ///< pi * r^2 * h_ef
    LateralSurface, ///< pi * (2 r) * h_ef
};

std::string_view to_string(BondArea a) noexcept;
BondArea parse_bond_area(std::string_view s);

/// Uniform bond stress in MPa from load [N], anchor radius [mm] and embedment depth [mm].
double bond_stress(double load_n, double radius_mm, double embedment_depth_mm, BondArea area = BondArea::AsPrinted);

/// Stress axis of a stress/rate data set. Fits never mix axes.
enum class StressAxis
{
    Absolute,  ///< MPa
    LoadLevel, ///< fraction of the pull-out reference
};

std::string_view to_string(StressAxis a) noexcept;
StressAxis parse_stress_axis(std::string_view s);

struct StressRatePoint
{
    double stress;
    double min_creep_rate; ///< 1/s
    bool failed = true;
};

/// Norton-Bailey law: rate = exp(ln_prefactor) * stress^exponent_m.
struct PowerLawFit
{
    double exponent_m = 0.0;
    double ln_prefactor = 0.0;
    LinearFitd fit; ///< ln rate on ln stress
    StressAxis axis = StressAxis::Absolute;
};

/// Prandtl-Garofalo law: stress = tau0 * (1 + c1 * asinh(rate / c2)).
struct SinhFit
{
    double tau0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    /// Solver result in log-parameters (ln tau0, ln c1, ln c2); its covariance
    /// drives the parameter draws so that every draw stays positive.
    NLSFitd nls;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero(); ///< of (tau0, c1, c2), first-order
    int n_points = 0;
    StressAxis axis = StressAxis::Absolute;
};

using StressRateFit = std::variant<PowerLawFit, SinhFit>;

enum class SinhResponse
{
    Stress, ///< residuals in stress (default)
    LnRate, ///< residuals in ln rate, for sensitivity studies
};

PowerLawFit fit_power_law(const std::vector<StressRatePoint>& points, StressAxis axis = StressAxis::Absolute);

SinhFit fit_sinh(const std::vector<StressRatePoint>& points, StressAxis axis = StressAxis::Absolute,
                 SinhResponse response = SinhResponse::Stress, const NLSConfig& config = {});

/// Sinh law with explicit parameters (no fit attached).
SinhFit make_sinh(double tau0, double c1, double c2);
PowerLawFit make_power_law(double exponent_m, double ln_prefactor);

double sinh_stress(double tau0, double c1, double c2, double rate);
double sinh_rate(double tau0, double c1, double c2, double stress);

double rate_at_stress(const PowerLawFit& fit, double stress);
/// Throws BelowThresholdStress when stress <= tau0: no damage-driven failure.
double rate_at_stress(const SinhFit& fit, double stress);
double rate_at_stress(const StressRateFit& fit, double stress);

double stress_at_rate(const PowerLawFit& fit, double rate);
double stress_at_rate(const SinhFit& fit, double rate);
double stress_at_rate(const StressRateFit& fit, double rate);

StressAxis axis_of(const StressRateFit& fit);

} // namespace anchorlife
