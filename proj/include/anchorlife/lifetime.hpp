#pragma once

#include "anchorlife/regress.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anchorlife
{

/// Which rate / time pair the Monkman-Grant line is fitted on.
enum class MGVariant
{
    Displacement, ///< ln(mm/s) on ln t_f
    Strain,       ///< ln(1/s) on ln t_f, rates divided by embedment depth
    Modified,     ///< ln(1/s) on ln(t_f / failure strain)
};

/// Regression direction. `RateOnTime` fits ln rate = n ln t + c literally and
/// inverts the mean line for predictions; `TimeOnRate` regresses ln t on
/// ln rate and predicts directly.
enum class MGDirection
{
    RateOnTime,
    TimeOnRate,
};

std::string_view to_string(MGVariant v) noexcept;
MGVariant parse_mg_variant(std::string_view s);
std::string_view to_string(MGDirection d) noexcept;
MGDirection parse_mg_direction(std::string_view s);

struct MGDataPoint
{
    std::string specimen_id;
    double min_creep_rate;                 ///< mm/s or 1/s per variant
    double failure_time_s;
    std::optional<double> failure_strain;  ///< delta_f / h_ef
};

struct MGFit
{
    MGVariant variant = MGVariant::Displacement;
    MGDirection direction = MGDirection::RateOnTime;
    LinearFitd fit; ///< in the coordinates given by `direction`
    std::vector<std::string> dataset_ids;

    /// Exponent n of ln rate = n ln t* + c.
    double n() const;
    /// Constant c of ln rate = n ln t* + c.
    double c() const;
    /// True when the fitted exponent is negative, as faster creep must mean a shorter life.
    bool physical() const { return n() < 0.0; }
    /// Mean ln t* at a given ln rate.
    double mean_log_time(double ln_rate) const;
};

struct FailureTimePrediction
{
    double t_mean; ///< seconds (normalized t_f / failure strain for the modified variant)
    double lo;     ///< 0 when the band never crosses the queried rate
    double hi;     ///< +inf when the band never crosses the queried rate
};

/// Regressor value (t_f, or t_f / failure strain for the modified variant).
double normalized_time(const MGDataPoint& p, MGVariant variant);

MGFit fit_mg(const std::vector<MGDataPoint>& points, MGVariant variant,
             MGDirection direction = MGDirection::RateOnTime);

FailureTimePrediction predict_failure_time(const MGFit& fit, double rate, double level = 0.95,
                                           IntervalKind kind = IntervalKind::Prediction);

enum class ResampleCase
{
    Full, ///< keep everything (used for in-sample scoring)
    I,    ///< drop the middle third by rate rank
    II,   ///< drop the top third
    III,  ///< drop the bottom third
};

std::string_view to_string(ResampleCase c) noexcept;
std::optional<ResampleCase> parse_resample_case(std::string_view s);

struct ResampleSplit
{
    std::vector<MGDataPoint> retained;
    std::vector<MGDataPoint> held_out;
};

/// Splits by rate rank. floor(n/3) points are held out; the remainder stays
/// with the retained set. Both lists keep rate-rank order.
ResampleSplit resample_case(const std::vector<MGDataPoint>& points, ResampleCase which);

struct PointError
{
    std::string specimen_id;
    double min_creep_rate;
    double observed_s;
    double predicted_s;
    double lo_s;
    double hi_s;
    double error_s; ///< predicted - observed
};

struct EvaluationReport
{
    double rmse = 0.0;
    std::optional<double> nrmse; ///< empty when the observed times have zero range
    std::vector<PointError> points;
    double level = 0.95;
    IntervalKind interval = IntervalKind::Prediction;
};

/// RMSE of predicted vs observed failure times, and RMSE over the observed
/// range. For the modified variant each holdout point's own failure strain
/// converts the normalized prediction back to seconds.
EvaluationReport score_prediction(const MGFit& fit, const std::vector<MGDataPoint>& holdout, double level = 0.95,
                                  IntervalKind kind = IntervalKind::Prediction);

/// RMSE and NRMSE of paired observed / predicted values.
std::pair<double, std::optional<double>> rmse_nrmse(const std::vector<double>& observed,
                                                    const std::vector<double>& predicted);

} // namespace anchorlife
