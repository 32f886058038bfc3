#include "anchorlife/lifetime.hpp"

#include "anchorlife/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace anchorlife
{

std::string_view to_string(MGVariant v) noexcept
{
    switch (v)
    {
    case MGVariant::Displacement: return "displacement";
    case MGVariant::Strain: return "strain";
    case MGVariant::Modified: return "modified";
    }
    return "displacement";
}

MGVariant parse_mg_variant(std::string_view s)
{
    if (s == "displacement")
        return MGVariant::Displacement;
    if (s == "strain")
        return MGVariant::Strain;
    if (s == "modified")
        return MGVariant::Modified;
    throw Error(ErrorCode::InvalidValue, "unknown Monkman-Grant variant '" + std::string(s) + "'");
}

std::string_view to_string(MGDirection d) noexcept
{
    return d == MGDirection::RateOnTime ? "rate_on_time" : "time_on_rate";
}

MGDirection parse_mg_direction(std::string_view s)
{
    if (s == "rate_on_time")
        return MGDirection::RateOnTime;
    if (s == "time_on_rate")
        return MGDirection::TimeOnRate;
    throw Error(ErrorCode::InvalidValue, "unknown regression direction '" + std::string(s) + "'");
}

std::string_view to_string(ResampleCase c) noexcept
{
    switch (c)
    {
    case ResampleCase::Full: return "full";
    case ResampleCase::I: return "i";
    case ResampleCase::II: return "ii";
    case ResampleCase::III: return "iii";
    }
    return "full";
}

std::optional<ResampleCase> parse_resample_case(std::string_view s)
{
    if (s == "full")
        return ResampleCase::Full;
    if (s == "i")
        return ResampleCase::I;
    if (s == "ii")
        return ResampleCase::II;
    if (s == "iii")
        return ResampleCase::III;
    return std::nullopt;
}

double MGFit::n() const
{
    return direction == MGDirection::RateOnTime ? fit.slope : 1.0 / fit.slope;
}

double MGFit::c() const
{
    return direction == MGDirection::RateOnTime ? fit.intercept : -fit.intercept / fit.slope;
}

double MGFit::mean_log_time(double ln_rate) const
{
    if (fit.slope == 0.0)
        throw Error(ErrorCode::ZeroSlope, "Monkman-Grant line has zero slope");
    if (direction == MGDirection::TimeOnRate)
        return fit(ln_rate);
    return (ln_rate - fit.intercept) / fit.slope;
}

double normalized_time(const MGDataPoint& p, MGVariant variant)
{
    if (variant != MGVariant::Modified)
        return p.failure_time_s;
    if (!p.failure_strain)
        throw Error(ErrorCode::MissingFailureStrain, "modified variant needs a failure strain", p.specimen_id);
    return p.failure_time_s / *p.failure_strain;
}

MGFit fit_mg(const std::vector<MGDataPoint>& points, MGVariant variant, MGDirection direction)
{
    if (points.size() < 3)
        throw Error(ErrorCode::TooFewPoints, "Monkman-Grant fit needs at least 3 specimens");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd ln_rate(n), ln_time(n);
    MGFit out;
    out.variant = variant;
    out.direction = direction;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& p = points[static_cast<std::size_t>(i)];
        if (!(p.min_creep_rate > 0.0) || !(p.failure_time_s > 0.0) || (p.failure_strain && !(*p.failure_strain > 0.0)))
            throw Error(ErrorCode::InvalidValue, "rates, failure times and failure strains must be positive",
                        p.specimen_id);
        ln_rate(i) = std::log(p.min_creep_rate);
        ln_time(i) = std::log(normalized_time(p, variant));
        out.dataset_ids.push_back(p.specimen_id);
    }
    out.fit = direction == MGDirection::RateOnTime ? ols_fit(ln_time, ln_rate) : ols_fit(ln_rate, ln_time);
    return out;
}

FailureTimePrediction predict_failure_time(const MGFit& fit, double rate, double level, IntervalKind kind)
{
    if (!(rate > 0.0))
        throw Error(ErrorCode::InvalidValue, "creep rate must be positive");
    const double y0 = std::log(rate);
    const double x_mean = fit.mean_log_time(y0);
    FailureTimePrediction out{std::exp(x_mean), std::exp(x_mean), std::exp(x_mean)};

    if (fit.direction == MGDirection::TimeOnRate)
    {
        const double half = interval_half_width(fit.fit, y0, level, kind);
        out.lo = std::exp(x_mean - half);
        out.hi = std::exp(x_mean + half);
        return out;
    }
    if (fit.fit.residual_variance == 0.0)
        return out;

    // The band {x : |fit(x) - y0| <= half_width(x)} is an interval around the
    // mean crossing; bisect for each end on a +-40 window in ln t.
    auto inside = [&](double x) { return std::abs(fit.fit(x) - y0) <= interval_half_width(fit.fit, x, level, kind); };
    auto edge = [&](double outer) -> std::optional<double> {
        if (inside(outer))
            return std::nullopt;
        double in = x_mean;
        double out_x = outer;
        for (int i = 0; i < 200 && std::abs(out_x - in) > 1e-13 * std::max(1.0, std::abs(in)); ++i)
        {
            const double mid = 0.5 * (in + out_x);
            (inside(mid) ? in : out_x) = mid;
        }
        return 0.5 * (in + out_x);
    };
    const auto left = edge(x_mean - 40.0);
    const auto right = edge(x_mean + 40.0);
    out.lo = left ? std::exp(*left) : 0.0;
    out.hi = right ? std::exp(*right) : std::numeric_limits<double>::infinity();
    return out;
}

ResampleSplit resample_case(const std::vector<MGDataPoint>& points, ResampleCase which)
{
    std::vector<MGDataPoint> ranked = points;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const MGDataPoint& a, const MGDataPoint& b) { return a.min_creep_rate < b.min_creep_rate; });
    if (which == ResampleCase::Full)
        return {ranked, ranked};
    if (ranked.size() < 6)
        throw Error(ErrorCode::TooFewPoints, "resampling needs at least 6 specimens");

    const std::size_t n = ranked.size();
    const std::size_t k = n / 3;
    std::size_t first = 0;
    switch (which)
    {
    case ResampleCase::I: first = (n - k + 1) / 2; break;
    case ResampleCase::II: first = n - k; break;
    case ResampleCase::III: first = 0; break;
    case ResampleCase::Full: break;
    }
    ResampleSplit split;
    for (std::size_t i = 0; i < n; ++i)
        (i >= first && i < first + k ? split.held_out : split.retained).push_back(ranked[i]);
    return split;
}

std::pair<double, std::optional<double>> rmse_nrmse(const std::vector<double>& observed,
                                                    const std::vector<double>& predicted)
{
    if (observed.size() != predicted.size())
        throw Error(ErrorCode::LengthMismatch, "observed and predicted differ in length");
    if (observed.empty())
        throw Error(ErrorCode::TooFewPoints, "nothing to score");
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
    {
        const double e = predicted[i] - observed[i];
        sum += e * e;
    }
    const double rmse = std::sqrt(sum / static_cast<double>(observed.size()));
    const auto [lo, hi] = std::minmax_element(observed.begin(), observed.end());
    std::optional<double> nrmse;
    if (*hi > *lo)
        nrmse = rmse / (*hi - *lo);
    return {rmse, nrmse};
}

EvaluationReport score_prediction(const MGFit& fit, const std::vector<MGDataPoint>& holdout, double level,
                                  IntervalKind kind)
{
    if (holdout.empty())
        throw Error(ErrorCode::TooFewPoints, "holdout set is empty");
    EvaluationReport report;
    report.level = level;
    report.interval = kind;
    std::vector<double> observed, predicted;
    for (const auto& p : holdout)
    {
        auto pred = predict_failure_time(fit, p.min_creep_rate, level, kind);
        if (fit.variant == MGVariant::Modified)
        {
            if (!p.failure_strain)
                throw Error(ErrorCode::MissingFailureStrain, "modified variant needs a failure strain",
                            p.specimen_id);
            pred.t_mean *= *p.failure_strain;
            pred.lo *= *p.failure_strain;
            pred.hi *= *p.failure_strain;
        }
        report.points.push_back(
            {p.specimen_id, p.min_creep_rate, p.failure_time_s, pred.t_mean, pred.lo, pred.hi, pred.t_mean - p.failure_time_s});
        observed.push_back(p.failure_time_s);
        predicted.push_back(pred.t_mean);
    }
    std::tie(report.rmse, report.nrmse) = rmse_nrmse(observed, predicted);
    return report;
}

} // namespace anchorlife
