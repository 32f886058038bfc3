#include "anchorlife/kinetics.hpp"

#include "anchorlife/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace anchorlife
{

namespace
{

constexpr std::size_t min_points_per_stage = 4;
constexpr std::size_t min_rate_points = 12;

// (ln t, ln rate) with non-positive rates raised to the smallest positive one.
std::pair<Eigen::VectorXd, Eigen::VectorXd> log_log(const RateSeries& rates)
{
    double smallest_positive = std::numeric_limits<double>::infinity();
    for (const auto& p : rates.samples)
        if (p.rate_mm_s > 0.0)
            smallest_positive = std::min(smallest_positive, p.rate_mm_s);
    if (!std::isfinite(smallest_positive))
        throw Error(ErrorCode::DegenerateSeries, "no positive creep rate in the series");

    const auto n = static_cast<Eigen::Index>(rates.size());
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& p = rates.samples[static_cast<std::size_t>(i)];
        x(i) = std::log(p.time_s);
        y(i) = std::log(p.rate_mm_s > 0.0 ? p.rate_mm_s : smallest_positive);
    }
    return {x, y};
}

void check_segmentable(const RateSeries& rates)
{
    if (rates.size() < min_rate_points)
        throw Error(ErrorCode::TooFewSamples, "stage segmentation needs at least 12 rate points");
    const auto [lo, hi] = std::minmax_element(rates.samples.begin(), rates.samples.end(),
                                              [](const RatePoint& a, const RatePoint& b) { return a.rate_mm_s < b.rate_mm_s; });
    if (hi->rate_mm_s - lo->rate_mm_s <= 1e-12 * std::abs(hi->rate_mm_s))
        throw Error(ErrorCode::DegenerateSeries, "all creep rates are equal; no stages to distinguish");
}

/// Continuous piecewise-linear least squares with hinge knots at data points.
///
/// Sums over the hinge basis (x - x_k)_+ are read from suffix sums, so each
/// knot combination costs O(1); the best candidates are then re-scored with
/// explicit residuals.
class HingeFitter
{
  public:
    HingeFitter(const Eigen::VectorXd& x, const Eigen::VectorXd& y) : n_(x.size())
    {
        x_ = x.array() - x.mean();
        y_ = y.array() - y.mean();
        s0_.setZero(n_ + 1);
        s1_.setZero(n_ + 1);
        s2_.setZero(n_ + 1);
        sy_.setZero(n_ + 1);
        sxy_.setZero(n_ + 1);
        for (Eigen::Index m = n_ - 1; m >= 0; --m)
        {
            s0_(m) = s0_(m + 1) + 1.0;
            s1_(m) = s1_(m + 1) + x_(m);
            s2_(m) = s2_(m + 1) + x_(m) * x_(m);
            sy_(m) = sy_(m + 1) + y_(m);
            sxy_(m) = sxy_(m + 1) + x_(m) * y_(m);
        }
        yy_ = y_.squaredNorm();
    }

    double total_sum_of_squares() const { return yy_; }

    /// Residual sum of squares from the normal equations.
    template <int K>
    double fast_sse(const std::array<Eigen::Index, K>& knots) const
    {
        constexpr int P = K + 2;
        Eigen::Matrix<double, P, P> a;
        Eigen::Matrix<double, P, 1> b;
        a(0, 0) = s0_(0);
        a(0, 1) = a(1, 0) = s1_(0);
        a(1, 1) = s2_(0);
        b(0) = sy_(0);
        b(1) = sxy_(0);
        for (int p = 0; p < K; ++p)
        {
            const Eigen::Index i = knots[static_cast<std::size_t>(p)];
            const double xi = x_(i);
            const int r = p + 2;
            a(0, r) = a(r, 0) = s1_(i) - xi * s0_(i);
            a(1, r) = a(r, 1) = s2_(i) - xi * s1_(i);
            a(r, r) = s2_(i) - 2.0 * xi * s1_(i) + xi * xi * s0_(i);
            b(r) = sxy_(i) - xi * sy_(i);
            for (int q = p + 1; q < K; ++q)
            {
                const Eigen::Index j = knots[static_cast<std::size_t>(q)];
                const double xj = x_(j);
                a(r, q + 2) = a(q + 2, r) = s2_(j) - (xi + xj) * s1_(j) + xi * xj * s0_(j);
            }
        }
        const Eigen::Matrix<double, P, 1> beta = a.ldlt().solve(b);
        return std::max(0.0, yy_ - beta.dot(b));
    }

    /// Residual sum of squares from an orthogonal solve and explicit residuals.
    template <int K>
    double exact_sse(const std::array<Eigen::Index, K>& knots) const
    {
        Eigen::MatrixXd design(n_, K + 2);
        design.col(0).setOnes();
        design.col(1) = x_;
        for (int p = 0; p < K; ++p)
            design.col(p + 2) = (x_.array() - x_(knots[static_cast<std::size_t>(p)])).cwiseMax(0.0);
        const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y_);
        return (design * beta - y_).squaredNorm();
    }

  private:
    Eigen::Index n_;
    Eigen::VectorXd x_, y_;
    Eigen::VectorXd s0_, s1_, s2_, sy_, sxy_;
    double yy_ = 0.0;
};

// Scores every knot set twice: once to find the best normal-equation SSE, then
// to re-score the near-optimal ones exactly. The first minimum wins ties.
template <int K, typename ForEach>
std::array<Eigen::Index, K> best_knots(const HingeFitter& fitter, const ForEach& for_each_knots)
{
    constexpr std::size_t max_refined = 64;
    double best = std::numeric_limits<double>::infinity();
    for_each_knots([&](const std::array<Eigen::Index, K>& knots) { best = std::min(best, fitter.fast_sse<K>(knots)); });
    const double slack = 1e-9 * fitter.total_sum_of_squares() + 1e-300;

    std::vector<std::pair<double, std::array<Eigen::Index, K>>> near;
    for_each_knots([&](const std::array<Eigen::Index, K>& knots) {
        const double sse = fitter.fast_sse<K>(knots);
        if (sse <= best + slack)
            near.emplace_back(sse, knots);
    });
    std::stable_sort(near.begin(), near.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (near.size() > max_refined)
        near.resize(max_refined);
    std::sort(near.begin(), near.end(), [](const auto& a, const auto& b) { return a.second < b.second; });

    double best_exact = std::numeric_limits<double>::infinity();
    std::array<Eigen::Index, K> chosen = near.front().second;
    for (const auto& [fast, knots] : near)
    {
        const double sse = fitter.exact_sse<K>(knots);
        if (sse < best_exact)
        {
            best_exact = sse;
            chosen = knots;
        }
    }
    return chosen;
}

std::vector<std::size_t> indices_in(const std::vector<double>& times, double lo, double hi)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= lo && times[i] <= hi)
            out.push_back(i);
    return out;
}

LinearFitd log_log_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::vector<std::size_t>& idx)
{
    Eigen::VectorXd xs(static_cast<Eigen::Index>(idx.size())), ys(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
    {
        xs(static_cast<Eigen::Index>(k)) = x(static_cast<Eigen::Index>(idx[k]));
        ys(static_cast<Eigen::Index>(k)) = y(static_cast<Eigen::Index>(idx[k]));
    }
    return ols_fit(xs, ys);
}

double interpolate_displacement(const DisplacementSeries& series, double t)
{
    const auto& s = series.samples;
    if (t <= s.front().time_s)
        return s.front().displacement_mm;
    if (t >= s.back().time_s)
        return s.back().displacement_mm;
    const auto it = std::lower_bound(s.begin(), s.end(), t, [](const Sample& a, double v) { return a.time_s < v; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.time_s) / (hi.time_s - lo.time_s);
    return lo.displacement_mm + w * (hi.displacement_mm - lo.displacement_mm);
}

} // namespace

RateSeries estimate_rates(const DisplacementSeries& series, int window_halfwidth)
{
    if (window_halfwidth < 1)
        throw Error(ErrorCode::InvalidValue, "window half-width must be at least 1", series.meta.specimen_id);
    const auto w = static_cast<std::size_t>(window_halfwidth);
    const std::size_t n = series.size();
    if (n < 2 * w + 2)
        throw Error(ErrorCode::TooFewSamples,
                    std::to_string(n) + " samples is too short for window half-width " + std::to_string(w),
                    series.meta.specimen_id);

    RateSeries rates;
    rates.window_halfwidth = window_halfwidth;
    rates.samples.reserve(n - 2 * w);
    const double count = static_cast<double>(2 * w + 1);
    for (std::size_t i = w; i + w < n; ++i)
    {
        double tbar = 0.0, dbar = 0.0;
        for (std::size_t k = i - w; k <= i + w; ++k)
        {
            tbar += series.samples[k].time_s;
            dbar += series.samples[k].displacement_mm;
        }
        tbar /= count;
        dbar /= count;
        double stt = 0.0, std_ = 0.0;
        for (std::size_t k = i - w; k <= i + w; ++k)
        {
            const double dt = series.samples[k].time_s - tbar;
            stt += dt * dt;
            std_ += dt * (series.samples[k].displacement_mm - dbar);
        }
        rates.samples.push_back({series.samples[i].time_s, std_ / stt});
    }
    return rates;
}

StageBounds segment_stages(const RateSeries& rates)
{
    check_segmentable(rates);
    const auto [x, y] = log_log(rates);
    const HingeFitter fitter(x, y);
    const auto n = x.size();
    constexpr auto m = static_cast<Eigen::Index>(min_points_per_stage - 1);

    const auto knots = best_knots<2>(fitter, [&](const auto& visit) {
        for (Eigen::Index i = m; i + 2 * m <= n - 1; ++i)
            for (Eigen::Index j = i + m; j + m <= n - 1; ++j)
                visit({i, j});
    });
    return {rates.samples[static_cast<std::size_t>(knots[0])].time_s,
            rates.samples[static_cast<std::size_t>(knots[1])].time_s};
}

double segment_primary(const RateSeries& rates)
{
    check_segmentable(rates);
    const auto [x, y] = log_log(rates);
    const HingeFitter fitter(x, y);
    const auto n = x.size();
    constexpr auto m = static_cast<Eigen::Index>(min_points_per_stage - 1);

    const auto knots = best_knots<1>(fitter, [&](const auto& visit) {
        for (Eigen::Index i = m; i + m <= n - 1; ++i)
            visit({i});
    });
    return rates.samples[static_cast<std::size_t>(knots[0])].time_s;
}

std::pair<double, double> min_creep_rate(const DisplacementSeries& series, const StageBounds& bounds)
{
    std::vector<double> t, d;
    for (const auto& s : series.samples)
        if (s.time_s >= bounds.t_primary_end && s.time_s <= bounds.t_secondary_end)
        {
            t.push_back(s.time_s);
            d.push_back(s.displacement_mm);
        }
    if (t.size() < min_points_per_stage)
        throw Error(ErrorCode::TooFewSamples, "secondary stage holds fewer than 4 samples", series.meta.specimen_id);
    const auto fit = ols_fit(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())),
                             Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())));
    return {fit.slope, fit.slope / series.meta.embedment_depth_mm};
}

double intersect_log_lines(const LinearFitd& secondary, const LinearFitd& tertiary)
{
    const double dslope = secondary.slope - tertiary.slope;
    if (std::abs(dslope) < 1e-12)
        throw Error(ErrorCode::ParallelLines, "secondary and tertiary lines are parallel");
    return (tertiary.intercept - secondary.intercept) / dslope;
}

FailureTimeEstimate failure_time(const RateSeries& rates, const StageBounds& bounds, double last_sample_time)
{
    const auto [x, y] = log_log(rates);
    std::vector<double> times;
    times.reserve(rates.size());
    for (const auto& p : rates.samples)
        times.push_back(p.time_s);

    const auto secondary = indices_in(times, bounds.t_primary_end, bounds.t_secondary_end);
    const auto tertiary = indices_in(times, bounds.t_secondary_end, std::numeric_limits<double>::infinity());
    if (secondary.size() < min_points_per_stage || tertiary.size() < min_points_per_stage)
        throw Error(ErrorCode::TooFewSamples, "secondary and tertiary stages need at least 4 rate points each");

    FailureTimeEstimate est{0.0, false, log_log_fit(x, y, secondary), log_log_fit(x, y, tertiary)};
    const double ln_t = intersect_log_lines(est.secondary_fit, est.tertiary_fit);
    double t = std::exp(ln_t);
    if (!(t >= bounds.t_primary_end))
    {
        t = bounds.t_primary_end;
        est.clamped = true;
    }
    else if (t > last_sample_time)
    {
        t = last_sample_time;
        est.clamped = true;
    }
    est.time_s = t;
    return est;
}

FailureTimeEstimate failure_time(const DisplacementSeries& series, const StageBounds& bounds, int window_halfwidth)
{
    return failure_time(estimate_rates(series, window_halfwidth), bounds, series.last_time());
}

SpecimenKinetics analyze_specimen(const DisplacementSeries& series, int window_halfwidth)
{
    try
    {
        if (series.size() < min_series_samples)
            throw Error(ErrorCode::TooFewSamples, "series holds fewer than 8 samples");
        const RateSeries rates = estimate_rates(series, window_halfwidth);

        SpecimenKinetics k;
        k.specimen_id = series.meta.specimen_id;
        if (series.failed)
        {
            k.stage_bounds = segment_stages(rates);
            const auto ft = failure_time(rates, k.stage_bounds, series.last_time());
            k.failure_time_s = ft.time_s;
            k.failure_time_clamped = ft.clamped;
            k.secondary_fit = ft.secondary_fit;
            k.tertiary_fit = ft.tertiary_fit;
            k.failure_displacement_mm = series.failure_displacement_mm
                                            ? *series.failure_displacement_mm
                                            : interpolate_displacement(series, ft.time_s);
        }
        else
        {
            k.stage_bounds = {segment_primary(rates), series.last_time()};
        }
        std::tie(k.min_creep_rate_disp, k.min_creep_rate_strain) = min_creep_rate(series, k.stage_bounds);
        return k;
    }
    catch (const Error& e)
    {
        if (e.specimen_id().empty())
            throw e.tagged(series.meta.specimen_id);
        throw;
    }
}

} // namespace anchorlife
