#pragma once

#include "anchorlife/ingest.hpp"
#include "anchorlife/regress.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anchorlife
{

struct RatePoint
{
    double time_s;
    double rate_mm_s;
};

/// Displacement rate estimated by moving-window regression; one point per
/// window center, so `size() == source size - 2 * window_halfwidth`.
struct RateSeries
{
    std::vector<RatePoint> samples;
    int window_halfwidth = 0;

    std::size_t size() const noexcept { return samples.size(); }
};

struct StageBounds
{
    double t_primary_end;
    double t_secondary_end;
};

struct FailureTimeEstimate
{
    double time_s;
    bool clamped;
    LinearFitd secondary_fit; ///< ln rate on ln t over the secondary stage
    LinearFitd tertiary_fit;  ///< ln rate on ln t over the tertiary stage
};

struct SpecimenKinetics
{
    std::string specimen_id;
    double min_creep_rate_disp = 0.0;   ///< mm/s
    double min_creep_rate_strain = 0.0; ///< 1/s, = min_creep_rate_disp / h_ef
    /// Present for failed specimens only. Runouts keep their stabilized
    /// (secondary) rate as a proxy for the minimum rate.
    std::optional<double> failure_time_s;
    bool failure_time_clamped = false;
    std::optional<double> failure_displacement_mm;
    StageBounds stage_bounds{};
    std::optional<LinearFitd> secondary_fit;
    std::optional<LinearFitd> tertiary_fit;
};

inline constexpr int default_window_halfwidth = 3;

RateSeries estimate_rates(const DisplacementSeries& series, int window_halfwidth = default_window_halfwidth);

/// Breakpoints of the best continuous three-piece linear fit in
/// (ln t, ln rate), searched over every index pair with >= 4 points per piece.
StageBounds segment_stages(const RateSeries& rates);

/// Single breakpoint of the best continuous two-piece fit; used for runouts
/// that never reach tertiary creep. Returns the end of primary creep.
double segment_primary(const RateSeries& rates);

/// OLS slope of displacement on time over [t_primary_end, t_secondary_end]:
/// returns {mm/s, 1/s}.
std::pair<double, double> min_creep_rate(const DisplacementSeries& series, const StageBounds& bounds);

/// ln t coordinate where two lines in (ln t, ln rate) cross.
double intersect_log_lines(const LinearFitd& secondary, const LinearFitd& tertiary);

/// Failure time as the crossing of the secondary and tertiary regression
/// lines in (ln t, ln rate), clamped to [t_primary_end, last_sample_time].
FailureTimeEstimate failure_time(const RateSeries& rates, const StageBounds& bounds, double last_sample_time);

FailureTimeEstimate failure_time(const DisplacementSeries& series, const StageBounds& bounds,
                                 int window_halfwidth = default_window_halfwidth);

/// Full per-specimen pipeline. Errors carry the specimen id.
SpecimenKinetics analyze_specimen(const DisplacementSeries& series, int window_halfwidth = default_window_halfwidth);

} // namespace anchorlife
