#include "anchorlife/ttf.hpp"

#include "anchorlife/error.hpp"
#include "anchorlife/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorlife
{

namespace
{

constexpr double inf = std::numeric_limits<double>::infinity();

// Linear-interpolated percentile of unsorted values (+inf allowed).
double percentile(std::vector<double> values, double percent)
{
    const double h = (static_cast<double>(values.size()) - 1.0) * percent / 100.0;
    const auto k = static_cast<std::size_t>(std::floor(h));
    const double w = h - static_cast<double>(k);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    const double a = values[k];
    if (w == 0.0 || k + 1 >= values.size())
        return a;
    const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(k) + 1, values.end());
    if (std::isinf(a) || std::isinf(b))
        return std::isinf(a) ? a : inf;
    return a + w * (b - a);
}

// Bisection for the stress where `log_time(stress)` crosses `ln_target`;
// `log_time` must be non-increasing. Returns nullopt if there is no sign change.
template <typename F>
std::optional<double> solve_stress(const F& log_time, double ln_target, double lo, double hi)
{
    if (!(log_time(lo) >= ln_target) || !(log_time(hi) <= ln_target))
        return std::nullopt;
    for (int i = 0; i < 300 && hi - lo > 1e-13 * hi; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (log_time(mid) >= ln_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TTFEnsemble::TTFEnsemble(StressRateFit sr_fit, MGFit mg_fit, int n_draws, std::uint64_t seed, TTFOptions options)
    : sr_fit_(std::move(sr_fit)), mg_fit_(std::move(mg_fit)), options_(options)
{
    if (n_draws < 1)
        throw Error(ErrorCode::InvalidValue, "n_draws must be at least 1");
    if (mg_fit_.variant == MGVariant::Modified)
    {
        if (!options_.assumed_failure_strain || !(*options_.assumed_failure_strain > 0.0))
            throw Error(ErrorCode::MissingFailureStrain,
                        "the modified variant needs an assumed failure strain to predict absolute times");
        strain_factor_ = *options_.assumed_failure_strain;
    }
    if (mg_fit_.variant == MGVariant::Displacement)
    {
        if (!options_.embedment_depth_mm || !(*options_.embedment_depth_mm > 0.0))
            throw Error(ErrorCode::InvalidValue,
                        "a displacement-rate MG fit needs the embedment depth to convert predicted strain rates");
        ln_rate_offset_ = std::log(*options_.embedment_depth_mm);
    }
    if (mg_fit_.fit.slope == 0.0)
        throw Error(ErrorCode::ZeroSlope, "Monkman-Grant line has zero slope");

    // Independent streams for the two fits; all draws exist before any evaluation.
    const std::uint64_t sr_seed = splitmix64(seed);
    const std::uint64_t mg_seed = splitmix64(seed + 1);
    if (const auto* power = std::get_if<PowerLawFit>(&sr_fit_))
        sr_draws_ = sample_params(power->fit, n_draws, sr_seed);
    else
    {
        const auto& sinh = std::get<SinhFit>(sr_fit_);
        sr_draws_ = sample_params(sinh.nls, n_draws, sr_seed).array().exp();
    }
    mg_draws_ = sample_params(mg_fit_.fit, n_draws, mg_seed);
}

double TTFEnsemble::time_for(double ln_rate, double slope, double intercept) const
{
    const double x = ln_rate + ln_rate_offset_;
    const double ln_t = mg_fit_.direction == MGDirection::RateOnTime ? (x - intercept) / slope : slope * x + intercept;
    return std::exp(ln_t) * strain_factor_;
}

double TTFEnsemble::mean_time(double stress) const
{
    if (const auto* sinh = std::get_if<SinhFit>(&sr_fit_); sinh && !(stress > sinh->tau0))
        return inf;
    const double ln_rate = std::log(rate_at_stress(sr_fit_, stress));
    return time_for(ln_rate, mg_fit_.fit.slope, mg_fit_.fit.intercept);
}

std::vector<double> TTFEnsemble::draw_times(double stress) const
{
    const bool is_power = std::holds_alternative<PowerLawFit>(sr_fit_);
    std::vector<double> out(static_cast<std::size_t>(mg_draws_.rows()));
    for (Eigen::Index d = 0; d < mg_draws_.rows(); ++d)
    {
        double ln_rate;
        if (is_power)
            ln_rate = sr_draws_(d, 1) + sr_draws_(d, 0) * std::log(stress);
        else
        {
            const double tau0 = sr_draws_(d, 0);
            if (!(stress > tau0))
            {
                out[static_cast<std::size_t>(d)] = inf;
                continue;
            }
            ln_rate = std::log(sinh_rate(tau0, sr_draws_(d, 1), sr_draws_(d, 2), stress));
        }
        out[static_cast<std::size_t>(d)] = time_for(ln_rate, mg_draws_(d, 0), mg_draws_(d, 1));
    }
    return out;
}

double TTFEnsemble::percentile_time(double stress, double percent) const
{
    return percentile(draw_times(stress), percent);
}

TTFCurve compose_ttf(const StressRateFit& sr_fit, const MGFit& mg_fit, const std::vector<double>& stresses,
                     int n_draws, std::uint64_t seed, const TTFOptions& options)
{
    if (n_draws < 1000)
        throw Error(ErrorCode::InvalidValue, "time-to-failure bands need at least 1000 draws");
    for (std::size_t i = 0; i < stresses.size(); ++i)
    {
        if (!(stresses[i] > 0.0))
            throw Error(ErrorCode::NonPositiveInput, "stresses must be positive");
        if (i > 0 && !(stresses[i] > stresses[i - 1]))
            throw Error(ErrorCode::InvalidValue, "stresses must be strictly ascending");
    }

    const TTFEnsemble ensemble(sr_fit, mg_fit, n_draws, seed, options);
    TTFCurve curve;
    curve.axis = axis_of(sr_fit);
    curve.mc_draws = n_draws;
    curve.seed = seed;
    for (const double s : stresses)
    {
        TTFSample sample{s, ensemble.mean_time(s), 0.0, 0.0, false};
        if (std::isinf(sample.t_mean))
        {
            sample.below_threshold = true;
            sample.t_lo = sample.t_hi = inf;
            curve.samples.push_back(sample);
            continue;
        }
        const auto times = ensemble.draw_times(s);
        // The band always contains the mean curve.
        sample.t_lo = std::min(percentile(times, options.lower_percentile), sample.t_mean);
        sample.t_hi = std::max(percentile(times, options.upper_percentile), sample.t_mean);
        curve.samples.push_back(sample);
    }
    return curve;
}

StrengthEstimate sustained_strength(const StressRateFit& sr_fit, const MGFit& mg_fit, double pullout_stress,
                                    double target_life_s, int n_draws, std::uint64_t seed,
                                    const TTFOptions& options)
{
    if (!(target_life_s > 0.0))
        throw Error(ErrorCode::InvalidValue, "target life must be positive");
    if (!(pullout_stress > 0.0))
        throw Error(ErrorCode::NonPositiveInput, "pull-out stress must be positive");

    const TTFEnsemble ensemble(sr_fit, mg_fit, n_draws, seed, options);
    const double ln_target = std::log(target_life_s);
    const auto* sinh = std::get_if<SinhFit>(&sr_fit);

    StrengthEstimate est;
    est.target_life_s = target_life_s;
    est.threshold_caveat = sinh != nullptr;

    auto ln_mean = [&](double s) { return std::log(ensemble.mean_time(s)); };
    const double mean_floor = sinh ? sinh->tau0 * (1.0 + 1e-9) : 1e-6 * pullout_stress;
    if (sinh && sinh->tau0 >= pullout_stress)
        throw Error(ErrorCode::NoRoot, "damage threshold tau0 is at or above the pull-out stress");
    if (!(ln_mean(mean_floor) > ln_mean(pullout_stress)))
        throw Error(ErrorCode::NoRoot, "composed mean curve is not decreasing in stress");
    if (ln_mean(pullout_stress) > ln_target)
        throw Error(ErrorCode::NoRoot, "predicted life at the pull-out stress already exceeds the target life");

    if (const auto root = solve_stress(ln_mean, ln_target, mean_floor, pullout_stress))
        est.stress_mean = *root;
    else if (sinh)
    {
        est.stress_mean = sinh->tau0;
        est.life_unbounded = true;
    }
    else
        throw Error(ErrorCode::NoRoot, "target life lies beyond the curve's range");
    est.load_level_mean = est.stress_mean / pullout_stress;

    const double band_floor = 1e-6 * pullout_stress;
    auto band_level = [&](double percent, bool& clamped) {
        auto ln_band = [&](double s) { return std::log(ensemble.percentile_time(s, percent)); };
        if (const auto root = solve_stress(ln_band, ln_target, band_floor, pullout_stress))
            return *root / pullout_stress;
        clamped = true;
        return ln_band(pullout_stress) > ln_target ? 1.0 : band_floor / pullout_stress;
    };
    est.load_level_lo = std::min(band_level(options.lower_percentile, est.lo_clamped), est.load_level_mean);
    est.load_level_hi = std::max(band_level(options.upper_percentile, est.hi_clamped), est.load_level_mean);
    return est;
}

} // namespace anchorlife
