#pragma once

#include "anchorlife/lifetime.hpp"
#include "anchorlife/stressrate.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace anchorlife
{

inline constexpr double seconds_per_year = 365.25 * 86400.0;
inline constexpr double fifty_years_s = 50.0 * seconds_per_year; // 1.57788e9 s

struct TTFOptions
{
    double lower_percentile = 2.5;
    double upper_percentile = 97.5;
    /// Required when the MG fit is the modified variant: converts t_f / strain to seconds.
    std::optional<double> assumed_failure_strain;
    /// Required when the MG fit is the displacement variant: stress-rate laws
    /// predict strain rates, and displacement rate = strain rate * h_ef.
    std::optional<double> embedment_depth_mm;
};

struct TTFSample
{
    double stress;
    double t_mean; ///< +inf when below the sinh threshold
    double t_lo;
    double t_hi;
    bool below_threshold = false;
};

struct TTFCurve
{
    StressAxis axis = StressAxis::Absolute;
    std::vector<TTFSample> samples;
    int mc_draws = 0;
    std::uint64_t seed = 0;
};

/// Joint parameter draws of a stress-rate law and an MG fit, generated once
/// so every stress is evaluated against the same draws.
class TTFEnsemble
{
  public:
    TTFEnsemble(StressRateFit sr_fit, MGFit mg_fit, int n_draws, std::uint64_t seed, TTFOptions options = {});

    /// Failure time at `stress` from the fitted parameters; +inf below the sinh threshold.
    double mean_time(double stress) const;
    /// Failure times of every draw at `stress`, sorted ascending.
    std::vector<double> draw_times(double stress) const;
    /// Percentile (0..100) of the draw times at `stress`.
    double percentile_time(double stress, double percent) const;

    const StressRateFit& stress_rate_fit() const noexcept { return sr_fit_; }
    const MGFit& mg_fit() const noexcept { return mg_fit_; }
    const TTFOptions& options() const noexcept { return options_; }
    int n_draws() const noexcept { return static_cast<int>(mg_draws_.rows()); }

  private:
    double time_for(double ln_rate, double slope, double intercept) const;

    StressRateFit sr_fit_;
    MGFit mg_fit_;
    TTFOptions options_;
    Eigen::MatrixXd sr_draws_; ///< power: (m, ln A); sinh: (tau0, c1, c2)
    Eigen::MatrixXd mg_draws_; ///< (slope, intercept) in the fit's own direction
    double strain_factor_ = 1.0;
    double ln_rate_offset_ = 0.0;
};

/// Stress versus time-to-failure with percentile bands. `stresses` must be
/// ascending; for the sinh law, stresses at or under tau0 are kept and marked
/// `below_threshold`.
TTFCurve compose_ttf(const StressRateFit& sr_fit, const MGFit& mg_fit, const std::vector<double>& stresses,
                     int n_draws, std::uint64_t seed, const TTFOptions& options = {});

struct StrengthEstimate
{
    double target_life_s = 0.0;
    double stress_mean = 0.0;
    double load_level_mean = 0.0;
    double load_level_lo = 0.0;
    double load_level_hi = 0.0;
    /// Sinh law only: the target exceeds every finite life above tau0, so the
    /// mean estimate is tau0 itself.
    bool life_unbounded = false;
    /// Set whenever the estimate rests on the sinh threshold stress.
    bool threshold_caveat = false;
    bool lo_clamped = false;
    bool hi_clamped = false;
};

/// Load level (stress / pullout_stress) sustainable for `target_life_s`,
/// solved by bisection on the mean curve and on each percentile curve.
StrengthEstimate sustained_strength(const StressRateFit& sr_fit, const MGFit& mg_fit, double pullout_stress,
                                    double target_life_s, int n_draws, std::uint64_t seed,
                                    const TTFOptions& options = {});

} // namespace anchorlife
