#pragma once

#include "anchorlife/ingest.hpp"

#include <cstdint>
#include <vector>

namespace anchorlife
{

/// Three-stage creep curve
///   delta(t) = delta0 + A_p t^p + v_s t + B_t (1 - t/t_r)^-q - B_t
/// sampled on the union of a log-spaced and a uniform time grid over
/// [t_start, t_end].
struct SynthParams
{
    double delta0 = 0.5;   ///< mm
    double A_p = 0.0;      ///< mm / s^p
    double p = 0.3;        ///< Andrade exponent in (0, 1)
    double v_s = 1e-6;     ///< mm/s, secondary slope
    double B_t = 0.0;      ///< mm; 0 disables tertiary creep
    double q = 1.0;
    double t_r = 0.0;      ///< s, rupture (blow-up) time; unused when B_t = 0
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double t_start = 1.0;  ///< s
    double t_end = 1.0e5;  ///< s; at most 0.999 t_r when tertiary creep is on
    int n_log = 80;
    int n_linear = 200;
};

/// Analytic reference values of a generated specimen.
struct SynthTruth
{
    double min_rate_mm_s;       ///< minimum of d(delta)/dt over [t_start, t_end]
    double t_min_rate;
    double t_primary_end;       ///< primary term falls to 10% of the total rate
    double t_secondary_end;     ///< tertiary term rises to 10% of the total rate
    double rupture_time_s;      ///< t_r; 0 without tertiary creep
    double failure_displacement_mm;
    bool has_tertiary;
};

double synth_displacement(const SynthParams& params, double t);
double synth_rate(const SynthParams& params, double t);
double synth_acceleration(const SynthParams& params, double t);

std::vector<double> synth_schedule(const SynthParams& params);

/// Throws SeparationViolated when primary creep does not fall below 10% of
/// v_s before 0.5 t_r (or before t_end without tertiary creep).
void validate_synth(const SynthParams& params);

std::pair<DisplacementSeries, SynthTruth> generate(const SynthParams& params, const SpecimenMeta& meta);

/// Campaign whose failed specimens obey ln v_s = mg_slope ln t_r + mg_intercept
/// (exactly unless mg_scatter > 0), with load levels following
/// v_s ~ load_level^stress_exponent.
struct CampaignSpec
{
    int n_failed = 12;
    int n_runouts = 0;
    double rate_lo = 1e-7; ///< mm/s
    double rate_hi = 1e-4; ///< mm/s
    double mg_slope = -0.95;
    double mg_intercept = -3.0;
    double stress_exponent = 10.0;
    double max_load_level = 0.9;
    double anchor_radius_mm = 8.0;
    double embedment_depth_mm = 75.0;
    double pullout_reference_n = 157320.0;
    double temperature_c = 23.0;
    std::string adhesive_id = "SYN";
    double p = 0.3;
    double q = 2.0;
    double tertiary_crossover = 0.97; ///< tertiary rate equals v_s at this fraction of t_r
    double noise_sigma = 0.0;
    double mg_scatter = 0.0; ///< sd of ln t_r about the MG line, specimen to specimen
    std::uint64_t seed = 1;
    int n_log = 80;
    int n_linear = 200;
};

struct SynthSpecimen
{
    SynthParams params;
    DisplacementSeries series;
    SynthTruth truth;
};

std::vector<SynthSpecimen> generate_campaign(const CampaignSpec& spec);

} // namespace anchorlife
