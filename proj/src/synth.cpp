#include "anchorlife/synth.hpp"

#include "anchorlife/error.hpp"
#include "anchorlife/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace anchorlife
{

namespace
{

double primary_rate(const SynthParams& s, double t)
{
    return s.A_p > 0.0 ? s.A_p * s.p * std::pow(t, s.p - 1.0) : 0.0;
}

double tertiary_rate(const SynthParams& s, double t)
{
    return s.B_t > 0.0 ? s.B_t * s.q / s.t_r * std::pow(1.0 - t / s.t_r, -s.q - 1.0) : 0.0;
}

// Root of an increasing function on [lo, hi] by bisection in ln t, to 1e-12 relative.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi)
{
    double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < 200 && std::exp(b) - std::exp(a) > 1e-12 * std::exp(b); ++i)
    {
        const double mid = 0.5 * (a + b);
        (f(std::exp(mid)) < 0.0 ? a : b) = mid;
    }
    return std::exp(0.5 * (a + b));
}

} // namespace

double synth_displacement(const SynthParams& s, double t)
{
    double d = s.delta0 + s.v_s * t;
    if (s.A_p > 0.0)
        d += s.A_p * std::pow(t, s.p);
    if (s.B_t > 0.0)
        d += s.B_t * std::pow(1.0 - t / s.t_r, -s.q) - s.B_t;
    return d;
}

double synth_rate(const SynthParams& s, double t)
{
    return primary_rate(s, t) + s.v_s + tertiary_rate(s, t);
}

double synth_acceleration(const SynthParams& s, double t)
{
    double a = 0.0;
    if (s.A_p > 0.0)
        a += s.A_p * s.p * (s.p - 1.0) * std::pow(t, s.p - 2.0);
    if (s.B_t > 0.0)
        a += s.B_t * s.q * (s.q + 1.0) / (s.t_r * s.t_r) * std::pow(1.0 - t / s.t_r, -s.q - 2.0);
    return a;
}

void validate_synth(const SynthParams& s)
{
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidValue, "synthetic parameters: " + what); };
    if (!(s.p > 0.0 && s.p < 1.0))
        fail("p must lie in (0, 1)");
    if (!(s.v_s > 0.0))
        fail("v_s must be positive");
    if (s.A_p < 0.0 || s.B_t < 0.0 || s.delta0 < 0.0)
        fail("A_p, B_t and delta0 must be non-negative");
    if (!(s.q > 0.0))
        fail("q must be positive");
    if (!(s.noise_sigma >= 0.0))
        fail("noise_sigma must be non-negative");
    if (!(s.t_start > 0.0) || !(s.t_end > s.t_start))
        fail("need 0 < t_start < t_end");
    if (s.n_log < 2 || s.n_linear < 0 || s.n_log + s.n_linear < static_cast<int>(min_series_samples))
        fail("sample schedule too short");
    if (s.B_t > 0.0 && !(s.t_end <= 0.999 * s.t_r))
        fail("samples must end by 0.999 t_r");

    const double horizon = s.B_t > 0.0 ? 0.5 * s.t_r : s.t_end;
    if (s.A_p > 0.0 && !(primary_rate(s, horizon) < 0.1 * s.v_s))
        throw Error(ErrorCode::SeparationViolated,
                    "primary creep rate stays above 0.1 v_s until " + format_double(horizon) + " s");
}

std::vector<double> synth_schedule(const SynthParams& s)
{
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(s.n_log + s.n_linear));
    const double ratio = std::log(s.t_end / s.t_start);
    for (int i = 0; i < s.n_log; ++i)
        t.push_back(i + 1 == s.n_log ? s.t_end : s.t_start * std::exp(ratio * i / (s.n_log - 1)));
    for (int i = 1; i <= s.n_linear; ++i)
        t.push_back(i == s.n_linear ? s.t_end : s.t_end * i / s.n_linear);
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (const double v : t)
        if (v >= s.t_start && (out.empty() || v > out.back() * (1.0 + 1e-12)))
            out.push_back(v);
    return out;
}

std::pair<DisplacementSeries, SynthTruth> generate(const SynthParams& s, const SpecimenMeta& meta)
{
    validate_synth(s);
    const auto times = synth_schedule(s);

    DisplacementSeries series;
    series.meta = meta;
    series.failed = s.B_t > 0.0;
    series.samples.reserve(times.size());
    for (const double t : times)
        series.samples.push_back({t, synth_displacement(s, t)});

    if (s.noise_sigma > 0.0)
    {
        // Lognormal multipliers on the increments keep the record increasing.
        Rng rng(s.seed);
        double prev_clean = series.samples.front().displacement_mm;
        double prev_noisy = prev_clean;
        for (std::size_t i = 1; i < series.samples.size(); ++i)
        {
            const double clean = series.samples[i].displacement_mm;
            prev_noisy += (clean - prev_clean) * std::exp(s.noise_sigma * rng.normal());
            prev_clean = clean;
            series.samples[i].displacement_mm = prev_noisy;
        }
    }

    SynthTruth truth{};
    truth.has_tertiary = s.B_t > 0.0;
    truth.rupture_time_s = truth.has_tertiary ? s.t_r : 0.0;
    truth.failure_displacement_mm = series.samples.back().displacement_mm;
    if (series.failed)
        series.failure_displacement_mm = truth.failure_displacement_mm;

    auto accel = [&](double t) { return synth_acceleration(s, t); };
    if (accel(s.t_start) >= 0.0)
        truth.t_min_rate = s.t_start;
    else if (accel(s.t_end) <= 0.0)
        truth.t_min_rate = s.t_end;
    else
        truth.t_min_rate = bisect_increasing(accel, s.t_start, s.t_end);
    truth.min_rate_mm_s = synth_rate(s, truth.t_min_rate);
    if (s.A_p == 0.0 && s.B_t == 0.0)
        truth.min_rate_mm_s = s.v_s;

    // Primary share 0.9 P - 0.1 (v + T) falls with t; tertiary share rises.
    auto primary_excess = [&](double t) {
        return -(0.9 * primary_rate(s, t) - 0.1 * (s.v_s + tertiary_rate(s, t)));
    };
    auto tertiary_excess = [&](double t) { return 0.9 * tertiary_rate(s, t) - 0.1 * (s.v_s + primary_rate(s, t)); };
    truth.t_primary_end = primary_excess(s.t_start) >= 0.0 ? s.t_start
                          : primary_excess(truth.t_min_rate) < 0.0
                              ? truth.t_min_rate
                              : bisect_increasing(primary_excess, s.t_start, truth.t_min_rate);
    truth.t_secondary_end = tertiary_excess(s.t_end) <= 0.0 ? s.t_end
                            : tertiary_excess(truth.t_min_rate) > 0.0
                                ? truth.t_min_rate
                                : bisect_increasing(tertiary_excess, truth.t_min_rate, s.t_end);
    return {std::move(series), truth};
}

std::vector<SynthSpecimen> generate_campaign(const CampaignSpec& spec)
{
    if (spec.n_failed < 1 || spec.n_runouts < 0)
        throw Error(ErrorCode::InvalidValue, "campaign needs at least one failed specimen");
    if (!(spec.rate_lo > 0.0 && spec.rate_hi >= spec.rate_lo) || !(spec.mg_slope < 0.0))
        throw Error(ErrorCode::InvalidValue, "campaign needs 0 < rate_lo <= rate_hi and a negative MG slope");
    if (!(spec.mg_scatter >= 0.0))
        throw Error(ErrorCode::InvalidValue, "mg_scatter must be non-negative");
    Rng scatter(splitmix64(~spec.seed));

    auto rupture_time = [&](double v) { return std::exp((std::log(v) - spec.mg_intercept) / spec.mg_slope); };
    auto load_level = [&](double v) { return spec.max_load_level * std::pow(v / spec.rate_hi, 1.0 / spec.stress_exponent); };

    std::vector<SynthSpecimen> out;
    const int total = spec.n_failed + spec.n_runouts;
    for (int k = 0; k < total; ++k)
    {
        const bool failed = k < spec.n_failed;
        double v;
        if (failed)
            v = spec.n_failed == 1 ? spec.rate_lo
                                   : spec.rate_lo * std::pow(spec.rate_hi / spec.rate_lo,
                                                             static_cast<double>(k) / (spec.n_failed - 1));
        else
            v = spec.rate_lo * std::pow(0.5, k - spec.n_failed + 1);
        double t_r = rupture_time(v);
        if (failed && spec.mg_scatter > 0.0)
            t_r *= std::exp(spec.mg_scatter * scatter.normal());

        SynthParams s;
        s.delta0 = 0.5;
        s.p = spec.p;
        s.q = spec.q;
        s.v_s = v;
        // Primary rate is 10% of v_s at 1e-3 t_r.
        s.A_p = 0.1 * v * std::pow(1e-3 * t_r, 1.0 - spec.p) / spec.p;
        s.t_start = 1e-5 * t_r;
        s.noise_sigma = spec.noise_sigma;
        s.seed = splitmix64(spec.seed + static_cast<std::uint64_t>(k));
        s.n_log = spec.n_log;
        s.n_linear = spec.n_linear;
        if (failed)
        {
            s.B_t = v * t_r * std::pow(1.0 - spec.tertiary_crossover, spec.q + 1.0) / spec.q;
            s.t_r = t_r;
            s.t_end = 0.999 * t_r;
        }
        else
        {
            s.t_end = 0.3 * t_r;
        }

        SpecimenMeta meta;
        meta.specimen_id = (failed ? "F" : "R") + std::to_string(k + 1);
        meta.adhesive_id = spec.adhesive_id;
        meta.anchor_radius_mm = spec.anchor_radius_mm;
        meta.embedment_depth_mm = spec.embedment_depth_mm;
        meta.pullout_reference_n = spec.pullout_reference_n;
        meta.sustained_load_n = load_level(v) * spec.pullout_reference_n;
        meta.temperature_c = spec.temperature_c;
        meta = validate_meta(meta);

        auto [series, truth] = generate(s, meta);
        out.push_back({s, std::move(series), truth});
    }
    return out;
}

} // namespace anchorlife
