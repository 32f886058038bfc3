#include "anchorlife/cli.hpp"

#include "anchorlife/error.hpp"
#include "anchorlife/json_io.hpp"
#include "anchorlife/kinetics.hpp"
#include "anchorlife/lifetime.hpp"
#include "anchorlife/sampling.hpp"
#include "anchorlife/stressrate.hpp"
#include "anchorlife/svg.hpp"
#include "anchorlife/synth.hpp"
#include "anchorlife/ttf.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

namespace anchorlife
{

namespace
{

namespace fs = std::filesystem;
using io::json;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Flags and config-file values. Flags win; config fills whatever is unset.
struct Settings
{
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> n_draws;
    std::optional<int> window;
    std::optional<double> level;
    std::optional<std::string> bond_area;
    std::optional<std::string> interval;

    std::optional<std::string> variant;
    std::optional<std::string> direction;
    std::optional<std::string> law;
    std::optional<std::string> stress_axis;
    std::optional<double> max_load_level;
    std::optional<bool> include_unfailed;

    std::optional<std::vector<double>> stresses;
    std::optional<int> n_stresses;
    std::optional<double> stress_min;
    std::optional<double> stress_max;
    std::optional<double> target_life_s;
    std::optional<double> target_life_years;
    std::optional<double> assumed_failure_strain;
    std::optional<double> pullout_stress;
    std::optional<double> embedment_depth;

    std::optional<std::string> case_name;
    std::optional<std::string> fit_path;

    std::vector<std::string> inputs;
};

template <typename T>
void fill(std::optional<T>& dst, const json& value, const std::string& key)
{
    if (dst)
        return;
    try
    {
        dst = value.get<T>();
    }
    catch (const json::exception&)
    {
        throw UsageError("config key '" + key + "' has the wrong type");
    }
}

void apply_config(Settings& s)
{
    if (!s.config)
        return;
    json doc;
    try
    {
        doc = io::read_json(*s.config);
    }
    catch (const Error& e)
    {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!doc.is_object())
        throw UsageError("config must be a JSON object");

    const std::map<std::string, std::function<void(const json&, const std::string&)>> setters = {
        {"seed", [&](const json& v, const std::string& k) { fill(s.seed, v, k); }},
        {"out", [&](const json& v, const std::string& k) { fill(s.out, v, k); }},
        {"n_draws", [&](const json& v, const std::string& k) { fill(s.n_draws, v, k); }},
        {"window_halfwidth", [&](const json& v, const std::string& k) { fill(s.window, v, k); }},
        {"level", [&](const json& v, const std::string& k) { fill(s.level, v, k); }},
        {"bond_area", [&](const json& v, const std::string& k) { fill(s.bond_area, v, k); }},
        {"interval", [&](const json& v, const std::string& k) { fill(s.interval, v, k); }},
        {"variant", [&](const json& v, const std::string& k) { fill(s.variant, v, k); }},
        {"direction", [&](const json& v, const std::string& k) { fill(s.direction, v, k); }},
        {"law", [&](const json& v, const std::string& k) { fill(s.law, v, k); }},
        {"stress_axis", [&](const json& v, const std::string& k) { fill(s.stress_axis, v, k); }},
        {"max_load_level", [&](const json& v, const std::string& k) { fill(s.max_load_level, v, k); }},
        {"include_unfailed", [&](const json& v, const std::string& k) { fill(s.include_unfailed, v, k); }},
        {"stresses", [&](const json& v, const std::string& k) { fill(s.stresses, v, k); }},
        {"n_stresses", [&](const json& v, const std::string& k) { fill(s.n_stresses, v, k); }},
        {"stress_min", [&](const json& v, const std::string& k) { fill(s.stress_min, v, k); }},
        {"stress_max", [&](const json& v, const std::string& k) { fill(s.stress_max, v, k); }},
        {"target_life_s", [&](const json& v, const std::string& k) { fill(s.target_life_s, v, k); }},
        {"target_life_years", [&](const json& v, const std::string& k) { fill(s.target_life_years, v, k); }},
        {"assumed_failure_strain", [&](const json& v, const std::string& k) { fill(s.assumed_failure_strain, v, k); }},
        {"pullout_stress", [&](const json& v, const std::string& k) { fill(s.pullout_stress, v, k); }},
        {"embedment_depth_mm", [&](const json& v, const std::string& k) { fill(s.embedment_depth, v, k); }},
        {"case", [&](const json& v, const std::string& k) { fill(s.case_name, v, k); }},
        {"fit", [&](const json& v, const std::string& k) { fill(s.fit_path, v, k); }},
    };
    for (const auto& [key, value] : doc.items())
    {
        const auto it = setters.find(key);
        if (it == setters.end())
            throw UsageError("unknown config key '" + key + "'");
        it->second(value, key);
    }
}

template <typename F>
auto parse_choice(F&& parse, const std::string& text, const char* what)
{
    try
    {
        return parse(text);
    }
    catch (const Error&)
    {
        throw UsageError(std::string("invalid ") + what + " '" + text + "'");
    }
}

void validate(const Settings& s)
{
    if (s.n_draws && *s.n_draws < 1000)
        throw UsageError("n_draws must be at least 1000");
    if (s.window && *s.window < 1)
        throw UsageError("window_halfwidth must be at least 1");
    if (s.level && !(*s.level > 0.0 && *s.level < 1.0))
        throw UsageError("level must lie in (0, 1)");
    if (s.interval && *s.interval != "prediction" && *s.interval != "confidence")
        throw UsageError("interval must be 'prediction' or 'confidence'");
    if (s.law && *s.law != "power" && *s.law != "sinh" && *s.law != "both")
        throw UsageError("law must be 'power', 'sinh' or 'both'");
    if (s.target_life_s && s.target_life_years)
        throw UsageError("give target_life_s or target_life_years, not both");
    if (s.n_stresses && *s.n_stresses < 2)
        throw UsageError("n_stresses must be at least 2");
    if (s.bond_area)
        parse_choice(parse_bond_area, *s.bond_area, "bond_area");
    if (s.stress_axis)
        parse_choice(parse_stress_axis, *s.stress_axis, "stress_axis");
    if (s.variant)
        parse_choice(parse_mg_variant, *s.variant, "variant");
    if (s.direction)
        parse_choice(parse_mg_direction, *s.direction, "direction");
    if (s.case_name && !parse_resample_case(*s.case_name))
        throw UsageError("unknown case '" + *s.case_name + "' (expected full, i, ii or iii)");
}

fs::path out_dir(const Settings& s)
{
    return fs::path(s.out.value_or("."));
}

double percentile(std::vector<double> v, double percent)
{
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * percent / 100.0;
    const auto k = static_cast<std::size_t>(std::floor(h));
    if (k + 1 >= v.size())
        return v.back();
    return v[k] + (h - static_cast<double>(k)) * (v[k + 1] - v[k]);
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = i + 1 == n ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return out;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const Settings& s)
{
    const int window = s.window.value_or(default_window_halfwidth);
    const auto campaign = load_campaign(s.inputs.at(0));
    const fs::path dir = out_dir(s);

    std::vector<io::KineticsRecord> records;
    for (const auto& series : campaign)
    {
        try
        {
            io::KineticsRecord r{series.meta, series.failed, analyze_specimen(series, window)};
            const auto rates = estimate_rates(series, window);
            std::string csv = "time_s,rate_mm_s\n";
            for (const auto& p : rates.samples)
                csv += format_double(p.time_s) + ',' + format_double(p.rate_mm_s) + '\n';
            io::write_text(dir / "rates" / (series.meta.specimen_id + ".csv"), csv);
            records.push_back(std::move(r));
        }
        catch (const Error& e)
        {
            throw e.specimen_id().empty() ? e.tagged(series.meta.specimen_id) : e;
        }
    }
    io::write_json(dir / "kinetics.json", io::to_json(records, window));
    std::cout << "analyzed " << records.size() << " specimens -> " << (dir / "kinetics.json").string() << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- fit helpers

std::vector<io::KineticsRecord> selected_records(const Settings& s, const fs::path& path)
{
    auto records = io::kinetics_from_json(io::read_json(path));
    if (s.max_load_level)
        std::erase_if(records, [&](const io::KineticsRecord& r) { return r.meta.load_level >= *s.max_load_level; });
    return records;
}

std::vector<MGDataPoint> mg_points(const std::vector<io::KineticsRecord>& records, MGVariant variant)
{
    std::vector<MGDataPoint> points;
    for (const auto& r : records)
    {
        if (!r.failed || !r.kinetics.failure_time_s)
            continue;
        MGDataPoint p;
        p.specimen_id = r.meta.specimen_id;
        p.min_creep_rate =
            variant == MGVariant::Displacement ? r.kinetics.min_creep_rate_disp : r.kinetics.min_creep_rate_strain;
        p.failure_time_s = *r.kinetics.failure_time_s;
        if (r.kinetics.failure_displacement_mm)
            p.failure_strain = *r.kinetics.failure_displacement_mm / r.meta.embedment_depth_mm;
        points.push_back(std::move(p));
    }
    return points;
}

MGVariant variant_of(const Settings& s)
{
    return parse_mg_variant(s.variant.value_or("displacement"));
}

MGDirection direction_of(const Settings& s)
{
    return parse_mg_direction(s.direction.value_or("rate_on_time"));
}

IntervalKind interval_of(const Settings& s)
{
    return s.interval.value_or("prediction") == "confidence" ? IntervalKind::Confidence : IntervalKind::Prediction;
}

std::string mg_plot(const MGFit& fit, const std::vector<MGDataPoint>& points, double level, IntervalKind kind)
{
    const bool rate_on_time = fit.direction == MGDirection::RateOnTime;
    const std::string time_label =
        fit.variant == MGVariant::Modified ? "t_f / failure strain [s]" : "time to failure [s]";
    const std::string rate_label =
        fit.variant == MGVariant::Displacement ? "minimum creep rate [mm/s]" : "minimum creep rate [1/s]";

    svg::Series data{svg::SeriesKind::Scatter, "specimens", {}, {}, {}, {}, "#1f77b4"};
    for (const auto& p : points)
    {
        const double t = normalized_time(p, fit.variant);
        data.x.push_back(rate_on_time ? t : p.min_creep_rate);
        data.y.push_back(rate_on_time ? p.min_creep_rate : t);
    }
    const auto [xmin, xmax] = std::minmax_element(data.x.begin(), data.x.end());
    const auto grid = log_grid(*xmin / 2.0, *xmax * 2.0, 60);

    svg::Series line{svg::SeriesKind::Line, "mean fit", {}, {}, {}, {}, "#d62728"};
    svg::Series band{svg::SeriesKind::Band, "interval", {}, {}, {}, {}, "#d62728"};
    for (const double x : grid)
    {
        const double lx = std::log(x);
        const double hw = interval_half_width(fit.fit, lx, level, kind);
        line.x.push_back(x);
        line.y.push_back(std::exp(fit.fit(lx)));
        band.x.push_back(x);
        band.y.push_back(std::exp(fit.fit(lx) - hw));
        band.y_upper.push_back(std::exp(fit.fit(lx) + hw));
    }
    svg::Plot plot;
    plot.title = "Monkman-Grant fit (" + std::string(to_string(fit.variant)) + ")";
    plot.x_label = rate_on_time ? time_label : rate_label;
    plot.y_label = rate_on_time ? rate_label : time_label;
    plot.series = {band, line, data};
    return svg::render(plot);
}

std::string stress_rate_plot(const StressRateFit& fit, const std::vector<StressRatePoint>& points, std::uint64_t seed)
{
    const StressAxis axis = axis_of(fit);
    svg::Series failed{svg::SeriesKind::Scatter, "failed", {}, {}, {}, {}, "#1f77b4"};
    svg::Series runout{svg::SeriesKind::Scatter, "runout", {}, {}, {}, {}, "#2ca02c"};
    for (const auto& p : points)
    {
        auto& target = p.failed ? failed : runout;
        target.x.push_back(p.stress);
        target.y.push_back(p.min_creep_rate);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : points)
    {
        lo = std::min(lo, p.stress);
        hi = std::max(hi, p.stress);
    }
    lo *= 0.95;
    hi *= 1.05;
    const auto* sinh = std::get_if<SinhFit>(&fit);
    if (sinh)
        lo = std::max(lo, sinh->tau0 * (1.0 + 1e-6));
    const auto grid = log_grid(lo, hi, 80);

    constexpr int n_band_draws = 2000;
    const Eigen::MatrixXd draws = sinh ? Eigen::MatrixXd(sample_params(sinh->nls, n_band_draws, seed).array().exp())
                                       : sample_params(std::get<PowerLawFit>(fit).fit, n_band_draws, seed);

    svg::Series line{svg::SeriesKind::Line, "mean fit", {}, {}, {}, {}, "#d62728"};
    svg::Series band{svg::SeriesKind::Band, "95% parameter band", {}, {}, {}, {}, "#d62728"};
    for (const double tau : grid)
    {
        std::vector<double> rates;
        rates.reserve(n_band_draws);
        for (Eigen::Index d = 0; d < draws.rows(); ++d)
        {
            if (sinh)
                rates.push_back(tau > draws(d, 0) ? sinh_rate(draws(d, 0), draws(d, 1), draws(d, 2), tau) : 0.0);
            else
                rates.push_back(std::exp(draws(d, 1) + draws(d, 0) * std::log(tau)));
        }
        line.x.push_back(tau);
        line.y.push_back(rate_at_stress(fit, tau));
        band.x.push_back(tau);
        band.y.push_back(percentile(rates, 2.5));
        band.y_upper.push_back(percentile(rates, 97.5));
    }

    svg::Plot plot;
    plot.title = sinh ? "Stress vs minimum creep rate (sinh law)" : "Stress vs minimum creep rate (power law)";
    plot.x_label = axis == StressAxis::Absolute ? "bond stress [MPa]" : "load level [-]";
    plot.y_label = "minimum creep rate [1/s]";
    plot.series = {band, line, failed};
    if (!runout.x.empty())
        plot.series.push_back(runout);
    return svg::render(plot);
}

// ---------------------------------------------------------------- fit

int cmd_fit(const Settings& s)
{
    const auto records = selected_records(s, s.inputs.at(0));
    const fs::path dir = out_dir(s);
    const MGVariant variant = variant_of(s);
    const double level = s.level.value_or(0.95);
    const IntervalKind kind = interval_of(s);
    const std::uint64_t seed = s.seed.value_or(1);

    const auto points = mg_points(records, variant);
    if (points.size() < 3)
        throw Error(ErrorCode::TooFewPoints, "fit needs at least 3 failed specimens, got " +
                                                 std::to_string(points.size()));
    const MGFit mg = fit_mg(points, variant, direction_of(s));
    json mg_doc = io::to_json(mg);
    mg_doc["level"] = level;
    mg_doc["interval"] = kind == IntervalKind::Prediction ? "prediction" : "confidence";
    io::write_json(dir / "mg_fit.json", mg_doc);
    io::write_text(dir / "mg_fit.svg", mg_plot(mg, points, level, kind));

    const BondArea area = parse_bond_area(s.bond_area.value_or("as_printed"));
    const StressAxis axis = parse_stress_axis(s.stress_axis.value_or("absolute"));
    const bool include_unfailed = s.include_unfailed.value_or(false);
    std::vector<StressRatePoint> sr_points;
    double pullout_sum = 0.0;
    std::optional<double> common_h_ef;
    bool h_ef_varies = false;
    for (const auto& r : records)
    {
        if (!r.failed && !include_unfailed)
            continue;
        const auto& m = r.meta;
        const double stress = axis == StressAxis::Absolute
                                  ? bond_stress(m.sustained_load_n, m.anchor_radius_mm, m.embedment_depth_mm, area)
                                  : m.load_level;
        sr_points.push_back({stress, r.kinetics.min_creep_rate_strain, r.failed});
        if (common_h_ef && *common_h_ef != m.embedment_depth_mm)
            h_ef_varies = true;
        common_h_ef = m.embedment_depth_mm;
        pullout_sum += axis == StressAxis::Absolute
                           ? bond_stress(m.pullout_reference_n, m.anchor_radius_mm, m.embedment_depth_mm, area)
                           : 1.0;
    }
    if (sr_points.empty())
        throw Error(ErrorCode::TooFewPoints, "no specimens available for the stress-rate fit");
    const double pullout_stress = pullout_sum / static_cast<double>(sr_points.size());

    const std::string law = s.law.value_or("power");
    auto write_sr = [&](const StressRateFit& fit, const std::string& stem) {
        json doc = io::to_json(fit);
        doc["pullout_stress"] = pullout_stress;
        if (!h_ef_varies)
            doc["embedment_depth_mm"] = *common_h_ef;
        doc["bond_area"] = std::string(to_string(area));
        doc["include_unfailed"] = include_unfailed;
        io::write_json(dir / (stem + ".json"), doc);
        io::write_text(dir / (stem + ".svg"), stress_rate_plot(fit, sr_points, splitmix64(seed)));
    };
    if (law == "both")
    {
        write_sr(fit_power_law(sr_points, axis), "stressrate_power");
        write_sr(fit_sinh(sr_points, axis), "stressrate_sinh");
    }
    else if (law == "sinh")
        write_sr(fit_sinh(sr_points, axis), "stressrate_fit");
    else
        write_sr(fit_power_law(sr_points, axis), "stressrate_fit");

    std::cout << "MG " << to_string(variant) << ": n = " << format_double(mg.n()) << ", c = " << format_double(mg.c())
              << " (" << points.size() << " specimens)" << (mg.physical() ? "" : "  [warning: n >= 0]") << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const Settings& s)
{
    if (s.inputs.size() != 2)
        throw UsageError("predict needs <mg_fit.json> <stressrate_fit.json>");
    const MGFit mg = io::mg_fit_from_json(io::read_json(s.inputs[0]));
    const json sr_doc = io::read_json(s.inputs[1]);
    const StressRateFit sr = io::stress_rate_fit_from_json(sr_doc);
    const fs::path dir = out_dir(s);
    const int n_draws = s.n_draws.value_or(10000);
    const std::uint64_t seed = s.seed.value_or(1);

    double pullout = 1.0;
    if (s.pullout_stress)
        pullout = *s.pullout_stress;
    else if (sr_doc.contains("pullout_stress"))
        pullout = sr_doc.at("pullout_stress").get<double>();
    else if (axis_of(sr) == StressAxis::Absolute)
        throw UsageError("absolute-stress fits need pullout_stress");

    TTFOptions options;
    options.assumed_failure_strain = s.assumed_failure_strain;
    if (s.embedment_depth)
        options.embedment_depth_mm = *s.embedment_depth;
    else if (sr_doc.contains("embedment_depth_mm"))
        options.embedment_depth_mm = sr_doc.at("embedment_depth_mm").get<double>();

    std::vector<double> stresses;
    if (s.stresses)
        stresses = *s.stresses;
    else
    {
        const auto* sinh = std::get_if<SinhFit>(&sr);
        const double lo = s.stress_min.value_or(sinh ? sinh->tau0 * 1.01 : 0.3 * pullout);
        const double hi = s.stress_max.value_or(pullout);
        if (!(lo > 0.0 && hi > lo))
            throw UsageError("stress range must satisfy 0 < stress_min < stress_max");
        stresses = log_grid(lo, hi, s.n_stresses.value_or(50));
    }

    const TTFCurve curve = compose_ttf(sr, mg, stresses, n_draws, seed, options);
    io::write_text(dir / "ttf_curve.csv", io::ttf_to_csv(curve));

    std::optional<double> target = s.target_life_s;
    if (s.target_life_years)
        target = *s.target_life_years * seconds_per_year;

    svg::Series line{svg::SeriesKind::Line, "mean", {}, {}, {}, {}, "#d62728"};
    svg::Series band{svg::SeriesKind::BandX, "2.5-97.5% band", {}, {}, {}, {}, "#d62728"};
    for (const auto& p : curve.samples)
    {
        if (p.below_threshold)
            continue;
        line.x.push_back(p.t_mean);
        line.y.push_back(p.stress);
        band.x.push_back(p.t_lo);
        band.x_upper.push_back(p.t_hi);
        band.y.push_back(p.stress);
    }
    svg::Plot plot;
    plot.title = "Time to failure";
    plot.x_label = "time to failure [s]";
    plot.y_label = curve.axis == StressAxis::Absolute ? "bond stress [MPa]" : "load level [-]";
    plot.log_y = false;
    plot.series = {band, line};
    if (target)
        plot.series.push_back({svg::SeriesKind::Line, "target life", {*target, *target},
                               {stresses.front(), stresses.back()}, {}, {}, "#7f7f7f"});
    io::write_text(dir / "ttf_curve.svg", svg::render(plot));
    std::cout << "ttf curve: " << curve.samples.size() << " stresses, " << n_draws << " draws\n";

    if (target)
    {
        const auto est = sustained_strength(sr, mg, pullout, *target, n_draws, seed, options);
        io::write_json(dir / "strength.json", io::to_json(est, pullout));
        std::cout << "sustained load level for " << format_double(*target) << " s: "
                  << format_double(est.load_level_mean) << " [" << format_double(est.load_level_lo) << ", "
                  << format_double(est.load_level_hi) << "]" << (est.life_unbounded ? " (life unbounded)" : "")
                  << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const Settings& s)
{
    const std::string case_text = s.case_name.value_or("full");
    const auto which = parse_resample_case(case_text);
    if (!which)
        throw UsageError("unknown case '" + case_text + "' (expected full, i, ii or iii)");

    MGVariant variant = variant_of(s);
    MGDirection direction = direction_of(s);
    if (s.fit_path)
    {
        const MGFit ref = io::mg_fit_from_json(io::read_json(*s.fit_path));
        if (!s.variant)
            variant = ref.variant;
        if (!s.direction)
            direction = ref.direction;
    }
    const double level = s.level.value_or(0.95);
    const auto points = mg_points(selected_records(s, s.inputs.at(0)), variant);
    const auto split = resample_case(points, *which);
    const MGFit fit = fit_mg(split.retained, variant, direction);
    const auto report = score_prediction(fit, split.held_out, level, interval_of(s));

    const fs::path path = out_dir(s) / ("eval_" + std::string(to_string(*which)) + ".json");
    io::write_json(path, io::to_json(report, *which, fit));
    std::cout << "case " << to_string(*which) << ": RMSE " << format_double(report.rmse) << " s, NRMSE "
              << (report.nrmse ? format_double(*report.nrmse) : std::string("undefined")) << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- synth

SpecimenMeta synth_meta(const json& j, const std::string& fallback_id)
{
    auto num = [&](const char* key, double fallback) {
        return j.contains(key) ? j.at(key).get<double>() : fallback;
    };
    SpecimenMeta m;
    m.specimen_id = j.contains("specimen_id") ? j.at("specimen_id").get<std::string>() : fallback_id;
    m.adhesive_id = j.contains("adhesive_id") ? j.at("adhesive_id").get<std::string>() : "SYN";
    m.anchor_radius_mm = num("anchor_radius_mm", 8.0);
    m.embedment_depth_mm = num("embedment_depth_mm", 75.0);
    m.pullout_reference_n = num("pullout_reference_n", 157320.0);
    m.sustained_load_n = num("sustained_load_n", 0.5 * m.pullout_reference_n);
    m.temperature_c = num("temperature_c", 23.0);
    return validate_meta(m);
}

int cmd_synth(const Settings& s)
{
    const json doc = s.inputs.empty() ? json::object() : io::read_json(s.inputs[0]);
    if (!doc.is_object())
        throw Error(ErrorCode::InvalidValue, "synth parameters must be a JSON object");

    std::vector<SynthSpecimen> specimens;
    json truth_doc = json::object();
    if (doc.contains("specimens"))
    {
        if (doc.size() != 1 || !doc.at("specimens").is_array())
            throw Error(ErrorCode::InvalidValue, "a specimen list must be the only key, holding an array");
        std::size_t k = 0;
        for (const auto& entry : doc.at("specimens"))
        {
            const std::string fallback = "S" + std::to_string(k + 1);
            const SpecimenMeta meta = synth_meta(entry, fallback);
            SynthParams params = io::synth_params_from_json(entry);
            if (s.seed)
                params.seed = splitmix64(*s.seed + k);
            try
            {
                auto [series, truth] = generate(params, meta);
                specimens.push_back({params, std::move(series), truth});
            }
            catch (const Error& e)
            {
                throw e.tagged(meta.specimen_id);
            }
            ++k;
        }
    }
    else
    {
        CampaignSpec spec = io::campaign_spec_from_json(doc);
        if (s.seed)
            spec.seed = *s.seed;
        specimens = generate_campaign(spec);
        truth_doc["campaign"] = {{"mg_slope", spec.mg_slope},     {"mg_intercept", spec.mg_intercept},
                                 {"stress_exponent", spec.stress_exponent}, {"seed", spec.seed},
                                 {"noise_sigma", spec.noise_sigma}, {"mg_scatter", spec.mg_scatter}};
    }

    std::vector<DisplacementSeries> series;
    json list = json::array();
    for (const auto& sp : specimens)
    {
        series.push_back(sp.series);
        list.push_back({{"specimen_id", sp.series.meta.specimen_id},
                        {"failed", sp.series.failed},
                        {"params", io::to_json(sp.params)},
                        {"truth", io::to_json(sp.truth)}});
    }
    truth_doc["specimens"] = list;

    const fs::path dir = out_dir(s);
    const auto manifest = write_campaign(dir, series);
    io::write_json(dir / "ground_truth.json", truth_doc);
    std::cout << "wrote " << series.size() << " specimens -> " << manifest.string() << '\n';
    return exit_ok;
}

} // namespace

int run_cli(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run_cli(args);
}

int run_cli(const std::vector<std::string>& args)
{
    CLI::App app{"Adhesive-anchor creep lifetime toolkit", "anchorlife"};
    app.require_subcommand(1);
    app.fallthrough();
    Settings s;
    bool include_unfailed_flag = false;

    app.add_option("--config", s.config, "JSON config file; flags override its values");
    app.add_option("--seed", s.seed, "RNG seed");
    app.add_option("--out", s.out, "output directory (default .)");
    app.add_option("--n-draws", s.n_draws, "Monte-Carlo draws (default 10000)");
    app.add_option("--window", s.window, "rate window half-width (default 3)");
    app.add_option("--level", s.level, "interval level (default 0.95)");
    app.add_option("--bond-area", s.bond_area, "as_printed | lateral_surface");
    app.add_option("--interval", s.interval, "prediction | confidence");

    auto* analyze = app.add_subcommand("analyze", "stage segmentation and minimum creep rates");
    analyze->add_option("manifest", s.inputs, "campaign manifest.json")->required()->expected(1);

    auto* fit = app.add_subcommand("fit", "Monkman-Grant and stress-rate fits");
    fit->add_option("kinetics", s.inputs, "kinetics.json from analyze")->required()->expected(1);
    fit->add_option("--variant", s.variant, "displacement | strain | modified");
    fit->add_option("--direction", s.direction, "rate_on_time | time_on_rate");
    fit->add_option("--law", s.law, "power | sinh | both");
    fit->add_option("--stress-axis", s.stress_axis, "absolute | load_level");
    fit->add_option("--max-load-level", s.max_load_level, "drop specimens at or above this load level");
    auto* unfailed = fit->add_flag("--include-unfailed", include_unfailed_flag, "add runouts to the stress-rate fit");

    auto* predict = app.add_subcommand("predict", "time-to-failure curve and sustained strength");
    predict->add_option("fits", s.inputs, "<mg_fit.json> <stressrate_fit.json>")->required()->expected(2);
    predict->add_option("--stresses", s.stresses, "explicit ascending stresses")->delimiter(',');
    predict->add_option("--n-stresses", s.n_stresses, "grid size (default 50)");
    predict->add_option("--stress-min", s.stress_min, "grid start");
    predict->add_option("--stress-max", s.stress_max, "grid end (default pull-out stress)");
    predict->add_option("--target-life", s.target_life_s, "target life in seconds");
    predict->add_option("--target-years", s.target_life_years, "target life in years of 365.25 days");
    predict->add_option("--assumed-failure-strain", s.assumed_failure_strain, "needed for modified MG fits");
    predict->add_option("--pullout-stress", s.pullout_stress, "overrides the value stored with the fit");
    predict->add_option("--embedment-depth", s.embedment_depth,
                        "h_ef in mm for displacement-rate MG fits; overrides the value stored with the fit");

    auto* evaluate = app.add_subcommand("evaluate", "resampling robustness check");
    evaluate->add_option("kinetics", s.inputs, "kinetics.json from analyze")->required()->expected(1);
    evaluate->add_option("--case", s.case_name, "full | i | ii | iii");
    evaluate->add_option("--fit", s.fit_path, "mg_fit.json supplying variant and direction");
    evaluate->add_option("--variant", s.variant, "displacement | strain | modified");
    evaluate->add_option("--direction", s.direction, "rate_on_time | time_on_rate");
    evaluate->add_option("--max-load-level", s.max_load_level, "drop specimens at or above this load level");

    auto* synth = app.add_subcommand("synth", "synthetic campaign with ground truth");
    synth->add_option("params", s.inputs, "campaign or specimen-list JSON (default campaign if omitted)")
        ->expected(0, 1);

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    if (unfailed->count() > 0)
        s.include_unfailed = include_unfailed_flag;

    try
    {
        apply_config(s);
        validate(s);
        if (analyze->parsed())
            return cmd_analyze(s);
        if (fit->parsed())
            return cmd_fit(s);
        if (predict->parsed())
            return cmd_predict(s);
        if (evaluate->parsed())
            return cmd_evaluate(s);
        return cmd_synth(s);
    }
    catch (const UsageError& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::NoRoot ? exit_no_root : exit_data_error;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data_error;
    }
}

} // namespace anchorlife
