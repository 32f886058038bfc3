#include "anchorlife/json_io.hpp"

#include "anchorlife/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace anchorlife::io
{

namespace
{

json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(number(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw Error(ErrorCode::InvalidValue, "covariance has the wrong shape");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorCode::InvalidValue, "covariance has the wrong shape");
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = to_double(row.at(static_cast<std::size_t>(k)));
    }
    return m;
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::InvalidValue, std::string("missing JSON field '") + key + "'");
    return j.at(key);
}

template <typename T>
T get(const json& j, const char* key)
{
    try
    {
        return field(j, key).get<T>();
    }
    catch (const json::exception&)
    {
        throw Error(ErrorCode::InvalidValue, std::string("JSON field '") + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback)
{
    return j.contains(key) ? get<T>(j, key) : fallback;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& what)
{
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw Error(ErrorCode::InvalidValue, "unknown key '" + key + "' in " + what);
}

} // namespace

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double to_double(const json& j)
{
    if (j.is_null())
        return std::numeric_limits<double>::infinity();
    if (!j.is_number())
        throw Error(ErrorCode::InvalidValue, "expected a number");
    return j.get<double>();
}

json to_json(const LinearFitd& fit)
{
    return {{"slope", fit.slope},  {"intercept", fit.intercept}, {"cov", matrix_json(fit.covariance)},
            {"n", fit.n_points},   {"s2", fit.residual_variance}, {"xbar", fit.xbar},
            {"sxx", fit.sxx}};
}

LinearFitd linear_fit_from_json(const json& j)
{
    LinearFitd fit;
    fit.slope = get<double>(j, "slope");
    fit.intercept = get<double>(j, "intercept");
    fit.covariance = matrix_from_json(field(j, "cov"), 2, 2);
    fit.n_points = get<int>(j, "n");
    fit.residual_variance = get<double>(j, "s2");
    fit.xbar = get<double>(j, "xbar");
    fit.sxx = get<double>(j, "sxx");
    return fit;
}

json to_json(const MGFit& fit)
{
    return {{"variant", std::string(to_string(fit.variant))},
            {"direction", std::string(to_string(fit.direction))},
            {"n", fit.n()},
            {"c", fit.c()},
            {"cov", matrix_json(fit.fit.covariance)},
            {"n_points", fit.fit.n_points},
            {"s2", fit.fit.residual_variance},
            {"dataset_ids", fit.dataset_ids},
            {"physical", fit.physical()},
            {"line", to_json(fit.fit)}};
}

MGFit mg_fit_from_json(const json& j)
{
    MGFit fit;
    fit.variant = parse_mg_variant(get<std::string>(j, "variant"));
    fit.direction = parse_mg_direction(get_or<std::string>(j, "direction", "rate_on_time"));
    fit.fit = linear_fit_from_json(field(j, "line"));
    fit.dataset_ids = get_or<std::vector<std::string>>(j, "dataset_ids", {});
    return fit;
}

json to_json(const StressRateFit& fit)
{
    if (const auto* power = std::get_if<PowerLawFit>(&fit))
    {
        return {{"kind", "power"},
                {"axis", std::string(to_string(power->axis))},
                {"params", {power->exponent_m, power->ln_prefactor}},
                {"param_names", {"m", "ln_prefactor"}},
                {"cov", matrix_json(power->fit.covariance)},
                {"n_points", power->fit.n_points},
                {"line", to_json(power->fit)}};
    }
    const auto& sinh = std::get<SinhFit>(fit);
    json log_params = json::array();
    for (Eigen::Index i = 0; i < sinh.nls.params.size(); ++i)
        log_params.push_back(sinh.nls.params(i));
    return {{"kind", "sinh"},
            {"axis", std::string(to_string(sinh.axis))},
            {"params", {sinh.tau0, sinh.c1, sinh.c2}},
            {"param_names", {"tau0", "c1", "c2"}},
            {"cov", matrix_json(sinh.covariance)},
            {"n_points", sinh.n_points},
            {"log_params", log_params},
            {"log_cov", matrix_json(sinh.nls.covariance)},
            {"sse", sinh.nls.sse},
            {"iterations", sinh.nls.iterations},
            {"converged", sinh.nls.converged}};
}

StressRateFit stress_rate_fit_from_json(const json& j)
{
    const auto kind = get<std::string>(j, "kind");
    const auto params = get<std::vector<double>>(j, "params");
    const StressAxis axis = parse_stress_axis(get_or<std::string>(j, "axis", "absolute"));
    if (kind == "power")
    {
        if (params.size() != 2)
            throw Error(ErrorCode::InvalidValue, "power-law fit needs 2 parameters");
        PowerLawFit f;
        if (j.contains("line"))
            f.fit = linear_fit_from_json(j.at("line"));
        else
        {
            f.fit.slope = params[0];
            f.fit.intercept = params[1];
            f.fit.covariance = matrix_from_json(field(j, "cov"), 2, 2);
            f.fit.n_points = get_or<int>(j, "n_points", 0);
        }
        f.exponent_m = params[0];
        f.ln_prefactor = params[1];
        f.axis = axis;
        return f;
    }
    if (kind == "sinh")
    {
        if (params.size() != 3)
            throw Error(ErrorCode::InvalidValue, "sinh fit needs 3 parameters");
        SinhFit f = make_sinh(params[0], params[1], params[2]);
        f.covariance = matrix_from_json(field(j, "cov"), 3, 3);
        if (j.contains("log_cov"))
            f.nls.covariance = matrix_from_json(j.at("log_cov"), 3, 3);
        else
        {
            const Eigen::Vector3d inv(1.0 / params[0], 1.0 / params[1], 1.0 / params[2]);
            f.nls.covariance = inv.asDiagonal() * f.covariance * inv.asDiagonal();
        }
        f.nls.sse = get_or<double>(j, "sse", 0.0);
        f.nls.iterations = get_or<int>(j, "iterations", 0);
        f.nls.converged = get_or<bool>(j, "converged", true);
        f.n_points = get_or<int>(j, "n_points", 0);
        f.axis = axis;
        return f;
    }
    throw Error(ErrorCode::InvalidValue, "unknown stress-rate fit kind '" + kind + "'");
}

json to_json(const std::vector<KineticsRecord>& records, int window_halfwidth)
{
    json specimens = json::array();
    for (const auto& r : records)
    {
        const auto& k = r.kinetics;
        json e = {{"specimen_id", k.specimen_id},
                  {"adhesive_id", r.meta.adhesive_id},
                  {"anchor_radius_mm", r.meta.anchor_radius_mm},
                  {"embedment_depth_mm", r.meta.embedment_depth_mm},
                  {"sustained_load_n", r.meta.sustained_load_n},
                  {"pullout_reference_n", r.meta.pullout_reference_n},
                  {"load_level", r.meta.load_level},
                  {"temperature_c", r.meta.temperature_c},
                  {"failed", r.failed},
                  {"min_creep_rate_disp", k.min_creep_rate_disp},
                  {"min_creep_rate_strain", k.min_creep_rate_strain},
                  {"t_primary_end", k.stage_bounds.t_primary_end},
                  {"t_secondary_end", k.stage_bounds.t_secondary_end},
                  {"failure_time_s", k.failure_time_s ? json(*k.failure_time_s) : json(nullptr)},
                  {"failure_time_clamped", k.failure_time_clamped},
                  {"failure_displacement_mm",
                   k.failure_displacement_mm ? json(*k.failure_displacement_mm) : json(nullptr)}};
        if (k.secondary_fit)
            e["secondary_fit"] = to_json(*k.secondary_fit);
        if (k.tertiary_fit)
            e["tertiary_fit"] = to_json(*k.tertiary_fit);
        specimens.push_back(std::move(e));
    }
    return {{"window_halfwidth", window_halfwidth}, {"specimens", specimens}};
}

std::vector<KineticsRecord> kinetics_from_json(const json& j)
{
    std::vector<KineticsRecord> out;
    for (const auto& e : field(j, "specimens"))
    {
        KineticsRecord r;
        r.meta.specimen_id = get<std::string>(e, "specimen_id");
        r.meta.adhesive_id = get_or<std::string>(e, "adhesive_id", "");
        r.meta.anchor_radius_mm = get<double>(e, "anchor_radius_mm");
        r.meta.embedment_depth_mm = get<double>(e, "embedment_depth_mm");
        r.meta.sustained_load_n = get<double>(e, "sustained_load_n");
        r.meta.pullout_reference_n = get<double>(e, "pullout_reference_n");
        r.meta.load_level = get<double>(e, "load_level");
        r.meta.temperature_c = get_or<double>(e, "temperature_c", 20.0);
        r.failed = get<bool>(e, "failed");
        auto& k = r.kinetics;
        k.specimen_id = r.meta.specimen_id;
        k.min_creep_rate_disp = get<double>(e, "min_creep_rate_disp");
        k.min_creep_rate_strain = get<double>(e, "min_creep_rate_strain");
        k.stage_bounds = {get<double>(e, "t_primary_end"), get<double>(e, "t_secondary_end")};
        if (e.contains("failure_time_s") && !e.at("failure_time_s").is_null())
            k.failure_time_s = get<double>(e, "failure_time_s");
        k.failure_time_clamped = get_or<bool>(e, "failure_time_clamped", false);
        if (e.contains("failure_displacement_mm") && !e.at("failure_displacement_mm").is_null())
            k.failure_displacement_mm = get<double>(e, "failure_displacement_mm");
        if (e.contains("secondary_fit"))
            k.secondary_fit = linear_fit_from_json(e.at("secondary_fit"));
        if (e.contains("tertiary_fit"))
            k.tertiary_fit = linear_fit_from_json(e.at("tertiary_fit"));
        out.push_back(std::move(r));
    }
    return out;
}

json to_json(const StrengthEstimate& est, double pullout_stress)
{
    return {{"target_life_s", est.target_life_s},
            {"target_life_years", est.target_life_s / seconds_per_year},
            {"pullout_stress", pullout_stress},
            {"stress_mean", est.stress_mean},
            {"load_level_mean", est.load_level_mean},
            {"load_level_lo", est.load_level_lo},
            {"load_level_hi", est.load_level_hi},
            {"life_unbounded", est.life_unbounded},
            {"threshold_caveat", est.threshold_caveat},
            {"lo_clamped", est.lo_clamped},
            {"hi_clamped", est.hi_clamped}};
}

json to_json(const EvaluationReport& report, ResampleCase which, const MGFit& fit)
{
    json points = json::array();
    for (const auto& p : report.points)
        points.push_back({{"specimen_id", p.specimen_id},
                          {"min_creep_rate", p.min_creep_rate},
                          {"observed_s", p.observed_s},
                          {"predicted_s", p.predicted_s},
                          {"lo_s", number(p.lo_s)},
                          {"hi_s", number(p.hi_s)},
                          {"error_s", p.error_s}});
    return {{"case", std::string(to_string(which))},
            {"rmse_s", report.rmse},
            {"nrmse", report.nrmse ? json(*report.nrmse) : json(nullptr)},
            {"nrmse_defined", report.nrmse.has_value()},
            {"level", report.level},
            {"interval", report.interval == IntervalKind::Prediction ? "prediction" : "confidence"},
            {"fit", to_json(fit)},
            {"points", points}};
}

json to_json(const SynthParams& s)
{
    return {{"delta0", s.delta0}, {"A_p", s.A_p},         {"p", s.p},
            {"v_s", s.v_s},       {"B_t", s.B_t},         {"q", s.q},
            {"t_r", s.t_r},       {"noise_sigma", s.noise_sigma}, {"seed", s.seed},
            {"t_start", s.t_start}, {"t_end", s.t_end},   {"n_log", s.n_log},
            {"n_linear", s.n_linear}};
}

SynthParams synth_params_from_json(const json& j)
{
    reject_unknown(j,
                   {"delta0", "A_p", "p", "v_s", "B_t", "q", "t_r", "noise_sigma", "seed", "t_start", "t_end", "n_log",
                    "n_linear", "specimen_id", "adhesive_id", "anchor_radius_mm", "embedment_depth_mm",
                    "sustained_load_n", "pullout_reference_n", "temperature_c"},
                   "specimen parameters");
    SynthParams s;
    s.delta0 = get_or(j, "delta0", s.delta0);
    s.A_p = get_or(j, "A_p", s.A_p);
    s.p = get_or(j, "p", s.p);
    s.v_s = get<double>(j, "v_s");
    s.B_t = get_or(j, "B_t", s.B_t);
    s.q = get_or(j, "q", s.q);
    s.t_r = get_or(j, "t_r", s.t_r);
    s.noise_sigma = get_or(j, "noise_sigma", s.noise_sigma);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    s.t_start = get_or(j, "t_start", s.t_start);
    s.t_end = get<double>(j, "t_end");
    s.n_log = get_or(j, "n_log", s.n_log);
    s.n_linear = get_or(j, "n_linear", s.n_linear);
    return s;
}

json to_json(const SynthTruth& t)
{
    return {{"min_rate_mm_s", t.min_rate_mm_s},
            {"t_min_rate", t.t_min_rate},
            {"t_primary_end", t.t_primary_end},
            {"t_secondary_end", t.t_secondary_end},
            {"rupture_time_s", t.has_tertiary ? json(t.rupture_time_s) : json(nullptr)},
            {"failure_displacement_mm", t.failure_displacement_mm},
            {"has_tertiary", t.has_tertiary}};
}

CampaignSpec campaign_spec_from_json(const json& j)
{
    reject_unknown(j,
                   {"n_failed", "n_runouts", "rate_lo", "rate_hi", "mg_slope", "mg_intercept", "stress_exponent",
                    "max_load_level", "anchor_radius_mm", "embedment_depth_mm", "pullout_reference_n", "temperature_c",
                    "adhesive_id", "p", "q", "tertiary_crossover", "noise_sigma", "mg_scatter", "seed", "n_log",
                    "n_linear"},
                   "campaign");
    CampaignSpec c;
    c.n_failed = get_or(j, "n_failed", c.n_failed);
    c.n_runouts = get_or(j, "n_runouts", c.n_runouts);
    c.rate_lo = get_or(j, "rate_lo", c.rate_lo);
    c.rate_hi = get_or(j, "rate_hi", c.rate_hi);
    c.mg_slope = get_or(j, "mg_slope", c.mg_slope);
    c.mg_intercept = get_or(j, "mg_intercept", c.mg_intercept);
    c.stress_exponent = get_or(j, "stress_exponent", c.stress_exponent);
    c.max_load_level = get_or(j, "max_load_level", c.max_load_level);
    c.anchor_radius_mm = get_or(j, "anchor_radius_mm", c.anchor_radius_mm);
    c.embedment_depth_mm = get_or(j, "embedment_depth_mm", c.embedment_depth_mm);
    c.pullout_reference_n = get_or(j, "pullout_reference_n", c.pullout_reference_n);
    c.temperature_c = get_or(j, "temperature_c", c.temperature_c);
    c.adhesive_id = get_or<std::string>(j, "adhesive_id", c.adhesive_id);
    c.p = get_or(j, "p", c.p);
    c.q = get_or(j, "q", c.q);
    c.tertiary_crossover = get_or(j, "tertiary_crossover", c.tertiary_crossover);
    c.noise_sigma = get_or(j, "noise_sigma", c.noise_sigma);
    c.mg_scatter = get_or(j, "mg_scatter", c.mg_scatter);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.n_log = get_or(j, "n_log", c.n_log);
    c.n_linear = get_or(j, "n_linear", c.n_linear);
    return c;
}

std::string ttf_to_csv(const TTFCurve& curve)
{
    std::string out = "stress,t_mean_s,t_lo_s,t_hi_s\n";
    for (const auto& s : curve.samples)
        out += format_double(s.stress) + ',' + format_double(s.t_mean) + ',' + format_double(s.t_lo) + ',' +
               format_double(s.t_hi) + '\n';
    return out;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw Error(ErrorCode::InvalidValue, path.string() + " is not valid JSON: " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    write_text(path, doc.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
    out << text;
}

} // namespace anchorlife::io
