#pragma once

#include "anchorlife/ingest.hpp"
#include "anchorlife/kinetics.hpp"
#include "anchorlife/lifetime.hpp"
#include "anchorlife/stressrate.hpp"
#include "anchorlife/synth.hpp"
#include "anchorlife/ttf.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace anchorlife::io
{

using json = nlohmann::json;

/// Non-finite values become null.
json number(double v);
double to_double(const json& j);

json to_json(const LinearFitd& fit);
LinearFitd linear_fit_from_json(const json& j);

json to_json(const MGFit& fit);
MGFit mg_fit_from_json(const json& j);

json to_json(const StressRateFit& fit);
StressRateFit stress_rate_fit_from_json(const json& j);

/// One kinetics record joined with the specimen metadata it came from.
struct KineticsRecord
{
    SpecimenMeta meta;
    bool failed = false;
    SpecimenKinetics kinetics;
};

json to_json(const std::vector<KineticsRecord>& records, int window_halfwidth);
std::vector<KineticsRecord> kinetics_from_json(const json& j);

json to_json(const StrengthEstimate& est, double pullout_stress);
json to_json(const EvaluationReport& report, ResampleCase which, const MGFit& fit);
json to_json(const SynthParams& params);
SynthParams synth_params_from_json(const json& j);
json to_json(const SynthTruth& truth);
CampaignSpec campaign_spec_from_json(const json& j);

/// `stress,t_mean_s,t_lo_s,t_hi_s`
std::string ttf_to_csv(const TTFCurve& curve);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace anchorlife::io
