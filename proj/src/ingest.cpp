#include "anchorlife/ingest.hpp"

#include "anchorlife/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace anchorlife
{

namespace
{

using json = nlohmann::json;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view cell)
{
    cell = trim(cell);
    if (cell.empty())
        return std::nullopt;
    if (cell.front() == '+')
        cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename T>
T require(const json& entry, const char* key, const std::string& id)
{
    if (!entry.contains(key))
        throw Error(ErrorCode::InvalidManifest, std::string("missing field '") + key + "'", id);
    try
    {
        return entry.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        throw Error(ErrorCode::InvalidManifest, std::string("field '") + key + "' has the wrong type", id);
    }
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

SpecimenMeta validate_meta(SpecimenMeta meta)
{
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidValue, std::string(name) + " must be positive", meta.specimen_id);
    };
    positive(meta.anchor_radius_mm, "anchor_radius_mm");
    positive(meta.embedment_depth_mm, "embedment_depth_mm");
    positive(meta.pullout_reference_n, "pullout_reference_n");
    positive(meta.sustained_load_n, "sustained_load_n");

    const double level = meta.sustained_load_n / meta.pullout_reference_n;
    if (meta.load_level != 0.0 && std::abs(meta.load_level - level) > 1e-9 * std::abs(level))
        throw Error(ErrorCode::InvalidValue,
                    "load_level " + format_double(meta.load_level) + " disagrees with sustained/pullout loads (" +
                        format_double(level) + ")",
                    meta.specimen_id);
    if (level > 1.0)
        throw Error(ErrorCode::InvalidValue, "sustained load exceeds the pull-out reference", meta.specimen_id);
    meta.load_level = level;
    return meta;
}

DisplacementSeries parse_series(std::string_view csv_text, const SpecimenMeta& meta, bool failed,
                                std::optional<double> failure_displacement_mm)
{
    DisplacementSeries series;
    series.meta = meta;
    series.failed = failed;
    if (failure_displacement_mm && !failed)
        throw Error(ErrorCode::InvalidValue, "failure displacement given for a specimen that did not fail",
                    meta.specimen_id);
    if (failure_displacement_mm && !(*failure_displacement_mm >= 0.0))
        throw Error(ErrorCode::InvalidValue, "failure displacement must be non-negative", meta.specimen_id);
    series.failure_displacement_mm = failure_displacement_mm;

    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t row = 0;
    while (!csv_text.empty())
    {
        const auto eol = csv_text.find('\n');
        std::string_view line = csv_text.substr(0, eol);
        csv_text.remove_prefix(eol == std::string_view::npos ? csv_text.size() : eol + 1);
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        if (!header_seen)
        {
            if (line != "time_s,displacement_mm")
                throw Error(ErrorCode::MalformedRow, "expected header 'time_s,displacement_mm'", meta.specimen_id);
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        const auto where = "row " + std::to_string(row + 1) + " (line " + std::to_string(line_no) + ")";
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorCode::MalformedRow, where + ": expected two cells", meta.specimen_id);
        const auto t = parse_double(line.substr(0, comma));
        const auto d = parse_double(line.substr(comma + 1));
        if (!t || !d)
            throw Error(ErrorCode::MalformedRow, where + ": non-numeric cell", meta.specimen_id);
        if (*d < 0.0)
            throw Error(ErrorCode::InvalidValue, where + ": negative displacement", meta.specimen_id);
        if (series.samples.empty())
        {
            if (*t < 0.0)
                throw Error(ErrorCode::InvalidValue, where + ": negative time", meta.specimen_id);
        }
        else if (!(*t > series.samples.back().time_s))
            throw Error(ErrorCode::NonMonotonicTime, where + ": time does not increase", meta.specimen_id);
        series.samples.push_back({*t, *d});
        ++row;
    }
    if (!header_seen)
        throw Error(ErrorCode::MalformedRow, "empty file", meta.specimen_id);
    if (series.samples.size() < min_series_samples)
        throw Error(ErrorCode::TooFewSamples,
                    std::to_string(series.samples.size()) + " samples, need at least " +
                        std::to_string(min_series_samples),
                    meta.specimen_id);
    return series;
}

std::string series_to_csv(const DisplacementSeries& series)
{
    std::string out = "time_s,displacement_mm\n";
    for (const auto& s : series.samples)
    {
        out += format_double(s.time_s);
        out += ',';
        out += format_double(s.displacement_mm);
        out += '\n';
    }
    return out;
}

std::vector<DisplacementSeries> load_campaign(const std::filesystem::path& manifest_path)
{
    const std::string text = read_file(manifest_path);
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw Error(ErrorCode::InvalidManifest, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_array())
        throw Error(ErrorCode::InvalidManifest, "manifest must be a JSON array");

    const auto base = manifest_path.parent_path();
    std::vector<DisplacementSeries> out;
    out.reserve(doc.size());
    for (const auto& entry : doc)
    {
        if (!entry.is_object())
            throw Error(ErrorCode::InvalidManifest, "manifest entries must be objects");
        const std::string id = require<std::string>(entry, "specimen_id", "");
        try
        {
            SpecimenMeta meta;
            meta.specimen_id = id;
            meta.adhesive_id = require<std::string>(entry, "adhesive_id", id);
            meta.anchor_radius_mm = require<double>(entry, "anchor_radius_mm", id);
            meta.embedment_depth_mm = require<double>(entry, "embedment_depth_mm", id);
            meta.sustained_load_n = require<double>(entry, "sustained_load_n", id);
            meta.pullout_reference_n = require<double>(entry, "pullout_reference_n", id);
            meta.temperature_c = require<double>(entry, "temperature_c", id);
            if (entry.contains("load_level"))
                meta.load_level = require<double>(entry, "load_level", id);
            meta = validate_meta(meta);

            const bool failed = require<bool>(entry, "failed", id);
            std::optional<double> delta_f;
            if (entry.contains("failure_displacement_mm") && !entry.at("failure_displacement_mm").is_null())
                delta_f = require<double>(entry, "failure_displacement_mm", id);

            std::filesystem::path csv = require<std::string>(entry, "csv_path", id);
            if (csv.is_relative())
                csv = base / csv;
            if (!std::filesystem::exists(csv))
                throw Error(ErrorCode::MissingFile, "series file not found: " + csv.string(), id);
            out.push_back(parse_series(read_file(csv), meta, failed, delta_f));
        }
        catch (const Error& e)
        {
            if (e.specimen_id().empty())
                throw e.tagged(id);
            throw;
        }
    }
    return out;
}

std::filesystem::path write_campaign(const std::filesystem::path& dir, const std::vector<DisplacementSeries>& series,
                                     const std::string& csv_subdir)
{
    std::filesystem::create_directories(dir / csv_subdir);
    json doc = json::array();
    for (const auto& s : series)
    {
        const auto rel = std::filesystem::path(csv_subdir) / (s.meta.specimen_id + ".csv");
        std::ofstream(dir / rel, std::ios::binary) << series_to_csv(s);
        json entry = {
            {"specimen_id", s.meta.specimen_id},
            {"adhesive_id", s.meta.adhesive_id},
            {"csv_path", rel.generic_string()},
            {"anchor_radius_mm", s.meta.anchor_radius_mm},
            {"embedment_depth_mm", s.meta.embedment_depth_mm},
            {"sustained_load_n", s.meta.sustained_load_n},
            {"pullout_reference_n", s.meta.pullout_reference_n},
            {"temperature_c", s.meta.temperature_c},
            {"failed", s.failed},
        };
        if (s.failure_displacement_mm)
            entry["failure_displacement_mm"] = *s.failure_displacement_mm;
        doc.push_back(std::move(entry));
    }
    const auto manifest = dir / "manifest.json";
    std::ofstream(manifest, std::ios::binary) << doc.dump(2) << '\n';
    return manifest;
}

} // namespace anchorlife
