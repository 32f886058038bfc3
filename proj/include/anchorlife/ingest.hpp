#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anchorlife
{

/// Anchor geometry and loading of one sustained-load test. Units: mm, N, °C.
struct SpecimenMeta
{
    std::string specimen_id;
    std::string adhesive_id;
    double anchor_radius_mm = 0.0;
    double embedment_depth_mm = 0.0;
    double sustained_load_n = 0.0;
    double pullout_reference_n = 0.0;
    double temperature_c = 20.0;
    double load_level = 0.0; ///< sustained_load_n / pullout_reference_n
};

struct Sample
{
    double time_s;
    double displacement_mm;
};

struct DisplacementSeries
{
    SpecimenMeta meta;
    std::vector<Sample> samples;
    bool failed = false;
    std::optional<double> failure_displacement_mm;

    std::size_t size() const noexcept { return samples.size(); }
    double last_time() const { return samples.back().time_s; }
};

inline constexpr std::size_t min_series_samples = 8;

/// Checks the geometry/load invariants and fills in `load_level`. A nonzero
/// `load_level` already present must agree with the loads to 1e-9 relative.
SpecimenMeta validate_meta(SpecimenMeta meta);

/// Parses `time_s,displacement_mm` CSV text.
DisplacementSeries parse_series(std::string_view csv_text, const SpecimenMeta& meta, bool failed = false,
                                std::optional<double> failure_displacement_mm = std::nullopt);

/// Shortest round-trip CSV rendering of the samples.
std::string series_to_csv(const DisplacementSeries& series);

/// Reads a JSON manifest; CSV paths are resolved relative to the manifest.
std::vector<DisplacementSeries> load_campaign(const std::filesystem::path& manifest_path);

/// Writes `<dir>/<csv_subdir>/<id>.csv` for each series plus `<dir>/manifest.json`;
/// returns the manifest path.
std::filesystem::path write_campaign(const std::filesystem::path& dir, const std::vector<DisplacementSeries>& series,
                                     const std::string& csv_subdir = "series");

/// Formats a double with the shortest representation that parses back bitwise.
std::string format_double(double value);

} // namespace anchorlife
