#include "anchorlife/cli.hpp"
#include "anchorlife/json_io.hpp"
#include "anchorlife/regress.hpp"
#include "anchorlife/stressrate.hpp"
#include "anchorlife/ttf.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace anchorlife;
namespace fs = std::filesystem;
using io::json;

namespace
{

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("anchorlife_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the CLI with stdout and stderr captured.
struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = run_cli(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

fs::path small_campaign(const fs::path& dir, int n_failed, int n_runouts = 0)
{
    write_file(dir / "campaign.json",
               json{{"n_failed", n_failed}, {"n_runouts", n_runouts}, {"seed", 5}}.dump());
    const auto r = run({"synth", (dir / "campaign.json").string(), "--out", (dir / "data").string()});
    REQUIRE(r.code == exit_ok);
    return dir / "data" / "manifest.json";
}

/// Kinetics records lying exactly on ln rate = n ln t + c.
json exact_kinetics(double n, double c, int count)
{
    std::vector<io::KineticsRecord> records;
    for (int i = 0; i < count; ++i)
    {
        io::KineticsRecord r;
        r.meta.specimen_id = "K" + std::to_string(i + 1);
        r.meta.adhesive_id = "X";
        r.meta.anchor_radius_mm = 8.0;
        r.meta.embedment_depth_mm = 75.0;
        r.meta.pullout_reference_n = 157320.0;
        r.meta.sustained_load_n = 157320.0 * (0.5 + 0.04 * i);
        r.meta.load_level = 0.5 + 0.04 * i;
        r.failed = true;
        const double t = std::pow(10.0, 4.0 + 0.5 * i);
        r.kinetics.specimen_id = r.meta.specimen_id;
        r.kinetics.min_creep_rate_disp = std::exp(c + n * std::log(t));
        r.kinetics.min_creep_rate_strain = r.kinetics.min_creep_rate_disp / 75.0;
        r.kinetics.failure_time_s = t;
        r.kinetics.stage_bounds = {t / 100.0, t / 2.0};
        records.push_back(r);
    }
    return io::to_json(records, 3);
}

MGFit constructed_mg(double n, double c)
{
    MGFit fit;
    fit.variant = MGVariant::Strain;
    fit.fit.slope = n;
    fit.fit.intercept = c;
    fit.fit.n_points = 10;
    fit.fit.xbar = 12.0;
    fit.fit.sxx = 40.0;
    fit.fit.covariance.setZero();
    return fit;
}

StressRateFit constructed_power(double m, double ln_a)
{
    PowerLawFit p = make_power_law(m, ln_a);
    p.axis = StressAxis::LoadLevel;
    p.fit.n_points = 8;
    p.fit.xbar = -0.6;
    p.fit.sxx = 0.3;
    p.fit.covariance.setZero();
    return p;
}

std::vector<std::vector<double>> read_csv(const fs::path& path)
{
    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line))
    {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

// Minimal well-formedness check: balanced tags, one root, quoted attributes.
bool well_formed_xml(const std::string& text)
{
    std::vector<std::string> stack;
    std::size_t i = 0;
    bool seen_root = false;
    while ((i = text.find('<', i)) != std::string::npos)
    {
        const auto close = text.find('>', i);
        if (close == std::string::npos)
            return false;
        std::string tag = text.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.starts_with("?") || tag.starts_with("!"))
            continue;
        if (count(tag, "\"") % 2 != 0)
            return false;
        if (tag.starts_with("/"))
        {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name)
                return false;
            stack.pop_back();
            continue;
        }
        const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
        if (stack.empty())
        {
            if (seen_root)
                return false;
            seen_root = true;
        }
        if (!tag.ends_with("/"))
            stack.push_back(name);
    }
    return seen_root && stack.empty();
}

} // namespace

TEST_CASE("usage errors")
{
    CHECK(run({}).code == exit_usage);
    CHECK(run({"frobnicate"}).code == exit_usage);
    CHECK(run({"analyze"}).code == exit_usage);
    CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("synth: ten specimens, rerun byte-identical, runouts marked")
{
    const auto dir = fresh_dir("synth");
    write_file(dir / "campaign.json", json{{"n_failed", 8}, {"n_runouts", 2}, {"noise_sigma", 0.01}}.dump());
    for (const char* sub : {"a", "b"})
        REQUIRE(run({"synth", (dir / "campaign.json").string(), "--seed", "42", "--out", (dir / sub).string()}).code ==
                exit_ok);

    std::size_t csvs = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a" / "series"))
    {
        ++csvs;
        CHECK(slurp(entry.path()) == slurp(dir / "b" / "series" / entry.path().filename()));
    }
    CHECK(csvs == 10);
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
    CHECK(slurp(dir / "a" / "ground_truth.json") == slurp(dir / "b" / "ground_truth.json"));

    const json manifest = io::read_json(dir / "a" / "manifest.json");
    int runouts = 0;
    for (const auto& e : manifest)
        runouts += e.at("failed").get<bool>() ? 0 : 1;
    CHECK(runouts == 2);

    REQUIRE(run({"synth", (dir / "campaign.json").string(), "--seed", "43", "--out", (dir / "c").string()}).code ==
            exit_ok);
    CHECK(slurp(dir / "a" / "series" / "F1.csv") != slurp(dir / "c" / "series" / "F1.csv"));
}

TEST_CASE("synth: separation-violating specimen exits 1")
{
    const auto dir = fresh_dir("synth_bad");
    write_file(dir / "params.json",
               json{{"specimens",
                     {{{"specimen_id", "BAD"}, {"A_p", 0.05}, {"v_s", 2e-7}, {"B_t", 0.01}, {"t_r", 1e6},
                       {"t_start", 10.0}, {"t_end", 0.999e6}}}}}
                   .dump());
    const auto r = run({"synth", (dir / "params.json").string(), "--out", (dir / "out").string()});
    CHECK(r.code == exit_data_error);
    CHECK(r.err.find("BAD") != std::string::npos);

    write_file(dir / "typo.json", json{{"n_faild", 3}}.dump());
    CHECK(run({"synth", (dir / "typo.json").string(), "--out", (dir / "out").string()}).code == exit_data_error);
}

TEST_CASE("analyze: three specimens and determinism")
{
    const auto dir = fresh_dir("analyze");
    const auto manifest = small_campaign(dir, 3);
    REQUIRE(run({"analyze", manifest.string(), "--out", (dir / "k1").string()}).code == exit_ok);
    REQUIRE(run({"analyze", manifest.string(), "--out", (dir / "k2").string()}).code == exit_ok);
    const json k = io::read_json(dir / "k1" / "kinetics.json");
    CHECK(k.at("specimens").size() == 3);
    CHECK(slurp(dir / "k1" / "kinetics.json") == slurp(dir / "k2" / "kinetics.json"));
    CHECK(fs::exists(dir / "k1" / "rates" / "F1.csv"));

    const auto records = io::kinetics_from_json(k);
    CHECK(records.size() == 3);
    CHECK(io::to_json(records, 3).dump() == k.dump());
}

TEST_CASE("analyze: too-short specimen names the specimen")
{
    const auto dir = fresh_dir("short");
    const auto manifest = small_campaign(dir, 3);
    const fs::path csv = dir / "data" / "series" / "F2.csv";
    std::istringstream in(slurp(csv));
    std::string kept, line;
    for (int i = 0; i < 6 && std::getline(in, line); ++i)
        kept += line + "\n";
    write_file(csv, kept);
    const auto r = run({"analyze", manifest.string(), "--out", (dir / "k").string()});
    CHECK(r.code == exit_data_error);
    CHECK(r.err.find("F2") != std::string::npos);
}

TEST_CASE("fit: mg_fit matches the generating line, both laws, svg smoke")
{
    const auto dir = fresh_dir("fit");
    const auto manifest = small_campaign(dir, 8);
    REQUIRE(run({"analyze", manifest.string(), "--out", dir.string()}).code == exit_ok);
    const auto r = run({"fit", (dir / "kinetics.json").string(), "--law", "both", "--out", dir.string()});
    REQUIRE(r.code == exit_ok);

    const MGFit mg = io::mg_fit_from_json(io::read_json(dir / "mg_fit.json"));
    CHECK(std::abs(mg.n() / -0.95 - 1.0) < 0.05);
    for (const char* name : {"stressrate_power.json", "stressrate_sinh.json", "stressrate_power.svg",
                             "stressrate_sinh.svg", "mg_fit.svg"})
        CHECK(fs::exists(dir / name));
    CHECK_FALSE(fs::exists(dir / "stressrate_fit.json"));

    // Band, line and scatter: three series, three paths.
    const std::string svg = slurp(dir / "mg_fit.svg");
    CHECK(well_formed_xml(svg));
    CHECK(count(svg, "<path") == 3);
    CHECK(well_formed_xml(slurp(dir / "stressrate_sinh.svg")));

    // JSON round trip is lossless.
    const json doc = io::read_json(dir / "stressrate_sinh.json");
    const auto sinh = std::get<SinhFit>(io::stress_rate_fit_from_json(doc));
    CHECK(io::to_json(StressRateFit{sinh}).at("params") == doc.at("params"));
    CHECK(io::to_json(mg).at("line") == io::read_json(dir / "mg_fit.json").at("line"));

    // Displacement and strain MG fits give the same curve once h_ef is applied.
    const json sr_doc = io::read_json(dir / "stressrate_power.json");
    CHECK(sr_doc.at("embedment_depth_mm").get<double>() == 75.0);
    REQUIRE(run({"fit", (dir / "kinetics.json").string(), "--variant", "strain", "--out", (dir / "strain").string()})
                .code == exit_ok);
    const std::vector<std::string> grid = {"--stresses", "0.5,0.7,0.9", "--n-draws", "1000"};
    auto predict = [&](const fs::path& mg_path, const fs::path& out) {
        std::vector<std::string> args = {"predict", mg_path.string(), (dir / "stressrate_power.json").string(),
                                         "--out", out.string()};
        args.insert(args.end(), grid.begin(), grid.end());
        REQUIRE(run(args).code == exit_ok);
        return read_csv(out / "ttf_curve.csv");
    };
    const auto disp_rows = predict(dir / "mg_fit.json", dir / "p_disp");
    const auto strain_rows = predict(dir / "strain" / "mg_fit.json", dir / "p_strain");
    for (std::size_t i = 0; i < disp_rows.size(); ++i)
        CHECK(disp_rows[i][1] == doctest::Approx(strain_rows[i][1]).epsilon(1e-9));
}

TEST_CASE("fit: modified variant without failure displacements exits 1")
{
    const auto dir = fresh_dir("fit_mod");
    write_file(dir / "kinetics.json", exact_kinetics(-1.0, -5.0, 5).dump());
    const auto r = run({"fit", (dir / "kinetics.json").string(), "--variant", "modified", "--out", dir.string()});
    CHECK(r.code == exit_data_error);
    CHECK(r.err.find("MissingFailureStrain") != std::string::npos);
}

TEST_CASE("predict: zero covariance, power-law affinity, strength and NoRoot")
{
    const auto dir = fresh_dir("predict");
    const double m = 40.0;
    const double ln_a = -std::log(fifty_years_s) - m * std::log(0.55);
    io::write_json(dir / "mg.json", io::to_json(constructed_mg(-1.0, 0.0)));
    io::write_json(dir / "sr.json", io::to_json(constructed_power(m, ln_a)));

    const auto r = run({"predict", (dir / "mg.json").string(), (dir / "sr.json").string(), "--pullout-stress", "1",
                        "--target-years", "50", "--n-draws", "1000", "--out", dir.string()});
    REQUIRE(r.code == exit_ok);

    const auto rows = read_csv(dir / "ttf_curve.csv");
    REQUIRE(rows.size() == 50);
    Eigen::VectorXd x(50), y(50);
    for (int i = 0; i < 50; ++i)
    {
        CHECK(rows[i][2] == rows[i][1]);
        CHECK(rows[i][3] == rows[i][1]);
        x(i) = std::log(rows[i][0]);
        y(i) = std::log(rows[i][1]);
    }
    const auto line = ols_fit(x, y);
    const double r2 = 1.0 - line.residual_variance * 48.0 / (y.array() - y.mean()).square().sum();
    CHECK(std::abs(r2 - 1.0) < 1e-10);
    CHECK(line.slope == doctest::Approx(-m).epsilon(1e-9));

    const json strength = io::read_json(dir / "strength.json");
    CHECK(std::abs(strength.at("load_level_mean").get<double>() - 0.55) < 1e-6);

    const std::string svg = slurp(dir / "ttf_curve.svg");
    CHECK(well_formed_xml(svg));
    CHECK(count(svg, "<path") == 3);

    const auto none = run({"predict", (dir / "mg.json").string(), (dir / "sr.json").string(), "--pullout-stress",
                           "1", "--target-life", "1e-3", "--n-draws", "1000", "--out", dir.string()});
    CHECK(none.code == exit_no_root);
}

TEST_CASE("evaluate: exact line gives zero error; unknown case is a usage error")
{
    const auto dir = fresh_dir("evaluate");
    write_file(dir / "kinetics.json", exact_kinetics(-0.9, -4.0, 9).dump());
    for (const char* c : {"full", "i", "ii", "iii"})
    {
        REQUIRE(run({"evaluate", (dir / "kinetics.json").string(), "--case", c, "--variant", "displacement",
                     "--out", dir.string()})
                    .code == exit_ok);
        const json report = io::read_json(dir / ("eval_" + std::string(c) + ".json"));
        REQUIRE(report.at("nrmse_defined").get<bool>());
        CHECK(report.at("nrmse").get<double>() < 1e-9);
        for (const auto& p : report.at("points"))
            CHECK(std::abs(p.at("predicted_s").get<double>() / p.at("observed_s").get<double>() - 1.0) < 1e-9);
    }
    CHECK(run({"evaluate", (dir / "kinetics.json").string(), "--case", "iv", "--out", dir.string()}).code ==
          exit_usage);
}

TEST_CASE("config file: unknown key, bad enum, and flag precedence")
{
    const auto dir = fresh_dir("config");
    write_file(dir / "kinetics.json", exact_kinetics(-0.9, -4.0, 9).dump());

    write_file(dir / "bad.json", json{{"sed", 3}}.dump());
    CHECK(run({"evaluate", (dir / "kinetics.json").string(), "--config", (dir / "bad.json").string()}).code ==
          exit_usage);
    write_file(dir / "enum.json", json{{"variant", "plastic"}}.dump());
    CHECK(run({"evaluate", (dir / "kinetics.json").string(), "--config", (dir / "enum.json").string()}).code ==
          exit_usage);

    write_file(dir / "cfg.json",
               json{{"case", "ii"}, {"variant", "displacement"}, {"out", (dir / "from_config").string()}}.dump());
    REQUIRE(run({"evaluate", (dir / "kinetics.json").string(), "--config", (dir / "cfg.json").string()}).code ==
            exit_ok);
    CHECK(fs::exists(dir / "from_config" / "eval_ii.json"));
    REQUIRE(run({"evaluate", (dir / "kinetics.json").string(), "--config", (dir / "cfg.json").string(), "--case",
                 "iii", "--out", (dir / "from_flag").string()})
                .code == exit_ok);
    CHECK(fs::exists(dir / "from_flag" / "eval_iii.json"));
    CHECK_FALSE(fs::exists(dir / "from_flag" / "eval_ii.json"));
}
