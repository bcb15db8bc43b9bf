#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "greedy_tools/config.hpp"
#include "greedy_tools/runner.hpp"
#include "greedy_tools/svg_plot.hpp"
#include "greedy_tools/trace_io.hpp"
#include "support/property.hpp"

using namespace greedy;
using namespace greedy::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::path(::testing::TempDir()) / ("greedy_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

std::string without_seconds(const std::string& csv)
{
    // Drops the trailing seconds column of every line.
    std::string out;
    std::size_t start = 0;
    while (start < csv.size()) {
        const std::size_t end = csv.find('\n', start);
        const std::string line = csv.substr(start, end - start);
        out += line.substr(0, line.rfind(',')) + '\n';
        start = end + 1;
    }
    return out;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(GREEDY_APPROX_EXE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, MinimalEimFile)
{
    const ExperimentConfig c = parse_config_text("kind = eim\nm = 1\np = inf\n");
    EXPECT_EQ(c.kind, ExperimentKind::eim);
    EXPECT_EQ(c.dictionary.m, 1);
    EXPECT_TRUE(c.norm_p.is_infinite());
    EXPECT_EQ(c.grid_points, 1000u);
    EXPECT_EQ(c.steps, 60u);
    EXPECT_EQ(c.dictionary.b_min, -2.0);
    EXPECT_EQ(c.dictionary.b_max, 2.0);
    EXPECT_EQ(c.dictionary.b_count, 4001u);
    EXPECT_EQ(c.target.kind, TargetSpec::Kind::sin_pi_x);
}

TEST(Config, CommentsBlankLinesAndCase)
{
    const ExperimentConfig c = parse_config_text("# header\n\n  KIND = CGA   # trailing\r\nnorm_p = 4\nsteps=100\n");
    EXPECT_EQ(c.kind, ExperimentKind::cga);
    EXPECT_DOUBLE_EQ(c.norm_p.value(), 4.0);
    EXPECT_EQ(c.steps, 100u);
}

TEST(Config, ExponentOutOfRangeNamesLine)
{
    try {
        parse_config_text("kind = eim\n\np = 0.5\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, UnknownKeyAndMalformedLine)
{
    EXPECT_THROW(parse_config_text("kind = eim\nstepz = 4\n"), ConfigError);
    try {
        parse_config_text("kind = eim\nsteps 4\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(parse_config_text("steps =\n"), ConfigError);
    EXPECT_THROW(parse_config_text("= 3\n"), ConfigError);
}

TEST(Config, RangeChecks)
{
    EXPECT_THROW(parse_config_text("steps = 0\n"), ConfigError);
    EXPECT_THROW(parse_config_text("steps = -3\n"), ConfigError);
    EXPECT_THROW(parse_config_text("grid_points = 1\n"), ConfigError);
    EXPECT_THROW(parse_config_text("alpha = 0\n"), ConfigError);
    EXPECT_THROW(parse_config_text("alpha = 1.5\n"), ConfigError);
    EXPECT_THROW(parse_config_text("w = 1, 0.5\n"), ConfigError);
    EXPECT_THROW(parse_config_text("b_min = 3\n"), ConfigError);
    EXPECT_THROW(parse_config_text("kind = cga\np = inf\n"), ConfigError);
    EXPECT_THROW(parse_config_text("kind = oga\np = 4\n"), ConfigError);
    EXPECT_THROW(parse_config_text("s = 2.5\n"), ConfigError);
    EXPECT_THROW(parse_config_text("kind = xyz\n"), ConfigError);
    EXPECT_THROW(parse_config_text("fit_n_min = 20\nfit_n_max = 10\n"), ConfigError);
}

TEST(Config, FlagOverridesFile)
{
    const ExperimentConfig c = parse_config_text("steps = 60\n", {{"steps", "40", 0}});
    EXPECT_EQ(c.steps, 40u);
    try {
        parse_config_text("steps = 60\n", {{"steps", "0", 0}});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("steps"), std::string::npos);
    }
}

TEST(Config, TargetsAndBiasStep)
{
    EXPECT_EQ(parse_config_text("target = ATOM(12)\n").target.atom_index, 12u);
    const ExperimentConfig c = parse_config_text("target = custom_csv(data/f.csv)\nb_step = 5e-5\n");
    EXPECT_EQ(c.target.kind, TargetSpec::Kind::custom_csv);
    EXPECT_EQ(c.target.csv_path, fs::path("data/f.csv"));
    EXPECT_EQ(c.dictionary.b_count, 80001u);
    EXPECT_EQ(parse_config_text("b_step = 1e-3\nb_count = 11\n").dictionary.b_count, 11u);
    EXPECT_THROW(parse_config_text("target = atom(x)\n"), ConfigError);
    EXPECT_THROW(parse_config_text("target = cosine\n"), ConfigError);
}

TEST(Config, MissingFileIsIoError)
{
    EXPECT_THROW(load_config("/nonexistent/dir/x.cfg"), IoError);
}

TEST(TraceCsv, RoundTripIsBitExact)
{
    GreedyTrace t;
    GREEDY_FOR_ALL(1, 61, [&](greedy::testing::Rng& rng, int) {
        for (std::size_t n = 1; n <= 200; ++n) {
            TraceRecord r;
            r.n = n;
            r.selected_index = rng.index(100000);
            r.error = std::exp(rng.uniform(-700, 700)) * (n % 7 == 0 ? 1.0 : rng.uniform());
            if (n % 3) r.lebesgue_upper = 1.0 + rng.uniform() * 1e3;
            r.seconds = rng.uniform();
            t.records.push_back(r);
        }
    });
    t.records[5].error = std::numeric_limits<double>::denorm_min();
    t.records[6].error = 0.1 + 0.2;
    const std::string csv = trace_to_csv(t, TraceLayout::interpolation);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    const CsvTable back = parse_csv(csv);
    EXPECT_EQ(back.header, (std::vector<std::string>{"n", "error", "lebesgue_upper", "selected_index", "seconds"}));
    ASSERT_EQ(back.rows.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(*back.rows[i][1], t.records[i].error);
        EXPECT_EQ(back.rows[i][2].has_value(), t.records[i].lebesgue_upper.has_value());
        if (t.records[i].lebesgue_upper) EXPECT_EQ(*back.rows[i][2], *t.records[i].lebesgue_upper);
        EXPECT_EQ(*back.rows[i][3], static_cast<double>(t.records[i].selected_index));
        EXPECT_EQ(*back.rows[i][4], t.records[i].seconds);
    }
    EXPECT_EQ(parse_csv(trace_to_csv(t, TraceLayout::residual)).header,
              (std::vector<std::string>{"n", "residual_norm", "selected_index", "seconds"}));
}

TEST(TraceCsv, MalformedInput)
{
    EXPECT_THROW(parse_csv(""), IoError);
    EXPECT_THROW(parse_csv("a,b\n1\n"), IoError);
    EXPECT_THROW(parse_csv("a,b\n1,x\n"), IoError);
    EXPECT_THROW(parse_csv("a\n1\n").column("b"), IoError);
}

TEST(AtomicWrite, CreatesParentsAndLeavesNoTemp)
{
    const fs::path d = scratch_dir("atomic");
    const fs::path p = d / "a" / "b" / "file.txt";
    write_file_atomic(p, "hello\n");
    write_file_atomic(p, "again\n");
    EXPECT_EQ(read_file(p), "again\n");
    EXPECT_FALSE(fs::exists(d / "a" / "b" / "file.txt.tmp"));
    EXPECT_THROW(write_file_atomic("/proc/greedy_no_such/x.txt", "x"), IoError);
}

TEST(Svg, SelfContainedDocument)
{
    LogLogChart c;
    c.title = "a < b";
    c.series.push_back({"err", {1, 2, 4, 8}, {1, 0.5, 0.25, 0.125}});
    c.series.push_back({"zeros skipped", {1, 2}, {0.0, 1.0}});
    c.guides.push_back({"n^-1", -1.0, 2.0, 0.5});
    const std::string svg = render_svg(c);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
    EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_EQ(svg.find("href"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(RunExperiment, EimTraceSummaryAndVerdict)
{
    const fs::path d = scratch_dir("eim");
    ExperimentConfig c = parse_config_text("kind = eim\nm = 1\np = inf\ngrid_points = 400\nb_count = 801\nsteps = 30\n");
    c.output_prefix = d / "run";
    RunOptions o;
    o.plot = true;
    const RunResult r = run_experiment(c, o);
    EXPECT_EQ(r.trace.size(), 30u);
    EXPECT_TRUE(r.warnings.empty());
    ASSERT_TRUE(fs::exists(d / "run_trace.csv"));
    ASSERT_TRUE(fs::exists(d / "run.svg"));
    const CsvTable t = read_csv(d / "run_trace.csv");
    EXPECT_EQ(t.rows.size(), 30u);
    EXPECT_EQ(t.column("lebesgue_upper").size(), 30u);

    const auto s = read_summary(d / "run_summary.txt");
    EXPECT_EQ(s.at("predicted_order"), "-1");
    EXPECT_EQ(s.at("verdict"), r.check->verdict);
    EXPECT_EQ(recompute_verdict(d / "run_summary.txt"), s.at("verdict"));
    // The slope in the summary is the fit of the CSV columns over the stated window.
    const std::vector<double> ns = t.column("n"), es = t.column("error");
    const RateFit f = fit_rate(ns, es, window_for_range(ns, std::stod(s.at("fit_n_min")), std::stod(s.at("fit_n_max"))));
    EXPECT_EQ(format_double(f.slope), s.at("slope"));
}

TEST(RunExperiment, DeterministicApartFromTimings)
{
    const fs::path d = scratch_dir("determinism");
    for (const char* kind : {"eim", "cga", "oga", "rbm"}) {
        ExperimentConfig c = parse_config_text(std::string("kind = ") + kind +
                                               "\np = 2\nm = 1\ngrid_points = 200\nb_count = 201\nsteps = 12\n");
        c.output_prefix = d / "a";
        run_experiment(c, {});
        c.output_prefix = d / "b";
        run_experiment(c, {});
        const std::string a = read_file(d / "a_trace.csv"), b = read_file(d / "b_trace.csv");
        EXPECT_EQ(without_seconds(a), without_seconds(b)) << kind;
        EXPECT_EQ(recompute_verdict(d / "a_summary.txt"), read_summary(d / "a_summary.txt").at("verdict")) << kind;
    }
}

TEST(RunExperiment, SparseTargetsAndBands)
{
    const fs::path d = scratch_dir("targets");
    ExperimentConfig c = parse_config_text("kind = cga\np = 3\nm = 0\ngrid_points = 101\nb_count = 201\nsteps = 5\ntarget = atom(7)\n");
    c.output_prefix = d / "atom";
    RunResult r = run_experiment(c, {});
    EXPECT_GE(r.trace.size(), 1u);
    EXPECT_LE(r.trace.records.front().error, 1e-10);

    std::string csv = "x,value\n";
    for (int i = 0; i <= 100; ++i) csv += format_double(i / 100.0) + "," + format_double(std::exp(i / 100.0)) + "\n";
    write_text(d / "f.csv", csv);
    c.target.kind = TargetSpec::Kind::custom_csv;
    c.target.csv_path = d / "f.csv";
    c.output_prefix = d / "csv";
    r = run_experiment(c, {});
    EXPECT_EQ(r.trace.size(), 5u);
    const auto s = read_summary(d / "csv_summary.txt");
    EXPECT_EQ(s.at("band_lower"), "-1.3");
    EXPECT_EQ(s.at("band_upper"), "-0.69999999999999996");
    EXPECT_EQ(s.at("error_column"), "residual_norm");

    c.target.atom_index = 100000;
    c.target.kind = TargetSpec::Kind::atom;
    EXPECT_THROW(run_experiment(c, {}), ConfigError);
    write_text(d / "short.csv", "value\n1\n2\n");
    c.target.kind = TargetSpec::Kind::custom_csv;
    c.target.csv_path = d / "short.csv";
    EXPECT_THROW(run_experiment(c, {}), ConfigError);
}

TEST(RunExperiment, BreakdownIsAWarningNotAnError)
{
    const fs::path d = scratch_dir("warn");
    // Three ramps spanning a 2D space: the third EIM step breaks down.
    ExperimentConfig c = parse_config_text("kind = eim\np = inf\nm = 1\nb_min = 0\nb_max = 1\nb_count = 2\ngrid_points = 50\nsteps = 5\n");
    c.output_prefix = d / "w";
    std::ostringstream log;
    RunOptions o;
    o.log = &log;
    const RunResult r = run_experiment(c, o);
    EXPECT_EQ(r.status, "breakdown");
    EXPECT_FALSE(r.warnings.empty());
    EXPECT_NE(log.str().find("WARN"), std::string::npos);
    EXPECT_EQ(read_summary(d / "w_summary.txt").at("verdict"), "INCONCLUSIVE");
}

TEST(RunBounds, AllOnesClosedForm)
{
    const fs::path d = scratch_dir("bounds");
    ExperimentConfig c = parse_config_text("kind = bounds\nbound_n_max = 50\nentropy_rate = 2\n");
    c.output_prefix = d / "b";
    run_experiment(c, {});
    const CsvTable t = read_csv(d / "b_bounds.csv");
    ASSERT_EQ(t.rows.size(), 50u);
    const std::vector<double> eim = t.column("eim_bound");
    for (std::size_t i = 0; i < 50; ++i) {
        const double n = static_cast<double>(i + 1);
        const double expect = (i == 0 ? 1.0 : 2.0) * std::pow(2.0, (n - 1) / n) * std::sqrt(n) * ball_volume_factor(i + 1) / (n * n);
        EXPECT_NEAR(eim[i], expect, 1e-12 * expect);
    }
    const auto s = read_summary(d / "b_summary.txt");
    EXPECT_EQ(s.at("lambda_source"), "ones");
    EXPECT_TRUE(s.count("eim_bound_nonincreasing_from_n"));
}

TEST(RunBounds, LebesgueSeriesFromTrace)
{
    const fs::path d = scratch_dir("bounds_trace");
    write_text(d / "t.csv", "n,error,lebesgue_upper,selected_index,seconds\n1,1,1,0,0\n2,0.5,1.5,1,0\n3,0.3,2,2,0\n");
    ExperimentConfig c = parse_config_text("kind = bounds\nbound_n_max = 4\n");
    c.bounds.lebesgue_csv = d / "t.csv";
    c.output_prefix = d / "b";
    EXPECT_NO_THROW(run_bounds(c, {}));
    c.bounds.n_max = 5;
    EXPECT_THROW(run_bounds(c, {}), ConfigError);
}

TEST(Cli, ExitCodes)
{
    const fs::path d = scratch_dir("exit");
    write_text(d / "good.cfg", "kind = eim\nm = 1\np = inf\ngrid_points = 100\nb_count = 101\nsteps = 10\n");
    write_text(d / "bad.cfg", "kind = eim\np = 0.5\n");
    write_text(d / "zero.cfg", "kind = cga\np = 2\ngrid_points = 11\nb_count = 11\ntarget = custom_csv(" + (d / "zero.csv").string() + ")\n");
    std::string zeros = "value\n";
    for (int i = 0; i < 11; ++i) zeros += "0\n";
    write_text(d / "zero.csv", zeros);

    EXPECT_EQ(run_cli("run --config " + (d / "good.cfg").string() + " --out " + (d / "g").string() + " --steps 8 --plot"), 0);
    EXPECT_EQ(read_csv(d / "g_trace.csv").rows.size(), 8u);
    EXPECT_TRUE(fs::exists(d / "g.svg"));
    EXPECT_EQ(run_cli("run --config " + (d / "bad.cfg").string()), 1);
    EXPECT_EQ(run_cli("run"), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);
    EXPECT_EQ(run_cli("run --config " + (d / "missing.cfg").string()), 2);
    EXPECT_EQ(run_cli("run --config " + (d / "good.cfg").string() + " --out /proc/greedy_no_such/x"), 2);
    EXPECT_EQ(run_cli("run --config " + (d / "zero.cfg").string() + " --out " + (d / "z").string()), 3);
    EXPECT_EQ(run_cli("bounds --config " + (d / "good.cfg").string() + " --out " + (d / "bb").string()), 0);
    EXPECT_TRUE(fs::exists(d / "bb_bounds.csv"));
}
