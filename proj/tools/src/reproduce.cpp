#include <cmath>
#include <ostream>

#include "greedy/error.hpp"
#include "greedy_tools/runner.hpp"
#include "greedy_tools/svg_plot.hpp"
#include "greedy_tools/trace_io.hpp"

namespace greedy::tools {

namespace {

struct Collected {
    std::string label;
    GreedyTrace trace;
};

std::vector<double> lebesgue_of(const GreedyTrace& t)
{
    std::vector<double> out;
    for (const TraceRecord& r : t.records) out.push_back(r.lebesgue_upper.value_or(0.0));
    return out;
}

} // namespace

int reproduce_paper(const std::filesystem::path& dir, const RunOptions& options)
{
    int exit_code = 0;
    std::string report = "# reproduce-paper report: run = status, slope, band, predicted order, verdict\n";
    auto record = [&](const std::string& name, const RunResult& r) {
        report += name + " = " + r.status;
        if (r.check && r.check->fit) {
            report += ", slope " + format_double(r.check->fit->slope);
            report += ", band [" + format_fixed(r.check->band.lower) + ", " + format_fixed(r.check->band.upper) + "]";
            if (r.check->band.predicted) report += ", predicted " + format_double(*r.check->band.predicted);
        }
        report += ", " + (r.check ? r.check->verdict : std::string("n/a"));
        for (const std::string& w : r.warnings) report += ", WARN " + w;
        report += "\n";
    };
    auto failed = [&](const std::string& name, const std::string& what, int code) {
        report += name + " = failed: " + what + "\n";
        if (options.log) *options.log << "[" << name << "] failed: " << what << '\n';
        exit_code = std::max(exit_code, code);
    };

    const GridPtr grid = make_uniform_grid(1000);

    // EIM in L_inf and L_2 for m = 1, 2, 3.
    std::vector<Collected> eim_inf, eim_two;
    for (int m : {1, 2, 3}) {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::eim;
        cfg.dictionary.m = m;
        cfg.dictionary.b_count = 4001;
        cfg.steps = 60;
        const DiscreteDictionary K = build_relu_dictionary(cfg.dictionary, grid);
        for (LpExponent p : {LpExponent::infinity(), LpExponent::finite(2.0)}) {
            cfg.norm_p = p;
            const std::string name = "eim_m" + std::to_string(m) + "_p" + p.to_string();
            cfg.output_prefix = dir / name;
            try {
                RunOptions o = options;
                o.plot = true;
                const RunResult r = run_experiment(cfg, o, &K);
                record(name, r);
                (p.is_infinite() ? eim_inf : eim_two).push_back({"m=" + std::to_string(m), r.trace});
            } catch (const greedy::Error& e) {
                failed(name, e.what(), 3);
            } catch (const IoError& e) {
                failed(name, e.what(), 2);
            }
        }
    }

    // CGA on sin(pi x) with the Heaviside dictionary, bias step 5e-5.
    std::vector<Collected> cga;
    {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::cga;
        cfg.dictionary.m = 0;
        cfg.dictionary.b_count = 80001;
        cfg.steps = 100;
        const DiscreteDictionary K = build_relu_dictionary(cfg.dictionary, grid);
        for (double p : {2.0, 3.0, 4.0, 8.0}) {
            cfg.norm_p = LpExponent::finite(p);
            const std::string name = "cga_p" + cfg.norm_p.to_string();
            cfg.output_prefix = dir / name;
            try {
                RunOptions o = options;
                o.plot = true;
                const RunResult r = run_experiment(cfg, o, &K);
                record(name, r);
                cga.push_back({"p=" + cfg.norm_p.to_string(), r.trace});
            } catch (const greedy::Error& e) {
                failed(name, e.what(), 3);
            } catch (const IoError& e) {
                failed(name, e.what(), 2);
            }
        }
    }

    auto figure = [&](const std::string& file, const std::string& title, const std::string& y_label,
                      const std::vector<Collected>& runs, bool lebesgue, std::vector<SlopeGuide> guides) {
        LogLogChart chart;
        chart.title = title;
        chart.y_label = y_label;
        for (const Collected& c : runs) chart.series.push_back({c.label, c.trace.ns(), lebesgue ? lebesgue_of(c.trace) : c.trace.errors()});
        chart.guides = std::move(guides);
        try {
            write_file_atomic(dir / file, render_svg(chart));
        } catch (const IoError& e) {
            failed(file, e.what(), 2);
        }
    };
    auto guide_for = [](const std::vector<Collected>& runs, std::size_t i, double slope) -> std::vector<SlopeGuide> {
        if (runs.size() <= i || runs[i].trace.size() < 2) return {};
        const TraceRecord& r = runs[i].trace.records.back();
        return {SlopeGuide{"n^" + format_double(slope), slope, static_cast<double>(r.n), r.error}};
    };

    figure("fig1_eim_linf.svg", "EIM errors in L_inf", "max error", eim_inf, false, guide_for(eim_inf, 0, -1.0));
    figure("fig1_eim_l2.svg", "EIM errors in L_2", "max error", eim_two, false, guide_for(eim_two, 0, -1.5));
    figure("fig2_lebesgue_linf.svg", "Lebesgue upper bound, L_inf EIM", "max_x sum |h_i(x)|", eim_inf, true, {});
    figure("fig2_lebesgue_l2.svg", "Lebesgue upper bound, L_2 EIM", "max_x sum |h_i(x)|", eim_two, true, {});
    figure("fig3_cga.svg", "CGA residual, f = sin(pi x)", "residual norm", cga, false, guide_for(cga, 0, -1.0));

    try {
        write_file_atomic(dir / "report.txt", report);
    } catch (const IoError& e) {
        failed("report.txt", e.what(), 2);
    }
    return exit_code;
}

} // namespace greedy::tools
