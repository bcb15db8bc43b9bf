#include "greedy_tools/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "greedy/eim.hpp"
#include "greedy/error.hpp"
#include "greedy/sparse_greedy.hpp"
#include "greedy_tools/svg_plot.hpp"
#include "greedy_tools/trace_io.hpp"

namespace greedy::tools {

namespace {

bool is_sparse(ExperimentKind k)
{
    return k == ExperimentKind::oga || k == ExperimentKind::cga;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix)
{
    std::filesystem::path p = prefix;
    p += suffix;
    return p;
}

void log_line(const RunOptions& o, const std::string& line)
{
    if (o.log) *o.log << line << '\n' << std::flush;
}

void warn(RunResult& r, const RunOptions& o, const std::string& msg)
{
    r.warnings.push_back(msg);
    log_line(o, "WARN: " + msg);
}

class SummaryWriter {
public:
    template <class T>
    void put(const std::string& key, const T& value)
    {
        std::ostringstream ss;
        if constexpr (std::is_floating_point_v<T>) ss << format_double(value);
        else ss << value;
        text_ += key + " = " + ss.str() + "\n";
    }
    void comment(const std::string& c) { text_ += "# " + c + "\n"; }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

std::string space_name(SpaceKind k)
{
    switch (k) {
    case SpaceKind::general_banach: return "general_banach";
    case SpaceKind::sobolev_p: return "sobolev_p";
    case SpaceKind::hilbert: return "hilbert";
    }
    return "?";
}

} // namespace

SlopeBand slope_band(const ExperimentConfig& cfg)
{
    SlopeBand band;
    const double tol = cfg.band_half_width();
    const double p = cfg.norm_p.value();
    if (is_sparse(cfg.kind)) {
        band.predicted_kind = "cga_entropy";
        if (p >= 2.0) band.predicted = predicted_order(cfg.dictionary.m, 1, p, RateKind::cga_entropy);
        band.reference = -1.0;
        band.lower = -1.0 - tol;
        band.upper = -1.0 + tol;
        return band;
    }
    band.predicted_kind = "eim_entropy";
    if (p >= 2.0) {
        band.predicted = predicted_order(cfg.dictionary.m, 1, p, RateKind::eim_entropy);
        band.reference = band.predicted;
        band.upper = *band.predicted + tol;
    }
    return band;
}

SlopeCheck check_slope(std::span<const double> ns, std::span<const double> errors, double fit_lo, double fit_hi,
                       const SlopeBand& band)
{
    SlopeCheck c;
    c.fit_lo = fit_lo;
    c.fit_hi = fit_hi;
    c.band = band;
    const IndexWindow win = window_for_range(ns, fit_lo, fit_hi);
    c.samples = win.size();
    bool positive = true;
    for (std::size_t i = win.begin; i < win.end; ++i) positive = positive && errors[i] > 0.0;
    if (c.samples >= 3 && positive) c.fit = fit_rate(ns, errors, win);

    const bool has_band = std::isfinite(band.lower) || std::isfinite(band.upper);
    if (!c.fit || !has_band) c.verdict = "INCONCLUSIVE";
    else c.verdict = (c.fit->slope >= band.lower && c.fit->slope <= band.upper) ? "PASS" : "FAIL";
    return c;
}

GridFunction make_target(const ExperimentConfig& cfg, const DiscreteDictionary& K)
{
    switch (cfg.target.kind) {
    case TargetSpec::Kind::sin_pi_x:
        return GridFunction::sample(K.grid_ptr(), [](double x) { return std::sin(std::numbers::pi * x); });
    case TargetSpec::Kind::atom:
        if (cfg.target.atom_index >= K.size())
            throw ConfigError("target ATOM(" + std::to_string(cfg.target.atom_index) + ") is out of range; the dictionary has " +
                              std::to_string(K.size()) + " atoms");
        return K.atom(cfg.target.atom_index);
    case TargetSpec::Kind::custom_csv: {
        const CsvTable t = read_csv(cfg.target.csv_path);
        std::size_t col = t.header.size() - 1;
        for (std::size_t j = 0; j < t.header.size(); ++j)
            if (t.header[j] == "value" || t.header[j] == "f") col = j;
        if (t.rows.size() != K.grid().size())
            throw ConfigError("target CSV '" + cfg.target.csv_path.string() + "' has " + std::to_string(t.rows.size()) +
                              " rows; the grid has " + std::to_string(K.grid().size()) + " points");
        Eigen::VectorXd v(static_cast<Eigen::Index>(t.rows.size()));
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (!t.rows[i][col]) throw ConfigError("target CSV has an empty value in data row " + std::to_string(i + 1));
            v(static_cast<Eigen::Index>(i)) = *t.rows[i][col];
        }
        return GridFunction(K.grid_ptr(), std::move(v));
    }
    }
    throw ConfigError("unknown target");
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options, const DiscreteDictionary* dictionary)
{
    cfg.validate();
    if (cfg.kind == ExperimentKind::bounds) return run_bounds(cfg, options);

    std::optional<DiscreteDictionary> owned;
    if (!dictionary) {
        owned.emplace(build_relu_dictionary(cfg.dictionary, make_uniform_grid(cfg.grid_points)));
        dictionary = &*owned;
    } else if (dictionary->grid().size() != cfg.grid_points) {
        throw ConfigError("prebuilt dictionary does not match grid_points");
    }
    const DiscreteDictionary& K = *dictionary;
    const std::string tag = std::string(to_string(cfg.kind)) + " m=" + std::to_string(cfg.dictionary.m) +
                            " p=" + cfg.norm_p.to_string();
    log_line(options, "[" + tag + "] " + std::to_string(K.size()) + " atoms, " + std::to_string(cfg.steps) + " steps");

    RunResult result;
    std::size_t steps = cfg.steps;
    if (!is_sparse(cfg.kind) && steps > K.size()) {
        steps = K.size();
        warn(result, options, "steps reduced to the dictionary size " + std::to_string(steps));
    }
    TraceLayout layout = TraceLayout::interpolation;
    std::optional<double> target_norm;
    std::string message;

    switch (cfg.kind) {
    case ExperimentKind::eim: {
        const FunctionalSet L = build_point_functionals(K.grid_ptr(), 1);
        EimFit fit = eim_fit(K, L, cfg.norm_p, std::min(steps, L.size()));
        result.trace = std::move(fit.trace);
        result.status = to_string(fit.status);
        if (fit.status == FitStatus::breakdown) warn(result, options, "EIM broke down after " + std::to_string(result.trace.size()) + " steps");
        break;
    }
    case ExperimentKind::rbm: {
        RbmOptions ro;
        ro.proj_tol = cfg.proj_tol;
        RbmFit fit = weak_rbm_fit(K, cfg.norm_p, cfg.alpha, steps, ro);
        result.trace = std::move(fit.trace);
        result.status = to_string(fit.status);
        if (fit.status == FitStatus::span_exhausted)
            warn(result, options, "RBM exhausted the dictionary span after " + std::to_string(result.trace.size()) + " steps");
        break;
    }
    case ExperimentKind::oga:
    case ExperimentKind::cga: {
        layout = TraceLayout::residual;
        const GridFunction f = make_target(cfg, K);
        SparseResult sr;
        if (cfg.kind == ExperimentKind::oga) {
            sr = oga_run(f, K, cfg.steps);
        } else {
            CgaConfig cc;
            cc.p = cfg.norm_p;
            cc.alpha = {cfg.alpha};
            cc.max_steps = cfg.steps;
            cc.proj_tol = cfg.proj_tol;
            sr = cga_run(f, K, cc);
        }
        target_norm = sr.approximant.residual_norms.front();
        result.trace = std::move(sr.trace);
        result.status = to_string(sr.status);
        message = sr.message;
        if (sr.status != SparseStatus::completed && sr.status != SparseStatus::tolerance_reached) {
            std::string w = std::string(to_string(cfg.kind)) + " stopped early (" + result.status + ") after " +
                            std::to_string(result.trace.size()) + " steps";
            if (!message.empty()) w += ": " + message;
            warn(result, options, w);
        }
        break;
    }
    case ExperimentKind::bounds: break;
    }

    const std::vector<double> ns = result.trace.ns(), errors = result.trace.errors();
    const SlopeBand band = slope_band(cfg);
    const auto [lo, hi] = cfg.fit_range();
    const SlopeCheck check = check_slope(ns, errors, lo, hi, band);
    result.check = check;
    if (!check.fit) warn(result, options, "too few positive samples in n in [" + format_double(lo) + ", " + format_double(hi) + "] to fit a rate");

    const std::filesystem::path trace_path = with_suffix(cfg.output_prefix, "_trace.csv");
    const std::filesystem::path summary_path = with_suffix(cfg.output_prefix, "_summary.txt");
    write_file_atomic(trace_path, trace_to_csv(result.trace, layout));
    result.files.push_back(trace_path);

    SummaryWriter s;
    s.comment(std::string(to_string(cfg.kind)) + " convergence summary");
    s.put("kind", to_string(cfg.kind));
    s.put("norm_p", cfg.norm_p.to_string());
    s.put("m", cfg.dictionary.m);
    s.put("grid_points", cfg.grid_points);
    s.put("b_min", cfg.dictionary.b_min);
    s.put("b_max", cfg.dictionary.b_max);
    s.put("b_count", cfg.dictionary.b_count);
    s.put("atoms", K.size());
    s.put("pruned_atoms", K.pruned());
    if (is_sparse(cfg.kind)) {
        s.put("target", cfg.target.to_string());
        s.put("target_norm", *target_norm);
    }
    if (cfg.kind == ExperimentKind::rbm || cfg.kind == ExperimentKind::cga) s.put("alpha", cfg.alpha);
    s.put("steps_requested", cfg.steps);
    s.put("steps_completed", result.trace.size());
    s.put("status", result.status);
    if (!result.trace.empty()) {
        s.put("final_error", result.trace.records.back().error);
        if (result.trace.records.back().lebesgue_upper) s.put("final_lebesgue_upper", *result.trace.records.back().lebesgue_upper);
    }
    s.put("trace", trace_path.filename().string());
    s.put("error_column", layout == TraceLayout::interpolation ? "error" : "residual_norm");
    s.put("fit_n_min", lo);
    s.put("fit_n_max", hi);
    s.put("fit_samples", check.samples);
    if (check.fit) {
        s.put("slope", check.fit->slope);
        s.put("intercept", check.fit->intercept);
        s.put("r_squared", check.fit->r_squared);
    }
    s.put("predicted_kind", band.predicted_kind);
    if (band.predicted) s.put("predicted_order", *band.predicted);
    else s.put("predicted_order", "n/a");
    if (band.reference) s.put("reference_slope", *band.reference);
    s.put("band_lower", band.lower);
    s.put("band_upper", band.upper);
    s.put("verdict", check.verdict);
    for (const std::string& w : result.warnings) s.put("warning", w);
    write_file_atomic(summary_path, s.text());
    result.files.push_back(summary_path);

    if (options.plot) {
        LogLogChart chart;
        chart.title = tag;
        chart.y_label = layout == TraceLayout::interpolation ? "max error" : "residual norm";
        chart.series.push_back({"error", ns, errors});
        if (layout == TraceLayout::interpolation && !result.trace.empty() && result.trace.records.front().lebesgue_upper) {
            std::vector<double> lam;
            for (const TraceRecord& r : result.trace.records) lam.push_back(r.lebesgue_upper.value_or(0.0));
            chart.series.push_back({"Lebesgue upper", ns, lam});
        }
        if (check.fit && band.reference) {
            const double x0 = std::sqrt(lo * hi);
            chart.guides.push_back({"n^" + format_double(*band.reference), *band.reference, x0,
                                    std::exp(check.fit->intercept) * std::pow(x0, check.fit->slope)});
        }
        const std::filesystem::path svg = with_suffix(cfg.output_prefix, ".svg");
        write_file_atomic(svg, render_svg(chart));
        result.files.push_back(svg);
    }

    std::string line = "[" + tag + "] " + result.status + ", " + std::to_string(result.trace.size()) + " steps";
    if (check.fit) {
        line += ", slope " + format_fixed(check.fit->slope) + " in [" + format_fixed(band.lower) + ", " +
                format_fixed(band.upper) + "]";
        if (band.predicted) line += ", " + band.predicted_kind + " order " + format_fixed(*band.predicted);
    }
    log_line(options, line + ": " + check.verdict);
    return result;
}

RunResult run_bounds(const ExperimentConfig& cfg, const RunOptions& options)
{
    const BoundsSettings& b = cfg.bounds;
    const std::size_t n_max = b.n_max;

    BoundInputs in;
    in.space_kind = b.space;
    if (!cfg.norm_p.is_infinite()) in.p = cfg.norm_p.value();
    else if (b.space == SpaceKind::sobolev_p) in.p = std::numeric_limits<double>::infinity();
    in.s = b.s.value_or(cfg.norm_p.is_infinite() ? 2.0 : cfg.norm_p.smoothness_power());
    in.C_X = b.C_X;
    in.l1_norm = b.l1_norm;
    in.alpha_series.assign(n_max, cfg.alpha);
    std::string lambda_source = "ones";
    if (b.lebesgue_csv) {
        in.lebesgue_series = read_csv(*b.lebesgue_csv).column("lebesgue_upper");
        lambda_source = "lebesgue_upper column of " + b.lebesgue_csv->string() + " (upper-bound surrogate)";
        if (in.lebesgue_series.size() + 1 < n_max)
            throw ConfigError("lebesgue_csv has " + std::to_string(in.lebesgue_series.size()) + " rows; bound_n_max = " +
                              std::to_string(n_max) + " needs " + std::to_string(n_max - 1));
    } else {
        in.lebesgue_series.assign(n_max, 1.0);
    }

    EntropyModel model;
    model.amplitude = b.entropy_amplitude;
    model.rate = b.entropy_rate.value_or(0.5 + (2.0 * cfg.dictionary.m + 1.0) / 2.0);
    model.log_correction = b.log_correction;

    RunResult result;
    result.status = "completed";
    std::string csv = "n,epsilon,ball_volume_factor,delta,eim_bound,cga_bound\n";
    std::vector<double> ns, eim, cga;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double e = eim_bound(n, in, model), c = cga_bound(n, in, model);
        csv += std::to_string(n) + "," + format_double(model.epsilon(n)) + "," + format_double(ball_volume_factor(n)) + "," +
               format_double(delta_bound(n, in.space_kind, in.p)) + "," + format_double(e) + "," + format_double(c) + "\n";
        ns.push_back(static_cast<double>(n));
        eim.push_back(e);
        cga.push_back(c);
    }
    auto nonincreasing_from = [](const std::vector<double>& v) {
        // First index after which the series never increases again.
        std::size_t k = v.size();
        while (k > 1 && v[k - 1] <= v[k - 2]) --k;
        return k;
    };
    const std::size_t eim_from = nonincreasing_from(eim), cga_from = nonincreasing_from(cga);

    const std::filesystem::path csv_path = with_suffix(cfg.output_prefix, "_bounds.csv");
    write_file_atomic(csv_path, csv);
    result.files.push_back(csv_path);

    SummaryWriter s;
    s.comment("bound evaluation; entropy amplitude is a free constant, so values are shape only unless it is calibrated");
    s.put("kind", "BOUNDS");
    s.put("bounds", csv_path.filename().string());
    s.put("n_max", n_max);
    s.put("space", space_name(in.space_kind));
    s.put("norm_p", cfg.norm_p.to_string());
    s.put("s", in.s);
    s.put("C_X", in.C_X);
    s.put("l1_norm", in.l1_norm);
    s.put("alpha", cfg.alpha);
    s.put("entropy_amplitude", model.amplitude);
    s.put("entropy_rate", model.rate);
    s.put("log_correction", model.log_correction ? "true" : "false");
    s.put("lambda_source", lambda_source);
    s.put("shape_only", b.entropy_amplitude == 1.0 ? "true" : "false");
    s.put("eim_bound_nonincreasing_from_n", eim_from);
    s.put("cga_bound_nonincreasing_from_n", cga_from);
    const std::filesystem::path summary_path = with_suffix(cfg.output_prefix, "_summary.txt");
    write_file_atomic(summary_path, s.text());
    result.files.push_back(summary_path);

    log_line(options, "[BOUNDS] n = 1.." + std::to_string(n_max) + "; eim_bound non-increasing from n = " +
                          std::to_string(eim_from) + ", cga_bound from n = " + std::to_string(cga_from));
    if (eim_from > 1 || cga_from > 1) log_line(options, "[BOUNDS] bounds grow over a preasymptotic head before decaying");

    if (options.plot) {
        LogLogChart chart;
        chart.title = "bound evaluators (" + space_name(in.space_kind) + ")";
        chart.y_label = "bound";
        chart.series.push_back({"eim_bound", ns, eim});
        chart.series.push_back({"cga_bound", ns, cga});
        const std::filesystem::path svg = with_suffix(cfg.output_prefix, ".svg");
        write_file_atomic(svg, render_svg(chart));
        result.files.push_back(svg);
    }
    return result;
}

std::map<std::string, std::string> read_summary(const std::filesystem::path& path)
{
    std::map<std::string, std::string> out;
    for (const Assignment& a : tokenize_config(read_file(path))) out.insert_or_assign(a.key, a.value);
    return out;
}

std::string recompute_verdict(const std::filesystem::path& summary_path)
{
    const auto s = read_summary(summary_path);
    auto get = [&](const std::string& k) {
        auto it = s.find(k);
        if (it == s.end()) throw IoError("summary '" + summary_path.string() + "' has no '" + k + "'");
        return it->second;
    };
    auto number = [&](const std::string& k) {
        const std::string v = get(k);
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || ptr != v.data() + v.size()) throw IoError("summary value '" + k + "' is not a number");
        return x;
    };
    const CsvTable t = read_csv(summary_path.parent_path() / get("trace"));
    SlopeBand band;
    band.lower = number("band_lower");
    band.upper = number("band_upper");
    const std::vector<double> ns = t.column("n"), errors = t.column(get("error_column"));
    return check_slope(ns, errors, number("fit_n_min"), number("fit_n_max"), band).verdict;
}

} // namespace greedy::tools
