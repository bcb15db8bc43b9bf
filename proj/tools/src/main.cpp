#include <iostream>

#include <CLI11.hpp>

#include "greedy/error.hpp"
#include "greedy_tools/runner.hpp"

namespace {

enum ExitCode { ok = 0, usage = 1, io = 2, numerical = 3 };

template <class Fn>
int guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const greedy::tools::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const greedy::tools::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io;
    } catch (const greedy::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical;
    }
}

std::vector<greedy::tools::Assignment> parse_sets(const std::vector<std::string>& sets)
{
    std::vector<greedy::tools::Assignment> out;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw greedy::tools::ConfigError("--set expects key=value, got '" + s + "'");
        out.push_back({s.substr(0, eq), s.substr(eq + 1), 0});
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace greedy::tools;

    CLI::App app{"Greedy approximation experiments over discretized L_p spaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::size_t> steps;
    std::optional<std::string> prefix;
    bool plot = false;
    std::vector<std::string> sets;
    auto* run = app.add_subcommand("run", "Run one experiment described by a config file");
    run->add_option("--config", config_path, "key = value config file")->required();
    run->add_option("--steps", steps, "Override the number of greedy steps");
    run->add_option("--out", prefix, "Override the output prefix");
    run->add_flag("--plot", plot, "Also write <prefix>.svg");
    run->add_option("--set", sets, "Override any config key (key=value), repeatable");

    std::string out_dir;
    auto* reproduce = app.add_subcommand("reproduce-paper", "EIM and CGA convergence suite with figures");
    reproduce->add_option("--out", out_dir, "Output directory")->required();

    std::string bounds_config;
    std::optional<std::string> bounds_prefix;
    bool bounds_plot = false;
    auto* bounds = app.add_subcommand("bounds", "Evaluate the EIM and CGA bound expressions");
    bounds->add_option("--config", bounds_config, "key = value config file")->required();
    bounds->add_option("--out", bounds_prefix, "Override the output prefix");
    bounds->add_flag("--plot", bounds_plot, "Also write <prefix>.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    RunOptions options;
    options.log = &std::cerr;

    if (*run) {
        return guarded([&] {
            auto overrides = parse_sets(sets);
            if (steps) overrides.push_back({"steps", std::to_string(*steps), 0});
            if (prefix) overrides.push_back({"output_prefix", *prefix, 0});
            const ExperimentConfig cfg = load_config(config_path, overrides);
            options.plot = plot;
            const RunResult r = run_experiment(cfg, options);
            for (const auto& f : r.files) std::cout << f.string() << '\n';
            return ok;
        });
    }
    if (*reproduce) {
        return guarded([&] { return reproduce_paper(out_dir, options); });
    }
    return guarded([&] {
        std::vector<Assignment> overrides{{"kind", "bounds", 0}};
        if (bounds_prefix) overrides.push_back({"output_prefix", *bounds_prefix, 0});
        const ExperimentConfig cfg = load_config(bounds_config, overrides);
        options.plot = bounds_plot;
        const RunResult r = run_bounds(cfg, options);
        for (const auto& f : r.files) std::cout << f.string() << '\n';
        return ok;
    });
}
