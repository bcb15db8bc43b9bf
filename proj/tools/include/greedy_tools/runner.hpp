#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greedy/diagnostics.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/trace.hpp"
#include "greedy_tools/config.hpp"

namespace greedy::tools {

/// Accepted slope interval and the theory exponent it is read against.
struct SlopeBand {
    /// Exponent from predicted_order; unset when the estimate does not cover p.
    std::optional<double> predicted;
    std::string predicted_kind;
    /// Centre of the band: the predicted exponent for EIM/RBM, the observed n^-1 for OGA/CGA.
    std::optional<double> reference;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

/// EIM/RBM: slope <= predicted + tol. OGA/CGA: |slope + 1| <= tol.
SlopeBand slope_band(const ExperimentConfig& cfg);

struct SlopeCheck {
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    std::size_t samples = 0;
    std::optional<RateFit> fit;
    SlopeBand band;
    /// PASS, FAIL, or INCONCLUSIVE when no band or too few samples.
    std::string verdict;
};

SlopeCheck check_slope(std::span<const double> ns, std::span<const double> errors, double fit_lo, double fit_hi,
                       const SlopeBand& band);

struct RunOptions {
    bool plot = false;
    /// Progress and WARN lines; null silences them.
    std::ostream* log = nullptr;
};

struct RunResult {
    GreedyTrace trace;
    std::string status;
    std::vector<std::string> warnings;
    std::optional<SlopeCheck> check;
    std::vector<std::filesystem::path> files;
};

/// Grid function the sparse runs approximate.
GridFunction make_target(const ExperimentConfig& cfg, const DiscreteDictionary& K);

/// Runs one EIM/RBM/OGA/CGA experiment and writes `<prefix>_trace.csv`, `<prefix>_summary.txt`
/// and, with `plot`, `<prefix>.svg`. BOUNDS configs are forwarded to run_bounds. A prebuilt
/// dictionary on the configured grid may be passed to skip reconstruction.
///
/// Throws ConfigError, IoError, or greedy::Error for numerical failures.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options,
                         const DiscreteDictionary* dictionary = nullptr);

/// Evaluates eim_bound and cga_bound for n = 1..n_max into `<prefix>_bounds.csv` plus a summary.
RunResult run_bounds(const ExperimentConfig& cfg, const RunOptions& options);

/// Default suite (EIM for m = 1..3 in L_inf and L_2, Lebesgue estimates, CGA p sweep) into `dir`. Returns the CLI exit code (worst over the runs).
int reproduce_paper(const std::filesystem::path& dir, const RunOptions& options);

/// `key = value` lines of a summary file.
std::map<std::string, std::string> read_summary(const std::filesystem::path& path);

/// Recomputes a run summary's verdict from its trace CSV alone.
std::string recompute_verdict(const std::filesystem::path& summary_path);

} // namespace greedy::tools
