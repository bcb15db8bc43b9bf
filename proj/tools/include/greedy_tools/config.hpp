#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "greedy/diagnostics.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/function_space.hpp"

namespace greedy::tools {

/// Malformed, unknown or out-of-range configuration entry. Maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure. Maps to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { eim, rbm, oga, cga, bounds };

const char* to_string(ExperimentKind kind) noexcept;

struct TargetSpec {
    enum class Kind { sin_pi_x, atom, custom_csv };
    Kind kind = Kind::sin_pi_x;
    std::size_t atom_index = 0;
    std::filesystem::path csv_path;

    std::string to_string() const;
};

struct BoundsSettings {
    std::size_t n_max = 50;
    double entropy_amplitude = 1.0;
    /// Unset: 1/2 + (2m+1)/2, the ReLU_m rate on [0,1].
    std::optional<double> entropy_rate;
    bool log_correction = false;
    SpaceKind space = SpaceKind::general_banach;
    /// Unset: min(p, 2).
    std::optional<double> s;
    double C_X = 1.0;
    double l1_norm = 1.0;
    /// Trace CSV whose lebesgue_upper column supplies Lambda_k; unset means all ones.
    std::optional<std::filesystem::path> lebesgue_csv;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::eim;
    std::size_t grid_points = 1000;
    LpExponent norm_p = LpExponent::infinity();
    ReluFamilySpec dictionary;
    TargetSpec target;
    std::size_t steps = 60;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::filesystem::path output_prefix = "out/run";
    /// Rate-fit window in n; unset bounds default per kind (see fit_range()).
    std::optional<double> fit_n_min;
    std::optional<double> fit_n_max;
    /// Half-width of the accepted slope band. Unset: 0.35 for EIM/RBM, 0.3 for OGA/CGA.
    std::optional<double> slope_tolerance;
    double proj_tol = 1e-10;
    BoundsSettings bounds;

    /// Throws ConfigError on a violated invariant.
    void validate() const;
    std::pair<double, double> fit_range() const;
    double band_half_width() const;
};

/// One `key = value` assignment and where it came from (line 0 for command-line flags).
struct Assignment {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Splits flat config text into assignments. `#` starts a comment; blank lines are skipped.
std::vector<Assignment> tokenize_config(const std::string& text);

/// Applies assignments in order, so later entries (flags) override earlier ones (file).
ExperimentConfig build_config(const std::vector<Assignment>& assignments);

ExperimentConfig parse_config_text(const std::string& text, const std::vector<Assignment>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<Assignment>& overrides = {});

/// Names accepted on the left-hand side of a config line.
const std::vector<std::string>& config_keys();

} // namespace greedy::tools
