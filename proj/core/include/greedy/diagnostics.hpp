#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace greedy {

// ---------------------------------------------------------------------------- rate fitting

/// Half-open index range [begin, end) into a trace.
struct IndexWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

/// Last two thirds of `count` samples.
IndexWindow default_window(std::size_t count) noexcept;
/// Indices whose n lies in [n_lo, n_hi].
IndexWindow window_for_range(std::span<const double> ns, double n_lo, double n_hi);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of log(error) against log(n) over the window. Throws InvalidArgument when the
/// window has fewer than 3 samples or a nonpositive entry.
RateFit fit_rate(std::span<const double> ns, std::span<const double> errors, IndexWindow window);

// ---------------------------------------------------------------------------- bound evaluators

/// (n! V_n)^(1/n) with V_n the volume of the Euclidean unit ball in R^n, via log-gamma.
double ball_volume_factor(std::size_t n);

enum class SpaceKind { general_banach, sobolev_p, hilbert };

/// Upper bound on the Banach-Mazur distance of n-dimensional subspaces to l_2^n:
/// sqrt(n) in general, n^|1/2 - 1/p| in W^k_p (p may be +inf), 1 in Hilbert spaces.
double delta_bound(std::size_t n, SpaceKind kind, std::optional<double> p = std::nullopt);

/// Analytic entropy-number model eps_n = A n^-r. With `log_correction` the rate holds at the
/// reindexed argument: eps_k = A t^-r where t log t = k.
struct EntropyModel {
    double amplitude = 1.0;
    double rate = 1.0;
    bool log_correction = false;

    void validate() const;
    double epsilon(std::size_t n) const;
};

struct BoundInputs {
    /// Lambda_1, Lambda_2, ... (entry k-1 holds Lambda_k).
    std::vector<double> lebesgue_series;
    /// alpha_1, alpha_2, ...
    std::vector<double> alpha_series;
    double s = 2.0;
    double C_X = 1.0;
    double l1_norm = 1.0;
    SpaceKind space_kind = SpaceKind::general_banach;
    std::optional<double> p;

    void validate() const;
};

/// gamma_{n-1} (gamma_1 ... gamma_{n-1})^(1/n) delta_n (n! V_n)^(1/n) eps_n with
/// gamma_k = 1 + Lambda_k, or gamma_k = Lambda_k in a Hilbert space; gamma_0 = 1.
double eim_bound(std::size_t n, const BoundInputs& inputs, const EntropyModel& model);

/// 2^(1+1/s) C_X^(1/s) (alpha_1 ... alpha_n)^(-1/n) delta_n n^(1/s-1) (n! V_n)^(1/n) ||f|| eps_n.
double cga_bound(std::size_t n, const BoundInputs& inputs, const EntropyModel& model);

enum class RateKind { eim_entropy, eim_width, cga_entropy };

/// Power of n in the predicted error decay for ReLU_m families on a d-dimensional domain.
/// p = +inf is the 1/p -> 0 limit; p < 2 is rejected.
double predicted_order(int m, int d, double p, RateKind kind);

} // namespace greedy
