#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greedy/error.hpp"

namespace greedy {

/// Sample points on [0,1] together with quadrature weights.
///
/// Grids are immutable and shared between functions through GridPtr, so that
/// "same grid" can be checked by identity in the common case.
class Grid {
public:
    /// Points must be strictly increasing inside [0,1]; weights nonnegative; both of length >= 2.
    Grid(Eigen::VectorXd points, Eigen::VectorXd weights);

    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.size()); }
    const Eigen::VectorXd& points() const noexcept { return points_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    double point(std::size_t i) const { return points_(static_cast<Eigen::Index>(i)); }

    /// True when both grids hold identical points and weights.
    bool same_as(const Grid& other) const noexcept;

private:
    Eigen::VectorXd points_;
    Eigen::VectorXd weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Equidistant points x_i = i/(n-1), i = 0..n-1, with trapezoid weights.
GridPtr make_uniform_grid(std::size_t n_points);

/// Exponent p of an L_p space, p in (1, inf) or p = inf.
class LpExponent {
public:
    static LpExponent finite(double p);
    static LpExponent infinity() noexcept { return LpExponent{}; }

    /// Accepts a decimal number or "inf" (case-insensitive).
    static LpExponent parse(const std::string& text);

    bool is_infinite() const noexcept { return infinite_; }
    /// p itself; +inf for the sup norm.
    double value() const noexcept;
    /// Conjugate exponent p/(p-1). Throws Unsupported for p = inf.
    double dual() const;
    /// Power s in rho_X(t) <= C t^s for L_p: min(p, 2).
    double smoothness_power() const noexcept;

    std::string to_string() const;

    friend bool operator==(const LpExponent&, const LpExponent&) = default;

private:
    LpExponent() = default;
    double p_ = 0.0;
    bool infinite_ = true;
};

/// A function represented by its values on a grid.
class GridFunction {
public:
    GridFunction(GridPtr grid, Eigen::VectorXd values);

    /// Samples `fn` at every grid point.
    static GridFunction sample(GridPtr grid, const std::function<double(double)>& fn);
    static GridFunction zero(GridPtr grid);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double scale);

    friend GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
    friend GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
    friend GridFunction operator*(double scale, GridFunction f) { return f *= scale; }

private:
    GridPtr grid_;
    Eigen::VectorXd values_;
};

/// Throws InvalidArgument unless both functions live on the same grid.
void require_same_grid(const Grid& a, const Grid& b);

// Vector-level kernels used by the greedy loops, which keep their working sets in
// dense matrices rather than as individual GridFunctions.

/// (sum_i w_i |v_i|^p)^(1/p), or max_i |v_i| for p = inf. Overflow-safe for large p.
double weighted_lp_norm(const Eigen::Ref<const Eigen::VectorXd>& values, const Eigen::Ref<const Eigen::VectorXd>& weights,
                        LpExponent p);

/// Column-wise weighted_lp_norm.
Eigen::VectorXd weighted_lp_norms(const Eigen::Ref<const Eigen::MatrixXd>& columns,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights, LpExponent p);

/// sign(g)|g|^(p-1) / ||g||^(p-1) on raw values. Throws ZeroFunction / Unsupported.
Eigen::VectorXd peak_functional_values(const Eigen::Ref<const Eigen::VectorXd>& g,
                                       const Eigen::Ref<const Eigen::VectorXd>& weights, LpExponent p);

double lp_norm(const GridFunction& f, LpExponent p);

/// Norming functional of g in L_p: unit dual norm and F_g(g) = ||g||_p. Finite p only.
GridFunction peak_functional(const GridFunction& g, LpExponent p);

/// Quadrature pairing sum_i w_i F_i g_i.
double dual_pair(const GridFunction& functional, const GridFunction& g);

struct ApproximationOptions {
    /// Relative to ||f||_p.
    double tol = 1e-10;
    int max_iterations = 500;
    double weight_floor = 1e-12;
    /// Columns whose pivot falls below this fraction of the largest one make the basis degenerate.
    double rank_threshold = 1e-12;
};

struct Approximation {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residual;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Best approximation of f from span(columns of basis) in the discrete L_p norm of `grid`.
///
/// p = 2 is a weighted least-squares solve. Other finite p use reweighted least squares
/// (Newton-damped for p > 2) started from the p = 2 solution. p = inf is solved exactly as a
/// linear program on the grid.
///
/// Throws DegenerateBasis for a rank-deficient basis and ConvergenceFailure (holding the best
/// iterate) when the iteration cap is reached.
Approximation solve_best_approximation(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                                       const Eigen::Ref<const Eigen::MatrixXd>& basis, LpExponent p,
                                       const ApproximationOptions& options = {});

struct BestApproximation {
    std::vector<double> coefficients;
    GridFunction residual;
};

BestApproximation best_approximation(const GridFunction& f, std::span<const GridFunction> basis, LpExponent p,
                                     double tol = 1e-10);

} // namespace greedy
