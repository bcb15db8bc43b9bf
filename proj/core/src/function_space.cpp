#include "greedy/function_space.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "greedy/simplex.hpp"

namespace greedy {

namespace {

// |x|^p with cheap paths for the exponents the experiments use.
inline double abs_pow(double x, double p)
{
    const double a = std::abs(x);
    if (p == 2.0) return a * a;
    if (p == 4.0) {
        const double s = a * a;
        return s * s;
    }
    if (p == 3.0) return a * a * a;
    if (p == 1.0) return a;
    return std::pow(a, p);
}

} // namespace

// ---------------------------------------------------------------------------- Grid

Grid::Grid(Eigen::VectorXd points, Eigen::VectorXd weights) : points_(std::move(points)), weights_(std::move(weights))
{
    if (points_.size() < 2) throw InvalidArgument("grid needs at least 2 points");
    if (points_.size() != weights_.size()) throw InvalidArgument("grid points and weights differ in length");
    for (Eigen::Index i = 0; i < points_.size(); ++i) {
        if (!(points_(i) >= 0.0 && points_(i) <= 1.0)) throw InvalidArgument("grid point outside [0,1]");
        if (i > 0 && !(points_(i) > points_(i - 1))) throw InvalidArgument("grid points must be strictly increasing");
        if (!(weights_(i) >= 0.0) || !std::isfinite(weights_(i))) throw InvalidArgument("negative quadrature weight");
    }
}

bool Grid::same_as(const Grid& other) const noexcept
{
    return this == &other || (points_.size() == other.points_.size() && points_ == other.points_ && weights_ == other.weights_);
}

GridPtr make_uniform_grid(std::size_t n_points)
{
    if (n_points < 2) throw InvalidArgument("make_uniform_grid: n_points must be >= 2");
    const auto n = static_cast<Eigen::Index>(n_points);
    const double h = 1.0 / static_cast<double>(n - 1);
    Eigen::VectorXd points(n);
    Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, h);
    for (Eigen::Index i = 0; i < n; ++i) points(i) = static_cast<double>(i) / static_cast<double>(n - 1);
    weights(0) = weights(n - 1) = 0.5 * h;
    return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

void require_same_grid(const Grid& a, const Grid& b)
{
    if (!a.same_as(b)) throw InvalidArgument("functions live on different grids");
}

// ---------------------------------------------------------------------------- LpExponent

LpExponent LpExponent::finite(double p)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("L_p exponent must satisfy 1 < p < inf (or be inf)");
    LpExponent e;
    e.p_ = p;
    e.infinite_ = false;
    return e;
}

LpExponent LpExponent::parse(const std::string& text)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (t == "inf" || t == "infinity") return infinity();
    std::size_t used = 0;
    double p = 0.0;
    try {
        p = std::stod(t, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse L_p exponent '" + text + "'");
    }
    if (used != t.size()) throw InvalidArgument("cannot parse L_p exponent '" + text + "'");
    if (std::isinf(p) && p > 0) return infinity();
    return finite(p);
}

double LpExponent::value() const noexcept
{
    return infinite_ ? std::numeric_limits<double>::infinity() : p_;
}

double LpExponent::dual() const
{
    if (infinite_) throw Unsupported("dual exponent of p = inf is not represented");
    return p_ / (p_ - 1.0);
}

double LpExponent::smoothness_power() const noexcept
{
    return infinite_ ? 2.0 : std::min(p_, 2.0);
}

std::string LpExponent::to_string() const
{
    if (infinite_) return "inf";
    std::ostringstream os;
    os << p_;
    return os.str();
}

// ---------------------------------------------------------------------------- GridFunction

GridFunction::GridFunction(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_) throw InvalidArgument("grid function without grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->size())
        throw InvalidArgument("grid function length does not match its grid");
    if (!values_.allFinite()) throw InvalidArgument("grid function has non-finite values");
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& fn)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = fn(grid->points()(i));
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::zero(GridPtr grid)
{
    const auto n = static_cast<Eigen::Index>(grid->size());
    return GridFunction(std::move(grid), Eigen::VectorXd::Zero(n));
}

GridFunction& GridFunction::operator+=(const GridFunction& other)
{
    require_same_grid(*grid_, other.grid());
    values_ += other.values_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other)
{
    require_same_grid(*grid_, other.grid());
    values_ -= other.values_;
    return *this;
}

GridFunction& GridFunction::operator*=(double scale)
{
    values_ *= scale;
    return *this;
}

// ---------------------------------------------------------------------------- norms

double weighted_lp_norm(const Eigen::Ref<const Eigen::VectorXd>& values, const Eigen::Ref<const Eigen::VectorXd>& weights,
                        LpExponent p)
{
    if (values.size() == 0) return 0.0;
    const double peak = values.cwiseAbs().maxCoeff();
    if (p.is_infinite() || peak == 0.0) return peak;
    const double q = p.value();
    if (q == 2.0) return std::sqrt(weights.dot(values.cwiseAbs2()));
    // Scale by the peak so that |v|^p cannot overflow or fully underflow.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) sum += weights(i) * abs_pow(values(i) / peak, q);
    return peak * std::pow(sum, 1.0 / q);
}

Eigen::VectorXd weighted_lp_norms(const Eigen::Ref<const Eigen::MatrixXd>& columns,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights, LpExponent p)
{
    Eigen::VectorXd out(columns.cols());
    if (p.is_infinite()) {
        for (Eigen::Index j = 0; j < columns.cols(); ++j) out(j) = columns.rows() ? columns.col(j).cwiseAbs().maxCoeff() : 0.0;
    } else if (p.value() == 2.0) {
        out = (weights.transpose() * columns.cwiseAbs2()).transpose().cwiseSqrt();
    } else {
        for (Eigen::Index j = 0; j < columns.cols(); ++j) out(j) = weighted_lp_norm(columns.col(j), weights, p);
    }
    return out;
}

Eigen::VectorXd peak_functional_values(const Eigen::Ref<const Eigen::VectorXd>& g,
                                       const Eigen::Ref<const Eigen::VectorXd>& weights, LpExponent p)
{
    if (p.is_infinite()) throw Unsupported("peak functional in L_inf is not unique");
    const double norm = weighted_lp_norm(g, weights, p);
    if (norm == 0.0) throw ZeroFunction("peak functional of the zero function");
    const double q = p.value();
    Eigen::VectorXd F(g.size());
    if (q == 2.0) {
        F = g / norm;
    } else {
        // sign(g) (|g| / ||g||)^(p-1), evaluated on the normalized values.
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const double t = g(i) / norm;
            F(i) = std::copysign(abs_pow(t, q - 1.0), t);
        }
    }
    return F;
}

double lp_norm(const GridFunction& f, LpExponent p)
{
    return weighted_lp_norm(f.values(), f.grid().weights(), p);
}

GridFunction peak_functional(const GridFunction& g, LpExponent p)
{
    return GridFunction(g.grid_ptr(), peak_functional_values(g.values(), g.grid().weights(), p));
}

double dual_pair(const GridFunction& functional, const GridFunction& g)
{
    require_same_grid(functional.grid(), g.grid());
    return functional.values().cwiseProduct(g.grid().weights()).dot(g.values());
}

// ---------------------------------------------------------------------------- best approximation

namespace {

double objective_of(const Eigen::VectorXd& residual, const Eigen::VectorXd& weights, LpExponent p)
{
    return weighted_lp_norm(residual, weights, p);
}

// min || diag(sqrt(omega)) (rhs - B x) ||_2, with the rank check on the weighted basis.
Eigen::VectorXd weighted_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& basis, const Eigen::VectorXd& rhs,
                                       const Eigen::VectorXd& omega, double rank_threshold)
{
    const Eigen::VectorXd s = omega.cwiseSqrt();
    const Eigen::MatrixXd Bw = s.asDiagonal() * basis;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Bw);
    qr.setThreshold(rank_threshold);
    if (qr.rank() < basis.cols()) throw DegenerateBasis("basis is numerically rank deficient");
    return qr.solve(Eigen::VectorXd(s.cwiseProduct(rhs)));
}

// max_j |F_r(b_j)| / ||b_j||_p, the scale-free first-order optimality gap.
double optimality_gap(const Eigen::VectorXd& residual, const Eigen::Ref<const Eigen::MatrixXd>& basis,
                      const Eigen::VectorXd& basis_norms, const Eigen::VectorXd& weights, LpExponent p)
{
    const Eigen::VectorXd F = peak_functional_values(residual, weights, p).cwiseProduct(weights);
    return (basis.transpose() * F).cwiseAbs().cwiseQuotient(basis_norms).maxCoeff();
}

Approximation solve_finite_p(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                             const Eigen::Ref<const Eigen::MatrixXd>& basis, LpExponent p,
                             const ApproximationOptions& opt, double f_norm)
{
    const Eigen::VectorXd& w = grid.weights();
    const double q = p.value();
    const Eigen::VectorXd basis_norms = weighted_lp_norms(basis, w, p);

    Approximation out;
    out.coefficients = weighted_least_squares(basis, f, w, opt.rank_threshold);
    out.residual = f - basis * out.coefficients;
    out.residual_norm = objective_of(out.residual, w, p);
    if (q == 2.0) return out;

    auto converged = [&](double gap) { return out.residual_norm <= opt.tol * f_norm || gap <= opt.tol; };
    double gap = out.residual_norm > 0.0 ? optimality_gap(out.residual, basis, basis_norms, w, p) : 0.0;

    // For p > 2 the reweighted step overshoots the Newton step by (p - 1); start from Newton.
    const double first_step = q > 2.0 ? 1.0 / (q - 1.0) : 1.0;
    // Near the optimum the objective stalls at rounding level while the gap still shrinks, so a
    // step that keeps the objective within this slack is accepted if it reduces the gap.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon();
    for (int it = 0; it < opt.max_iterations && !converged(gap); ++it) {
        out.iterations = it + 1;
        const double peak = out.residual.cwiseAbs().maxCoeff();
        Eigen::VectorXd omega(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i)
            omega(i) = w(i) * std::pow(std::max(std::abs(out.residual(i)) / peak, opt.weight_floor), q - 2.0);
        const Eigen::VectorXd direction = weighted_least_squares(basis, out.residual, omega, opt.rank_threshold);

        double step = first_step;
        bool improved = false;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            const Eigen::VectorXd trial = out.coefficients + step * direction;
            const Eigen::VectorXd trial_residual = f - basis * trial;
            const double trial_norm = objective_of(trial_residual, w, p);
            if (trial_norm > out.residual_norm * (1.0 + slack)) continue;
            const double trial_gap = trial_norm > 0.0 ? optimality_gap(trial_residual, basis, basis_norms, w, p) : 0.0;
            if (trial_norm < out.residual_norm || trial_gap < gap) {
                out.coefficients = trial;
                out.residual = trial_residual;
                out.residual_norm = trial_norm;
                gap = trial_gap;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (converged(gap)) return out;
    throw ConvergenceFailure("L_" + p.to_string() + " best approximation did not reach first-order optimality",
                             out.coefficients, out.residual_norm);
}

} // namespace

Approximation solve_best_approximation(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                                       const Eigen::Ref<const Eigen::MatrixXd>& basis, LpExponent p,
                                       const ApproximationOptions& options)
{
    const auto N = static_cast<Eigen::Index>(grid.size());
    if (f.size() != N || basis.rows() != N) throw InvalidArgument("best approximation: size mismatch with grid");
    if (!(options.tol > 0.0)) throw InvalidArgument("best approximation: tol must be positive");

    const double f_norm = weighted_lp_norm(f, grid.weights(), p);
    if (basis.cols() == 0) {
        Approximation out;
        out.coefficients.resize(0);
        out.residual = f;
        out.residual_norm = f_norm;
        return out;
    }

    if (!p.is_infinite()) return solve_finite_p(grid, f, basis, p, options, f_norm);

    {
        // Rank check on the unweighted columns; the minimax LP would otherwise be degenerate.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
        qr.setThreshold(options.rank_threshold);
        if (qr.rank() < basis.cols()) throw DegenerateBasis("basis is numerically rank deficient");
    }
    const lp::MinimaxFit fit = lp::minimax_fit(f, basis);
    if (fit.status == lp::Status::optimal) {
        Approximation out;
        out.coefficients = fit.coefficients;
        out.residual = f - basis * fit.coefficients;
        out.residual_norm = out.residual.cwiseAbs().maxCoeff();
        out.iterations = fit.iterations;
        return out;
    }

    // LP failed: offer the better of its iterate and a high-p reweighted solution.
    Eigen::VectorXd best = fit.coefficients.size() == basis.cols() ? fit.coefficients : Eigen::VectorXd::Zero(basis.cols());
    double best_err = (f - basis * best).cwiseAbs().maxCoeff();
    try {
        ApproximationOptions high = options;
        high.max_iterations = std::max(options.max_iterations, 500);
        const Approximation a = solve_finite_p(grid, f, basis, LpExponent::finite(128.0), high, f_norm);
        const double e = a.residual.cwiseAbs().maxCoeff();
        if (e < best_err) {
            best = a.coefficients;
            best_err = e;
        }
    } catch (const ConvergenceFailure& cf) {
        const double e = (f - basis * cf.best_coefficients()).cwiseAbs().maxCoeff();
        if (e < best_err) {
            best = cf.best_coefficients();
            best_err = e;
        }
    }
    throw ConvergenceFailure("L_inf best approximation: simplex did not reach optimality", best, best_err);
}

BestApproximation best_approximation(const GridFunction& f, std::span<const GridFunction> basis, LpExponent p, double tol)
{
    Eigen::MatrixXd B(static_cast<Eigen::Index>(f.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        require_same_grid(f.grid(), basis[j].grid());
        B.col(static_cast<Eigen::Index>(j)) = basis[j].values();
    }
    ApproximationOptions opt;
    opt.tol = tol;
    const Approximation a = solve_best_approximation(f.grid(), f.values(), B, p, opt);
    return {std::vector<double>(a.coefficients.data(), a.coefficients.data() + a.coefficients.size()),
            GridFunction(f.grid_ptr(), a.residual)};
}

} // namespace greedy
