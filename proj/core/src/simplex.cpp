#include "greedy/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace greedy::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kDegenerateRunBeforeBland = 50;

struct PhaseOutcome {
    Status status;
    Eigen::VectorXd duals;
};

// Runs the simplex method on min cost^T x, M x = b, x >= 0 from the feasible `basis`.
// Only the first `enterable` columns may enter the basis.
PhaseOutcome run_phase(const Eigen::MatrixXd& M, const Eigen::VectorXd& b, const Eigen::VectorXd& cost,
                       std::vector<Eigen::Index>& basis, Eigen::Index enterable, int& iterations, int max_iterations)
{
    const Eigen::Index m = M.rows();
    const double opt_tol = 1e-10 * (1.0 + cost.cwiseAbs().maxCoeff());
    std::vector<char> is_basic(static_cast<std::size_t>(M.cols()), 0);
    for (auto j : basis) is_basic[static_cast<std::size_t>(j)] = 1;

    bool bland = false;
    int degenerate_run = 0;
    Eigen::MatrixXd Bm(m, m);
    Eigen::VectorXd cB(m);

    while (true) {
        for (Eigen::Index i = 0; i < m; ++i) {
            Bm.col(i) = M.col(basis[static_cast<std::size_t>(i)]);
            cB(i) = cost(basis[static_cast<std::size_t>(i)]);
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bm);
        const Eigen::VectorXd xB = lu.solve(b);
        const Eigen::VectorXd y = Bm.transpose().partialPivLu().solve(cB);

        if (iterations >= max_iterations) return {Status::iteration_limit, y};

        const Eigen::VectorXd reduced = cost.head(enterable) - M.leftCols(enterable).transpose() * y;
        Eigen::Index entering = -1;
        double best = -opt_tol;
        for (Eigen::Index j = 0; j < enterable; ++j) {
            if (is_basic[static_cast<std::size_t>(j)]) continue;
            if (reduced(j) < best) {
                best = reduced(j);
                entering = j;
                if (bland) break;
            }
        }
        if (entering < 0) return {Status::optimal, y};

        const Eigen::VectorXd u = lu.solve(M.col(entering));
        Eigen::Index leaving = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (u(i) <= kPivotTol) continue;
            const double r = std::max(xB(i), 0.0) / u(i);
            if (leaving < 0 || r < ratio - 1e-12) {
                ratio = r;
                leaving = i;
            } else if (r <= ratio + 1e-12) {
                const bool prefer = bland ? basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leaving)]
                                          : u(i) > u(leaving);
                if (prefer) {
                    ratio = std::min(ratio, r);
                    leaving = i;
                }
            }
        }
        if (leaving < 0) return {Status::unbounded, y};

        if (ratio <= 1e-14) {
            if (++degenerate_run > kDegenerateRunBeforeBland) bland = true;
        } else {
            degenerate_run = 0;
        }

        is_basic[static_cast<std::size_t>(basis[static_cast<std::size_t>(leaving)])] = 0;
        basis[static_cast<std::size_t>(leaving)] = entering;
        is_basic[static_cast<std::size_t>(entering)] = 1;
        ++iterations;
    }
}

} // namespace

Solution solve_standard_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                             int max_iterations)
{
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();

    Eigen::MatrixXd M(m, n + m);
    M.leftCols(n) = A;
    M.rightCols(m).setIdentity();
    Eigen::VectorXd rhs = b;
    Eigen::VectorXd flip = Eigen::VectorXd::Ones(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        if (rhs(r) < 0.0) {
            M.row(r).head(n) *= -1.0;
            rhs(r) = -rhs(r);
            flip(r) = -1.0;
        }
    }

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

    Solution sol;
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
    phase1_cost.tail(m).setOnes();
    auto phase1 = run_phase(M, rhs, phase1_cost, basis, n, sol.iterations, max_iterations);
    if (phase1.status == Status::iteration_limit) {
        sol.status = Status::iteration_limit;
        return sol;
    }

    auto basic_values = [&] {
        Eigen::MatrixXd Bm(m, m);
        for (Eigen::Index i = 0; i < m; ++i) Bm.col(i) = M.col(basis[static_cast<std::size_t>(i)]);
        return Eigen::VectorXd(Bm.partialPivLu().solve(rhs));
    };

    const double infeasibility = [&] {
        const Eigen::VectorXd xB = basic_values();
        double s = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            if (basis[static_cast<std::size_t>(i)] >= n) s += std::abs(xB(i));
        return s;
    }();
    if (infeasibility > 1e-9 * (1.0 + rhs.lpNorm<1>())) {
        sol.status = Status::infeasible;
        return sol;
    }

    // Pivot zero-level artificials out where some structural column can replace them. Rows
    // where none can are redundant and keep their artificial at zero.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < n) continue;
        Eigen::MatrixXd Bm(m, m);
        for (Eigen::Index k = 0; k < m; ++k) Bm.col(k) = M.col(basis[static_cast<std::size_t>(k)]);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bm);
        const Eigen::RowVectorXd row = lu.solve(Eigen::MatrixXd::Identity(m, m)).row(i) * M.leftCols(n);
        Eigen::Index pick = -1;
        double mag = 1e-9;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
            if (std::abs(row(j)) > mag) {
                mag = std::abs(row(j));
                pick = j;
            }
        }
        if (pick >= 0) basis[static_cast<std::size_t>(i)] = pick;
    }

    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
    phase2_cost.head(n) = c;
    auto phase2 = run_phase(M, rhs, phase2_cost, basis, n, sol.iterations, max_iterations);
    sol.status = phase2.status;

    const Eigen::VectorXd xB = basic_values();
    sol.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto j = basis[static_cast<std::size_t>(i)];
        if (j < n) sol.x(j) = std::max(xB(i), 0.0);
    }
    sol.duals = phase2.duals.cwiseProduct(flip);
    sol.objective = c.dot(sol.x);
    return sol;
}

MinimaxFit minimax_fit(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::MatrixXd>& basis,
                       int max_iterations)
{
    const Eigen::Index N = f.size();
    const Eigen::Index n = basis.cols();
    MinimaxFit fit;
    if (n == 0) {
        fit.status = Status::optimal;
        fit.coefficients.resize(0);
        fit.max_error = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
        return fit;
    }

    // Dual of  min t  s.t. |f - B c| <= t :
    //   max f^T (u - v)  s.t.  B^T (u - v) = 0,  1^T (u + v) = 1,  u, v >= 0.
    // The multipliers of the first n rows recover -c, the last one -t.
    Eigen::MatrixXd A(n + 1, 2 * N);
    A.topLeftCorner(n, N) = basis.transpose();
    A.topRightCorner(n, N) = -basis.transpose();
    A.row(n).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    Eigen::VectorXd c(2 * N);
    c.head(N) = -f;
    c.tail(N) = f;

    const Solution sol = solve_standard_form(A, b, c, max_iterations);
    fit.status = sol.status;
    fit.iterations = sol.iterations;
    if (sol.duals.size() == n + 1) {
        fit.coefficients = -sol.duals.head(n);
        fit.max_error = (f - basis * fit.coefficients).cwiseAbs().maxCoeff();
    } else {
        fit.coefficients = Eigen::VectorXd::Zero(n);
        fit.max_error = f.cwiseAbs().maxCoeff();
    }
    return fit;
}

} // namespace greedy::lp
