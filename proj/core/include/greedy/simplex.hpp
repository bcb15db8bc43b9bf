#pragma once

#include <Eigen/Dense>

namespace greedy::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
    Status status = Status::iteration_limit;
    Eigen::VectorXd x;
    /// Simplex multipliers y with A^T y <= c at optimality.
    Eigen::VectorXd duals;
    double objective = 0.0;
    int iterations = 0;
};

/// Dense two-phase revised simplex for
///
///     minimize c^T x  subject to  A x = b,  x >= 0.
///
/// Intended for few rows and many columns (the discrete minimax dual). The basis matrix is
/// refactorized every iteration. Dantzig pricing, switching to Bland's rule after a run of
/// degenerate pivots.
Solution solve_standard_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                             int max_iterations = 100000);

/// Discrete minimax fit: minimize max_i |f_i - (B c)_i| over c, solved through the dual LP
/// with one row per basis column plus a normalization row.
struct MinimaxFit {
    Status status = Status::iteration_limit;
    Eigen::VectorXd coefficients;
    double max_error = 0.0;
    int iterations = 0;
};

MinimaxFit minimax_fit(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::MatrixXd>& basis,
                       int max_iterations = 100000);

} // namespace greedy::lp
