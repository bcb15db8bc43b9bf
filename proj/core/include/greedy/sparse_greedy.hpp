#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "greedy/dictionary.hpp"
#include "greedy/function_space.hpp"
#include "greedy/trace.hpp"

namespace greedy {

struct CgaConfig {
    LpExponent p = LpExponent::finite(2.0);
    /// Weakness parameters alpha_1, alpha_2, ...; the last entry repeats. {1} is the pure CGA.
    std::vector<double> alpha{1.0};
    std::size_t max_steps = 100;
    double proj_tol = 1e-10;
    /// Stop once ||r_n|| <= select_tol * ||f||.
    double select_tol = 0.0;

    void validate() const;
    double alpha_at(std::size_t n) const;
};

/// f_n = sum_i c_i g_i together with the residual history ||r_0|| .. ||r_n||.
struct SparseApproximant {
    std::vector<std::size_t> atom_indices;
    std::vector<double> coefficients;
    std::vector<double> residual_norms;
};

enum class SparseStatus {
    completed,
    tolerance_reached,
    /// sup_g |F_r(g)| vanished: the residual annihilates the dictionary.
    stagnation_annihilated,
    /// An already selected atom won the scan again.
    stagnation_duplicate,
    /// OGA: the selected atom is numerically dependent on the current span.
    stagnation_dependent,
    /// The best-approximation solver failed; results stop at the last good step.
    projection_failed,
};

const char* to_string(SparseStatus status) noexcept;

struct SparseResult {
    SparseApproximant approximant;
    GreedyTrace trace;
    SparseStatus status = SparseStatus::completed;
    /// Residual r_n of the last accepted step.
    Eigen::VectorXd residual;
    /// Solver message when status is projection_failed.
    std::string message;
};

/// Weak Chebyshev greedy algorithm in discrete L_p, 1 < p < inf.
///
/// Each step scans |F_{r_{n-1}}(g)| over the whole dictionary, selects an atom (the lowest index
/// within 1e-12 max ||g|| of the sup for alpha_n = 1, otherwise the lowest index clearing
/// alpha_n * sup) and re-projects f onto the enlarged span by best approximation. A residual
/// below 1e-14 ||f|| ends the run as annihilated.
SparseResult cga_run(const GridFunction& f, const DiscreteDictionary& K, const CgaConfig& cfg);

/// Orthogonal greedy algorithm in the weighted L_2 inner product of the grid. The projection is
/// kept as an incrementally extended W-orthonormal factorization of the selected atoms.
SparseResult oga_run(const GridFunction& f, const DiscreteDictionary& K, std::size_t max_steps, double tol = 0.0);

} // namespace greedy
