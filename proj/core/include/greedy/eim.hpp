#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "greedy/dictionary.hpp"
#include "greedy/function_space.hpp"
#include "greedy/trace.hpp"

namespace greedy {

/// Empirical interpolation operator built from selected snapshots and point functionals.
///
/// Stores the normalized residuals g_1..g_n (one column each) and the interpolation matrix
/// B = (l_i(g_j)), which is lower triangular with unit diagonal. The cardinal basis
/// h = (g_1..g_n) B^{-1} of the full model is cached; for a leading sub-model of size k < n it
/// is computed on demand by h_basis(k).
class EimModel {
public:
    explicit EimModel(GridPtr grid);

    std::size_t size() const noexcept { return snapshot_indices_.size(); }
    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }

    const std::vector<std::size_t>& snapshot_indices() const noexcept { return snapshot_indices_; }
    /// Indices into the FunctionalSet the model was fitted with.
    const std::vector<std::size_t>& functional_indices() const noexcept { return functional_indices_; }
    /// Grid indices of the interpolation points.
    const std::vector<std::size_t>& points() const noexcept { return points_; }

    const Eigen::MatrixXd& g_basis() const noexcept { return g_; }
    const Eigen::MatrixXd& B() const noexcept { return B_; }
    const Eigen::MatrixXd& h_basis() const noexcept { return h_; }
    /// Cardinal basis of the leading n-term interpolant. Throws InvalidArgument if n is out of range.
    Eigen::MatrixXd h_basis(std::size_t n) const;

    /// Appends a basis function g with g(points[i]) = 0 for the existing points and
    /// g(point) = 1. Used by eim_fit; the caller guarantees the triangular structure.
    void append(std::size_t snapshot, std::size_t functional, std::size_t point, const Eigen::VectorXd& g);

private:
    GridPtr grid_;
    std::vector<std::size_t> snapshot_indices_;
    std::vector<std::size_t> functional_indices_;
    std::vector<std::size_t> points_;
    Eigen::MatrixXd g_;
    Eigen::MatrixXd B_;
    Eigen::MatrixXd h_;
};

enum class FitStatus {
    completed,
    /// The maximal error dropped to the stopping tolerance.
    tolerance_reached,
    /// EIM: the selected residual vanished at every admissible point.
    breakdown,
    /// RBM: every atom already lies in the span.
    span_exhausted,
};

const char* to_string(FitStatus status) noexcept;

struct EimOptions {
    /// Stop once max_f ||f - Pi_{n-1} f|| <= stop_tol.
    double stop_tol = 0.0;
    /// The fit breaks down when max_l |l(r_n)| <= breakdown_tol * max(||r_n||_inf, max |K|).
    double breakdown_tol = 1e-14;
    bool record_lebesgue = true;
    /// Optional held-out dictionary whose max interpolation error is recorded per step.
    const DiscreteDictionary* validation = nullptr;
};

struct EimFit {
    EimModel model;
    GreedyTrace trace;
    FitStatus status = FitStatus::completed;
};

/// Generalized EIM over a discrete dictionary with point-evaluation functionals.
///
/// Step n selects the atom with the largest interpolation error in the L_p norm (ties to the
/// lowest index), then the unused functional maximizing |l(r_n)| (ties to the lowest index).
/// Residuals of all atoms are kept in a working matrix and updated by
/// r <- r - l_n(r) g_n, which equals f - Pi_n f because B is unit lower triangular.
EimFit eim_fit(const DiscreteDictionary& K, const FunctionalSet& L, LpExponent norm_p, std::size_t N,
               const EimOptions& options = {});

/// Pi_n f = sum_j c_j g_j with B_n c = (l_1(f), ..., l_n(f)).
GridFunction eim_interpolate(const EimModel& model, const GridFunction& f, std::size_t n);
/// Same operator through the cardinal form sum_i l_i(f) h_i.
GridFunction eim_interpolate_cardinal(const EimModel& model, const GridFunction& f, std::size_t n);

/// max_x sum_{i<=n} |h_i(x)|, an upper bound for the Lebesgue constant in L_inf.
double lebesgue_upper(const EimModel& model, std::size_t n);

struct RbmFit {
    std::vector<std::size_t> selected;
    GreedyTrace trace;
    FitStatus status = FitStatus::completed;
};

struct RbmOptions {
    double proj_tol = 1e-10;
    /// Distances below this fraction of the largest atom norm count as zero.
    double exhausted_tol = 1e-14;
};

/// Weak reduced-basis greedy. With alpha = 1 picks the farthest atom from X_{n-1}; with
/// alpha < 1 the lowest-index atom within alpha of the farthest distance.
RbmFit weak_rbm_fit(const DiscreteDictionary& K, LpExponent norm_p, double alpha, std::size_t N,
                    const RbmOptions& options = {});

} // namespace greedy
