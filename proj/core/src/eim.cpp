#include "greedy/eim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace greedy {

const char* to_string(FitStatus status) noexcept
{
    switch (status) {
    case FitStatus::completed: return "completed";
    case FitStatus::tolerance_reached: return "tolerance_reached";
    case FitStatus::breakdown: return "breakdown";
    case FitStatus::span_exhausted: return "span_exhausted";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------- EimModel

EimModel::EimModel(GridPtr grid) : grid_(std::move(grid))
{
    if (!grid_) throw InvalidArgument("EIM model without grid");
    const auto N = static_cast<Eigen::Index>(grid_->size());
    g_.resize(N, 0);
    h_.resize(N, 0);
    B_.resize(0, 0);
}

void EimModel::append(std::size_t snapshot, std::size_t functional, std::size_t point, const Eigen::VectorXd& g)
{
    if (static_cast<std::size_t>(g.size()) != grid_->size()) throw InvalidArgument("EIM basis function has wrong length");
    if (point >= grid_->size()) throw InvalidArgument("EIM point outside grid");
    if (std::find(points_.begin(), points_.end(), point) != points_.end())
        throw InvalidArgument("EIM interpolation point selected twice");

    const auto n = static_cast<Eigen::Index>(size());
    snapshot_indices_.push_back(snapshot);
    functional_indices_.push_back(functional);
    points_.push_back(point);

    g_.conservativeResize(Eigen::NoChange, n + 1);
    g_.col(n) = g;

    B_.conservativeResize(n + 1, n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) {
        const auto pi = static_cast<Eigen::Index>(points_[static_cast<std::size_t>(i)]);
        B_(i, n) = g_(pi, n);
    }
    const auto pn = static_cast<Eigen::Index>(point);
    for (Eigen::Index j = 0; j < n; ++j) B_(n, j) = g_(pn, j);

    h_ = h_basis(size());
}

Eigen::MatrixXd EimModel::h_basis(std::size_t n) const
{
    if (n > size()) throw InvalidArgument("EIM sub-model size out of range");
    const auto k = static_cast<Eigen::Index>(n);
    if (k == 0) return Eigen::MatrixXd(g_.rows(), 0);
    // H B = G  <=>  B^T H^T = G^T with B^T upper triangular.
    const Eigen::MatrixXd Gt = g_.leftCols(k).transpose();
    const Eigen::MatrixXd Ht = B_.topLeftCorner(k, k).transpose().triangularView<Eigen::Upper>().solve(Gt);
    return Ht.transpose();
}

// ---------------------------------------------------------------------------- EIM

namespace {

// Lowest index of the maximum; NaN-free input assumed.
Eigen::Index argmax_lowest(const Eigen::VectorXd& v)
{
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j)
        if (v(j) > v(best)) best = j;
    return best;
}

} // namespace

EimFit eim_fit(const DiscreteDictionary& K, const FunctionalSet& L, LpExponent norm_p, std::size_t N,
               const EimOptions& options)
{
    require_same_grid(K.grid(), L.grid());
    if (N < 1) throw InvalidArgument("eim_fit: N must be >= 1");
    if (N > std::min(K.size(), L.size())) throw InvalidArgument("eim_fit: N exceeds min(|K|, |L|)");
    if (!(options.stop_tol >= 0.0)) throw InvalidArgument("eim_fit: stop_tol must be >= 0");
    if (options.validation) require_same_grid(K.grid(), options.validation->grid());

    const Eigen::VectorXd& w = K.grid().weights();
    EimFit fit{EimModel(K.grid_ptr()), {}, FitStatus::completed};
    Eigen::MatrixXd R = K.matrix();
    Eigen::MatrixXd V;
    if (options.validation) V = options.validation->matrix();
    std::vector<char> used(L.size(), 0);
    // Residuals at rounding level of the dictionary scale count as vanished.
    const double scale = K.matrix().cwiseAbs().maxCoeff();
    LapTimer timer;

    for (std::size_t n = 1; n <= N; ++n) {
        const Eigen::VectorXd norms = weighted_lp_norms(R, w, norm_p);
        const Eigen::Index pick = argmax_lowest(norms);
        const double error = norms(pick);
        if (error <= options.stop_tol) {
            fit.status = FitStatus::tolerance_reached;
            break;
        }

        const Eigen::VectorXd r = R.col(pick);
        std::size_t best_k = L.size();
        double best_val = -1.0;
        for (std::size_t k = 0; k < L.size(); ++k) {
            if (used[k]) continue;
            const double v = std::abs(r(static_cast<Eigen::Index>(L.indices()[k])));
            if (v > best_val) {
                best_val = v;
                best_k = k;
            }
        }
        const double r_sup = r.cwiseAbs().maxCoeff();
        if (best_k == L.size() || best_val <= options.breakdown_tol * std::max(r_sup, scale)) {
            fit.status = FitStatus::breakdown;
            break;
        }

        const std::size_t point = L.indices()[best_k];
        const auto xp = static_cast<Eigen::Index>(point);
        const Eigen::VectorXd g = r / r(xp);
        used[best_k] = 1;
        fit.model.append(static_cast<std::size_t>(pick), best_k, point, g);

        TraceRecord rec;
        rec.n = n;
        rec.selected_index = static_cast<std::size_t>(pick);
        rec.error = error;
        if (options.validation) rec.validation_error = weighted_lp_norms(V, w, norm_p).maxCoeff();

        // f - Pi_n f = (f - Pi_{n-1} f) - l_n(f - Pi_{n-1} f) g_n.
        const Eigen::RowVectorXd at_point = R.row(xp);
        R.noalias() -= g * at_point;
        if (options.validation) {
            const Eigen::RowVectorXd v_at = V.row(xp);
            V.noalias() -= g * v_at;
        }

        if (options.record_lebesgue) rec.lebesgue_upper = lebesgue_upper(fit.model, n);
        rec.seconds = timer.lap();
        fit.trace.records.push_back(rec);
    }
    return fit;
}

GridFunction eim_interpolate(const EimModel& model, const GridFunction& f, std::size_t n)
{
    require_same_grid(model.grid(), f.grid());
    if (n < 1 || n > model.size()) throw InvalidArgument("eim_interpolate: n out of range");
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::VectorXd l(k);
    for (Eigen::Index i = 0; i < k; ++i) l(i) = f[model.points()[static_cast<std::size_t>(i)]];
    const Eigen::VectorXd c = model.B().topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(l);
    return GridFunction(model.grid_ptr(), model.g_basis().leftCols(k) * c);
}

GridFunction eim_interpolate_cardinal(const EimModel& model, const GridFunction& f, std::size_t n)
{
    require_same_grid(model.grid(), f.grid());
    if (n < 1 || n > model.size()) throw InvalidArgument("eim_interpolate: n out of range");
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::VectorXd l(k);
    for (Eigen::Index i = 0; i < k; ++i) l(i) = f[model.points()[static_cast<std::size_t>(i)]];
    const Eigen::MatrixXd H = n == model.size() ? model.h_basis() : model.h_basis(n);
    return GridFunction(model.grid_ptr(), H * l);
}

double lebesgue_upper(const EimModel& model, std::size_t n)
{
    if (n < 1 || n > model.size()) throw InvalidArgument("lebesgue_upper: n out of range");
    const Eigen::MatrixXd H = n == model.size() ? model.h_basis() : model.h_basis(n);
    return H.cwiseAbs().rowwise().sum().maxCoeff();
}

// ---------------------------------------------------------------------------- weak RBM

namespace {

std::size_t weak_select(const Eigen::VectorXd& dist, double alpha)
{
    const Eigen::Index best = argmax_lowest(dist);
    if (alpha >= 1.0) return static_cast<std::size_t>(best);
    const double threshold = alpha * dist(best);
    for (Eigen::Index j = 0; j < dist.size(); ++j)
        if (dist(j) >= threshold) return static_cast<std::size_t>(j);
    return static_cast<std::size_t>(best);
}

} // namespace

RbmFit weak_rbm_fit(const DiscreteDictionary& K, LpExponent norm_p, double alpha, std::size_t N, const RbmOptions& options)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("weak_rbm_fit: alpha must be in (0,1]");
    if (N < 1 || N > K.size()) throw InvalidArgument("weak_rbm_fit: N must be in [1, |K|]");

    const Grid& grid = K.grid();
    const Eigen::VectorXd& w = grid.weights();
    const Eigen::VectorXd atom_norms = weighted_lp_norms(K.matrix(), w, norm_p);
    const double zero_level = options.exhausted_tol * atom_norms.maxCoeff();
    const bool hilbert = !norm_p.is_infinite() && norm_p.value() == 2.0;

    RbmFit fit;
    LapTimer timer;

    // L_2: deflate all atoms against a W-orthonormal basis of X_n, one direction per step.
    Eigen::MatrixXd R;
    Eigen::MatrixXd Q;
    if (hilbert) {
        R = K.matrix();
        Q.resize(R.rows(), 0);
    }
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(grid.size()), 0);
    ApproximationOptions approx;
    approx.tol = options.proj_tol;

    for (std::size_t n = 1; n <= N; ++n) {
        Eigen::VectorXd dist(static_cast<Eigen::Index>(K.size()));
        if (hilbert) {
            dist = weighted_lp_norms(R, w, norm_p);
        } else if (basis.cols() == 0) {
            dist = atom_norms;
        } else {
            for (std::size_t j = 0; j < K.size(); ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                try {
                    dist(jj) = solve_best_approximation(grid, K.column(j), basis, norm_p, approx).residual_norm;
                } catch (const ConvergenceFailure& cf) {
                    dist(jj) = cf.best_objective();
                }
            }
        }

        const double sigma = dist.maxCoeff();
        if (sigma <= zero_level) {
            fit.status = FitStatus::span_exhausted;
            break;
        }
        const std::size_t pick = weak_select(dist, alpha);
        fit.selected.push_back(pick);

        TraceRecord rec;
        rec.n = n;
        rec.selected_index = pick;
        rec.error = sigma;

        const auto pj = static_cast<Eigen::Index>(pick);
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = K.column(pick);
        if (hilbert) {
            Eigen::VectorXd q = R.col(pj);
            for (int pass = 0; pass < 2; ++pass) q -= Q * (Q.transpose() * w.cwiseProduct(q));
            q /= std::sqrt(w.dot(q.cwiseAbs2()));
            Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
            Q.col(Q.cols() - 1) = q;
            const Eigen::RowVectorXd coeff = w.cwiseProduct(q).transpose() * R;
            R.noalias() -= q * coeff;
        }
        rec.seconds = timer.lap();
        fit.trace.records.push_back(rec);
    }
    return fit;
}

} // namespace greedy
