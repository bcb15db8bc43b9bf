#include "greedy/sparse_greedy.hpp"

#include <algorithm>
#include <cmath>

namespace greedy {

void CgaConfig::validate() const
{
    if (p.is_infinite()) throw InvalidArgument("CGA requires a finite p > 1");
    if (alpha.empty()) throw InvalidArgument("CGA: empty alpha sequence");
    for (double a : alpha)
        if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("CGA: alpha_n must lie in (0,1]");
    if (max_steps < 1) throw InvalidArgument("CGA: max_steps must be >= 1");
    if (!(proj_tol > 0.0)) throw InvalidArgument("CGA: proj_tol must be positive");
    if (!(select_tol >= 0.0)) throw InvalidArgument("CGA: select_tol must be >= 0");
}

double CgaConfig::alpha_at(std::size_t n) const
{
    const std::size_t i = n == 0 ? 0 : n - 1;
    return alpha[std::min(i, alpha.size() - 1)];
}

const char* to_string(SparseStatus status) noexcept
{
    switch (status) {
    case SparseStatus::completed: return "completed";
    case SparseStatus::tolerance_reached: return "tolerance_reached";
    case SparseStatus::stagnation_annihilated: return "stagnation_annihilated";
    case SparseStatus::stagnation_duplicate: return "stagnation_duplicate";
    case SparseStatus::stagnation_dependent: return "stagnation_dependent";
    case SparseStatus::projection_failed: return "projection_failed";
    }
    return "unknown";
}

namespace {

constexpr double kAnnihilated = 1e-14;
// Scores within kTie * ||F|| * max ||g|| of the maximum count as tied. ReLU pairs such as (x-c)_+ and
// (c-x)_+ differ by an affine function and tie exactly once the span holds the affine functions.
constexpr double kTie = 1e-12;

std::size_t select_atom(const Eigen::VectorXd& scores, double alpha, double tie_width)
{
    const double top = scores.maxCoeff();
    const double threshold = alpha < 1.0 ? alpha * top : top - tie_width;
    for (Eigen::Index j = 0; j < scores.size(); ++j)
        if (scores(j) >= threshold) return static_cast<std::size_t>(j);
    return 0;
}

bool contains(const std::vector<std::size_t>& v, std::size_t x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

} // namespace

SparseResult cga_run(const GridFunction& f, const DiscreteDictionary& K, const CgaConfig& cfg)
{
    cfg.validate();
    require_same_grid(f.grid(), K.grid());
    const Grid& grid = K.grid();
    const Eigen::VectorXd& w = grid.weights();
    const double f_norm = lp_norm(f, cfg.p);
    if (f_norm == 0.0) throw ZeroFunction("CGA target is the zero function");

    const double atom_scale = weighted_lp_norms(K.matrix(), w, cfg.p).maxCoeff();
    const double zero_level = kAnnihilated * atom_scale;
    ApproximationOptions approx;
    approx.tol = cfg.proj_tol;

    SparseResult out;
    out.residual = f.values();
    out.approximant.residual_norms.push_back(f_norm);
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(grid.size()), 0);
    LapTimer timer;

    for (std::size_t n = 1; n <= cfg.max_steps; ++n) {
        if (out.approximant.residual_norms.back() <= kAnnihilated * f_norm) {
            out.status = SparseStatus::stagnation_annihilated;
            break;
        }
        const Eigen::VectorXd F = peak_functional_values(out.residual, w, cfg.p).cwiseProduct(w);
        const Eigen::VectorXd scores = (K.matrix().transpose() * F).cwiseAbs();
        if (scores.maxCoeff() <= zero_level) {
            out.status = SparseStatus::stagnation_annihilated;
            break;
        }
        const std::size_t pick = select_atom(scores, cfg.alpha_at(n), kTie * atom_scale);
        if (contains(out.approximant.atom_indices, pick)) {
            out.status = SparseStatus::stagnation_duplicate;
            break;
        }

        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = K.column(pick);
        Approximation a;
        try {
            a = solve_best_approximation(grid, f.values(), basis, cfg.p, approx);
        } catch (const Error& e) {
            out.status = SparseStatus::projection_failed;
            out.message = e.what();
            break;
        }

        out.approximant.atom_indices.push_back(pick);
        out.approximant.coefficients.assign(a.coefficients.data(), a.coefficients.data() + a.coefficients.size());
        out.approximant.residual_norms.push_back(a.residual_norm);
        out.residual = std::move(a.residual);

        TraceRecord rec;
        rec.n = n;
        rec.selected_index = pick;
        rec.error = a.residual_norm;
        rec.seconds = timer.lap();
        out.trace.records.push_back(rec);

        if (a.residual_norm <= cfg.select_tol * f_norm) {
            out.status = SparseStatus::tolerance_reached;
            break;
        }
    }
    return out;
}

SparseResult oga_run(const GridFunction& f, const DiscreteDictionary& K, std::size_t max_steps, double tol)
{
    require_same_grid(f.grid(), K.grid());
    if (max_steps < 1) throw InvalidArgument("OGA: max_steps must be >= 1");
    const Grid& grid = K.grid();
    const Eigen::VectorXd& w = grid.weights();
    const LpExponent two = LpExponent::finite(2.0);
    const double f_norm = lp_norm(f, two);
    if (f_norm == 0.0) throw ZeroFunction("OGA target is the zero function");
    const Eigen::VectorXd atom_norms = weighted_lp_norms(K.matrix(), w, two);
    const double zero_level = kAnnihilated * atom_norms.maxCoeff();

    SparseResult out;
    out.residual = f.values();
    out.approximant.residual_norms.push_back(f_norm);

    // Selected atoms A = Q R with Q W-orthonormal; f_n = Q beta, coefficients solve R c = beta.
    const auto N = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd Q(N, 0);
    Eigen::MatrixXd R(0, 0);
    Eigen::VectorXd beta(0);
    double r_norm = f_norm;
    LapTimer timer;

    for (std::size_t n = 1; n <= max_steps; ++n) {
        if (r_norm <= kAnnihilated * f_norm) {
            out.status = SparseStatus::stagnation_annihilated;
            break;
        }
        const Eigen::VectorXd scores = (K.matrix().transpose() * w.cwiseProduct(out.residual)).cwiseAbs();
        if (scores.maxCoeff() <= zero_level * r_norm) {
            out.status = SparseStatus::stagnation_annihilated;
            break;
        }
        const std::size_t pick = select_atom(scores, 1.0, kTie * atom_norms.maxCoeff() * r_norm);
        if (contains(out.approximant.atom_indices, pick)) {
            out.status = SparseStatus::stagnation_duplicate;
            break;
        }

        const Eigen::VectorXd atom = K.column(pick);
        Eigen::VectorXd v = atom;
        const Eigen::Index k = Q.cols();
        Eigen::VectorXd rcol = Eigen::VectorXd::Zero(k + 1);
        for (int pass = 0; pass < 2 && k > 0; ++pass) {
            const Eigen::VectorXd proj = Q.transpose() * w.cwiseProduct(v);
            v -= Q * proj;
            rcol.head(k) += proj;
        }
        const double v_norm = std::sqrt(w.dot(v.cwiseAbs2()));
        if (v_norm <= 1e-12 * atom_norms(static_cast<Eigen::Index>(pick))) {
            out.status = SparseStatus::stagnation_dependent;
            break;
        }
        rcol(k) = v_norm;
        Q.conservativeResize(Eigen::NoChange, k + 1);
        Q.col(k) = v / v_norm;
        R.conservativeResize(k + 1, k + 1);
        R.row(k).setZero();
        R.col(k) = rcol;

        const double b = Q.col(k).dot(w.cwiseProduct(out.residual));
        beta.conservativeResize(k + 1);
        beta(k) = b;
        out.residual -= b * Q.col(k);
        r_norm = std::sqrt(w.dot(out.residual.cwiseAbs2()));

        const Eigen::VectorXd c = R.triangularView<Eigen::Upper>().solve(beta);
        out.approximant.atom_indices.push_back(pick);
        out.approximant.coefficients.assign(c.data(), c.data() + c.size());
        out.approximant.residual_norms.push_back(r_norm);

        TraceRecord rec;
        rec.n = n;
        rec.selected_index = pick;
        rec.error = r_norm;
        rec.seconds = timer.lap();
        out.trace.records.push_back(rec);

        if (r_norm <= tol * f_norm) {
            out.status = SparseStatus::tolerance_reached;
            break;
        }
    }
    return out;
}

} // namespace greedy
