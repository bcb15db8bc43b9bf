// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "greedy/greedy.hpp"
#include "support/property.hpp"

using namespace greedy;
using greedy::testing::Rng;

namespace {

// Tolerances.
constexpr double kEimSlopeCeiling[3][2] = {{0, 0}, {-0.65, -1.1}, {-1.6, -2.0}}; // [m][Linf, L2]
constexpr double kEimBandHalfWidth = 0.35;
constexpr double kCgaSlopeLo = -1.3, kCgaSlopeHi = -0.7;
constexpr double kLebesgueFloorSlack = 1e-12;
constexpr double kLebesgueCeiling = 100.0;
constexpr double kEquivalenceRel = 1e-9;
constexpr double kInterpRel = 1e-9;
constexpr double kCardinalAbs = 1e-10;
constexpr double kIdempotentRel = 1e-9;
constexpr double kOracleRel = 1e-6;
constexpr double kPeakTol = 1e-10;
constexpr double kBallTol = 1e-12;
constexpr double kStirlingRel = 0.01;
constexpr double kMonotoneSlack = 1e-12;

const LpExponent kInf = LpExponent::infinity();
const LpExponent kTwo = LpExponent::finite(2.0);

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body)
{
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    while (o.detail.ends_with(' ') || o.detail.ends_with(';')) o.detail.pop_back();
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v, int digits = 3)
{
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

double fitted_slope(const GreedyTrace& trace, double n_lo, double n_hi)
{
    const std::vector<double> ns = trace.ns(), errors = trace.errors();
    return fit_rate(ns, errors, window_for_range(ns, n_lo, n_hi)).slope;
}

// Every series recorded by a run that must be non-increasing.
std::vector<std::pair<std::string, std::vector<double>>> monotone_series;

struct EimRun {
    int m = 0;
    bool linf = true;
    EimFit fit;
    std::vector<GridFunction> probes;
};
std::vector<EimRun> eim_runs;

ReluFamilySpec relu_spec(int m, std::size_t b_count)
{
    ReluFamilySpec spec;
    spec.m = m;
    spec.b_min = -2.0;
    spec.b_max = 2.0;
    spec.b_count = b_count;
    return spec;
}

const GridPtr& grid1000()
{
    static const GridPtr g = make_uniform_grid(1000);
    return g;
}

// EIM on K_m with b step 1e-3, 60 steps. Keeps the model and 100 random atoms for later checks.
const EimRun& eim_run(int m, bool linf)
{
    for (const EimRun& r : eim_runs)
        if (r.m == m && r.linf == linf) return r;
    const DiscreteDictionary K = build_relu_dictionary(relu_spec(m, 4001), grid1000());
    const FunctionalSet L = build_point_functionals(K.grid_ptr(), 1);
    EimRun run{m, linf, eim_fit(K, L, linf ? kInf : kTwo, 60), {}};
    Rng rng(7000 + 10 * static_cast<unsigned>(m) + (linf ? 1 : 0));
    for (int k = 0; k < 100; ++k) run.probes.push_back(K.atom(rng.index(K.size())));
    eim_runs.push_back(std::move(run));
    return eim_runs.back();
}

Outcome criterion_eim_orders()
{
    Outcome o;
    for (int m : {1, 2}) {
        for (bool linf : {true, false}) {
            const EimRun& r = eim_run(m, linf);
            if (r.fit.trace.size() < 60) {
                o.pass = false;
                o.detail += "m=" + std::to_string(m) + " stopped at n=" + std::to_string(r.fit.trace.size()) + " ";
            }
            const double slope = fitted_slope(r.fit.trace, 15, 60);
            const double predicted = predicted_order(m, 1, linf ? std::numeric_limits<double>::infinity() : 2.0,
                                                     RateKind::eim_entropy);
            const double ceiling = kEimSlopeCeiling[m][linf ? 0 : 1];
            const bool ok = slope <= ceiling;
            const bool in_band = std::abs(slope - predicted) <= kEimBandHalfWidth;
            o.pass = o.pass && ok;
            o.detail += "m=" + std::to_string(m) + (linf ? " Linf " : " L2 ") + fmt(slope) + " (<= " + fmt(ceiling) +
                        ", predicted " + fmt(predicted) + (in_band ? ", in band" : ", outside band") + "); ";
        }
    }
    return o;
}

Outcome criterion_cga_rate()
{
    Outcome o;
    const DiscreteDictionary K = build_relu_dictionary(relu_spec(0, 80001), grid1000());
    const GridFunction f = GridFunction::sample(grid1000(), [](double x) { return std::sin(std::numbers::pi * x); });
    o.detail = std::to_string(K.size() + K.pruned()) + " raw atoms; ";
    for (double p : {2.0, 4.0}) {
        CgaConfig c;
        c.p = LpExponent::finite(p);
        c.max_steps = 100;
        const SparseResult r = cga_run(f, K, c);
        monotone_series.emplace_back("CGA sin p=" + fmt(p), r.approximant.residual_norms);
        if (r.trace.size() < 100) {
            o.pass = false;
            o.detail += "p=" + fmt(p) + " stopped (" + to_string(r.status) + ") at n=" + std::to_string(r.trace.size()) + " ";
            if (r.trace.size() < 13) continue;
        }
        const double slope = fitted_slope(r.trace, 10, 100);
        const bool ok = slope >= kCgaSlopeLo && slope <= kCgaSlopeHi;
        o.pass = o.pass && ok;
        o.detail += "p=" + fmt(p) + " slope " + fmt(slope) + "; ";
    }
    o.detail += "band [" + fmt(kCgaSlopeLo) + ", " + fmt(kCgaSlopeHi) + "]";
    return o;
}

Outcome criterion_lebesgue()
{
    Outcome o;
    for (int m : {1, 2, 3}) {
        const EimRun& r = eim_run(m, true);
        double lo = std::numeric_limits<double>::infinity(), last = 0;
        for (const TraceRecord& rec : r.fit.trace.records) {
            if (!rec.lebesgue_upper) {
                o.pass = false;
                continue;
            }
            lo = std::min(lo, *rec.lebesgue_upper);
            last = *rec.lebesgue_upper;
        }
        const bool ok = lo >= 1.0 - kLebesgueFloorSlack && last <= kLebesgueCeiling && r.fit.trace.size() == 60;
        o.pass = o.pass && ok;
        o.detail += "m=" + std::to_string(m) + " min " + fmt(lo, 6) + ", value at n=" + std::to_string(r.fit.trace.size()) +
                    " " + fmt(last) + "; ";
    }
    return o;
}

Outcome criterion_equivalence()
{
    // 250 kinks in (0,1), each with both orientations: exactly 500 atoms, none vanishing.
    const GridPtr g = grid1000();
    std::vector<GridFunction> atoms;
    for (int k = 0; k < 250; ++k) {
        const double c = (k + 0.5) / 250.0;
        atoms.push_back(relu_atom(1, 1.0, -c, g));
        atoms.push_back(relu_atom(1, -1.0, c, g));
    }
    const DiscreteDictionary K(g, atoms);
    Outcome o;
    if (K.size() != 500) return {false, "dictionary has " + std::to_string(K.size()) + " atoms"};

    Rng rng(4242);
    double worst = 0;
    int mismatched = 0;
    for (int t = 0; t < 20; ++t) {
        const GridFunction f = greedy::testing::random_smooth(g, rng);
        CgaConfig c;
        c.p = kTwo;
        c.max_steps = 40;
        const SparseResult a = cga_run(f, K, c);
        const SparseResult b = oga_run(f, K, 40);
        monotone_series.emplace_back("CGA p=2 target " + std::to_string(t), a.approximant.residual_norms);
        monotone_series.emplace_back("OGA target " + std::to_string(t), b.approximant.residual_norms);
        if (a.approximant.atom_indices != b.approximant.atom_indices ||
            a.approximant.residual_norms.size() != b.approximant.residual_norms.size()) {
            ++mismatched;
            continue;
        }
        for (std::size_t i = 0; i < a.approximant.residual_norms.size(); ++i)
            worst = std::max(worst, greedy::testing::relative_gap(a.approximant.residual_norms[i], b.approximant.residual_norms[i]));
    }
    o.pass = mismatched == 0 && worst <= kEquivalenceRel;
    o.detail = std::to_string(20 - mismatched) + "/20 identical selections, max relative residual gap " + fmt(worst) +
               " (<= " + fmt(kEquivalenceRel) + ")";
    return o;
}

Outcome criterion_interpolation()
{
    for (int m : {1, 2, 3}) eim_run(m, true);
    for (int m : {1, 2}) eim_run(m, false);

    double interp = 0, cardinal = 0, idem = 0;
    bool triangular = true;
    std::size_t models = 0;
    for (const EimRun& r : eim_runs) {
        const EimModel& model = r.fit.model;
        const Eigen::MatrixXd& B = model.B();
        const auto N = static_cast<Eigen::Index>(model.size());
        for (Eigen::Index i = 0; i < N; ++i) {
            if (B(i, i) != 1.0) triangular = false;
            for (Eigen::Index j = i + 1; j < N; ++j)
                if (B(i, j) != 0.0) triangular = false;
        }
        const auto& pts = model.points();
        for (std::size_t n = 1; n <= model.size(); ++n) {
            ++models;
            const Eigen::MatrixXd h = model.h_basis(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    cardinal = std::max(cardinal, std::abs(h(static_cast<Eigen::Index>(pts[i]), static_cast<Eigen::Index>(j)) -
                                                           (i == j ? 1.0 : 0.0)));
            for (const GridFunction& f : r.probes) {
                const GridFunction pf = eim_interpolate(model, f, n);
                const GridFunction ppf = eim_interpolate(model, pf, n);
                const double fs = lp_norm(f, kInf);
                for (std::size_t i = 0; i < n; ++i) interp = std::max(interp, std::abs(pf[pts[i]] - f[pts[i]]) / fs);
                const double ps = std::max(lp_norm(pf, kInf), std::numeric_limits<double>::min());
                idem = std::max(idem, (ppf.values() - pf.values()).cwiseAbs().maxCoeff() / ps);
            }
        }
    }
    Outcome o;
    o.pass = triangular && interp <= kInterpRel && cardinal <= kCardinalAbs && idem <= kIdempotentRel;
    o.detail = std::to_string(models) + " sub-models; B " + (triangular ? "unit lower triangular" : "NOT unit lower triangular") +
               "; interpolation " + fmt(interp) + ", cardinal " + fmt(cardinal) + ", idempotence " + fmt(idem);
    return o;
}

// Brute-force minimization of ||f - a g1 - b g2|| over a coefficient grid with zoom refinement.
struct TrapezoidNorm {
    std::vector<double> w;
    explicit TrapezoidNorm(std::size_t n) : w(n, 1.0 / static_cast<double>(n - 1))
    {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    double operator()(const std::vector<double>& r, double p) const
    {
        if (std::isinf(p)) {
            double m = 0;
            for (double v : r) m = std::max(m, std::abs(v));
            return m;
        }
        double s = 0;
        if (p == 2.0 || p == 4.0) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double sq = r[i] * r[i];
                s += w[i] * (p == 2.0 ? sq : sq * sq);
            }
        } else {
            for (std::size_t i = 0; i < r.size(); ++i) s += w[i] * std::pow(std::abs(r[i]), p);
        }
        return std::pow(s, 1.0 / p);
    }
};

double brute_force(const std::vector<double>& f, const std::vector<double>& g1, const std::vector<double>& g2, double p,
                   const TrapezoidNorm& norm)
{
    std::vector<double> r(f.size());
    auto objective = [&](double a, double b) {
        for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i] - a * g1[i] - b * g2[i];
        return norm(r, p);
    };
    double best = std::numeric_limits<double>::infinity(), ba = 0, bb = 0;
    double step = 1e-2;
    const int half = 400; // coarse box [-4, 4]^2
    for (int i = -half; i <= half; ++i)
        for (int j = -half; j <= half; ++j) {
            const double v = objective(i * step, j * step);
            if (v < best) best = v, ba = i * step, bb = j * step;
        }
    // Local refinement: re-center a +-15 step neighborhood until it stops moving, then halve the step.
    while (step > 1e-10) {
        bool moved = true;
        while (moved) {
            moved = false;
            const double ca = ba, cb = bb;
            for (int i = -15; i <= 15; ++i)
                for (int j = -15; j <= 15; ++j) {
                    const double a = ca + i * step, b = cb + j * step;
                    const double v = objective(a, b);
                    if (v < best) best = v, ba = a, bb = b, moved = true;
                }
        }
        step *= 0.5;
    }
    if (!std::isinf(p)) return best;

    // Minimax valleys can be too sharp for a grid. Take the 16 largest residuals at the grid
    // minimizer; on every 3-point reference among them the minimax residual equioscillates with
    // signs of the null vector l of [g1 g2]^T, which fixes (a, b, h) by a 3x3 solve.
    objective(ba, bb);
    std::vector<std::size_t> order(f.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + 16, order.end(),
                      [&](std::size_t x, std::size_t y) { return std::abs(r[x]) > std::abs(r[y]); });
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = i + 1; j < 16; ++j)
            for (std::size_t k = j + 1; k < 16; ++k) {
                const std::size_t s[3] = {order[i], order[j], order[k]};
                // l = cross product of the g1 and g2 restrictions.
                const double l[3] = {g1[s[1]] * g2[s[2]] - g1[s[2]] * g2[s[1]], g1[s[2]] * g2[s[0]] - g1[s[0]] * g2[s[2]],
                                     g1[s[0]] * g2[s[1]] - g1[s[1]] * g2[s[0]]};
                Eigen::Matrix3d M;
                Eigen::Vector3d rhs;
                for (int q = 0; q < 3; ++q) {
                    M(q, 0) = g1[s[q]];
                    M(q, 1) = g2[s[q]];
                    M(q, 2) = l[q] >= 0 ? 1.0 : -1.0;
                    rhs(q) = f[s[q]];
                }
                const Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
                if (!lu.isInvertible()) continue;
                const Eigen::Vector3d sol = lu.solve(rhs);
                const double v = objective(sol(0), sol(1));
                if (v < best) best = v;
            }
    return best;
}

Outcome criterion_projection_oracle()
{
    const std::size_t N = 64;
    const GridPtr g = make_uniform_grid(N);
    const TrapezoidNorm norm(N);
    Rng rng(6060);
    double worst = 0;
    int instances = 0;
    for (double p : {2.0, 4.0, std::numeric_limits<double>::infinity()}) {
        const LpExponent e = std::isinf(p) ? kInf : LpExponent::finite(p);
        for (int t = 0; t < 50; ++t) {
            // Two well separated basis functions with unit sup norm and a target near their span.
            const double freq = 1.0 + static_cast<double>(rng.index(3)), phase = rng.uniform(0.0, std::numbers::pi);
            const double kink = rng.uniform(0.2, 0.8);
            std::vector<double> g1(N), g2(N), f(N);
            const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0), noise = rng.uniform(0.05, 0.5);
            for (std::size_t i = 0; i < N; ++i) {
                const double x = static_cast<double>(i) / static_cast<double>(N - 1);
                g1[i] = std::cos(freq * std::numbers::pi * x + phase);
                g2[i] = std::max(x - kink, 0.0) / (1.0 - kink);
            }
            for (std::size_t i = 0; i < N; ++i) f[i] = a * g1[i] + b * g2[i] + noise * rng.normal();

            auto to_fn = [&](const std::vector<double>& v) {
                return GridFunction(g, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(N)));
            };
            const std::vector<GridFunction> basis{to_fn(g1), to_fn(g2)};
            const BestApproximation ba = best_approximation(to_fn(f), basis, e);
            std::vector<double> r(N);
            for (std::size_t i = 0; i < N; ++i) r[i] = f[i] - ba.coefficients[0] * g1[i] - ba.coefficients[1] * g2[i];
            const double library = norm(r, p);
            const double oracle = brute_force(f, g1, g2, p, norm);
            worst = std::max(worst, std::abs(library - oracle) / oracle);
            ++instances;
        }
    }
    return {worst <= kOracleRel, std::to_string(instances) + " instances, max relative objective gap " + fmt(worst) +
                                     " (<= " + fmt(kOracleRel) + ")"};
}

Outcome criterion_peak_functional()
{
    const GridPtr g = make_uniform_grid(257);
    const TrapezoidNorm norm(257);
    Rng rng(7070);
    double dual_err = 0, pair_err = 0;
    for (int t = 0; t < 100; ++t) {
        const GridFunction fn = t % 2 == 0 ? greedy::testing::random_smooth(g, rng) : greedy::testing::random_rough(g, rng);
        for (double p : {1.5, 2.0, 3.0, 4.0, 10.0}) {
            const LpExponent e = LpExponent::finite(p);
            const GridFunction F = peak_functional(fn, e);
            const std::vector<double> Fv(F.values().data(), F.values().data() + F.values().size());
            const std::vector<double> gv(fn.values().data(), fn.values().data() + fn.values().size());
            const double q = p / (p - 1.0);
            dual_err = std::max(dual_err, std::abs(norm(Fv, q) - 1.0));
            double pairing = 0;
            for (std::size_t i = 0; i < gv.size(); ++i) pairing += norm.w[i] * Fv[i] * gv[i];
            const double gn = norm(gv, p);
            pair_err = std::max(pair_err, std::abs(pairing - gn) / gn);
        }
    }
    return {dual_err <= kPeakTol && pair_err <= kPeakTol,
            "max | ||F||' - 1 | " + fmt(dual_err) + ", max relative |F(g) - ||g||| " + fmt(pair_err)};
}

Outcome criterion_bounds()
{
    Outcome o;
    const double expected[3] = {2.0, std::sqrt(2.0 * std::numbers::pi), std::cbrt(8.0 * std::numbers::pi)};
    double ball = 0;
    for (std::size_t n = 1; n <= 3; ++n) ball = std::max(ball, std::abs(ball_volume_factor(n) - expected[n - 1]));
    // (n! V_n)^(1/n) ~ sqrt(2 pi n / e).
    const double stirling = ball_volume_factor(200) / std::sqrt(2.0 * std::numbers::pi * 200.0 / std::numbers::e);

    bool exact = true;
    BoundInputs in;
    in.lebesgue_series.assign(80, 1.0);
    in.alpha_series.assign(80, 1.0);
    for (int i = 0; i < 80; ++i) in.lebesgue_series[i] = 1.0 + 0.1 * i, in.alpha_series[i] = 1.0 / (1.0 + 0.01 * i);
    for (SpaceKind kind : {SpaceKind::general_banach, SpaceKind::hilbert, SpaceKind::sobolev_p}) {
        in.space_kind = kind;
        in.p = 4.0;
        for (bool log_corr : {false, true}) {
            const EntropyModel a{1.0, 1.5, log_corr}, b{8.0, 1.5, log_corr}, c{0.25, 1.5, log_corr};
            for (std::size_t n = 1; n <= 80; ++n) {
                exact = exact && eim_bound(n, in, b) == 8.0 * eim_bound(n, in, a);
                exact = exact && eim_bound(n, in, c) == 0.25 * eim_bound(n, in, a);
                exact = exact && cga_bound(n, in, b) == 8.0 * cga_bound(n, in, a);
                BoundInputs scaled = in;
                scaled.l1_norm = 4.0 * in.l1_norm;
                exact = exact && cga_bound(n, scaled, a) == 4.0 * cga_bound(n, in, a);
            }
        }
    }
    o.pass = ball <= kBallTol && std::abs(stirling - 1.0) <= kStirlingRel && exact;
    o.detail = "ball factors max error " + fmt(ball) + ", Stirling ratio at n=200 " + fmt(stirling, 6) + ", homogeneity " +
               (exact ? "exact" : "NOT exact");
    return o;
}

Outcome criterion_monotonicity()
{
    // RBM runs: sigma_n is the trace error.
    {
        const DiscreteDictionary K = build_relu_dictionary(relu_spec(1, 4001), grid1000());
        const RbmFit r = weak_rbm_fit(K, kTwo, 1.0, 60);
        monotone_series.emplace_back("RBM K_1 L2", r.trace.errors());
    }
    {
        const DiscreteDictionary K = build_relu_dictionary(relu_spec(2, 201), make_uniform_grid(200));
        const RbmFit r = weak_rbm_fit(K, LpExponent::finite(4.0), 1.0, 15);
        monotone_series.emplace_back("RBM K_2 L4", r.trace.errors());
        const RbmFit w = weak_rbm_fit(K, kTwo, 0.5, 30);
        monotone_series.emplace_back("weak RBM K_2 L2 alpha=0.5", w.trace.errors());
    }
    Outcome o;
    double worst = 0;
    std::string worst_name;
    for (const auto& [name, s] : monotone_series) {
        if (s.empty()) continue;
        for (std::size_t i = 1; i < s.size(); ++i) {
            const double excess = (s[i] - s[i - 1]) / s.front();
            if (excess > worst) worst = excess, worst_name = name;
        }
    }
    o.pass = worst <= kMonotoneSlack;
    o.detail = std::to_string(monotone_series.size()) + " series, max relative increase " + fmt(worst) +
               (worst_name.empty() ? "" : " (" + worst_name + ")");
    return o;
}

} // namespace

int main()
{
    report(1, "EIM convergence orders", criterion_eim_orders);
    report(2, "CGA rate", criterion_cga_rate);
    report(3, "Lebesgue constant estimates", criterion_lebesgue);
    report(4, "OGA/CGA equivalence", criterion_equivalence);
    report(5, "interpolation properties", criterion_interpolation);
    report(6, "projection oracle", criterion_projection_oracle);
    report(7, "peak functional identities", criterion_peak_functional);
    report(8, "bound evaluators", criterion_bounds);
    report(9, "monotonicity", criterion_monotonicity);
    return failures == 0 ? 0 : 1;
}
