#include "greedy/diagnostics.hpp"

#include <cmath>
#include <numbers>

#include "greedy/error.hpp"

namespace greedy {

IndexWindow default_window(std::size_t count) noexcept
{
    return {count / 3, count};
}

IndexWindow window_for_range(std::span<const double> ns, double n_lo, double n_hi)
{
    IndexWindow win{ns.size(), ns.size()};
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] >= n_lo && ns[i] <= n_hi) {
            if (win.begin == ns.size()) win.begin = i;
            win.end = i + 1;
        }
    }
    return win;
}

RateFit fit_rate(std::span<const double> ns, std::span<const double> errors, IndexWindow window)
{
    if (ns.size() != errors.size()) throw InvalidArgument("fit_rate: ns and errors differ in length");
    if (window.end > ns.size() || window.size() < 3) throw InvalidArgument("fit_rate: window needs at least 3 samples");

    const auto k = static_cast<double>(window.size());
    double sx = 0, sy = 0;
    for (std::size_t i = window.begin; i < window.end; ++i) {
        if (!(errors[i] > 0.0) || !(ns[i] > 0.0)) throw InvalidArgument("fit_rate: nonpositive value in window");
        sx += std::log(ns[i]);
        sy += std::log(errors[i]);
    }
    const double mx = sx / k, my = sy / k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = window.begin; i < window.end; ++i) {
        const double dx = std::log(ns[i]) - mx, dy = std::log(errors[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InvalidArgument("fit_rate: all n in the window coincide");

    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = window.begin; i < window.end; ++i) {
        const double e = std::log(errors[i]) - (fit.intercept + fit.slope * std::log(ns[i]));
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

double ball_volume_factor(std::size_t n)
{
    if (n < 1) throw InvalidArgument("ball_volume_factor: n must be >= 1");
    const double x = static_cast<double>(n);
    const double log_value = std::lgamma(x + 1.0) + 0.5 * x * std::log(std::numbers::pi) - std::lgamma(0.5 * x + 1.0);
    return std::exp(log_value / x);
}

double delta_bound(std::size_t n, SpaceKind kind, std::optional<double> p)
{
    if (n < 1) throw InvalidArgument("delta_bound: n must be >= 1");
    const double x = static_cast<double>(n);
    switch (kind) {
    case SpaceKind::general_banach: return std::sqrt(x);
    case SpaceKind::hilbert: return 1.0;
    case SpaceKind::sobolev_p:
        if (!p) throw InvalidArgument("delta_bound: p is required for W^k_p");
        if (!(*p >= 1.0)) throw InvalidArgument("delta_bound: p must be >= 1");
        return std::pow(x, std::abs(0.5 - 1.0 / *p));
    }
    throw InvalidArgument("delta_bound: unknown space kind");
}

void EntropyModel::validate() const
{
    if (!(amplitude > 0.0) || !(rate > 0.0)) throw InvalidArgument("entropy model needs amplitude > 0 and rate > 0");
}

double EntropyModel::epsilon(std::size_t n) const
{
    validate();
    if (n < 1) throw InvalidArgument("entropy model: n must be >= 1");
    const double k = static_cast<double>(n);
    if (!log_correction) return amplitude * std::pow(k, -rate);
    // Solve t log t = k for t > 1 by Newton's method; t log t is convex and increasing there.
    double t = std::max(2.0, k / std::log(k + 2.0));
    for (int it = 0; it < 100; ++it) {
        const double step = (t * std::log(t) - k) / (std::log(t) + 1.0);
        t -= step;
        if (t <= 1.0) t = 1.0 + 1e-12;
        if (std::abs(step) <= 1e-15 * t) break;
    }
    return amplitude * std::pow(t, -rate);
}

void BoundInputs::validate() const
{
    if (!(s > 1.0 && s <= 2.0)) throw InvalidArgument("bound inputs: s must lie in (1,2]");
    if (!(C_X > 0.0)) throw InvalidArgument("bound inputs: C_X must be positive");
    if (!(l1_norm > 0.0)) throw InvalidArgument("bound inputs: l1_norm must be positive");
    for (double v : lebesgue_series)
        if (!(v > 0.0)) throw InvalidArgument("bound inputs: Lebesgue series entries must be positive");
    for (double a : alpha_series)
        if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("bound inputs: alpha entries must lie in (0,1]");
    if (space_kind == SpaceKind::sobolev_p && !p) throw InvalidArgument("bound inputs: p is required for W^k_p");
}

double eim_bound(std::size_t n, const BoundInputs& inputs, const EntropyModel& model)
{
    inputs.validate();
    if (n < 1) throw InvalidArgument("eim_bound: n must be >= 1");
    if (inputs.lebesgue_series.size() + 1 < n) throw InvalidArgument("eim_bound: Lebesgue series shorter than n-1");

    const bool hilbert = inputs.space_kind == SpaceKind::hilbert;
    auto gamma = [&](std::size_t k) {
        const double lambda = inputs.lebesgue_series[k - 1];
        return hilbert ? lambda : 1.0 + lambda;
    };
    double log_product = 0.0;
    for (std::size_t k = 1; k + 1 <= n; ++k) log_product += std::log(gamma(k));
    const double gamma_last = n >= 2 ? gamma(n - 1) : 1.0;

    return gamma_last * std::exp(log_product / static_cast<double>(n)) * delta_bound(n, inputs.space_kind, inputs.p) *
           ball_volume_factor(n) * model.epsilon(n);
}

double cga_bound(std::size_t n, const BoundInputs& inputs, const EntropyModel& model)
{
    inputs.validate();
    if (n < 1) throw InvalidArgument("cga_bound: n must be >= 1");
    if (inputs.alpha_series.size() < n) throw InvalidArgument("cga_bound: alpha series shorter than n");

    double log_alpha = 0.0;
    for (std::size_t k = 0; k < n; ++k) log_alpha += std::log(inputs.alpha_series[k]);
    const double x = static_cast<double>(n);
    const double inv_s = 1.0 / inputs.s;

    return std::pow(2.0, 1.0 + inv_s) * std::pow(inputs.C_X, inv_s) * std::exp(-log_alpha / x) *
           delta_bound(n, inputs.space_kind, inputs.p) * std::pow(x, inv_s - 1.0) * ball_volume_factor(n) *
           inputs.l1_norm * model.epsilon(n);
}

double predicted_order(int m, int d, double p, RateKind kind)
{
    if (m < 0) throw InvalidArgument("predicted_order: m must be >= 0");
    if (d < 1) throw InvalidArgument("predicted_order: d must be >= 1");
    if (!(p >= 2.0)) throw InvalidArgument("predicted_order: the estimates assume 2 <= p <= inf");
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double dm = m, dd = d;
    switch (kind) {
    case RateKind::eim_entropy: return 0.5 - inv_p - (2.0 * dm + 1.0) / (2.0 * dd);
    case RateKind::eim_width: return -(dm + inv_p) / dd + 1.0;
    case RateKind::cga_entropy: return -inv_p - 0.5;
    }
    throw InvalidArgument("predicted_order: unknown kind");
}

} // namespace greedy
