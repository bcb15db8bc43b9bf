#include "greedy_tools/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "greedy/error.hpp"

namespace greedy::tools {

const char* to_string(ExperimentKind kind) noexcept
{
    switch (kind) {
    case ExperimentKind::eim: return "EIM";
    case ExperimentKind::rbm: return "RBM";
    case ExperimentKind::oga: return "OGA";
    case ExperimentKind::cga: return "CGA";
    case ExperimentKind::bounds: return "BOUNDS";
    }
    return "?";
}

std::string TargetSpec::to_string() const
{
    switch (kind) {
    case Kind::sin_pi_x: return "SIN_PI_X";
    case Kind::atom: return "ATOM(" + std::to_string(atom_index) + ")";
    case Kind::custom_csv: return "CUSTOM_CSV(" + csv_path.string() + ")";
    }
    return "?";
}

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s)
{
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string where(const Assignment& a)
{
    if (a.line == 0) return "option '" + a.key + "'";
    return "config line " + std::to_string(a.line);
}

[[noreturn]] void fail(const Assignment& a, const std::string& msg)
{
    throw ConfigError(where(a) + ": " + msg);
}

double as_double(const Assignment& a)
{
    const std::string& v = a.value;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        fail(a, "'" + a.key + "' expects a finite number, got '" + v + "'");
    return out;
}

double as_positive(const Assignment& a)
{
    const double x = as_double(a);
    if (!(x > 0.0)) fail(a, "'" + a.key + "' must be positive");
    return x;
}

std::uint64_t as_unsigned(const Assignment& a)
{
    const std::string& v = a.value;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(a, "'" + a.key + "' expects a nonnegative integer, got '" + v + "'");
    return out;
}

bool as_bool(const Assignment& a)
{
    const std::string v = lower(a.value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(a, "'" + a.key + "' expects true or false, got '" + a.value + "'");
}

LpExponent as_exponent(const Assignment& a)
{
    try {
        return LpExponent::parse(a.value);
    } catch (const greedy::Error&) {
        fail(a, "'" + a.key + "' must exceed 1 or be inf, got '" + a.value + "'");
    }
}

/// Text between `name(` and a closing `)`, if `v` has that shape.
std::optional<std::string> call_argument(const std::string& v, const std::string& name)
{
    const std::string lv = lower(v);
    if (lv.rfind(name + "(", 0) != 0 || lv.back() != ')') return std::nullopt;
    return trim(std::string_view(v).substr(name.size() + 1, v.size() - name.size() - 2));
}

TargetSpec as_target(const Assignment& a)
{
    TargetSpec t;
    if (lower(a.value) == "sin_pi_x") return t;
    if (auto arg = call_argument(a.value, "atom")) {
        t.kind = TargetSpec::Kind::atom;
        t.atom_index = static_cast<std::size_t>(as_unsigned(Assignment{a.key, *arg, a.line}));
        return t;
    }
    if (auto arg = call_argument(a.value, "custom_csv")) {
        if (arg->empty()) fail(a, "CUSTOM_CSV needs a path");
        t.kind = TargetSpec::Kind::custom_csv;
        t.csv_path = *arg;
        return t;
    }
    fail(a, "target must be SIN_PI_X, ATOM(index) or CUSTOM_CSV(path), got '" + a.value + "'");
}

ExperimentKind as_kind(const Assignment& a)
{
    const std::string v = lower(a.value);
    if (v == "eim") return ExperimentKind::eim;
    if (v == "rbm") return ExperimentKind::rbm;
    if (v == "oga") return ExperimentKind::oga;
    if (v == "cga") return ExperimentKind::cga;
    if (v == "bounds") return ExperimentKind::bounds;
    fail(a, "kind must be one of eim, rbm, oga, cga, bounds; got '" + a.value + "'");
}

SpaceKind as_space(const Assignment& a)
{
    const std::string v = lower(a.value);
    if (v == "general" || v == "banach" || v == "general_banach") return SpaceKind::general_banach;
    if (v == "sobolev" || v == "sobolev_p") return SpaceKind::sobolev_p;
    if (v == "hilbert") return SpaceKind::hilbert;
    fail(a, "space must be general_banach, sobolev_p or hilbert; got '" + a.value + "'");
}

std::vector<double> as_direction_list(const Assignment& a)
{
    std::vector<double> out;
    std::stringstream ss(a.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double w = as_double(Assignment{a.key, trim(item), a.line});
        if (w != 1.0 && w != -1.0) fail(a, "directions must be -1 or 1");
        out.push_back(w);
    }
    if (out.empty()) fail(a, "'w' needs at least one direction");
    return out;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "kind",    "grid_points", "p",           "norm_p",       "m",         "w",
        "b_min",   "b_max",       "b_count",     "b_step",       "normalize", "target",
        "steps",   "alpha",       "seed",        "output_prefix", "fit_n_min", "fit_n_max",
        "slope_tolerance", "proj_tol", "bound_n_max", "entropy_amplitude", "entropy_rate",
        "log_correction", "space", "s", "c_x", "l1_norm", "lebesgue_csv",
    };
    return keys;
}

std::vector<Assignment> tokenize_config(const std::string& text)
{
    std::vector<Assignment> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string body = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value'");
        Assignment a{lower(trim(std::string_view(body).substr(0, eq))), trim(std::string_view(body).substr(eq + 1)), line};
        if (a.key.empty()) throw ConfigError("config line " + std::to_string(line) + ": missing key");
        if (a.value.empty()) throw ConfigError("config line " + std::to_string(line) + ": missing value for '" + a.key + "'");
        out.push_back(std::move(a));
    }
    return out;
}

ExperimentConfig build_config(const std::vector<Assignment>& assignments)
{
    ExperimentConfig cfg;
    std::optional<double> b_step;
    std::map<std::string, Assignment> last;

    for (const Assignment& a : assignments) {
        const std::string& k = a.key;
        if (k == "kind") cfg.kind = as_kind(a);
        else if (k == "grid_points") {
            const auto n = as_unsigned(a);
            if (n < 2) fail(a, "grid_points must be >= 2");
            cfg.grid_points = static_cast<std::size_t>(n);
        } else if (k == "p" || k == "norm_p") cfg.norm_p = as_exponent(a);
        else if (k == "m") {
            const auto m = as_unsigned(a);
            if (m > 16) fail(a, "m must be <= 16");
            cfg.dictionary.m = static_cast<int>(m);
        }
        else if (k == "w") cfg.dictionary.w_values = as_direction_list(a);
        else if (k == "b_min") cfg.dictionary.b_min = as_double(a);
        else if (k == "b_max") cfg.dictionary.b_max = as_double(a);
        else if (k == "b_count") {
            const auto n = as_unsigned(a);
            if (n < 2) fail(a, "b_count must be >= 2");
            cfg.dictionary.b_count = static_cast<std::size_t>(n);
            b_step.reset();
        } else if (k == "b_step") b_step = as_positive(a);
        else if (k == "normalize") {
            if (lower(a.value) == "none") cfg.dictionary.normalize.reset();
            else cfg.dictionary.normalize = as_exponent(a);
        } else if (k == "target") cfg.target = as_target(a);
        else if (k == "steps") {
            const auto n = as_unsigned(a);
            if (n < 1) fail(a, "steps must be >= 1");
            cfg.steps = static_cast<std::size_t>(n);
        } else if (k == "alpha") {
            const double x = as_double(a);
            if (!(x > 0.0 && x <= 1.0)) fail(a, "alpha must lie in (0, 1]");
            cfg.alpha = x;
        } else if (k == "seed") cfg.seed = as_unsigned(a);
        else if (k == "output_prefix") cfg.output_prefix = a.value;
        else if (k == "fit_n_min") cfg.fit_n_min = as_positive(a);
        else if (k == "fit_n_max") cfg.fit_n_max = as_positive(a);
        else if (k == "slope_tolerance") cfg.slope_tolerance = as_positive(a);
        else if (k == "proj_tol") cfg.proj_tol = as_positive(a);
        else if (k == "bound_n_max") {
            const auto n = as_unsigned(a);
            if (n < 1) fail(a, "bound_n_max must be >= 1");
            cfg.bounds.n_max = static_cast<std::size_t>(n);
        } else if (k == "entropy_amplitude") cfg.bounds.entropy_amplitude = as_positive(a);
        else if (k == "entropy_rate") cfg.bounds.entropy_rate = as_positive(a);
        else if (k == "log_correction") cfg.bounds.log_correction = as_bool(a);
        else if (k == "space") cfg.bounds.space = as_space(a);
        else if (k == "s") {
            const double x = as_double(a);
            if (!(x > 1.0 && x <= 2.0)) fail(a, "s must lie in (1, 2]");
            cfg.bounds.s = x;
        } else if (k == "c_x") cfg.bounds.C_X = as_positive(a);
        else if (k == "l1_norm") cfg.bounds.l1_norm = as_positive(a);
        else if (k == "lebesgue_csv") {
            if (lower(a.value) == "ones") cfg.bounds.lebesgue_csv.reset();
            else cfg.bounds.lebesgue_csv = std::filesystem::path(a.value);
        } else fail(a, "unknown key '" + k + "'");
        last.insert_or_assign(k, a);
    }

    auto line_of = [&](const std::string& key) -> const Assignment* {
        auto it = last.find(key);
        return it == last.end() ? nullptr : &it->second;
    };
    auto cross_fail = [&](std::initializer_list<const char*> keys, const std::string& msg) {
        for (const char* key : keys)
            if (const Assignment* a = line_of(key)) fail(*a, msg);
        throw ConfigError(msg);
    };

    if (!(cfg.dictionary.b_min < cfg.dictionary.b_max)) cross_fail({"b_max", "b_min"}, "b_min must be < b_max");
    if (b_step) {
        const double count = std::round((cfg.dictionary.b_max - cfg.dictionary.b_min) / *b_step) + 1.0;
        if (count < 2.0 || count > 1e9) cross_fail({"b_step"}, "b_step gives an unusable bias count");
        cfg.dictionary.b_count = static_cast<std::size_t>(count);
    }
    if (cfg.fit_n_min && cfg.fit_n_max && !(*cfg.fit_n_min < *cfg.fit_n_max))
        cross_fail({"fit_n_max", "fit_n_min"}, "fit_n_min must be < fit_n_max");
    if ((cfg.kind == ExperimentKind::cga) && cfg.norm_p.is_infinite())
        cross_fail({"p", "norm_p", "kind"}, "CGA needs a finite p");
    if (cfg.kind == ExperimentKind::oga && cfg.norm_p != LpExponent::finite(2.0))
        cross_fail({"p", "norm_p", "kind"}, "OGA runs in L_2; set p = 2");

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const
{
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    try {
        dictionary.validate();
    } catch (const greedy::Error& e) {
        throw ConfigError(e.what());
    }
    if (kind == ExperimentKind::cga && norm_p.is_infinite()) throw ConfigError("CGA needs a finite p");
    if (kind == ExperimentKind::oga && norm_p != LpExponent::finite(2.0)) throw ConfigError("OGA runs in L_2; set p = 2");
}

std::pair<double, double> ExperimentConfig::fit_range() const
{
    const double lo = fit_n_min.value_or(kind == ExperimentKind::oga || kind == ExperimentKind::cga ? 10.0 : 15.0);
    const double hi = fit_n_max.value_or(static_cast<double>(steps));
    return {lo, hi};
}

double ExperimentConfig::band_half_width() const
{
    return slope_tolerance.value_or(kind == ExperimentKind::oga || kind == ExperimentKind::cga ? 0.3 : 0.35);
}

ExperimentConfig parse_config_text(const std::string& text, const std::vector<Assignment>& overrides)
{
    std::vector<Assignment> all = tokenize_config(text);
    all.insert(all.end(), overrides.begin(), overrides.end());
    return build_config(all);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<Assignment>& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

} // namespace greedy::tools
