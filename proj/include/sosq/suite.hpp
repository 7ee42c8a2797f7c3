#pragma once

// Run configuration, suite orchestration and report serialisation.

#include <sosq/combinatorial.hpp>

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace sosq {

using json = nlohmann::json;

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitPole = 3 };

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {
        "yang-baxter", "exchange",   "cycle",        "qkzb-eq",     "wheel",  "recursion",
        "riemann-xi",  "theta-degree", "contour-n1", "laurent-degree", "rational-degree",
        "eigenvector", "t-invariance", "three-colour", "rsos",        "spectrum", "temperley-lieb"};
    return names;
}

inline bool is_suite(const std::string& name)
{
    const auto& n = suite_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

/// The exact eta token.
inline constexpr const char* kCombinatorialToken = "2pi/3";

struct RunConfig {
    KernelKind kernel = KernelKind::elliptic;
    cplx tau{0.0, 0.8};
    std::optional<cplx> eta;  // omitted: 0.5 for generic identities, 2pi/3 on the combinatorial line
    bool eta_exact = false;   // the "2pi/3" token
    cplx zeta{0.3, 0.0};
    int length = 4;
    int anchor = 0;
    std::optional<Spectral> u;  // explicit points; otherwise drawn from the seed
    std::uint64_t seed = 42;
    int draws = 3;
    std::vector<int> labels{2, 3};
    std::vector<std::string> suites;  // empty: all
    std::map<std::string, double> tolerances;
    std::string output;
    std::string format = "json";

    /// Model for the generic SOS identities.
    Model generic_model(KernelKind kind) const
    {
        const cplx e = eta_exact ? cplx{kCombinatorialEta} : eta.value_or(cplx{0.5, 0.0});
        return Model(ModelParams{kind, tau, e, zeta});
    }
    Model generic_model() const { return generic_model(kernel); }

    /// Model on the combinatorial line unless eta was set to something else.
    Model line_model(KernelKind kind, std::optional<cplx> zeta_override = std::nullopt) const
    {
        const cplx e = eta_exact || !eta ? cplx{kCombinatorialEta} : *eta;
        return Model(ModelParams{kind, tau, e, zeta_override.value_or(zeta)});
    }

    std::vector<std::string> selected_suites() const { return suites.empty() ? suite_names() : suites; }
};

namespace detail {

inline cplx parse_complex(const json& j, const char* what)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(std::string(what) + ": expected a number or a [re, im] pair");
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline std::string format_double(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

/// FNV-1a, stable across platforms.
inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace detail

inline RunConfig parse_config(const json& j)
{
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::vector<std::string> known = {"kernel", "tau",   "eta",    "zeta",       "L",      "anchor",
                                                   "u",      "seed",  "draws",  "j",          "suites", "tolerances",
                                                   "output"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw ConfigError("config: unknown key '" + it.key() + "'");
        }
    }
    RunConfig c;
    try {
        if (j.contains("kernel")) {
            auto k = kernel_from_string(j.at("kernel").get<std::string>());
            if (!k) throw ConfigError("config: kernel must be elliptic, trigonometric or rational");
            c.kernel = *k;
        }
        if (j.contains("tau")) c.tau = detail::parse_complex(j.at("tau"), "tau");
        if (j.contains("eta")) {
            const json& e = j.at("eta");
            if (e.is_string()) {
                if (e.get<std::string>() != kCombinatorialToken) throw ConfigError("config: eta string must be \"2pi/3\"");
                c.eta_exact = true;
            } else {
                c.eta = detail::parse_complex(e, "eta");
            }
        }
        if (j.contains("zeta")) c.zeta = detail::parse_complex(j.at("zeta"), "zeta");
        if (j.contains("L")) c.length = j.at("L").get<int>();
        if (j.contains("anchor")) c.anchor = j.at("anchor").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("draws")) c.draws = j.at("draws").get<int>();
        if (j.contains("u")) {
            const json& u = j.at("u");
            if (u.is_string()) {
                const std::string s = u.get<std::string>();
                const std::string prefix = "random:";
                if (s.rfind(prefix, 0) != 0 || s.size() == prefix.size()) {
                    throw ConfigError("config: u must be a list of [re, im] pairs or \"random:<seed>\"");
                }
                std::size_t pos = 0;
                const std::string digits = s.substr(prefix.size());
                c.seed = std::stoull(digits, &pos);
                if (pos != digits.size()) throw ConfigError("config: malformed seed in '" + s + "'");
            } else if (u.is_array()) {
                Spectral pts;
                for (const json& p : u) pts.push_back(detail::parse_complex(p, "u"));
                c.u = pts;
            } else {
                throw ConfigError("config: u must be a list or \"random:<seed>\"");
            }
        }
        if (j.contains("j")) {
            const json& l = j.at("j");
            if (l.is_string() && l.get<std::string>() == "both") c.labels = {2, 3};
            else if (l.is_number_integer()) c.labels = {l.get<int>()};
            else throw ConfigError("config: j must be 2, 3 or \"both\"");
        }
        if (j.contains("suites")) c.suites = j.at("suites").get<std::vector<std::string>>();
        if (j.contains("tolerances")) c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
        if (j.contains("output")) {
            const json& o = j.at("output");
            if (o.contains("path")) c.output = o.at("path").get<std::string>();
            if (o.contains("format")) c.format = o.at("format").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

/// Checks the invariants of a RunConfig; throws ConfigError.
inline void validate_config(const RunConfig& c)
{
    if (c.kernel == KernelKind::elliptic && !(c.tau.imag() > 0.0)) throw ConfigError("config: Im(tau) must be positive");
    if (c.length < 2 || c.length % 2 || c.length > kMaxChainLength) {
        throw ConfigError("config: L must be even with 2 <= L <= 12");
    }
    if (c.u && static_cast<int>(c.u->size()) != c.length) throw ConfigError("config: u must have L entries");
    if (c.draws < 1) throw ConfigError("config: draws must be positive");
    for (int l : c.labels)
        if (l != 2 && l != 3) throw ConfigError("config: j must be 2 or 3");
    for (const auto& s : c.suites)
        if (!is_suite(s)) throw ConfigError("config: unknown suite '" + s + "'");
    if (c.format != "json" && c.format != "csv") throw ConfigError("config: format must be json or csv");
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    RunConfig c = parse_config(j);
    validate_config(c);
    return c;
}

inline json config_to_json(const RunConfig& c)
{
    json j;
    j["kernel"] = std::string(to_string(c.kernel));
    j["tau"] = detail::complex_json(c.tau);
    if (c.eta_exact) j["eta"] = kCombinatorialToken;
    else if (c.eta) j["eta"] = detail::complex_json(*c.eta);
    j["zeta"] = detail::complex_json(c.zeta);
    j["L"] = c.length;
    j["anchor"] = c.anchor;
    if (c.u) {
        json u = json::array();
        for (cplx z : *c.u) u.push_back(detail::complex_json(z));
        j["u"] = u;
    } else {
        j["u"] = "random:" + std::to_string(c.seed);
    }
    j["seed"] = c.seed;
    j["draws"] = c.draws;
    j["j"] = c.labels;
    j["suites"] = c.selected_suites();
    j["tolerances"] = c.tolerances;
    return j;
}

inline std::string config_digest(const RunConfig& c) { return detail::hex64(detail::fnv1a(config_to_json(c).dump())); }

// ---------------------------------------------------------------------------

struct SuiteEntry {
    std::string suite;
    VerificationReport report;
};

struct SuiteReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<SuiteEntry> entries;
    std::vector<std::string> skipped;  // "suite: reason"
    double wall_time = 0.0;
    bool include_wall_time = false;

    bool passed() const
    {
        return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.report.passed; });
    }
    std::size_t failures() const
    {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [](const SuiteEntry& e) { return !e.report.passed; }));
    }
};

/// Raised when a run cannot find pole-free parameters (exit code 3).
class PoleDominatedRun : public std::runtime_error {
public:
    PoleDominatedRun(const std::string& what, std::string digest) : std::runtime_error(what), digest(std::move(digest)) {}
    std::string digest;
};

namespace detail {

inline std::string spectral_digest(const Model& m, const Spectral& u)
{
    std::ostringstream os;
    os.precision(17);
    os << "kind=" << to_string(m.kind()) << " tau=" << m.tau() << " eta=" << m.eta() << " zeta=" << m.zeta() << " u=[";
    for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
    os << "]";
    return os.str();
}

/// Per-suite state: draws from a seeded stream and report collection.
class SuiteContext {
public:
    SuiteContext(const RunConfig& cfg, std::string suite)
        : cfg_(cfg), suite_(std::move(suite)), sampler_(cfg.seed ^ fnv1a(suite_))
    {
    }

    const RunConfig& config() const { return cfg_; }
    Sampler& sampler() { return sampler_; }

    /// Spectral points for draw k followed by `extra` auxiliary points. The
    /// explicit u of the config is used for draw 0 at the config length.
    Spectral points(const Model& m, int length, int k, int extra = 0)
    {
        const bool fixed = cfg_.u && length == cfg_.length && k == 0;
        for (int attempt = 0; attempt < 200; ++attempt) {
            Spectral u = fixed ? *cfg_.u : sampler_.points(length);
            const Spectral more = sampler_.points(extra);
            u.insert(u.end(), more.begin(), more.end());
            if (generic_point(m, u, length + 4)) return u;
            if (fixed && extra == 0) break;
        }
        throw PoleDominatedRun("no pole-free spectral draw for suite " + suite_,
                               spectral_digest(m, fixed ? *cfg_.u : Spectral{}));
    }

    int draws() const { return cfg_.u ? 1 : cfg_.draws; }

    double tolerance(const std::string& name, double fallback) const
    {
        if (auto it = cfg_.tolerances.find(name); it != cfg_.tolerances.end()) return it->second;
        if (auto it = cfg_.tolerances.find(suite_); it != cfg_.tolerances.end()) return it->second;
        return fallback;
    }

    void add(const std::string& name, double residual, double tol, const std::string& digest,
             const std::string& identity = {})
    {
        out_.push_back({suite_, VerificationReport::make(name, residual, tolerance(name, tol), identity, digest)});
    }

    void add_control(const std::string& name, double residual, double threshold, const std::string& digest,
                     const std::string& identity = {})
    {
        out_.push_back({suite_, VerificationReport::make_control(name, residual, threshold, identity, digest)});
    }

    void skip(const std::string& reason) { skipped_.push_back(suite_ + ": " + reason); }

    std::vector<SuiteEntry>& entries() { return out_; }
    std::vector<std::string>& skipped() { return skipped_; }

private:
    const RunConfig& cfg_;
    std::string suite_;
    Sampler sampler_;
    std::vector<SuiteEntry> out_;
    std::vector<std::string> skipped_;
};

inline std::string tag(const std::string& base, std::initializer_list<std::pair<const char*, int>> fields)
{
    std::string s = base;
    for (const auto& [k, v] : fields) s += std::string(" ") + k + "=" + std::to_string(v);
    return s;
}

inline void suite_yang_baxter(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model();
    const int len = std::max(ctx.config().length, 4);
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d, 2);
        const cplx x = u[static_cast<std::size_t>(len)], y = u[static_cast<std::size_t>(len + 1)];
        const Spectral inhom(u.begin(), u.begin() + len);
        const std::string dg = spectral_digest(m, u);
        ctx.add(tag("yang-baxter", {{"draw", d}}), yang_baxter_residual(m, x, y, len, ctx.config().anchor), 1e-10, dg,
                "R_i R_{i+1} R_i = R_{i+1} R_i R_{i+1}");
        ctx.add(tag("transfer-commute", {{"draw", d}}),
                transfer_commutator_residual(m, x, y, inhom, ctx.config().anchor), 1e-10, dg, "[t(u), t(v)] = 0");
    }
}

inline void suite_exchange(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model();
    const int len = ctx.config().length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d);
        const std::string dg = spectral_digest(m, u);
        for (int j : ctx.config().labels) {
            for (int i = 1; i <= len - 1; ++i) {
                ctx.add(tag("exchange", {{"i", i}, {"j", j}, {"draw", d}}),
                        exchange_residual(m, i, j, u, ctx.config().anchor), 1e-9, dg,
                        "R_i(u_i-u_{i+1}) Psi = tau_{i,i+1} Psi");
            }
            static const char* names[] = {"exchange-case-i", "exchange-case-ii", "exchange-case-iii", "exchange-case-iv"};
            for (int c = 0; c < 4; ++c) {
                try {
                    const auto r = check_exchange_scalar_cases(m, static_cast<ExchangeCase>(c), j, u, ctx.config().anchor);
                    ctx.add(tag(names[c], {{"j", j}, {"draw", d}}), r.residual, 1e-9, dg, r.identity);
                } catch (const std::invalid_argument&) {
                    // no path of this length matches the local pattern
                }
            }
        }
    }
}

inline void suite_cycle(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model();
    const int len = ctx.config().length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d);
        for (int j : ctx.config().labels) {
            ctx.add(tag("cycle", {{"j", j}, {"draw", d}}), cycle_residual(m, j, u, ctx.config().anchor), 1e-9,
                    spectral_digest(m, u), "rho Psi(u) = kappa Psi(u_2, .., u_L, u_1 - s)");
        }
    }
}

inline void suite_qkzb(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model();
    const int len = ctx.config().length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d);
        for (int j : ctx.config().labels) {
            for (int i = 1; i <= len; ++i) {
                ctx.add(tag("qkzb-eq", {{"i", i}, {"j", j}, {"draw", d}}),
                        qkzb_equation_residual(m, i, j, u, ctx.config().anchor), 1e-9, spectral_digest(m, u),
                        "S_i Psi = kappa Psi(.., u_i + s, ..)");
            }
        }
    }
}

inline void suite_wheel(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model();
    const int len = ctx.config().length;
    if (len < 4) {
        ctx.skip("needs L >= 4");
        return;
    }
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d);
        const std::string dg = spectral_digest(m, u);
        for (int j : ctx.config().labels) {
            for (std::array<int, 3> s : {std::array<int, 3>{1, 2, 3}, std::array<int, 3>{len - 2, len - 1, len}}) {
                ctx.add(tag("wheel", {{"i", s[0]}, {"j", j}, {"draw", d}}),
                        wheel_residual(m, j, u, s, ctx.config().anchor), 1e-9, dg, "Psi = 0 on the wheel");
            }
            ctx.add_control(tag("wheel-control", {{"j", j}, {"draw", d}}),
                            wheel_residual(m, j, u, {1, 2, 3}, ctx.config().anchor, cplx{0.1, 0.0}), 1e-2, dg,
                            "off-wheel point must not vanish");
        }
    }
}

inline void suite_recursion(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model();
    const int len = ctx.config().length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d, 1);
        const Spectral base(u.begin(), u.begin() + len);
        const cplx v = u.back();
        const std::string dg = spectral_digest(m, u);
        for (int j : ctx.config().labels) {
            if (len >= 4) {
                ctx.add(tag("recursion-down", {{"L", len}, {"j", j}, {"draw", d}}),
                        recursion_down_residual(m, j, base, ctx.config().anchor), 1e-9, dg,
                        "Psi^(L) at u_{L-1} = u_L + eta reduces to Psi^(L-2)");
            }
            if (len + 2 <= kMaxChainLength) {
                ctx.add(tag("recursion-up", {{"L", len}, {"j", j}, {"draw", d}}),
                        recursion_up_residual(m, j, base, v, ctx.config().anchor), 1e-9, dg,
                        "Psi^(L) from a difference of Psi^(L+2)");
            }
        }
    }
}

inline void suite_riemann(SuiteContext& ctx)
{
    const cplx tau = ctx.config().tau;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto r = xi_riemann_terms({ctx.sampler().point(), ctx.sampler().point(), ctx.sampler().point(),
                                         ctx.sampler().point()},
                                        tau);
        worst = std::max(worst, std::abs(r.value) / r.scale);
    }
    std::ostringstream dg;
    dg << "tau=" << tau << " quadruples=50";
    ctx.add("riemann-xi", worst, 1e-11, dg.str(), "Xi(w1, w2, w3, w4) = 0");
}

inline void suite_theta_degree(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    for (int len = 2; len <= 6; len += 2) {
        const long long d = degree_matrix(maximal_path(len, cfg.anchor)).dimension;
        ctx.add(tag("degree-matrix", {{"L", len}}), std::abs(double(d - theta_space_dimension(len / 2))), 0.0,
                "L=" + std::to_string(len), "2 det(alpha/2) = (n+1) n^{2(n-1)}");
    }
    const Model m = cfg.generic_model(KernelKind::elliptic);
    const int len = cfg.length;
    std::vector<std::vector<cplx>> full;
    std::vector<Spectral> samples;
    for (int k = 0; k < 3; ++k) {
        Spectral u = ctx.points(m, len, k + 1);
        samples.push_back(u);
        std::vector<cplx> f{ctx.sampler().point()};
        f.insert(f.end(), u.begin(), u.end());
        full.push_back(f);
    }
    const std::string dg = spectral_digest(m, samples.front());
    const Path p = enumerate_paths(len, cfg.anchor)[0];
    for (int j : cfg.labels) {
        for (int var = 0; var <= len; ++var) {
            std::vector<int> nvec(static_cast<std::size_t>(len + 1), 0);
            nvec[static_cast<std::size_t>(var)] = 2;
            ctx.add(tag("theta-degree", {{"var", var}, {"j", j}}), theta_degree_spread(m, j, p, nvec, full), 1e-7, dg,
                    "Psi(u + lambda) = c exp(-i n alpha u) Psi(u)");
            ctx.add_control(tag("theta-degree-control", {{"var", var}, {"j", j}}),
                            theta_degree_spread(m, j, p, nvec, full, true), 1e-2, dg, "perturbed exponent");
            ctx.add(tag("pi-shift", {{"var", var}, {"j", j}}), pi_shift_residual(m, j, samples.front(), var, cfg.anchor),
                    1e-9, dg, "Psi(.. u + pi ..) = (-1)^(j+n) Psi");
            ctx.add(tag("tau-shift-swap", {{"var", var}, {"j", j}}), tau_shift_swap_spread(m, j, samples, var, cfg.anchor),
                    1e-7, dg, "Psi^(j)(.. u + pi tau ..) = c e^{-iE} Psi^(5-j)");
        }
    }
}

inline void suite_contour(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model(KernelKind::elliptic);
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, 2, d + (ctx.config().length == 2 ? 0 : 1));
        const std::string dg = spectral_digest(m, u);
        for (int j : ctx.config().labels) {
            for (const Path& p : enumerate_paths(2, ctx.config().anchor)) {
                const ContourReport r = contour_oracle_n1(m, j, p, u);
                const std::string suffix = " path=" + p.to_string();
                ctx.add(tag("contour-match", {{"j", j}, {"draw", d}}) + suffix, r.match, 1e-8, dg,
                        "c^{-1} Phi (contour integral) = (-1)^n residue sum");
                ctx.add(tag("contour-boundary", {{"j", j}, {"draw", d}}) + suffix, r.boundary, 1e-9, dg,
                        "boundary of the period parallelogram integrates to zero");
                ctx.add(tag("contour-flip", {{"j", j}, {"draw", d}}) + suffix, r.flip, 1e-8, dg,
                        "C-bar integral = -C integral");
            }
        }
    }
}

inline void suite_laurent(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model(KernelKind::trigonometric);
    for (int len : {2, 4}) {
        const Spectral u = ctx.points(m, len, 1);
        const std::string dg = spectral_digest(m, u);
        const int n = len / 2;
        for (int j : ctx.config().labels) {
            const int bound = j == 2 ? n : n - 1;
            for (const Path& p : enumerate_paths(len, ctx.config().anchor)) {
                for (int var = 1; var <= len; ++var) {
                    const LaurentReport r = laurent_degree_check(m, j, p, var, u);
                    const int excess = std::max({0, r.max_degree - bound, -bound - r.min_degree});
                    ctx.add(tag("laurent-degree", {{"L", len}, {"j", j}, {"var", var}}) + " path=" + p.to_string(),
                            double(excess), 0.0, dg, "Laurent support within [-bound, bound]");
                }
                const LaurentReport r = laurent_degree_check(m, j, p, 1, u);
                ctx.add(tag("laurent-homogeneity", {{"L", len}, {"j", j}}) + " path=" + p.to_string(), r.homogeneity,
                        1e-10, dg, "total degree zero");
            }
        }
    }
}

inline void suite_rational(SuiteContext& ctx)
{
    const Model m = ctx.config().generic_model(KernelKind::rational);
    for (int len : {2, 4}) {
        const Spectral u = ctx.points(m, len, 1);
        const std::string dg = spectral_digest(m, u);
        const int n = len / 2;
        for (int j : ctx.config().labels) {
            const int expected = n * n + (j == 2 ? 3 : 1);
            for (const Path& p : enumerate_paths(len, ctx.config().anchor)) {
                const RationalDegree r = rational_degree_check(m, j, p, u);
                ctx.add(tag("rational-degree", {{"L", len}, {"j", j}}) + " path=" + p.to_string(),
                        std::abs(r.fitted - expected), 1e-6, dg, "homogeneous of degree n^2+3 / n^2+1");
            }
        }
    }
}

inline bool periodic_kernel(const RunConfig& cfg, SuiteContext& ctx)
{
    if (cfg.kernel == KernelKind::rational) {
        ctx.skip("rational weights are not periodic; the combinatorial line needs elliptic or trigonometric");
        return false;
    }
    return true;
}

inline void suite_eigenvector(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    if (!periodic_kernel(cfg, ctx)) return;
    const Model m = cfg.line_model(cfg.kernel);
    const int len = cfg.length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d, 1);
        const Spectral inhom(u.begin(), u.begin() + len);
        for (int j : cfg.labels) {
            ctx.add(tag("eigenvector", {{"j", j}, {"draw", d}}), eigenvector_residual(m, u.back(), inhom, j, cfg.anchor),
                    1e-8, spectral_digest(m, u), "t(u) Psi = -Psi");
        }
    }
}

inline void suite_t_invariance(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    if (!periodic_kernel(cfg, ctx)) return;
    const Model m = cfg.line_model(cfg.kernel);
    const int len = cfg.length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d, 1);
        const Spectral inhom(u.begin(), u.begin() + len);
        const std::string dg = spectral_digest(m, u);
        for (int j : cfg.labels) {
            ctx.add(tag("t-invariance", {{"j", j}, {"draw", d}}), t_invariance_residual(m, j, inhom, cfg.anchor), 1e-10,
                    dg, "T Psi = Psi");
        }
        ctx.add(tag("transfer-T-commute", {{"draw", d}}), transfer_T_commutator_residual(m, u.back(), inhom, cfg.anchor),
                1e-11, dg, "T t(u) = t(u) T");
        for (int i = 1; i <= len - 1; ++i) {
            ctx.add(tag("r-periodicity", {{"i", i}, {"draw", d}}), r_periodicity_residual(m, i, u.back(), len, cfg.anchor),
                    1e-12, dg, "R_i(u + s) = R_i(u)");
        }
    }
}

inline void suite_three_colour(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    for (int len = 2; len <= 8; ++len) {
        const auto dim = static_cast<long long>(three_colour_basis(len).size());
        ctx.add(tag("three-colour-dimension", {{"L", len}}), std::abs(double(dim - three_colour_dimension(len))), 0.0,
                "L=" + std::to_string(len), "dimension 2^L + 2(-1)^L");
    }
    if (!periodic_kernel(cfg, ctx)) return;
    const Model m = cfg.line_model(cfg.kernel);
    const int len = cfg.length;
    for (int d = 0; d < ctx.draws(); ++d) {
        const Spectral u = ctx.points(m, len, d, 1);
        const Spectral inhom(u.begin(), u.begin() + len);
        const std::string dg = spectral_digest(m, u);
        ctx.add(tag("phi-transfer", {{"draw", d}}), transfer_intertwining_residual(m, u.back(), inhom), 1e-11, dg,
                "phi t3C(u) = t(u) phi");
        ctx.add(tag("phi-r", {{"draw", d}}), r_intertwining_residual(m, u.back(), len), 1e-11, dg,
                "phi R3C_i(u) = R_i(u) phi");
        for (int j : cfg.labels) {
            ctx.add(tag("three-colour-eigenvector", {{"j", j}, {"draw", d}}),
                    three_colour_eigenvector_residual(m, u.back(), inhom, j), 1e-8, dg, "t3C(u) phi^{-1} Psi = -phi^{-1} Psi");
        }
    }
}

inline void suite_rsos(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    if (!periodic_kernel(cfg, ctx)) return;
    const int len = cfg.length;
    for (int k : {0, 1}) {
        const Model m = cfg.line_model(cfg.kernel, cplx{k * pi / 3.0, 0.0});
        // f(a eta + zeta) vanishes here by design, so genericity is judged at the config zeta
        const Spectral u = ctx.points(cfg.line_model(cfg.kernel), len, 1, 1);
        const Spectral inhom(u.begin(), u.begin() + len);
        const std::string dg = spectral_digest(m, u);
        for (int j : cfg.labels) {
            const RsosReport r = rsos_reduce(m, j, u.back(), inhom);
            ctx.add(tag("rsos-vanishing", {{"zeta_pi_over_3", k}, {"j", j}}), r.vanishing, 1e-10, dg,
                    "Psi = 0 on paths meeting the vanishing height class");
            ctx.add(tag("rsos-flip", {{"zeta_pi_over_3", k}, {"j", j}}), r.flip, 1e-11, dg,
                    "restricted t(u) = [[0,1],[1,0]]");
            ctx.add(tag("rsos-psi2-psi3", {{"zeta_pi_over_3", k}, {"j", j}}), r.psi_ratio_spread, 1e-9, dg,
                    "Psi^(2) and Psi^(3) agree up to normalisation");
        }
    }
}

inline void suite_spectrum(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    if (!periodic_kernel(cfg, ctx)) return;
    const int len = cfg.length;
    if (len > kMaxSpectrumLength) {
        ctx.skip("L > 6 is outside the dense spectrum bound");
        return;
    }
    for (KernelKind kind : {KernelKind::trigonometric, KernelKind::elliptic}) {
        const Model m = cfg.line_model(kind);
        const std::string dg = spectral_digest(m, Spectral(static_cast<std::size_t>(len), cplx{}));
        const std::string k = std::string(to_string(kind));
        for (int j : cfg.labels) {
            const SpectrumReport r = spectrum_report(m, len, j);
            ctx.add(tag("spectrum-energy " + k, {{"L", len}, {"j", j}}), std::abs(r.psi_energy), 1e-8, dg, "H Psi = 0");
            ctx.add(tag("spectrum-eigenvector " + k, {{"L", len}, {"j", j}}), r.psi_eigen_residual, 1e-8, dg,
                    "Psi is an eigenvector of H");
            ctx.add(tag("spectrum-overlap " + k, {{"L", len}, {"j", j}}), 1.0 - r.overlap, 1e-6, dg,
                    "Psi lies in one eigenspace");
            if (kind == KernelKind::trigonometric) {
                ctx.add(tag("spectrum-first-excited " + k, {{"L", len}, {"j", j}}), r.first_excited ? 0.0 : 1.0, 0.0, dg,
                        "Psi is the first excited level");
            } else {
                ctx.add(tag("spectrum-not-ground " + k, {{"L", len}, {"j", j}}), r.ground ? 1.0 : 0.0, 0.0, dg,
                        "Psi is not the ground level");
            }
            ctx.add(tag("spectrum-momentum " + k, {{"L", len}, {"j", j}}), r.rho_residual, 1e-9, dg, "rho Psi = -Psi");
            ctx.add(tag("spectrum-derivative " + k, {{"L", len}, {"j", j}}), r.derivative_agreement, 1e-7, dg,
                    "Cauchy and finite-difference t'(0) agree");
            ctx.add(tag("spectrum-translation " + k, {{"L", len}, {"j", j}}), r.rotation_commutator, 1e-8, dg,
                    "[H, rho] = 0");
        }
    }
}

inline void suite_temperley_lieb(SuiteContext& ctx)
{
    const RunConfig& cfg = ctx.config();
    const int len = std::min(cfg.length, kMaxSpectrumLength);
    const Model m = cfg.line_model(KernelKind::trigonometric);
    const TemperleyLiebReport r = temperley_lieb_check(m, std::max(len, 4));
    const std::string dg = spectral_digest(m, {});
    ctx.add("temperley-lieb-braid", r.braid, 1e-7, dg, "U_k U_{k+-1} U_k = U_k");
    ctx.add("temperley-lieb-quadratic", r.quadratic, 1e-7, dg, "U_k U_k = 2 Delta U_k");
    ctx.add("temperley-lieb-hamiltonian", r.hamiltonian, 1e-7, dg, "H = (2/sqrt3) SUM (U_k + 1)");
}

inline void run_suite(SuiteContext& ctx, const std::string& name)
{
    static const std::map<std::string, std::function<void(SuiteContext&)>> table = {
        {"yang-baxter", suite_yang_baxter},   {"exchange", suite_exchange},
        {"cycle", suite_cycle},               {"qkzb-eq", suite_qkzb},
        {"wheel", suite_wheel},               {"recursion", suite_recursion},
        {"riemann-xi", suite_riemann},        {"theta-degree", suite_theta_degree},
        {"contour-n1", suite_contour},        {"laurent-degree", suite_laurent},
        {"rational-degree", suite_rational},  {"eigenvector", suite_eigenvector},
        {"t-invariance", suite_t_invariance}, {"three-colour", suite_three_colour},
        {"rsos", suite_rsos},                 {"spectrum", suite_spectrum},
        {"temperley-lieb", suite_temperley_lieb}};
    table.at(name)(ctx);
}

}  // namespace detail

/// Worker count from SOSQ_WORKERS, at least 1.
inline int worker_count()
{
    if (const char* env = std::getenv("SOSQ_WORKERS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

/// Runs the selected suites. Each suite owns a generator seeded from the run
/// seed and its name, so results do not depend on scheduling.
inline SuiteReport run_verify(const RunConfig& cfg, int workers = worker_count())
{
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::string> names = cfg.selected_suites();

    struct Outcome {
        std::vector<SuiteEntry> entries;
        std::vector<std::string> skipped;
    };
    auto work = [&cfg](const std::string& name) {
        detail::SuiteContext ctx(cfg, name);
        try {
            detail::run_suite(ctx, name);
        } catch (const PoleError& e) {
            throw PoleDominatedRun(name + ": " + e.what(), config_digest(cfg));
        } catch (const PoleDominated& e) {
            throw PoleDominatedRun(name + ": " + e.what(), config_digest(cfg));
        }
        return Outcome{std::move(ctx.entries()), std::move(ctx.skipped())};
    };

    std::vector<Outcome> outcomes(names.size());
    if (workers <= 1) {
        for (std::size_t k = 0; k < names.size(); ++k) outcomes[k] = work(names[k]);
    } else {
        for (std::size_t lo = 0; lo < names.size(); lo += static_cast<std::size_t>(workers)) {
            std::vector<std::future<Outcome>> batch;
            const std::size_t hi = std::min(names.size(), lo + static_cast<std::size_t>(workers));
            for (std::size_t k = lo; k < hi; ++k) batch.push_back(std::async(std::launch::async, work, names[k]));
            for (std::size_t k = lo; k < hi; ++k) outcomes[k] = batch[k - lo].get();
        }
    }

    SuiteReport rep;
    rep.config_digest = config_digest(cfg);
    rep.seed = cfg.seed;
    for (auto& o : outcomes) {
        rep.entries.insert(rep.entries.end(), o.entries.begin(), o.entries.end());
        rep.skipped.insert(rep.skipped.end(), o.skipped.begin(), o.skipped.end());
    }
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

inline json report_to_json(const SuiteReport& r)
{
    json j;
    j["config_digest"] = r.config_digest;
    j["seed"] = r.seed;
    j["generator"] = "mt19937_64";
    j["passed"] = r.passed();
    j["total"] = r.entries.size();
    j["failures"] = r.failures();
    if (r.include_wall_time) j["wall_time_s"] = r.wall_time;
    json items = json::array();
    for (const auto& e : r.entries) {
        items.push_back({{"suite", e.suite},
                         {"name", e.report.name},
                         {"identity", e.report.identity},
                         {"residual", e.report.residual},
                         {"tolerance", e.report.tolerance},
                         {"control", e.report.control},
                         {"passed", e.report.passed},
                         {"params_digest", e.report.params_digest}});
    }
    j["reports"] = items;
    j["skipped"] = r.skipped;
    return j;
}

namespace detail {

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace detail

inline std::string report_to_csv(const SuiteReport& r)
{
    std::ostringstream os;
    os << "suite,name,residual,tolerance,control,passed,params_digest\n";
    for (const auto& e : r.entries) {
        os << detail::csv_field(e.suite) << ',' << detail::csv_field(e.report.name) << ','
           << detail::format_double(e.report.residual) << ',' << detail::format_double(e.report.tolerance) << ','
           << (e.report.control ? "true" : "false") << ',' << (e.report.passed ? "true" : "false") << ','
           << detail::csv_field(e.report.params_digest) << '\n';
    }
    return os.str();
}

inline int exit_code(const SuiteReport& r) { return r.passed() ? kExitPass : kExitFail; }

// ---------------------------------------------------------------------------
// Component table

struct ComponentRow {
    Path path;
    int j = 3;
    cplx amplitude;
    std::optional<cplx> reference;  // closed form where one is known
};

inline std::vector<ComponentRow> emit_components(const RunConfig& cfg)
{
    validate_config(cfg);
    const Model m = cfg.generic_model();
    Spectral u;
    if (cfg.u) {
        u = *cfg.u;
    } else {
        detail::SuiteContext ctx(cfg, "components");
        u = ctx.points(m, cfg.length, 1);
    }
    std::vector<ComponentRow> rows;
    const Path top = maximal_path(cfg.length, cfg.anchor);
    try {
        for (int j : cfg.labels) {
            for (const Path& p : enumerate_paths(cfg.length, cfg.anchor)) {
                ComponentRow row{p, j, psi_component(m, j, p, u), std::nullopt};
                if (p == top) row.reference = trivial_component_product(m, j, cfg.anchor, u);
                if (j == 3 && cfg.length == 4 && m.kind() == KernelKind::elliptic) row.reference = l4_closed_form(m, p, u);
                rows.push_back(row);
            }
        }
    } catch (const PoleError& e) {
        throw PoleDominatedRun(std::string("components: ") + e.what(), detail::spectral_digest(m, u));
    }
    return rows;
}

inline std::string components_to_csv(const std::vector<ComponentRow>& rows)
{
    std::ostringstream os;
    os << "path,j,re,im,reference_re,reference_im\n";
    for (const auto& r : rows) {
        os << detail::csv_field(r.path.to_string()) << ',' << r.j << ',' << detail::format_double(r.amplitude.real()) << ','
           << detail::format_double(r.amplitude.imag()) << ',';
        if (r.reference) {
            os << detail::format_double(r.reference->real()) << ',' << detail::format_double(r.reference->imag());
        } else {
            os << ',';
        }
        os << '\n';
    }
    return os.str();
}

inline json components_to_json(const std::vector<ComponentRow>& rows)
{
    json out = json::array();
    for (const auto& r : rows) {
        json row = {{"path", r.path.heights()}, {"j", r.j}, {"amplitude", detail::complex_json(r.amplitude)}};
        row["reference"] = r.reference ? detail::complex_json(*r.reference) : json(nullptr);
        out.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum command

inline json spectrum_to_json(const SpectrumReport& r)
{
    json j;
    j["L"] = r.length;
    j["kernel"] = std::string(to_string(r.kind));
    j["j"] = r.j;
    json ev = json::array();
    for (cplx e : r.energies) ev.push_back(detail::complex_json(e));
    j["energies"] = ev;
    j["levels"] = r.levels;
    j["psi"] = {{"energy", r.psi_energy},
                {"eigen_residual", r.psi_eigen_residual},
                {"overlap", r.overlap},
                {"level_rank", r.level_rank},
                {"rank", r.ground ? "ground" : (r.first_excited ? "first excited" : "higher")},
                {"rho_eigenvalue", detail::complex_json(r.rho_eigenvalue)},
                {"momentum", r.momentum},
                {"rho_residual", r.rho_residual}};
    j["checks"] = {{"max_imag", r.max_imag},
                   {"translation_commutator", r.rotation_commutator},
                   {"derivative_agreement", r.derivative_agreement}};
    return j;
}

inline std::vector<SpectrumReport> spectrum_cmd(const RunConfig& cfg)
{
    validate_config(cfg);
    if (cfg.length != 4 && cfg.length != 6) {
        throw ConfigError("spectrum: L must be 4 or 6, got " + std::to_string(cfg.length));
    }
    if (cfg.kernel == KernelKind::rational) throw ConfigError("spectrum: rational kernel has no combinatorial line");
    if (cfg.eta && !cfg.eta_exact) throw ConfigError("spectrum: eta must be \"2pi/3\" or omitted");
    const Model m = cfg.line_model(cfg.kernel);
    std::vector<SpectrumReport> out;
    for (int j : cfg.labels) out.push_back(spectrum_report(m, cfg.length, j));
    return out;
}

}  // namespace sosq
