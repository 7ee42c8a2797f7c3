#pragma once

// Numerical certificates for the identities satisfied by Psi^(2), Psi^(3).
//
// Every check returns a residual normalised by the largest magnitude entering
// the identity, wrapped in a VerificationReport.

#include <sosq/operators.hpp>
#include <sosq/sampling.hpp>
#include <sosq/solution.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace sosq {

struct VerificationReport {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string params_digest;
    std::string identity;
    // negative controls pass when the residual is at least the tolerance
    bool control = false;

    static VerificationReport make(std::string name, double residual, double tolerance, std::string identity = {},
                                   std::string digest = {})
    {
        VerificationReport r{std::move(name), residual, tolerance, false, std::move(digest), std::move(identity)};
        r.passed = std::isfinite(residual) && residual <= tolerance;
        return r;
    }

    static VerificationReport make_control(std::string name, double residual, double threshold,
                                           std::string identity = {}, std::string digest = {})
    {
        VerificationReport r{std::move(name), residual, threshold, false, std::move(digest), std::move(identity), true};
        r.passed = std::isfinite(residual) && residual >= threshold;
        return r;
    }
};

/// Worst case over a family of reports of the same kind.
inline VerificationReport worst_of(std::string name, const std::vector<VerificationReport>& reports)
{
    VerificationReport out;
    out.name = std::move(name);
    out.passed = !reports.empty();
    out.residual = reports.empty() ? 0.0 : (reports.front().control ? std::numeric_limits<double>::infinity() : 0.0);
    for (const auto& r : reports) {
        out.tolerance = r.tolerance;
        out.control = r.control;
        out.identity = r.identity;
        out.passed = out.passed && r.passed;
        const bool worse = r.control ? r.residual < out.residual : r.residual > out.residual;
        if (worse || !std::isfinite(r.residual)) {
            out.residual = r.residual;
            out.params_digest = r.params_digest;
        }
    }
    return out;
}

namespace detail {

inline double max_abs(const std::vector<cplx>& v)
{
    double m = 0.0;
    for (cplx x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double scaled_difference(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    const double scale = std::max(max_abs(a), max_abs(b));
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    return scale > 0.0 ? diff / scale : 0.0;
}

inline Spectral swapped(Spectral u, int i)
{
    std::swap(u[static_cast<std::size_t>(i - 1)], u[static_cast<std::size_t>(i)]);
    return u;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exchange relation R_i(u_i - u_{i+1}) Psi(.., u_i, u_{i+1}, ..) = Psi(.., u_{i+1}, u_i, ..)

inline double exchange_residual(const Model& m, int i, int j, const Spectral& u, int anchor = 0)
{
    auto basis = share(enumerate_paths(static_cast<int>(u.size()), anchor));
    const StateVector psi = psi_vector(m, j, u, basis);
    const StateVector lhs = apply_R(m, i, u[static_cast<std::size_t>(i - 1)] - u[static_cast<std::size_t>(i)], psi);
    const StateVector rhs = psi_vector(m, j, detail::swapped(u, i), basis);
    return relative_residual(lhs.amplitudes, rhs.amplitudes);
}

inline VerificationReport check_exchange(const Model& m, int i, int j, const Spectral& u, int anchor = 0,
                                         double tol = 1e-9)
{
    return VerificationReport::make("exchange", exchange_residual(m, i, j, u, anchor), tol,
                                    "R_i(u_i-u_{i+1}) Psi = tau_{i,i+1} Psi");
}

/// The four scalar special cases of the exchange relation.
enum class ExchangeCase { i, ii, iii, iv };

/// Residual of one scalar case at (path, i); nullopt when the local pattern
/// at sites i-1, i, i+1 does not match the case.
inline std::optional<double> exchange_scalar_residual(const Model& m, ExchangeCase c, int j, const Path& path, int i,
                                                      const Spectral& u)
{
    const int len = path.length();
    if (i < 1 || i > len - 1) throw std::out_of_range("exchange case: need 1 <= i <= L-1");
    const int a = path.at(i - 1);
    const int mid = path.at(i);
    const int right = path.at(i + 1);
    const cplx ui = u[static_cast<std::size_t>(i - 1)], uj = u[static_cast<std::size_t>(i)];
    const Spectral w = detail::swapped(u, i);
    const cplx eta = m.eta(), zeta = m.zeta();
    auto with_mid = [&](int h) {
        Heights hs = path.heights();
        hs[static_cast<std::size_t>(i - 1)] = h;
        return Path(hs);
    };
    auto rel = [](cplx x, cplx y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300}); };

    switch (c) {
    case ExchangeCase::i: {
        if (!(mid == a - 1 && right == a - 2)) return std::nullopt;
        const cplx factor = m.f(eta + ui - uj) / m.f(eta - ui + uj);
        return rel(psi_component(m, j, path, w), factor * psi_component(m, j, path, u));
    }
    case ExchangeCase::ii: {
        if (!(mid == a + 1 && right == a + 2)) return std::nullopt;
        const cplx factor = m.f(eta + ui - uj) / m.f(eta - ui + uj);
        return rel(psi_bar_component(m, j, path, w), factor * psi_bar_component(m, j, path, u));
    }
    case ExchangeCase::iii: {
        if (!(mid == a - 1 && right == a)) return std::nullopt;
        const Path up = with_mid(a + 1);
        const cplx fa = m.f(double(a) * eta + zeta);
        const cplx rhs = (fa * m.f(eta - ui + uj) * psi_component(m, j, up, w) -
                          m.f(eta) * m.f(double(a) * eta + zeta - ui + uj) * psi_component(m, j, up, u)) /
                         (m.f(ui - uj) * m.f(double(a) * eta + eta + zeta));
        return rel(psi_component(m, j, path, u), rhs);
    }
    case ExchangeCase::iv: {
        if (!(mid == a + 1 && right == a)) return std::nullopt;
        const Path down = with_mid(a - 1);
        const cplx fa = m.f(double(a) * eta + zeta);
        const cplx rhs = (fa * m.f(eta - ui + uj) * psi_component(m, j, down, w) -
                          m.f(eta) * m.f(double(a) * eta + zeta + ui - uj) * psi_component(m, j, down, u)) /
                         (m.f(ui - uj) * m.f(double(a) * eta - eta + zeta));
        return rel(psi_component(m, j, path, u), rhs);
    }
    }
    return std::nullopt;
}

/// Scans every (path, i) of the anchored basis matching the case.
inline VerificationReport check_exchange_scalar_cases(const Model& m, ExchangeCase c, int j, const Spectral& u,
                                                      int anchor = 0, double tol = 1e-10)
{
    const int len = static_cast<int>(u.size());
    double worst = 0.0;
    int hits = 0;
    for (const Path& p : enumerate_paths(len, anchor)) {
        for (int i = 1; i <= len - 1; ++i) {
            if (auto r = exchange_scalar_residual(m, c, j, p, i, u)) {
                worst = std::max(worst, *r);
                ++hits;
            }
        }
    }
    if (hits == 0) throw std::invalid_argument("exchange case: no path matches the local pattern");
    static const char* names[] = {"exchange-case-i", "exchange-case-ii", "exchange-case-iii", "exchange-case-iv"};
    return VerificationReport::make(names[static_cast<int>(c)], worst, tol, "scalar exchange relations");
}

// ---------------------------------------------------------------------------
// Cyclicity Psi_{a_L a_1 .. a_{L-1}}(u_1..u_L) = -Psi_{a_1..a_L}(u_2..u_L, u_1 - 3 eta)

inline double cycle_residual(const Model& m, int j, const Spectral& u, int anchor = 0, cplx kappa = -1.0)
{
    const int len = static_cast<int>(u.size());
    Spectral shifted(u.begin() + 1, u.end());
    shifted.push_back(u.front() - 3.0 * m.eta());
    const SpectralTables tu(m, u), ts(m, shifted);
    std::vector<cplx> lhs, rhs;
    for (const Path& p : enumerate_paths(len, anchor)) {
        lhs.push_back(psi_component(tu, j, p.rotated()));
        rhs.push_back(kappa * psi_component(ts, j, p));
    }
    return detail::scaled_difference(lhs, rhs);
}

inline VerificationReport check_cycle(const Model& m, int j, const Spectral& u, int anchor = 0, double tol = 1e-9)
{
    return VerificationReport::make("cycle", cycle_residual(m, j, u, anchor), tol, "rho Psi(u) = kappa Psi(u_L+s, ..)");
}

// ---------------------------------------------------------------------------
// qKZB equation in coefficient form, kappa = -1, s = 3 eta:
//   Psi_{a'}(.., u_i + s, ..) = kappa^{-1} SUM_a Psi_a(u) delta(a'_i, a_{i-1})
//        PROD_{k<i} W(a'_{k-1}, a'_k, a_{k-1}, a_k | u_i - u_k + s) PROD_{k>i} W(.. | u_i - u_k)

inline double qkzb_equation_residual(const Model& m, int i, int j, const Spectral& u, int anchor = 0,
                                     cplx kappa = -1.0)
{
    const int len = static_cast<int>(u.size());
    const cplx s = 3.0 * m.eta();
    const cplx ui = u[static_cast<std::size_t>(i - 1)];
    Spectral shifted = u;
    shifted[static_cast<std::size_t>(i - 1)] += s;
    const SpectralTables tu(m, u), ts(m, shifted);
    const PathBasis source = enumerate_paths(len, {anchor - 1, anchor + 1});
    std::vector<cplx> psi_src;
    for (const Path& a : source) psi_src.push_back(psi_component(tu, j, a));

    std::vector<cplx> lhs, rhs;
    for (const Path& ap : enumerate_paths(len, anchor)) {
        lhs.push_back(psi_component(ts, j, ap));
        cplx sum{};
        for (std::size_t col = 0; col < source.size(); ++col) {
            const Path& a = source[col];
            if (ap.at(i) != a.at(i - 1)) continue;
            cplx w{1.0, 0.0};
            for (int k = 1; k <= len && w != cplx{}; ++k) {
                if (k == i) continue;
                const cplx arg = ui - u[static_cast<std::size_t>(k - 1)] + (k < i ? s : cplx{});
                w *= sos_weight(m, ap.at(k - 1), ap.at(k), a.at(k - 1), a.at(k), arg);
            }
            sum += w * psi_src[col];
        }
        rhs.push_back(sum / kappa);
    }
    return detail::scaled_difference(lhs, rhs);
}

inline VerificationReport check_qkzb_equation(const Model& m, int i, int j, const Spectral& u, int anchor = 0,
                                              double tol = 1e-9)
{
    return VerificationReport::make("qkzb-eq", qkzb_equation_residual(m, i, j, u, anchor), tol,
                                    "S_i Psi = kappa Psi(.., u_i+s, ..)");
}

// ---------------------------------------------------------------------------
// Wheel condition: Psi vanishes at u_b = u_a - eta, u_c = u_b - eta (a < b < c).

inline Spectral wheel_point(const Spectral& base, std::array<int, 3> sites, cplx eta, cplx offset = 0.0)
{
    Spectral u = base;
    const auto [a, b, c] = sites;
    u[static_cast<std::size_t>(b - 1)] = u[static_cast<std::size_t>(a - 1)] - eta;
    u[static_cast<std::size_t>(c - 1)] = u[static_cast<std::size_t>(b - 1)] - eta + offset;
    return u;
}

/// max |Psi(wheel)| / max |Psi(nearby generic point)|. With a nonzero offset the
/// point is moved off the wheel, which is the negative control.
inline double wheel_residual(const Model& m, int j, const Spectral& base, std::array<int, 3> sites, int anchor = 0,
                             cplx offset = 0.0)
{
    const auto [a, b, c] = sites;
    const int len = static_cast<int>(base.size());
    if (!(1 <= a && a < b && b < c && c <= len)) throw std::invalid_argument("wheel: need 1 <= i < j < k <= L");
    auto basis = share(enumerate_paths(len, anchor));
    const Spectral at = wheel_point(base, sites, m.eta(), offset);
    Spectral near = wheel_point(base, sites, m.eta(), 0.0);
    near[static_cast<std::size_t>(c - 1)] += cplx{0.1, 0.05};
    const double value = psi_vector(m, j, at, basis, Evaluation::regular).max_abs();
    const double scale = psi_vector(m, j, near, basis, Evaluation::regular).max_abs();
    return value / scale;
}

inline VerificationReport check_wheel(const Model& m, int j, const Spectral& base, std::array<int, 3> sites,
                                      int anchor = 0, double tol = 1e-9)
{
    return VerificationReport::make("wheel", wheel_residual(m, j, base, sites, anchor), tol, "Psi = 0 on the wheel");
}

// ---------------------------------------------------------------------------
// Recursions between sizes L and L-2.
//
// (i)  Psi^(L)_a(.., u_{L-1} = u_L + eta, u_L)
//        = delta(a_L, a_{L-2}) (a_L - a_{L-1}) (-1)^n f(a_{L-1} eta + zeta)
//          PROD_{k<=L-2} f(2 eta - u_k + u_L) Psi^(L-2)_{a_1..a_{L-2}}(u_1..u_{L-2})
// (ii) Psi^(L)_a(u) = (-1)^n f(eta) { Psi^(L+2)_{a, a_L+1, a_L}(u, v, v+eta)
//                                    - Psi^(L+2)_{a, a_L-1, a_L}(u, v, v+eta) }
//                     / (f(2 eta) f(a_L eta + zeta) PROD_k f(2 eta - u_k + v))
// with L = 2n the size on the left.

inline double recursion_down_residual(const Model& m, int j, const Spectral& u, int anchor = 0)
{
    const int len = static_cast<int>(u.size());
    if (len < 4) throw std::invalid_argument("recursion (i): need L >= 4");
    const int n = len / 2;
    const cplx eta = m.eta(), zeta = m.zeta();
    Spectral at = u;
    at[static_cast<std::size_t>(len - 2)] = u[static_cast<std::size_t>(len - 1)] + eta;
    const Spectral small(u.begin(), u.end() - 2);
    const cplx uL = u[static_cast<std::size_t>(len - 1)];
    auto basis = share(enumerate_paths(len, anchor));
    const StateVector big = psi_vector(m, j, at, basis, Evaluation::regular);
    const SpectralTables ts(m, small);
    std::vector<cplx> lhs, rhs;
    for (std::size_t k = 0; k < basis->size(); ++k) {
        const Path& p = (*basis)[k];
        lhs.push_back(big[k]);
        if (p.at(len) != p.at(len - 2)) {
            rhs.push_back(0.0);
            continue;
        }
        cplx pre = double(p.at(len) - p.at(len - 1)) * ((n % 2) ? -1.0 : 1.0) *
                   m.f(double(p.at(len - 1)) * eta + zeta);
        for (int q = 1; q <= len - 2; ++q) pre *= m.f(2.0 * eta - u[static_cast<std::size_t>(q - 1)] + uL);
        const Heights h(p.heights().begin(), p.heights().end() - 2);
        rhs.push_back(pre * psi_component(ts, j, Path(h)));
    }
    return detail::scaled_difference(lhs, rhs);
}

inline double recursion_up_residual(const Model& m, int j, const Spectral& u, cplx v, int anchor = 0)
{
    const int len = static_cast<int>(u.size());
    const int n = len / 2;
    const cplx eta = m.eta(), zeta = m.zeta();
    Spectral big_u = u;
    big_u.push_back(v);
    big_u.push_back(v + eta);
    const CircleMean cm{};
    std::vector<cplx> lhs, rhs;
    for (const Path& p : enumerate_paths(len, anchor)) {
        lhs.push_back(psi_component(m, j, p, u));
        Heights up = p.heights(), down = p.heights();
        up.push_back(p.anchor() + 1);
        up.push_back(p.anchor());
        down.push_back(p.anchor() - 1);
        down.push_back(p.anchor());
        const cplx diff = psi_component_regular(m, j, Path(up), big_u, cm) -
                          psi_component_regular(m, j, Path(down), big_u, cm);
        cplx den = m.f(2.0 * eta) * m.f(double(p.anchor()) * eta + zeta);
        for (cplx uk : u) den *= m.f(2.0 * eta - uk + v);
        rhs.push_back(((n % 2) ? -1.0 : 1.0) * m.f(eta) * diff / den);
    }
    return detail::scaled_difference(lhs, rhs);
}

enum class RecursionDirection { down, up };

/// down: u is the size-L point, u_{L-1} is overwritten with u_L + eta.
/// up: u is the size-L point, v the appended spectral parameter.
inline VerificationReport check_recursion(const Model& m, RecursionDirection dir, int j, const Spectral& u,
                                          cplx v = {0.37, 0.11}, int anchor = 0, double tol = 1e-9)
{
    if (dir == RecursionDirection::down) {
        return VerificationReport::make("recursion-down", recursion_down_residual(m, j, u, anchor), tol,
                                        "Psi^(L) at u_{L-1} = u_L + eta reduces to Psi^(L-2)");
    }
    return VerificationReport::make("recursion-up", recursion_up_residual(m, j, u, v, anchor), tol,
                                    "Psi^(L) from a difference of Psi^(L+2)");
}

// ---------------------------------------------------------------------------
// Riemann identity. With w_i = 2 z_i,
//   Xi(w) = f(2z1) f(2z2) f(2z3) f(2z4)
//         - f(-z1+z2+z3+z4) f(z1-z2+z3+z4) f(z1+z2-z3+z4) f(z1+z2+z3-z4)
//         - f(z1+z2+z3+z4) f(z1-z2-z3+z4) f(z1-z2+z3-z4) f(z1+z2-z3-z4)

struct XiValue {
    cplx value;
    double scale;  // largest of the three products
};

inline XiValue xi_riemann_terms(std::array<cplx, 4> w, cplx tau)
{
    auto f = [&](cplx x) { return theta(1, x, tau); };
    const cplx z1 = w[0] / 2.0, z2 = w[1] / 2.0, z3 = w[2] / 2.0, z4 = w[3] / 2.0;
    const cplx t1 = f(w[0]) * f(w[1]) * f(w[2]) * f(w[3]);
    const cplx t2 = f(-z1 + z2 + z3 + z4) * f(z1 - z2 + z3 + z4) * f(z1 + z2 - z3 + z4) * f(z1 + z2 + z3 - z4);
    const cplx t3 = f(z1 + z2 + z3 + z4) * f(z1 - z2 - z3 + z4) * f(z1 - z2 + z3 - z4) * f(z1 + z2 - z3 - z4);
    return {t1 - t2 - t3, std::max({std::abs(t1), std::abs(t2), std::abs(t3)})};
}

inline cplx xi_riemann(cplx w1, cplx w2, cplx w3, cplx w4, cplx tau)
{
    return xi_riemann_terms({w1, w2, w3, w4}, tau).value;
}

// ---------------------------------------------------------------------------
// Degree matrix alpha_ij(a), i, j = 0..L:
//   alpha_00 = L+3, alpha_0j = alpha_j0 = a_j - a_{j-1}, alpha_ii = L-1, alpha_ij = -1.

using IntMatrix = std::vector<std::vector<long long>>;

struct DegreeMatrix {
    IntMatrix alpha;
    long long det_leading = 0;  // det(alpha_ij), i,j = 0..L-1
    long long dimension = 0;    // 2 det(alpha/2) = 2 det_leading / 2^L
};

/// Exact integer determinant by fraction-free elimination.
inline long long bareiss_determinant(IntMatrix a)
{
    const std::size_t n = a.size();
    long long sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return n ? sign * a[n - 1][n - 1] : 1;
}

inline IntMatrix alpha_matrix(const Path& path)
{
    const int len = path.length();
    IntMatrix al(static_cast<std::size_t>(len + 1), std::vector<long long>(static_cast<std::size_t>(len + 1), -1));
    al[0][0] = len + 3;
    for (int i = 1; i <= len; ++i) {
        al[0][static_cast<std::size_t>(i)] = al[static_cast<std::size_t>(i)][0] = path.step(i);
        al[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = len - 1;
    }
    return al;
}

inline DegreeMatrix degree_matrix(const Path& path)
{
    DegreeMatrix d;
    d.alpha = alpha_matrix(path);
    const int len = path.length();
    IntMatrix lead(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        lead[static_cast<std::size_t>(i)].assign(d.alpha[static_cast<std::size_t>(i)].begin(),
                                                  d.alpha[static_cast<std::size_t>(i)].begin() + len);
    d.det_leading = bareiss_determinant(lead);
    const long long denom = 1LL << len;
    if ((2 * d.det_leading) % denom != 0) throw std::logic_error("degree_matrix: non-integral dimension");
    d.dimension = 2 * d.det_leading / denom;
    return d;
}

/// (n+1) n^{2(n-1)}
inline long long theta_space_dimension(int n)
{
    long long r = n + 1;
    for (int k = 0; k < 2 * (n - 1); ++k) r *= n;
    return r;
}

// ---------------------------------------------------------------------------
// Pseudo-periodicity. Variables are indexed 0..L with u_0 = zeta.

namespace detail {

inline cplx psi_full(const Model& m, int j, const Path& p, const std::vector<cplx>& full)
{
    const Model shifted = m.with_zeta(full[0]);
    return psi_component(shifted, j, p, Spectral(full.begin() + 1, full.end()));
}

inline std::vector<cplx> full_vector(const Model& m, const Spectral& u)
{
    std::vector<cplx> v{m.zeta()};
    v.insert(v.end(), u.begin(), u.end());
    return v;
}

/// Largest relative deviation of a list of ratios from their first entry.
inline double spread(const std::vector<cplx>& r)
{
    double s = 0.0;
    for (cplx x : r) s = std::max(s, std::abs(x - r.front()) / std::abs(r.front()));
    return s;
}

}  // namespace detail

/// Psi^(k)(.., u_m + pi, ..) = (-1)^(k+n) Psi^(k); m = 0 shifts zeta.
/// At n = 1, Psi_{(1,0)} = f(zeta) f(eta+zeta) f^(k)(zeta-eta+u_1-u_2) already shows the extra (-1)^n.
inline int pi_shift_sign(int j, int length) { return ((j + length / 2) % 2) ? -1 : 1; }

inline double pi_shift_residual(const Model& m, int j, const Spectral& u, int var, int anchor = 0)
{
    const int len = static_cast<int>(u.size());
    const double sign = pi_shift_sign(j, len);
    const auto full = detail::full_vector(m, u);
    auto shifted = full;
    shifted[static_cast<std::size_t>(var)] += pi;
    std::vector<cplx> lhs, rhs;
    for (const Path& p : enumerate_paths(len, anchor)) {
        lhs.push_back(detail::psi_full(m, j, p, shifted));
        rhs.push_back(sign * detail::psi_full(m, j, p, full));
    }
    return detail::scaled_difference(lhs, rhs);
}

/// Exponent E with Psi^(k)(.. + pi tau e_var ..) = c_var e^{-iE} Psi^(5-k)(..).
inline cplx tau_shift_exponent(const Model& m, const Path& p, const std::vector<cplx>& full, int var)
{
    const int len = p.length();
    const cplx eta = m.eta();
    const cplx zeta = full[0];
    if (var == 0) {
        cplx e = 3.0 * (double(p.anchor()) * eta + zeta);
        for (int q = 1; q <= len; ++q) {
            e += double(p.at(q)) * eta + zeta + double(p.step(q)) * full[static_cast<std::size_t>(q)];
        }
        return e;
    }
    cplx e = (double(p.at(var - 1)) * eta + zeta) * double(p.step(var)) + double(len - 1) * full[static_cast<std::size_t>(var)];
    for (int q = 1; q <= len; ++q)
        if (q != var) e -= full[static_cast<std::size_t>(q)];
    return e;
}

/// Spread of Psi^(k)(.. + pi tau e_var ..) e^{iE} / Psi^(5-k)(..) across all
/// components and the supplied sample points. Elliptic kernel only.
inline double tau_shift_swap_spread(const Model& m, int k, const std::vector<Spectral>& samples, int var,
                                    int anchor = 0)
{
    std::vector<cplx> ratios;
    for (const Spectral& u : samples) {
        const auto full = detail::full_vector(m, u);
        auto shifted = full;
        shifted[static_cast<std::size_t>(var)] += pi * m.tau();
        for (const Path& p : enumerate_paths(static_cast<int>(u.size()), anchor)) {
            const cplx num = detail::psi_full(m, k, p, shifted) * std::exp(I * tau_shift_exponent(m, p, full, var));
            ratios.push_back(num / detail::psi_full(m, 5 - k, p, full));
        }
    }
    return detail::spread(ratios);
}

/// Theta-function structure: for lambda = pi tau n with SUM n_i even,
///   Psi(u + lambda) = c e^{-i SUM_{ij} n_i alpha_ij u_j} Psi(u).
/// Each sample holds (zeta, u_1, .., u_L). Returns the spread of the ratio
/// across samples for one component. `perturb` adds 1 to alpha_ii of the first
/// nonzero n_i (negative control).
inline double theta_degree_spread(const Model& m, int j, const Path& p, const std::vector<int>& nvec,
                                  const std::vector<std::vector<cplx>>& samples, bool perturb = false)
{
    const int len = p.length();
    if (static_cast<int>(nvec.size()) != len + 1) throw std::invalid_argument("theta degree: n has L+1 entries");
    if (std::accumulate(nvec.begin(), nvec.end(), 0) % 2 != 0) {
        throw std::invalid_argument("theta degree: shift is not in the even sublattice");
    }
    IntMatrix al = alpha_matrix(p);
    if (perturb) {
        for (int i = 0; i <= len; ++i) {
            if (nvec[static_cast<std::size_t>(i)] != 0) {
                al[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += 1;
                break;
            }
        }
    }
    std::vector<cplx> ratios;
    for (const auto& full : samples) {
        if (static_cast<int>(full.size()) != len + 1) throw std::invalid_argument("theta degree: sample needs L+1 entries");
        auto shifted = full;
        cplx expo{};
        for (int i = 0; i <= len; ++i) {
            const int ni = nvec[static_cast<std::size_t>(i)];
            shifted[static_cast<std::size_t>(i)] += pi * m.tau() * double(ni);
            for (int q = 0; q <= len; ++q)
                expo += double(ni) * double(al[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)]) *
                        full[static_cast<std::size_t>(q)];
        }
        const cplx den = std::exp(-I * expo) * detail::psi_full(m, j, p, full);
        if (m.vanishes(den)) throw PoleError("theta degree: component vanishes at a sample point");
        ratios.push_back(detail::psi_full(m, j, p, shifted) / den);
    }
    return detail::spread(ratios);
}

/// Constancy of the multiplier for the shift 2 pi tau in variable var
/// (index 0 is zeta).
inline VerificationReport check_theta_degree(const Model& m, int var, int j, const Path& p,
                                             const std::vector<std::vector<cplx>>& samples, double tol = 1e-7)
{
    std::vector<int> nvec(static_cast<std::size_t>(p.length() + 1), 0);
    nvec[static_cast<std::size_t>(var)] = 2;
    return VerificationReport::make("theta-degree", theta_degree_spread(m, j, p, nvec, samples), tol,
                                    "Psi(u + lambda) = c exp(-i n alpha u) Psi(u)");
}

// ---------------------------------------------------------------------------
// Contour oracle at n = 1 (L = 2). The integrand is
//   I(v) = f(eta) f(a_L eta+zeta) f^(j)(a_L eta+zeta-eta+2v-u1-u2) f(a_al eta+zeta-v+u_al)
//          / (PROD_{m<=al} f(u_m - v) PROD_{m>=al} f(eta - v + u_m))
// and Psi = Phi(u) c^{-1} (contour integral of I dv / 2 pi i) over circles around u_m, m <= al.

struct ContourReport {
    cplx quadrature;     // Phi c^{-1} over C (counterclockwise)
    cplx residue_sum;    // psi_component
    double match = 0.0;  // |quadrature - (-1)^n residue_sum| / |residue_sum|
    double boundary = 0.0;  // |D_tau integral| / |C integral|
    double flip = 0.0;      // |C-bar + C| / |C|
};

namespace detail {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

inline cplx circle_integral(const std::function<cplx(cplx)>& g, cplx centre, double radius)
{
    auto integrand = [&](double t) {
        const cplx e = std::exp(I * t);
        return g(centre + radius * e) * (I * radius * e);
    };
    return GK::integrate(integrand, 0.0, 2.0 * pi, 12, 1e-13) / (2.0 * pi * I);
}

inline cplx segment_integral(const std::function<cplx(cplx)>& g, cplx from, cplx to)
{
    const cplx d = to - from;
    auto integrand = [&](double t) { return g(from + t * d) * d; };
    return GK::integrate(integrand, 0.0, 1.0, 12, 1e-13) / (2.0 * pi * I);
}

/// Distance from x to the nearest point of lattice + pole, measured in the
/// plane after reducing by pi and pi tau.
inline double lattice_distance(cplx x, cplx tau)
{
    const double im = x.imag() / (pi * tau.imag());
    double best = std::numeric_limits<double>::infinity();
    for (int r2 = static_cast<int>(std::floor(im)) - 1; r2 <= static_cast<int>(std::floor(im)) + 2; ++r2) {
        const cplx y = x - pi * tau * double(r2);
        const double k = std::round(y.real() / pi);
        for (int r1 = -1; r1 <= 1; ++r1) best = std::min(best, std::abs(y - pi * (k + r1)));
    }
    return best;
}

inline double segment_distance(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

}  // namespace detail

inline ContourReport contour_oracle_n1(const Model& m, int j, const Path& path, const Spectral& u, double radius = 0.05)
{
    if (path.length() != 2 || u.size() != 2) throw std::invalid_argument("contour oracle: L must be 2");
    if (m.kind() != KernelKind::elliptic) throw DomainError("contour oracle: elliptic kernel only");
    const cplx eta = m.eta(), zeta = m.zeta(), tau = m.tau();
    const int al = alpha_vectors(path).alpha.front();
    const int aL = path.anchor();
    auto U = [&](int k) { return u[static_cast<std::size_t>(k - 1)]; };

    std::function<cplx(cplx)> integrand = [&](cplx v) {
        cplx num = m.f(eta) * m.f(double(aL) * eta + zeta) *
                   m.fj(j, double(aL) * eta + zeta - eta + 2.0 * v - U(1) - U(2)) *
                   m.f(double(path.at(al)) * eta + zeta - v + U(al));
        cplx den{1.0, 0.0};
        for (int k = 1; k <= al; ++k) den *= m.f(U(k) - v);
        for (int k = al; k <= 2; ++k) den *= m.f(eta - v + U(k));
        return num / den;
    };

    std::vector<cplx> poles_c, poles_cbar;
    for (int k = 1; k <= al; ++k) poles_c.push_back(U(k));
    for (int k = al; k <= 2; ++k) poles_cbar.push_back(U(k) + eta);
    std::vector<cplx> all = poles_c;
    all.insert(all.end(), poles_cbar.begin(), poles_cbar.end());
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (detail::lattice_distance(all[a] - all[b], tau) < 2.0 * radius + 0.05) {
                throw PoleError("contour oracle: poles closer than the contour radius allows");
            }

    cplx c_int{}, cbar_int{};
    for (cplx p : poles_c) c_int += detail::circle_integral(integrand, p, radius);
    for (cplx p : poles_cbar) cbar_int += detail::circle_integral(integrand, p, radius);

    // parallelogram with vertices centre + (pi/2)(+-1 +- tau), shifted to keep poles off the boundary
    cplx best_centre{};
    double best_gap = -1.0;
    for (int sx = 0; sx < 8; ++sx) {
        for (int sy = 0; sy < 8; ++sy) {
            const cplx centre = pi * (sx / 8.0) + pi * tau * (sy / 8.0);
            const cplx v00 = centre + (pi / 2.0) * (-1.0 - tau), v10 = centre + (pi / 2.0) * (1.0 - tau);
            const cplx v11 = centre + (pi / 2.0) * (1.0 + tau), v01 = centre + (pi / 2.0) * (-1.0 + tau);
            double gap = std::numeric_limits<double>::infinity();
            for (cplx p : all) {
                for (int r1 = -2; r1 <= 2; ++r1) {
                    for (int r2 = -2; r2 <= 2; ++r2) {
                        const cplx q = p + pi * double(r1) + pi * tau * double(r2);
                        gap = std::min({gap, detail::segment_distance(q, v00, v10), detail::segment_distance(q, v10, v11),
                                        detail::segment_distance(q, v11, v01), detail::segment_distance(q, v01, v00)});
                    }
                }
            }
            if (gap > best_gap) {
                best_gap = gap;
                best_centre = centre;
            }
        }
    }
    const cplx c = best_centre;
    const cplx v00 = c + (pi / 2.0) * (-1.0 - tau), v10 = c + (pi / 2.0) * (1.0 - tau);
    const cplx v11 = c + (pi / 2.0) * (1.0 + tau), v01 = c + (pi / 2.0) * (-1.0 + tau);
    const cplx boundary = detail::segment_integral(integrand, v00, v10) + detail::segment_integral(integrand, v10, v11) +
                          detail::segment_integral(integrand, v11, v01) + detail::segment_integral(integrand, v01, v00);

    ContourReport r;
    const cplx phi = m.f(eta - U(1) + U(2));
    r.quadrature = phi * c_int / norm_const_c(tau);
    r.residue_sum = psi_component(m, j, path, u);
    // each residue of 1/f(u_m - v) is -c, so a counterclockwise C yields (-1)^n times the residue sum
    r.match = std::abs(r.quadrature + r.residue_sum) / std::abs(r.residue_sum);
    r.boundary = std::abs(boundary) / std::abs(c_int);
    r.flip = std::abs(cbar_int + c_int) / std::abs(c_int);
    return r;
}

// ---------------------------------------------------------------------------
// Degenerate kernels.

struct LaurentReport {
    int min_degree = 0;
    int max_degree = 0;
    double homogeneity = 0.0;  // |Psi(z lambda)/Psi(z) - 1| for lambda on the unit circle
};

/// Trigonometric kernel: Laurent support of a component in z_var = e^{i u_var}.
inline LaurentReport laurent_degree_check(const Model& m, int j, const Path& path, int var, const Spectral& u,
                                          int points = 0, double threshold = 1e-9)
{
    if (m.kind() != KernelKind::trigonometric) throw DomainError("laurent degree: trigonometric kernel only");
    const int n = path.half_length();
    const int count = points > 0 ? points : 8 * n + 1;
    std::vector<cplx> samples(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Spectral v = u;
        v[static_cast<std::size_t>(var - 1)] = 2.0 * pi * k / count;
        samples[static_cast<std::size_t>(k)] = psi_component_regular(m, j, path, v);
    }
    const int half = (count - 1) / 2;
    std::vector<double> mags;
    for (int d = -half; d <= half; ++d) {
        cplx c{};
        for (int k = 0; k < count; ++k) c += samples[static_cast<std::size_t>(k)] * std::exp(-I * (2.0 * pi * d * k / count));
        mags.push_back(std::abs(c) / count);
    }
    const double top = *std::max_element(mags.begin(), mags.end());
    if (top == 0.0) throw DomainError("laurent degree: component vanishes identically");
    LaurentReport r{half, -half, 0.0};
    for (int d = -half; d <= half; ++d) {
        if (mags[static_cast<std::size_t>(d + half)] > threshold * top) {
            r.min_degree = std::min(r.min_degree, d);
            r.max_degree = std::max(r.max_degree, d);
        }
    }
    const double theta_shift = 0.7317;
    Spectral rotated = u;
    for (cplx& x : rotated) x += theta_shift;
    const cplx base = psi_component(m, j, path, u);
    r.homogeneity = std::abs(psi_component(m, j, path, rotated) / base - 1.0);
    return r;
}

struct RationalDegree {
    double fitted = 0.0;
    int degree = 0;
    double phase = 0.0;  // |arg ratio|, zero for a real scale factor
};

/// Rational kernel: Psi(l eta, l zeta, l u) = l^d Psi(eta, zeta, u).
inline RationalDegree rational_degree_check(const Model& m, int j, const Path& path, const Spectral& u,
                                            double lambda = 1.37)
{
    if (m.kind() != KernelKind::rational) throw DomainError("rational degree: rational kernel only");
    ModelParams scaled = m.params();
    scaled.eta *= lambda;
    scaled.zeta *= lambda;
    Spectral su = u;
    for (cplx& x : su) x *= lambda;
    const cplx ratio = psi_component(Model(scaled), j, path, su) / psi_component(m, j, path, u);
    RationalDegree r;
    r.fitted = std::log(std::abs(ratio)) / std::log(lambda);
    r.degree = static_cast<int>(std::lround(r.fitted));
    r.phase = std::abs(std::arg(ratio));
    return r;
}

// ---------------------------------------------------------------------------
// Properties of the solution itself.

inline double psi_bar_residual(const Model& m, int j, const Spectral& u, int anchor = 0)
{
    std::vector<cplx> a, b;
    const SpectralTables t(m, u);
    for (const Path& p : enumerate_paths(static_cast<int>(u.size()), anchor)) {
        a.push_back(psi_component(t, j, p, IndexSetKind::S));
        b.push_back(psi_component(t, j, p, IndexSetKind::S_bar));
    }
    return detail::scaled_difference(a, b);
}

/// Closed product for the maximal path (a+1, .., a+n, .., a+1, a).
inline cplx trivial_component_product(const Model& m, int j, int a, const Spectral& u)
{
    const int len = static_cast<int>(u.size());
    const int n = len / 2;
    const cplx eta = m.eta(), zeta = m.zeta();
    cplx arg = double(a) * eta + zeta - double(n) * eta;
    for (int k = 0; k < n; ++k) arg += u[static_cast<std::size_t>(k)];
    for (int k = n; k < len; ++k) arg -= u[static_cast<std::size_t>(k)];
    cplx r = m.fj(j, arg);
    for (int l = 0; l <= n; ++l) r *= m.f(double(a + l) * eta + zeta);
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) r *= m.f(eta - u[static_cast<std::size_t>(p)] + u[static_cast<std::size_t>(q)]);
    for (int p = n; p < len; ++p)
        for (int q = p + 1; q < len; ++q) r *= m.f(eta - u[static_cast<std::size_t>(p)] + u[static_cast<std::size_t>(q)]);
    return r;
}

inline Path maximal_path(int length, int a)
{
    const int n = length / 2;
    Heights h;
    for (int k = 1; k <= n; ++k) h.push_back(a + k);
    for (int k = n - 1; k >= 0; --k) h.push_back(a + k);
    return Path(h);
}

}  // namespace sosq
