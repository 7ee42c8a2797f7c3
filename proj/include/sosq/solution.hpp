#pragma once

// The level-1 qKZB solutions Psi^(2), Psi^(3) as residue sums.
//
//   Psi_a(u) = f(eta)^n f(a_L eta + zeta) Phi(u) SUM_{i in S_alpha} psi_{a,i}(u)
//
// with Phi(u) = PROD_{i<j} f(eta - u_i + u_j) and
//
//   psi_{a,i} = f^(j)(a_L eta + zeta - n eta + 2 SUM_l u_{i_l} - SUM_m u_m)
//             PROD_{l<m} f(u_{i_l} - u_{i_m}) f(eta - u_{i_l} + u_{i_m})
//             PROD_l f(a_{alpha_l} eta + zeta - u_{i_l} + u_{alpha_l})
//                    / PROD_{m <= alpha_l, m != i_l} f(u_m - u_{i_l})
//                    / PROD_{alpha_l <= m <= L} f(eta - u_{i_l} + u_m)
//
// The barred form sums over S-bar instead and gives the same function.

#include <sosq/operators.hpp>
#include <sosq/paths.hpp>
#include <sosq/weights.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace sosq {

using Spectral = std::vector<cplx>;

struct AscentDescent {
    std::vector<int> alpha;      // ascent positions a_i - a_{i-1} = +1
    std::vector<int> alpha_bar;  // descent positions
};

inline AscentDescent alpha_vectors(const Path& path)
{
    AscentDescent ad;
    for (int i = 1; i <= path.length(); ++i) (path.step(i) > 0 ? ad.alpha : ad.alpha_bar).push_back(i);
    if (ad.alpha.size() != ad.alpha_bar.size()) {
        throw std::invalid_argument("alpha_vectors: path " + path.to_string() + " is not closed");
    }
    return ad;
}

enum class IndexSetKind { S, S_bar };

using IndexSet = std::vector<int>;

/// S_alpha = distinct tuples with 1 <= i_l <= alpha_l; S-bar = distinct tuples
/// with alpha-bar_l <= i_l <= L. Lexicographic order.
inline std::vector<IndexSet> admissible_index_sets(const AscentDescent& ad, int length, IndexSetKind kind)
{
    const std::vector<int>& bound = kind == IndexSetKind::S ? ad.alpha : ad.alpha_bar;
    const std::size_t n = bound.size();
    std::vector<IndexSet> out;
    IndexSet cur(n);
    std::vector<bool> used(static_cast<std::size_t>(length) + 1, false);
    std::function<void(std::size_t)> rec = [&](std::size_t l) {
        if (l == n) {
            out.push_back(cur);
            return;
        }
        const int lo = kind == IndexSetKind::S ? 1 : bound[l];
        const int hi = kind == IndexSetKind::S ? bound[l] : length;
        for (int i = lo; i <= hi; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            used[static_cast<std::size_t>(i)] = true;
            cur[l] = i;
            rec(l + 1);
            used[static_cast<std::size_t>(i)] = false;
        }
    };
    rec(0);
    return out;
}

/// Theta tables for one spectral point: D(m,k) = f(u_m - u_k), E(m,k) = f(eta - u_m + u_k).
/// Indices are 1-based site labels.
class SpectralTables {
public:
    SpectralTables(const Model& m, const Spectral& u) : model_(&m), u_(u), len_(static_cast<int>(u.size()))
    {
        d_.resize(static_cast<std::size_t>(len_ * len_));
        e_.resize(static_cast<std::size_t>(len_ * len_));
        for (int a = 1; a <= len_; ++a) {
            for (int b = 1; b <= len_; ++b) {
                d_[idx(a, b)] = a == b ? cplx{} : m.f(uu(a) - uu(b));
                e_[idx(a, b)] = m.f(m.eta() - uu(a) + uu(b));
            }
        }
        usum_ = {};
        for (cplx x : u_) usum_ += x;
        phi_ = {1.0, 0.0};
        for (int a = 1; a <= len_; ++a)
            for (int b = a + 1; b <= len_; ++b) phi_ *= e_[idx(a, b)];
    }

    const Model& model() const { return *model_; }
    int length() const { return len_; }
    cplx uu(int m) const { return u_[static_cast<std::size_t>(m - 1)]; }
    cplx usum() const { return usum_; }
    cplx phi() const { return phi_; }

    cplx D(int a, int b) const { return d_[idx(a, b)]; }
    cplx E(int a, int b) const { return e_[idx(a, b)]; }

    cplx D_den(int a, int b) const
    {
        return guard(D(a, b), [&] { return "f(u_" + std::to_string(a) + "-u_" + std::to_string(b) + ")"; });
    }
    cplx E_den(int a, int b) const
    {
        return guard(E(a, b), [&] { return "f(eta-u_" + std::to_string(a) + "+u_" + std::to_string(b) + ")"; });
    }

private:
    std::size_t idx(int a, int b) const { return static_cast<std::size_t>((a - 1) * len_ + (b - 1)); }

    template <class Name>
    cplx guard(cplx v, Name name) const
    {
        if (model_->vanishes(v)) throw PoleError("pole: " + name() + " vanishes");
        return v;
    }

    const Model* model_;
    Spectral u_;
    int len_;
    std::vector<cplx> d_, e_;
    cplx usum_, phi_;
};

namespace detail {

inline void require_solution_label(int j)
{
    if (j != 2 && j != 3) throw std::invalid_argument("solution label j must be 2 or 3");
}

inline void require_matching(const Path& path, const Spectral& u)
{
    if (static_cast<int>(u.size()) != path.length()) {
        throw std::invalid_argument("spectral parameter count does not match path length");
    }
    if (path.length() % 2 != 0) throw std::invalid_argument("solution components need even L");
}

}  // namespace detail

inline cplx psi_term(const SpectralTables& t, int j, const Path& path, const AscentDescent& ad, const IndexSet& iset)
{
    const Model& m = t.model();
    const cplx eta = m.eta(), zeta = m.zeta();
    const int len = t.length();
    const int n = len / 2;
    cplx isum{};
    for (int i : iset) isum += t.uu(i);
    cplx term = m.fj(j, double(path.anchor()) * eta + zeta - double(n) * eta + 2.0 * isum - t.usum());
    for (int l = 0; l < n; ++l) {
        const int il = iset[static_cast<std::size_t>(l)];
        const int al = ad.alpha[static_cast<std::size_t>(l)];
        for (int r = l + 1; r < n; ++r) {
            const int im = iset[static_cast<std::size_t>(r)];
            term *= t.D(il, im) * t.E(il, im);
        }
        term *= m.f(double(path.at(al)) * eta + zeta - t.uu(il) + t.uu(al));
        for (int k = 1; k <= al; ++k)
            if (k != il) term /= t.D_den(k, il);
        for (int k = al; k <= len; ++k) term /= t.E_den(il, k);
    }
    return term;
}

inline cplx psi_bar_term(const SpectralTables& t, int j, const Path& path, const AscentDescent& ad,
                         const IndexSet& iset)
{
    const Model& m = t.model();
    const cplx eta = m.eta(), zeta = m.zeta();
    const int len = t.length();
    const int n = len / 2;
    cplx isum{};
    for (int i : iset) isum += t.uu(i);
    cplx term = m.fj(j, double(path.anchor()) * eta + zeta - double(n) * eta - 2.0 * isum + t.usum());
    for (int l = 0; l < n; ++l) {
        const int il = iset[static_cast<std::size_t>(l)];
        const int bl = ad.alpha_bar[static_cast<std::size_t>(l)];
        for (int r = l + 1; r < n; ++r) {
            const int im = iset[static_cast<std::size_t>(r)];
            term *= t.D(il, im) * t.E(il, im);
        }
        term *= m.f(double(path.at(bl)) * eta + eta + zeta + t.uu(il) - t.uu(bl));
        for (int k = bl; k <= len; ++k)
            if (k != il) term /= t.D_den(il, k);
        for (int k = 1; k <= bl; ++k) term /= t.E_den(k, il);
    }
    return term;
}

inline cplx psi_term(const Model& m, int j, const Path& path, const IndexSet& iset, const Spectral& u)
{
    detail::require_solution_label(j);
    detail::require_matching(path, u);
    return psi_term(SpectralTables(m, u), j, path, alpha_vectors(path), iset);
}

inline cplx psi_bar_term(const Model& m, int j, const Path& path, const IndexSet& iset, const Spectral& u)
{
    detail::require_solution_label(j);
    detail::require_matching(path, u);
    return psi_bar_term(SpectralTables(m, u), j, path, alpha_vectors(path), iset);
}

inline cplx psi_component(const SpectralTables& t, int j, const Path& path, IndexSetKind kind = IndexSetKind::S)
{
    const Model& m = t.model();
    const AscentDescent ad = alpha_vectors(path);
    cplx sum{};
    for (const IndexSet& iset : admissible_index_sets(ad, path.length(), kind)) {
        sum += kind == IndexSetKind::S ? psi_term(t, j, path, ad, iset) : psi_bar_term(t, j, path, ad, iset);
    }
    const int n = path.half_length();
    return std::pow(m.f(m.eta()), n) * m.f(double(path.anchor()) * m.eta() + m.zeta()) * t.phi() * sum;
}

inline cplx psi_component(const Model& m, int j, const Path& path, const Spectral& u,
                          IndexSetKind kind = IndexSetKind::S)
{
    detail::require_solution_label(j);
    detail::require_matching(path, u);
    return psi_component(SpectralTables(m, u), j, path, kind);
}

inline cplx psi_bar_component(const Model& m, int j, const Path& path, const Spectral& u)
{
    return psi_component(m, j, path, u, IndexSetKind::S_bar);
}

/// Evaluation through removable singularities: Psi is entire in u, so its value
/// at u equals the mean over a small circle u + r e^{i phi} w, sampled at N
/// points offset by half a step. w is a fixed generic direction.
struct CircleMean {
    double radius = 0.05;
    int points = 24;
};

inline cplx circle_direction(int m) { return {std::cos(1.3 * m + 0.4), 0.7 * std::sin(2.1 * m + 0.2)}; }

inline std::vector<Spectral> circle_nodes(const Spectral& u, CircleMean cm)
{
    std::vector<Spectral> nodes;
    nodes.reserve(static_cast<std::size_t>(cm.points));
    for (int k = 0; k < cm.points; ++k) {
        const cplx t = cm.radius * std::exp(I * (2.0 * pi * (k + 0.5) / cm.points));
        Spectral v = u;
        for (std::size_t m = 0; m < v.size(); ++m) v[m] += t * circle_direction(static_cast<int>(m) + 1);
        nodes.push_back(std::move(v));
    }
    return nodes;
}

inline cplx psi_component_regular(const Model& m, int j, const Path& path, const Spectral& u, CircleMean cm = {})
{
    detail::require_solution_label(j);
    detail::require_matching(path, u);
    cplx sum{};
    for (const Spectral& v : circle_nodes(u, cm)) sum += psi_component(SpectralTables(m, v), j, path);
    return sum / double(cm.points);
}

enum class Evaluation { direct, regular };

/// Psi^(j) over a given basis. Direct evaluation shares the theta tables
/// across all components.
inline StateVector psi_vector(const Model& m, int j, const Spectral& u, std::shared_ptr<const PathBasis> basis,
                              Evaluation mode = Evaluation::direct, CircleMean cm = {})
{
    detail::require_solution_label(j);
    StateVector out(basis);
    if (mode == Evaluation::direct) {
        const SpectralTables t(m, u);
        for (std::size_t k = 0; k < basis->size(); ++k) {
            detail::require_matching((*basis)[k], u);
            out.amplitudes[static_cast<Eigen::Index>(k)] = psi_component(t, j, (*basis)[k]);
        }
        return out;
    }
    const std::vector<Spectral> nodes = circle_nodes(u, cm);
    for (const Spectral& v : nodes) {
        const SpectralTables t(m, v);
        for (std::size_t k = 0; k < basis->size(); ++k) {
            out.amplitudes[static_cast<Eigen::Index>(k)] += psi_component(t, j, (*basis)[k]);
        }
    }
    out.amplitudes /= double(cm.points);
    return out;
}

inline StateVector psi_vector(const Model& m, int j, const Spectral& u, int anchor,
                              Evaluation mode = Evaluation::direct, CircleMean cm = {})
{
    return psi_vector(m, j, u, share(enumerate_paths(static_cast<int>(u.size()), anchor)), mode, cm);
}

// ---------------------------------------------------------------------------
// L = 4 closed form of Psi^(3), elliptic kernel.
//
// Trivial component:
//   Psi_{a+1,a+2,a+1,a} = th1(a eta+zeta) th1((a+1)eta+zeta) th1((a+2)eta+zeta)
//                         th1(u2-u1+eta) th1(u4-u3+eta) th3((a-2)eta+zeta+u1+u2-u3-u4 | 2tau)
// Alternating component:
//   Psi_{a+1,a,a+1,a} = SUM_k alpha_k f_k,
//   f_k = th1(a eta+zeta) th1((a+1)eta+zeta) th_k((a+1/2)eta+zeta)
//         th_k(u4-u2+3eta/2) th_k(u3-u1+3eta/2) th_{4-ceil(k/2)}(u1+u3-u2-u4+(a-1)eta+zeta | 2tau)
//   alpha_k = sigma_k / th1'(0) PROD_{l != k} th_l(eta/2),  sigma = (-1, +1, -1, -1)
// The other four components follow from Psi_{rho P}(u) = -Psi_P(u2, u3, u4, u1 - 3 eta).

inline constexpr int kL4AlternatingSigns[4] = {-1, +1, -1, -1};

namespace detail {

inline cplx l4_trivial(const Model& m, int a, const Spectral& u)
{
    const cplx tau = m.tau(), eta = m.eta(), zeta = m.zeta();
    auto th = [&](int k, cplx x) { return theta(k, x, tau); };
    return th(1, double(a) * eta + zeta) * th(1, double(a + 1) * eta + zeta) * th(1, double(a + 2) * eta + zeta) *
           th(1, u[1] - u[0] + eta) * th(1, u[3] - u[2] + eta) *
           theta(3, double(a - 2) * eta + zeta + u[0] + u[1] - u[2] - u[3], 2.0 * tau);
}

inline cplx l4_alternating(const Model& m, int a, const Spectral& u)
{
    const cplx tau = m.tau(), eta = m.eta(), zeta = m.zeta();
    auto th = [&](int k, cplx x) { return theta(k, x, tau); };
    const cplx prefactor = th(1, double(a) * eta + zeta) * th(1, double(a + 1) * eta + zeta);
    const cplx d1 = theta1_prime0(tau);
    cplx sum{};
    for (int k = 1; k <= 4; ++k) {
        cplx alpha = double(kL4AlternatingSigns[k - 1]) / d1;
        for (int l = 1; l <= 4; ++l)
            if (l != k) alpha *= th(l, eta / 2.0);
        const int k2 = 4 - (k + 1) / 2;
        const cplx fk = prefactor * th(k, (a + 0.5) * eta + zeta) * th(k, u[3] - u[1] + 1.5 * eta) *
                        th(k, u[2] - u[0] + 1.5 * eta) *
                        theta(k2, u[0] + u[2] - u[1] - u[3] + double(a - 1) * eta + zeta, 2.0 * tau);
        sum += alpha * fk;
    }
    return sum;
}

}  // namespace detail

inline cplx l4_closed_form(const Model& m, const Path& component, const Spectral& u)
{
    if (m.kind() != KernelKind::elliptic) throw DomainError("l4_closed_form: elliptic kernel only");
    if (component.length() != 4 || u.size() != 4) throw std::invalid_argument("l4_closed_form: L must be 4");
    // walk back along rho until a trivial or alternating representative appears
    Path p = component;
    for (int k = 0; k < 4; ++k) {
        Spectral v = u;
        for (int r = 0; r < k; ++r) v = {v[1], v[2], v[3], v[0] - 3.0 * m.eta()};
        const double sign = (k % 2) ? -1.0 : 1.0;
        const int b = p.anchor();
        if (p.heights() == Heights{b + 1, b + 2, b + 1, b}) return sign * detail::l4_trivial(m, b, v);
        if (p.heights() == Heights{b + 1, b, b + 1, b}) return sign * detail::l4_alternating(m, b, v);
        p = Path(Heights{p.at(2), p.at(3), p.at(4), p.at(1)});  // rho^{-1}
    }
    throw std::logic_error("l4_closed_form: no representative for " + component.to_string());
}

}  // namespace sosq
