#pragma once

// The combinatorial line eta = 2 pi / 3: eigenvector property, T symmetry,
// the three-colour model, the 2-height RSOS reduction, Hamiltonian spectra
// and Temperley-Lieb relations.

#include <sosq/verify.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <optional>

namespace sosq {

/// True when eta sits on the combinatorial line to double precision.
inline bool on_combinatorial_line(const Model& m) { return std::abs(m.eta() - kCombinatorialEta) < 1e-14; }

inline Model combinatorial_model(KernelKind kind, cplx tau, cplx zeta)
{
    return Model(ModelParams{kind, tau, kCombinatorialEta, zeta});
}

// ---------------------------------------------------------------------------
// Eigenvector theorem and T symmetry

/// t(u) Psi + Psi on the anchor block, scaled by max |Psi|.
inline double eigenvector_residual(const Model& m, cplx u, const Spectral& inhom, int j, int anchor = 0)
{
    const TransferBlock t = transfer_block(m, u, inhom, anchor);
    const StateVector src = psi_vector(m, j, inhom, t.source);
    const StateVector dst = psi_vector(m, j, inhom, t.target);
    const Vector lhs = t.matrix * src.amplitudes;
    const double scale = std::max({lhs.cwiseAbs().maxCoeff(), dst.max_abs(), src.max_abs()});
    return (lhs + dst.amplitudes).cwiseAbs().maxCoeff() / scale;
}

inline VerificationReport check_eigenvector(const Model& m, cplx u, const Spectral& inhom, int j, int anchor = 0,
                                            double tol = 1e-8)
{
    return VerificationReport::make("eigenvector", eigenvector_residual(m, u, inhom, j, anchor), tol,
                                    "t(u) Psi = -Psi");
}

/// Psi at anchor a vs anchor a+3, identified path-wise.
inline double t_invariance_residual(const Model& m, int j, const Spectral& u, int anchor = 0)
{
    const int len = static_cast<int>(u.size());
    const StateVector lo = psi_vector(m, j, u, share(enumerate_paths(len, anchor)));
    const StateVector hi = psi_vector(m, j, u, share(enumerate_paths(len, anchor + 3)));
    return relative_residual(lo.amplitudes, hi.amplitudes);
}

inline VerificationReport check_T_invariance(const Model& m, int j, const Spectral& u, int anchor = 0,
                                             double tol = 1e-10)
{
    return VerificationReport::make("t-invariance", t_invariance_residual(m, j, u, anchor), tol, "T Psi = Psi");
}

/// T t(u) = t(u) T: the transfer blocks into anchors a and a+3 coincide.
inline double transfer_T_commutator_residual(const Model& m, cplx u, const Spectral& inhom, int anchor = 0)
{
    return relative_residual(transfer_block(m, u, inhom, anchor).matrix,
                             transfer_block(m, u, inhom, anchor + 3).matrix);
}

/// R_i(u + 3 eta) against R_i(u); on the line 3 eta = 2 pi.
inline double r_periodicity_residual(const Model& m, int i, cplx u, int length, int anchor = 0)
{
    const PathBasis b = enumerate_paths(length, anchor);
    return relative_residual(r_matrix(m, i, u + 3.0 * m.eta(), b), r_matrix(m, i, u, b));
}

// ---------------------------------------------------------------------------
// Three-colour model

/// +1 when `to` = `from` + 1 mod 3, -1 when `to` = `from` - 1 mod 3.
inline int colour_step(int from, int to)
{
    const int d = ((to - from) % 3 + 3) % 3;
    if (d == 0) throw std::invalid_argument("colour_step: adjacent colours coincide");
    return d == 1 ? +1 : -1;
}

inline int mod3(int a) { return ((a % 3) + 3) % 3; }

class ThreeColourPath {
public:
    ThreeColourPath() = default;

    explicit ThreeColourPath(std::vector<int> colours) : colours_(std::move(colours))
    {
        if (colours_.size() < 2) throw std::invalid_argument("ThreeColourPath: need L >= 2");
        for (int c : colours_)
            if (c < 0 || c > 2) throw std::invalid_argument("ThreeColourPath: colours lie in {0,1,2}");
        for (int i = 1; i <= length(); ++i)
            if (at(i) == at(i - 1)) throw std::invalid_argument("ThreeColourPath: adjacent colours coincide");
    }

    int length() const { return static_cast<int>(colours_.size()); }
    int at(int i) const
    {
        const int len = length();
        return colours_[static_cast<std::size_t>(((i - 1) % len + len) % len)];
    }
    int step(int i) const { return colour_step(at(i - 1), at(i)); }
    const std::vector<int>& colours() const { return colours_; }

    ThreeColourPath rotated() const
    {
        std::vector<int> c(colours_.size());
        c[0] = colours_.back();
        std::copy(colours_.begin(), colours_.end() - 1, c.begin() + 1);
        return ThreeColourPath(std::move(c));
    }

    friend bool operator==(const ThreeColourPath&, const ThreeColourPath&) = default;
    friend auto operator<=>(const ThreeColourPath& a, const ThreeColourPath& b) { return a.colours_ <=> b.colours_; }

private:
    std::vector<int> colours_;
};

/// Winding k of the lift: a_{i+L} = a_i + k.
inline int sector_decompose(const ThreeColourPath& p)
{
    int k = 0;
    for (int i = 1; i <= p.length(); ++i) k += p.step(i);
    return k;
}

inline ThreeColourPath colouring_of(const Path& p)
{
    std::vector<int> c;
    for (int h : p.heights()) c.push_back(mod3(h));
    return ThreeColourPath(std::move(c));
}

/// The lift with a_L in {0,1,2}; sector 0 only.
inline Path canonical_lift(const ThreeColourPath& c)
{
    if (sector_decompose(c) != 0) throw std::invalid_argument("canonical_lift: colouring is not in sector 0");
    Heights h(static_cast<std::size_t>(c.length()));
    int a = c.at(c.length());
    for (int i = 1; i <= c.length(); ++i) {
        a += c.step(i);
        h[static_cast<std::size_t>(i - 1)] = a;
    }
    return Path(std::move(h));
}

/// Heights shifted by a multiple of 3 so that a_L lies in {0,1,2}.
inline Path canonical_representative(const Path& p)
{
    const int shift = p.anchor() - mod3(p.anchor());
    return p.shifted(-shift);
}

class ThreeColourBasis {
public:
    ThreeColourBasis() = default;
    explicit ThreeColourBasis(std::vector<ThreeColourPath> paths) : paths_(std::move(paths))
    {
        for (std::size_t k = 0; k < paths_.size(); ++k) index_.emplace(paths_[k].colours(), k);
    }

    std::size_t size() const { return paths_.size(); }
    const ThreeColourPath& operator[](std::size_t k) const { return paths_[k]; }
    auto begin() const { return paths_.begin(); }
    auto end() const { return paths_.end(); }
    int length() const { return paths_.empty() ? 0 : paths_.front().length(); }

    std::optional<std::size_t> find(const ThreeColourPath& p) const
    {
        auto it = index_.find(p.colours());
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<ThreeColourPath> paths_;
    std::map<std::vector<int>, std::size_t> index_;
};

inline long long three_colour_dimension(int length) { return (1LL << length) + 2 * (length % 2 ? -1 : 1); }

/// All proper colourings of the L-cycle, ordered by the last colour and then
/// by the step sequence with +1 before -1. An optional sector filter keeps a
/// single winding.
inline ThreeColourBasis three_colour_basis(int length, std::optional<int> sector = std::nullopt)
{
    if (length < 2 || length > kMaxChainLength) {
        throw std::invalid_argument("three_colour_basis: need 2 <= L <= 12, got " + std::to_string(length));
    }
    std::vector<ThreeColourPath> out;
    std::vector<int> c(static_cast<std::size_t>(length));
    for (int last = 0; last < 3; ++last) {
        for (unsigned code = 0; code < (1u << length); ++code) {
            int k = 0;
            for (int i = 0; i < length; ++i) {
                k += ((code >> (length - 1 - i)) & 1u) ? -1 : +1;
                c[static_cast<std::size_t>(i)] = mod3(last + k);
            }
            if (mod3(k) != 0 || (sector && k != *sector)) continue;
            out.emplace_back(c);
        }
    }
    return ThreeColourBasis(std::move(out));
}

/// SOS paths modulo T: anchors 0, 1, 2. Isomorphic to the sector-0 colourings.
inline PathBasis sos_quotient_basis(int length) { return enumerate_paths(length, {0, 1, 2}); }

/// <phi(c)|Phi|c> = 1 for the canonical lift phi.
inline Matrix phi_matrix(const PathBasis& sos, const ThreeColourBasis& tc)
{
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(sos.size()), static_cast<Eigen::Index>(tc.size()));
    for (std::size_t col = 0; col < tc.size(); ++col) {
        auto row = sos.find(canonical_lift(tc[col]));
        if (!row) throw std::invalid_argument("phi_matrix: lift outside the SOS basis");
        p(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) = 1.0;
    }
    return p;
}

/// W^3C from a local lift: a is taken in {0,1,2}, the other corners follow by
/// unit steps. Well defined on the combinatorial line, where W is 3-periodic in heights.
inline cplx three_colour_weight(const Model& m, int a, int b, int c, int d, cplx u)
{
    if (a == b || a == c || b == d || c == d) return {0.0, 0.0};
    const int la = mod3(a);
    const int lb = la + colour_step(a, b);
    const int lc = la + colour_step(a, c);
    const int ld = lb + colour_step(b, d);
    return sos_weight(m, la, lb, lc, ld, u);
}

/// <a'|t3C(u)|a> = PROD_i W3C(a'_{i-1}, a'_i, a_{i-1}, a_i | u - u_i)
inline Matrix three_colour_transfer(const Model& m, cplx u, const Spectral& inhom, const ThreeColourBasis& basis)
{
    const int len = basis.length();
    if (static_cast<int>(inhom.size()) != len) throw std::invalid_argument("three_colour_transfer: size mismatch");
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Matrix t = Matrix::Zero(dim, dim);
    for (std::size_t row = 0; row < basis.size(); ++row) {
        const ThreeColourPath& ap = basis[row];
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const ThreeColourPath& a = basis[col];
            cplx w{1.0, 0.0};
            for (int i = 1; i <= len && w != cplx{}; ++i) {
                w *= three_colour_weight(m, ap.at(i - 1), ap.at(i), a.at(i - 1), a.at(i),
                                         u - inhom[static_cast<std::size_t>(i - 1)]);
            }
            t(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = w;
        }
    }
    return t;
}

/// R3C_k(u), k = 1..L cyclic: changes colour k only.
inline Matrix three_colour_r_matrix(const Model& m, int k, cplx u, const ThreeColourBasis& basis)
{
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Matrix r = Matrix::Zero(dim, dim);
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const ThreeColourPath& a = basis[col];
        for (int c = 0; c < 3; ++c) {
            if (c == a.at(k - 1) || c == a.at(k + 1)) continue;
            std::vector<int> cs = a.colours();
            cs[static_cast<std::size_t>(k - 1)] = c;
            auto row = basis.find(ThreeColourPath(cs));
            if (!row) continue;
            r(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) +=
                three_colour_weight(m, a.at(k - 1), c, a.at(k), a.at(k + 1), u);
        }
    }
    return r;
}

/// t(u) on SOS paths modulo T, built from global SOS heights and reduced to
/// the canonical representative afterwards.
inline Matrix sos_quotient_transfer(const Model& m, cplx u, const Spectral& inhom, const PathBasis& quotient)
{
    const int len = quotient.length();
    const auto dim = static_cast<Eigen::Index>(quotient.size());
    Matrix t = Matrix::Zero(dim, dim);
    for (std::size_t col = 0; col < quotient.size(); ++col) {
        const Path& a = quotient[col];
        for (int target : {a.anchor() - 1, a.anchor() + 1}) {
            for (const Path& ap : enumerate_paths(len, target)) {
                cplx w{1.0, 0.0};
                for (int i = 1; i <= len && w != cplx{}; ++i) {
                    w *= sos_weight(m, ap.at(i - 1), ap.at(i), a.at(i - 1), a.at(i),
                                    u - inhom[static_cast<std::size_t>(i - 1)]);
                }
                if (w == cplx{}) continue;
                auto row = quotient.find(canonical_representative(ap));
                if (!row) throw std::logic_error("sos_quotient_transfer: representative outside the basis");
                t(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += w;
            }
        }
    }
    return t;
}

/// phi t3C(u) = t(u) phi
inline double transfer_intertwining_residual(const Model& m, cplx u, const Spectral& inhom)
{
    const int len = static_cast<int>(inhom.size());
    const ThreeColourBasis tc = three_colour_basis(len, 0);
    const PathBasis sos = sos_quotient_basis(len);
    const Matrix phi = phi_matrix(sos, tc);
    return relative_residual(Matrix(phi * three_colour_transfer(m, u, inhom, tc)),
                             Matrix(sos_quotient_transfer(m, u, inhom, sos) * phi));
}

/// phi R3C_i(u) = R_i(u) phi, worst over i = 1..L-1.
inline double r_intertwining_residual(const Model& m, cplx u, int length)
{
    const ThreeColourBasis tc = three_colour_basis(length, 0);
    const PathBasis sos = sos_quotient_basis(length);
    const Matrix phi = phi_matrix(sos, tc);
    double worst = 0.0;
    for (int i = 1; i <= length - 1; ++i) {
        worst = std::max(worst, relative_residual(Matrix(phi * three_colour_r_matrix(m, i, u, tc)),
                                                  Matrix(r_matrix(m, i, u, sos) * phi)));
    }
    return worst;
}

/// phi^{-1} Psi on the sector-0 colourings. With a residue, only colourings
/// whose last colour equals it are filled. Throws when T Psi = Psi fails.
inline Vector project_psi_three_colour(const Model& m, int j, const Spectral& u, const ThreeColourBasis& tc,
                                       std::optional<int> residue = std::nullopt,
                                       Evaluation mode = Evaluation::direct, CircleMean cm = {},
                                       double t_tol = 1e-8)
{
    const int len = static_cast<int>(u.size());
    Vector out = Vector::Zero(static_cast<Eigen::Index>(tc.size()));
    for (int r = 0; r < 3; ++r) {
        if (residue && *residue != r) continue;
        auto lo = share(enumerate_paths(len, r));
        auto hi = share(enumerate_paths(len, r + 3));
        const StateVector v = psi_vector(m, j, u, lo, mode, cm);
        const StateVector w = psi_vector(m, j, u, hi, mode, cm);
        const double tr = relative_residual(v.amplitudes, w.amplitudes);
        if (!(tr <= t_tol)) {
            throw std::runtime_error("project_psi_three_colour: T invariance fails, residual " + std::to_string(tr));
        }
        for (std::size_t k = 0; k < lo->size(); ++k) {
            auto idx = tc.find(colouring_of((*lo)[k]));
            if (!idx) throw std::logic_error("project_psi_three_colour: colouring outside the sector");
            out[static_cast<Eigen::Index>(*idx)] = v[k];
        }
    }
    return out;
}

/// t3C(u) phi^{-1} Psi + phi^{-1} Psi
inline double three_colour_eigenvector_residual(const Model& m, cplx u, const Spectral& inhom, int j)
{
    const ThreeColourBasis tc = three_colour_basis(static_cast<int>(inhom.size()), 0);
    const Vector v = project_psi_three_colour(m, j, inhom, tc);
    const Vector tv = three_colour_transfer(m, u, inhom, tc) * v;
    const double scale = std::max(tv.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff());
    return (tv + v).cwiseAbs().maxCoeff() / scale;
}

// ---------------------------------------------------------------------------
// 2-height RSOS reduction at zeta = k pi / 3

struct RsosReport {
    int zeta_class = 0;            // k with zeta = k pi / 3
    int vanishing_class = 0;       // heights = this mod 3 carry zero amplitude
    std::array<Path, 2> states;    // the two alternating paths
    Eigen::Vector2cd psi;          // Psi^(j) on the two states
    double vanishing = 0.0;        // max |Psi| on paths meeting the class, over max |Psi|
    Eigen::Matrix2cd restricted;   // t(u) between the two states
    double flip = 0.0;             // max |restricted - [[0,1],[1,0]]|
    double psi_ratio_spread = 0.0; // Psi^(2) / Psi^(3) across the two states
    cplx psi_ratio{};
};

/// Reduction for the model's zeta, which must be a multiple of pi/3 on the
/// combinatorial line. Psi has no poles in zeta, so it is evaluated directly.
inline RsosReport rsos_reduce(const Model& m, int j, cplx u, const Spectral& inhom)
{
    const int len = static_cast<int>(inhom.size());
    const double kf = m.zeta().real() / (pi / 3.0);
    const int k = static_cast<int>(std::lround(kf));
    if (std::abs(m.zeta() - cplx(k * pi / 3.0, 0.0)) > 1e-12) {
        throw std::invalid_argument("rsos_reduce: zeta must be a multiple of pi/3");
    }
    RsosReport r;
    r.zeta_class = k;
    r.vanishing_class = mod3(k);
    const int h1 = r.vanishing_class + 1, h2 = r.vanishing_class + 2;
    Heights up, down;
    for (int i = 0; i < len; ++i) {
        up.push_back(i % 2 ? h2 : h1);
        down.push_back(i % 2 ? h1 : h2);
    }
    r.states = {Path(down), Path(up)};  // anchors h1, h2

    const PathBasis all = sos_quotient_basis(len);
    const SpectralTables tables(m, inhom);
    double top = 0.0, bad = 0.0;
    for (const Path& p : all) {
        const double mag = std::abs(psi_component(tables, j, p));
        top = std::max(top, mag);
        const bool meets = std::any_of(p.heights().begin(), p.heights().end(),
                                       [&](int h) { return mod3(h) == r.vanishing_class; });
        if (meets) bad = std::max(bad, mag);
    }
    r.vanishing = bad / top;

    for (int s = 0; s < 2; ++s) r.psi[s] = psi_component(tables, j, r.states[static_cast<std::size_t>(s)]);
    std::array<cplx, 2> ratio;
    for (int s = 0; s < 2; ++s) {
        ratio[static_cast<std::size_t>(s)] = psi_component(tables, 2, r.states[static_cast<std::size_t>(s)]) /
                                             psi_component(tables, 3, r.states[static_cast<std::size_t>(s)]);
    }
    r.psi_ratio = ratio[0];
    r.psi_ratio_spread = std::abs(ratio[1] - ratio[0]) / std::abs(ratio[0]);

    for (int row = 0; row < 2; ++row) {
        for (int col = 0; col < 2; ++col) {
            const Path& ap = r.states[static_cast<std::size_t>(row)];
            const Path& a = r.states[static_cast<std::size_t>(col)];
            cplx w{1.0, 0.0};
            for (int i = 1; i <= len && w != cplx{}; ++i) {
                w *= sos_weight(m, ap.at(i - 1), ap.at(i), a.at(i - 1), a.at(i),
                                u - inhom[static_cast<std::size_t>(i - 1)]);
            }
            r.restricted(row, col) = w;
        }
    }
    Eigen::Matrix2cd flip;
    flip << 0.0, 1.0, 1.0, 0.0;
    r.flip = (r.restricted - flip).cwiseAbs().maxCoeff();
    return r;
}

// ---------------------------------------------------------------------------
// Hamiltonian at the homogeneous point

enum class Derivative { cauchy, central4 };

/// d/du F(u) at u = 0. cauchy: mean over a circle of radius `step`, 32 nodes;
/// central4: fourth-order central difference with step `step`.
template <class F>
Matrix derivative_at_zero(F&& fn, Derivative scheme, double step)
{
    if (scheme == Derivative::central4) {
        return (-fn(cplx{2.0 * step}) + 8.0 * fn(cplx{step}) - 8.0 * fn(cplx{-step}) + fn(cplx{-2.0 * step})) /
               (12.0 * step);
    }
    constexpr int nodes = 32;
    Matrix acc;
    for (int k = 0; k < nodes; ++k) {
        const cplx e = std::exp(I * (2.0 * pi * k / nodes));
        Matrix term = fn(step * e) / (step * e);
        if (k == 0) acc = term;
        else acc += term;
    }
    return acc / double(nodes);
}

inline constexpr double kCauchyRadius = 1e-3;
inline constexpr double kFiniteStep = 1e-5;

inline double default_step(Derivative scheme) { return scheme == Derivative::cauchy ? kCauchyRadius : kFiniteStep; }

enum class HamiltonianBasis { three_colour, sos_quotient };

/// H = -t'(0) t(0)^{-1} on sector 0, homogeneous chain. With this sign the
/// three-colour chain has one negative level and Psi at energy zero.
inline Matrix hamiltonian(const Model& m, int length, HamiltonianBasis basis = HamiltonianBasis::three_colour,
                          Derivative scheme = Derivative::cauchy)
{
    const Spectral zero(static_cast<std::size_t>(length), cplx{});
    std::function<Matrix(cplx)> t;
    if (basis == HamiltonianBasis::three_colour) {
        auto tc = std::make_shared<ThreeColourBasis>(three_colour_basis(length, 0));
        t = [&m, zero, tc](cplx u) { return three_colour_transfer(m, u, zero, *tc); };
    } else {
        auto q = std::make_shared<PathBasis>(sos_quotient_basis(length));
        t = [&m, zero, q](cplx u) { return sos_quotient_transfer(m, u, zero, *q); };
    }
    const Matrix t0 = t(0.0);
    Eigen::PartialPivLU<Matrix> lu(t0);
    if (!(std::abs(lu.determinant()) > 1e-12 * std::pow(t0.cwiseAbs().maxCoeff(), double(t0.rows())))) {
        throw std::runtime_error("hamiltonian: t(0) is singular");
    }
    const Matrix dt = derivative_at_zero(t, scheme, default_step(scheme));
    return -dt * lu.inverse();
}

/// Cyclic rotation on the sector-0 colourings: |c> -> |rho c>.
inline Matrix three_colour_rho(const ThreeColourBasis& tc)
{
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(tc.size()), static_cast<Eigen::Index>(tc.size()));
    for (std::size_t col = 0; col < tc.size(); ++col) {
        p(static_cast<Eigen::Index>(*tc.find(tc[col].rotated())), static_cast<Eigen::Index>(col)) = 1.0;
    }
    return p;
}

struct SpectrumReport {
    int length = 0;
    KernelKind kind = KernelKind::trigonometric;
    int j = 3;
    std::vector<cplx> energies;     // sorted by real part
    std::vector<double> levels;     // distinct real levels, ascending
    double max_imag = 0.0;          // largest |Im E|
    double psi_energy = 0.0;        // Rayleigh quotient of phi^{-1} Psi
    double psi_eigen_residual = 0.0;  // |H v - E v| / |v|
    double overlap = 0.0;           // weight of v inside its level's eigenspace
    int level_rank = -1;            // 0 = ground
    bool first_excited = false;
    bool ground = false;
    double rho_residual = 0.0;      // |rho v + v| / |v|
    cplx rho_eigenvalue{};
    double momentum = 0.0;          // arg of the rho eigenvalue
    double rotation_commutator = 0.0;
    double derivative_agreement = 0.0;  // cauchy vs central4 Hamiltonians
};

inline constexpr int kMaxSpectrumLength = 6;
inline constexpr double kLevelTolerance = 1e-5;

/// Homogeneous point Psi(0, .., 0) sits on removable singularities; it is
/// evaluated by the circle mean.
inline SpectrumReport spectrum_report(const Model& m, int length, int j, CircleMean cm = {0.3, 48})
{
    if (length < 2 || length > kMaxSpectrumLength || length % 2) {
        throw std::invalid_argument("spectrum_report: L must be 2, 4 or 6, got " + std::to_string(length));
    }
    SpectrumReport r;
    r.length = length;
    r.kind = m.kind();
    r.j = j;
    const ThreeColourBasis tc = three_colour_basis(length, 0);
    const Matrix h = hamiltonian(m, length, HamiltonianBasis::three_colour, Derivative::cauchy);
    const Matrix h4 = hamiltonian(m, length, HamiltonianBasis::three_colour, Derivative::central4);
    r.derivative_agreement = relative_residual(h, h4);
    const Matrix rho = three_colour_rho(tc);
    r.rotation_commutator = relative_residual(Matrix(h * rho), Matrix(rho * h));

    Eigen::ComplexEigenSolver<Matrix> es(h);
    const Vector ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ev.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ev[a].real() < ev[b].real(); });
    for (auto k : order) {
        r.energies.push_back(ev[k]);
        r.max_imag = std::max(r.max_imag, std::abs(ev[k].imag()));
        if (r.levels.empty() || ev[k].real() - r.levels.back() > kLevelTolerance) r.levels.push_back(ev[k].real());
    }

    const Spectral zero(static_cast<std::size_t>(length), cplx{});
    const Vector v = project_psi_three_colour(m, j, zero, tc, std::nullopt, Evaluation::regular, cm, 1e-6);
    const Vector hv = h * v;
    const cplx e = v.dot(hv) / v.dot(v);
    r.psi_energy = e.real();
    r.psi_eigen_residual = (hv - e * v).norm() / v.norm();

    // locate v inside the eigenspace of its level
    auto level_of = [&](double x) {
        for (std::size_t l = 0; l < r.levels.size(); ++l)
            if (std::abs(x - r.levels[l]) <= kLevelTolerance) return static_cast<int>(l);
        return -1;
    };
    r.level_rank = level_of(r.psi_energy);
    if (r.level_rank >= 0) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index k = 0; k < ev.size(); ++k)
            if (std::abs(ev[k].real() - r.levels[static_cast<std::size_t>(r.level_rank)]) <= kLevelTolerance) cols.push_back(k);
        Matrix space(h.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) space.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[c]);
        Eigen::HouseholderQR<Matrix> qr(space);
        const Matrix q = qr.householderQ() * Matrix::Identity(space.rows(), space.cols());
        r.overlap = (q.adjoint() * v).norm() / v.norm();
    }
    r.ground = r.level_rank == 0;
    r.first_excited = r.level_rank == 1;

    const Vector rv = rho * v;
    r.rho_eigenvalue = v.dot(rv) / v.dot(v);
    r.rho_residual = (rv + v).norm() / v.norm();
    r.momentum = std::arg(r.rho_eigenvalue);
    return r;
}

// ---------------------------------------------------------------------------
// Temperley-Lieb generators, trigonometric kernel

/// U_k = -(sqrt3/2) d/du ln R3C_k(u)|_0 - Id, k = 1..L cyclic. R(0) = Id.
inline Matrix tl_generator(const Model& m, int k, const ThreeColourBasis& tc, Derivative scheme = Derivative::cauchy)
{
    const Matrix dr = derivative_at_zero([&](cplx u) { return three_colour_r_matrix(m, k, u, tc); }, scheme,
                                         default_step(scheme));
    return -(std::sqrt(3.0) / 2.0) * dr - Matrix::Identity(dr.rows(), dr.cols());
}

struct TemperleyLiebReport {
    double braid = 0.0;        // U_k U_{k+-1} U_k = U_k
    double quadratic = 0.0;    // U_k U_k = 2 Delta U_k, 2 Delta = -1
    double hamiltonian = 0.0;  // H = (2/sqrt3) SUM (U_k + Id)
    double r_identity = 0.0;   // R3C_k(0) = Id
};

inline TemperleyLiebReport temperley_lieb_check(const Model& m, int length)
{
    if (m.kind() != KernelKind::trigonometric) throw DomainError("temperley_lieb_check: trigonometric kernel only");
    const ThreeColourBasis tc = three_colour_basis(length, 0);
    std::vector<Matrix> u;
    TemperleyLiebReport r;
    const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(tc.size()), static_cast<Eigen::Index>(tc.size()));
    for (int k = 1; k <= length; ++k) {
        u.push_back(tl_generator(m, k, tc));
        r.r_identity = std::max(r.r_identity, relative_residual(three_colour_r_matrix(m, k, 0.0, tc), id));
    }
    const double delta2 = 2.0 * std::cos(m.eta().real());
    Matrix sum = Matrix::Zero(id.rows(), id.cols());
    for (int k = 0; k < length; ++k) {
        const Matrix& a = u[static_cast<std::size_t>(k)];
        const Matrix& next = u[static_cast<std::size_t>((k + 1) % length)];
        const Matrix& prev = u[static_cast<std::size_t>((k + length - 1) % length)];
        r.quadratic = std::max(r.quadratic, relative_residual(Matrix(a * a), Matrix(delta2 * a)));
        r.braid = std::max({r.braid, relative_residual(Matrix(a * next * a), a), relative_residual(Matrix(a * prev * a), a)});
        sum += a + id;
    }
    const Matrix h = hamiltonian(m, length, HamiltonianBasis::three_colour);
    r.hamiltonian = relative_residual(h, Matrix((2.0 / std::sqrt(3.0)) * sum));
    return r;
}

}  // namespace sosq
