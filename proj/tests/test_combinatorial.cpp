#include <sosq/combinatorial.hpp>
#include <sosq/sampling.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace sosq;

namespace {

Draw line_draw(Sampler& s, KernelKind kind, int length, int index, int extra = 1)
{
    return draw_generic(s, {kind, length, -1, true, extra}, index);
}

// proper 3-colourings of the L-cycle counted by brute force
long long count_colourings(int len)
{
    long long count = 0;
    std::vector<int> c(static_cast<std::size_t>(len));
    long long total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    for (long long code = 0; code < total; ++code) {
        long long x = code;
        for (int i = 0; i < len; ++i, x /= 3) c[static_cast<std::size_t>(i)] = int(x % 3);
        bool ok = true;
        for (int i = 0; i < len && ok; ++i) ok = c[static_cast<std::size_t>(i)] != c[static_cast<std::size_t>((i + 1) % len)];
        count += ok;
    }
    return count;
}

}  // namespace

TEST(Line, EtaIsExact)
{
    const Model m = combinatorial_model(KernelKind::elliptic, {0.0, 0.8}, 0.3);
    EXPECT_TRUE(on_combinatorial_line(m));
    EXPECT_FALSE(on_combinatorial_line(m.with_eta(m.eta() + 1e-10)));
    EXPECT_NEAR(std::abs(m.f(3.0 * m.eta())), 0.0, 1e-14);
}

TEST(Line, EigenvectorAtL2L4)
{
    Sampler s(201);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric}) {
        for (int len : {2, 4}) {
            for (int d = 0; d < 10; ++d) {
                const Draw dr = line_draw(s, kind, len, d, 3);
                const Model m(dr.params);
                const Spectral inhom(dr.u.begin(), dr.u.begin() + len);
                for (int k = 0; k < 3; ++k) {
                    for (int j : {2, 3}) {
                        EXPECT_LT(eigenvector_residual(m, dr.u[static_cast<std::size_t>(len + k)], inhom, j), 1e-8)
                            << dr.digest();
                    }
                }
            }
        }
    }
}

TEST(Line, EigenvectorAtL6)
{
    Sampler s(202);
    const Draw dr = line_draw(s, KernelKind::elliptic, 6, 0);
    const Model m(dr.params);
    const Spectral inhom(dr.u.begin(), dr.u.begin() + 6);
    for (int j : {2, 3}) EXPECT_LT(eigenvector_residual(m, dr.u.back(), inhom, j), 1e-7);
}

TEST(Line, EigenvectorFailsOffLine)
{
    Sampler s(203);
    const Draw dr = line_draw(s, KernelKind::elliptic, 4, 0);
    const Model m = Model(dr.params).with_eta(kCombinatorialEta + 0.01);
    const Spectral inhom(dr.u.begin(), dr.u.begin() + 4);
    EXPECT_GT(eigenvector_residual(m, dr.u.back(), inhom, 3), 1e-3);
}

TEST(Line, ShiftSymmetry)
{
    Sampler s(204);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric}) {
        const Draw dr = line_draw(s, kind, 4, 0);
        const Model m(dr.params);
        const Spectral inhom(dr.u.begin(), dr.u.begin() + 4);
        for (int j : {2, 3}) EXPECT_LT(t_invariance_residual(m, j, inhom, 1), 1e-10);
        EXPECT_LT(transfer_T_commutator_residual(m, dr.u.back(), inhom), 1e-11);
        for (int i = 1; i <= 3; ++i) EXPECT_LT(r_periodicity_residual(m, i, dr.u.back(), 4), 1e-12);
    }
}

TEST(ThreeColour, DimensionsMatchBruteForce)
{
    for (int len = 2; len <= 8; ++len) {
        const ThreeColourBasis b = three_colour_basis(len);
        EXPECT_EQ(static_cast<long long>(b.size()), three_colour_dimension(len)) << len;
        EXPECT_EQ(static_cast<long long>(b.size()), count_colourings(len)) << len;
    }
    EXPECT_EQ(three_colour_basis(4).size(), 18u);
    EXPECT_EQ(three_colour_basis(6).size(), 66u);
}

TEST(ThreeColour, SectorsPartitionTheBasis)
{
    for (int len = 2; len <= 8; ++len) {
        std::size_t total = 0;
        for (int k = -len; k <= len; ++k) {
            const ThreeColourBasis b = three_colour_basis(len, k);
            for (const auto& p : b) EXPECT_EQ(sector_decompose(p), k);
            total += b.size();
        }
        EXPECT_EQ(total, three_colour_basis(len).size()) << len;
    }
    // sector 0 is isomorphic to SOS paths with anchors 0, 1, 2
    for (int len : {2, 4, 6, 8})
        EXPECT_EQ(three_colour_basis(len, 0).size(), sos_quotient_basis(len).size());
}

TEST(ThreeColour, LiftRoundTrip)
{
    for (const auto& c : three_colour_basis(6, 0)) {
        const Path p = canonical_lift(c);
        EXPECT_EQ(colouring_of(p), c);
        EXPECT_GE(p.anchor(), 0);
        EXPECT_LE(p.anchor(), 2);
    }
    EXPECT_EQ(canonical_representative(Path(Heights{5, 6, 5, 4})).heights(), (Heights{2, 3, 2, 1}));
    EXPECT_THROW(canonical_lift(ThreeColourPath({0, 1, 2})), std::invalid_argument);
    EXPECT_THROW(ThreeColourPath({0, 0, 1}), std::invalid_argument);
}

TEST(ThreeColour, PhiIsAPermutation)
{
    const ThreeColourBasis tc = three_colour_basis(4, 0);
    const Matrix phi = phi_matrix(sos_quotient_basis(4), tc);
    EXPECT_LT(relative_residual(Matrix(phi.adjoint() * phi), Matrix(Matrix::Identity(phi.rows(), phi.cols()))), 1e-16);
}

TEST(ThreeColour, Intertwining)
{
    Sampler s(205);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric}) {
        for (int len : {4, 6}) {
            const Draw dr = line_draw(s, kind, len, 0);
            const Model m(dr.params);
            const Spectral inhom(dr.u.begin(), dr.u.begin() + len);
            EXPECT_LT(transfer_intertwining_residual(m, dr.u.back(), inhom), 1e-11);
            EXPECT_LT(r_intertwining_residual(m, dr.u.back(), len), 1e-11);
        }
    }
}

TEST(ThreeColour, ProjectedEigenvector)
{
    Sampler s(206);
    for (int len : {4, 6}) {
        const Draw dr = line_draw(s, KernelKind::elliptic, len, 0);
        const Model m(dr.params);
        const Spectral inhom(dr.u.begin(), dr.u.begin() + len);
        for (int j : {2, 3}) EXPECT_LT(three_colour_eigenvector_residual(m, dr.u.back(), inhom, j), 1e-8);
    }
}

TEST(Rsos, ReductionAtZetaZeroAndPiOverThree)
{
    Sampler s(207);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric}) {
        for (int len : {4, 6}) {
            const Draw dr = line_draw(s, kind, len, 0);
            const Spectral inhom(dr.u.begin(), dr.u.begin() + len);
            for (int k : {0, 1}) {
                const Model m = Model(dr.params).with_zeta(k * pi / 3.0);
                for (int j : {2, 3}) {
                    const RsosReport r = rsos_reduce(m, j, dr.u.back(), inhom);
                    EXPECT_EQ(r.vanishing_class, k);
                    EXPECT_LT(r.vanishing, 1e-10);
                    EXPECT_LT(r.flip, 1e-11);
                    EXPECT_LT(r.psi_ratio_spread, 1e-9);
                    // the surviving vector is the -1 eigenvector of the flip
                    EXPECT_LT(std::abs(r.psi[0] + r.psi[1]) / std::abs(r.psi[0]), 1e-9);
                }
            }
        }
    }
    EXPECT_THROW(rsos_reduce(combinatorial_model(KernelKind::elliptic, {0.0, 0.8}, 0.3), 2, 0.1, Spectral(4, 0.2)),
                 std::invalid_argument);
}

TEST(Hamiltonian, DerivativeSchemesAgree)
{
    const Model m = combinatorial_model(KernelKind::trigonometric, {0.0, 1.0}, {0.31, 0.07});
    const Matrix a = hamiltonian(m, 4, HamiltonianBasis::three_colour, Derivative::cauchy);
    const Matrix b = hamiltonian(m, 4, HamiltonianBasis::three_colour, Derivative::central4);
    EXPECT_LT(relative_residual(a, b), 1e-7);
    const ThreeColourBasis tc = three_colour_basis(4, 0);
    const Matrix rho = three_colour_rho(tc);
    EXPECT_LT(relative_residual(Matrix(a * rho), Matrix(rho * a)), 1e-8);
}

TEST(Hamiltonian, BasesAreEquivalent)
{
    const Model m = combinatorial_model(KernelKind::elliptic, {0.0, 0.8}, {0.31, 0.07});
    const ThreeColourBasis tc = three_colour_basis(4, 0);
    const Matrix phi = phi_matrix(sos_quotient_basis(4), tc);
    const Matrix h3 = hamiltonian(m, 4, HamiltonianBasis::three_colour);
    const Matrix hs = hamiltonian(m, 4, HamiltonianBasis::sos_quotient);
    EXPECT_LT(relative_residual(Matrix(phi * h3), Matrix(hs * phi)), 1e-10);
}

TEST(Spectrum, TrigonometricL4)
{
    const Model m = combinatorial_model(KernelKind::trigonometric, {0.0, 1.0}, {0.31, 0.07});
    const SpectrumReport r = spectrum_report(m, 4, 3);
    EXPECT_LT(std::abs(r.psi_energy), 1e-8);
    EXPECT_LT(r.psi_eigen_residual, 1e-8);
    EXPECT_GT(r.overlap, 1.0 - 1e-6);
    EXPECT_TRUE(r.first_excited);
    EXPECT_LT(r.rho_residual, 1e-9);
    EXPECT_NEAR(std::abs(r.momentum), pi, 1e-9);
    int negative = 0, zero = 0;
    for (cplx e : r.energies) {
        negative += e.real() < -kLevelTolerance;
        zero += std::abs(e) <= kLevelTolerance;
    }
    EXPECT_EQ(negative, 1);
    EXPECT_EQ(zero, 2);
}

TEST(Spectrum, EllipticL4IsNotGround)
{
    const Model m = combinatorial_model(KernelKind::elliptic, {0.0, 0.8}, {0.31, 0.07});
    for (int j : {2, 3}) {
        const SpectrumReport r = spectrum_report(m, 4, j);
        EXPECT_LT(r.psi_eigen_residual, 1e-8);
        EXPECT_GT(r.overlap, 1.0 - 1e-6);
        EXPECT_FALSE(r.ground);
        EXPECT_LT(r.rho_residual, 1e-9);
    }
}

TEST(Spectrum, SizeGuard)
{
    const Model m = combinatorial_model(KernelKind::trigonometric, {0.0, 1.0}, 0.3);
    EXPECT_THROW(spectrum_report(m, 8, 3), std::invalid_argument);
}

TEST(TemperleyLieb, RelationsAtL4AndL6)
{
    const Model m = combinatorial_model(KernelKind::trigonometric, {0.0, 1.0}, {0.31, 0.07});
    for (int len : {4, 6}) {
        const TemperleyLiebReport r = temperley_lieb_check(m, len);
        EXPECT_LT(r.braid, 1e-7);
        EXPECT_LT(r.quadratic, 1e-7);
        EXPECT_LT(r.hamiltonian, 1e-7);
        EXPECT_LT(r.r_identity, 1e-15);
    }
    EXPECT_THROW(temperley_lieb_check(combinatorial_model(KernelKind::elliptic, {0.0, 0.8}, 0.3), 4), DomainError);
}

TEST(TemperleyLieb, GeneratorsAreNotIdempotent)
{
    // U^2 = -U, so U itself is not a projector: a sign slip in U would show here
    const Model m = combinatorial_model(KernelKind::trigonometric, {0.0, 1.0}, {0.31, 0.07});
    const ThreeColourBasis tc = three_colour_basis(4, 0);
    const Matrix u = tl_generator(m, 2, tc);
    EXPECT_GT(relative_residual(Matrix(u * u), u), 1.0);
}
