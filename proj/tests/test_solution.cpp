#include <sosq/solution.hpp>
#include <sosq/sampling.hpp>
#include <sosq/verify.hpp>

#include <gtest/gtest.h>

using namespace sosq;

namespace {

Draw draw(Sampler& s, KernelKind kind, int length, int index, int extra = 0)
{
    return draw_generic(s, {kind, length, -1, false, extra}, index);
}

// Independent product for the maximal path (a+1, .., a+n, .., a) written out
// directly from the factor list, not from the library helper.
cplx maximal_product(const Model& m, int j, int a, const Spectral& u)
{
    const int len = static_cast<int>(u.size()), n = len / 2;
    const cplx eta = m.eta(), zeta = m.zeta();
    cplx r = 1.0;
    for (int k = 0; k <= n; ++k) r *= m.f(double(a + k) * eta + zeta);
    for (int i = 1; i <= n; ++i)
        for (int k = i + 1; k <= n; ++k) r *= m.f(eta - u[i - 1] + u[k - 1]);
    for (int i = n + 1; i <= len; ++i)
        for (int k = i + 1; k <= len; ++k) r *= m.f(eta - u[i - 1] + u[k - 1]);
    cplx arg = double(a - n) * eta + zeta;
    for (int i = 1; i <= len; ++i) arg += (i <= n ? 1.0 : -1.0) * u[i - 1];
    return r * m.fj(j, arg);
}

}  // namespace

TEST(Solution, AscentDescentVectors)
{
    const AscentDescent ad = alpha_vectors(Path(Heights{1, 0, 1, 2, 1, 0}));
    EXPECT_EQ(ad.alpha, (std::vector<int>{1, 3, 4}));
    EXPECT_EQ(ad.alpha_bar, (std::vector<int>{2, 5, 6}));
}

TEST(Solution, IndexSetsAreDistinctAndBounded)
{
    const Path p(Heights{1, 2, 1, 0});
    const AscentDescent ad = alpha_vectors(p);  // alpha = (1,2)
    const auto s = admissible_index_sets(ad, 4, IndexSetKind::S);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0], (IndexSet{1, 2}));
    const auto sb = admissible_index_sets(ad, 4, IndexSetKind::S_bar);  // alpha-bar = (3,4)
    EXPECT_EQ(sb.size(), 1u);
    const AscentDescent alt = alpha_vectors(Path(Heights{-1, 0, -1, 0}));  // alpha = (2,4)
    EXPECT_EQ(admissible_index_sets(alt, 4, IndexSetKind::S).size(), 2u * 3u);
}

TEST(Solution, PsiEqualsPsiBar)
{
    Sampler s(31);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric, KernelKind::rational}) {
        for (int len : {2, 4, 6}) {
            for (int d = 0; d < (len == 6 ? 3 : 10); ++d) {
                const Draw dr = draw(s, kind, len, d);
                const Model m(dr.params);
                for (int j : {2, 3}) EXPECT_LT(psi_bar_residual(m, j, dr.u), 1e-10) << dr.digest();
            }
        }
    }
}

TEST(Solution, TrivialComponentIsTheProduct)
{
    Sampler s(32);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric, KernelKind::rational}) {
        for (int len : {2, 4, 6}) {
            const Draw dr = draw(s, kind, len, len);
            const Model m(dr.params);
            for (int j : {2, 3}) {
                for (int a : {-1, 0, 2}) {
                    const cplx psi = psi_component(m, j, maximal_path(len, a), dr.u);
                    const cplx ref = maximal_product(m, j, a, dr.u);
                    EXPECT_LT(std::abs(psi / ref - 1.0), 1e-11) << "L=" << len << " j=" << j << " a=" << a;
                }
            }
        }
    }
}

TEST(Solution, AppendixClosedFormL4)
{
    Sampler s(33);
    std::vector<cplx> ratios;
    for (int d = 0; d < 5; ++d) {
        const Draw dr = draw(s, KernelKind::elliptic, 4, d);
        const Model m(dr.params);
        for (const Path& p : enumerate_paths(4, 1)) ratios.push_back(psi_component(m, 3, p, dr.u) / l4_closed_form(m, p, dr.u));
    }
    for (cplx r : ratios) EXPECT_LT(std::abs(r - ratios.front()) / std::abs(ratios.front()), 1e-8);
}

TEST(Solution, AlternatingSignPattern)
{
    // only sigma = (-1,+1,-1,-1) reproduces the alternating component
    Sampler s(34);
    const Draw dr = draw(s, KernelKind::elliptic, 4, 0);
    const Model m(dr.params);
    const cplx tau = m.tau(), eta = m.eta(), zeta = m.zeta();
    const Spectral& u = dr.u;
    const int a = 1;
    auto alternating = [&](std::array<int, 4> sigma) {
        cplx sum{};
        for (int k = 1; k <= 4; ++k) {
            cplx alpha = double(sigma[k - 1]) / theta1_prime0(tau);
            for (int l = 1; l <= 4; ++l)
                if (l != k) alpha *= theta(l, eta / 2.0, tau);
            const int k2 = k <= 2 ? 3 : 2;
            sum += alpha * theta(1, double(a) * eta + zeta, tau) * theta(1, double(a + 1) * eta + zeta, tau) *
                   theta(k, (a + 0.5) * eta + zeta, tau) * theta(k, u[3] - u[1] + 1.5 * eta, tau) *
                   theta(k, u[2] - u[0] + 1.5 * eta, tau) *
                   theta(k2, u[0] + u[2] - u[1] - u[3] + double(a - 1) * eta + zeta, 2.0 * tau);
        }
        return sum;
    };
    const cplx norm = psi_component(m, 3, maximal_path(4, a), u) / l4_closed_form(m, maximal_path(4, a), u);
    const cplx psi = psi_component(m, 3, Path(Heights{a + 1, a, a + 1, a}), u);
    EXPECT_LT(std::abs(psi / (norm * alternating({-1, +1, -1, -1})) - 1.0), 1e-10);
    EXPECT_GT(std::abs(psi / (norm * alternating({-1, +1, +1, +1})) - 1.0), 1e-3);
    EXPECT_GT(std::abs(psi / (norm * alternating({-1, -1, +1, +1})) - 1.0), 1e-3);
}

TEST(Solution, RemovableSingularities)
{
    // One-sided values at distance 1e-4 and 1e-5 from u_a = u_b, extrapolated to
    // the collision, against the circle mean there. Single terms blow up like 1/d.
    Sampler s(35);
    for (KernelKind kind : {KernelKind::elliptic, KernelKind::trigonometric}) {
        const Draw dr = draw(s, kind, 4, 0);
        const Model m(dr.params);
        const PathBasis basis = enumerate_paths(4, 0);
        for (auto [a, b] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 4}}) {
            auto at = [&](double dist) {
                Spectral v = dr.u;
                v[static_cast<std::size_t>(a - 1)] = v[static_cast<std::size_t>(b - 1)] + cplx{dist, 0.6 * dist};
                return v;
            };
            double scale = 0.0, largest_term = 0.0;
            for (const Path& p : basis) {
                scale = std::max(scale, std::abs(psi_component_regular(m, 3, p, at(0.0))));
                for (const IndexSet& is : admissible_index_sets(alpha_vectors(p), 4, IndexSetKind::S))
                    largest_term = std::max(largest_term, std::abs(psi_term(m, 3, p, is, at(1e-5))));
            }
            EXPECT_GT(largest_term, 1e3 * scale) << "u" << a << "->u" << b << " has no cancelling pole";
            for (const Path& p : basis) {
                const cplx c4 = psi_component(m, 3, p, at(1e-4)), c5 = psi_component(m, 3, p, at(1e-5));
                const cplx limit = (10.0 * c5 - c4) / 9.0;
                EXPECT_LT(std::abs(limit - psi_component_regular(m, 3, p, at(0.0))) / scale, 1e-5)
                    << p.to_string() << " u" << a << "->u" << b;
                EXPECT_LT(std::abs(c4 - c5) / scale, 1e-3);  // bounded, drift O(d)
            }
        }
    }
}

TEST(Solution, RegularEvaluationAgreesAwayFromSingularities)
{
    Sampler s(36);
    const Draw dr = draw(s, KernelKind::elliptic, 4, 0);
    const Model m(dr.params);
    for (const Path& p : enumerate_paths(4, 0)) {
        const cplx direct = psi_component(m, 2, p, dr.u);
        EXPECT_LT(std::abs(psi_component_regular(m, 2, p, dr.u) - direct) / std::abs(direct), 1e-10);
    }
}

TEST(Solution, CoincidentPointsThrowDirectly)
{
    const Model m;
    const Spectral u{0.1, 0.1, 0.3, -0.2};
    EXPECT_THROW(psi_component(m, 3, Path(Heights{-1, 0, -1, 0}), u), PoleError);
    EXPECT_NO_THROW(psi_component_regular(m, 3, Path(Heights{-1, 0, -1, 0}), u));
}

TEST(Solution, InputValidation)
{
    const Model m;
    EXPECT_THROW(psi_component(m, 1, maximal_path(4, 0), Spectral(4, 0.1)), std::invalid_argument);
    EXPECT_THROW(psi_component(m, 2, maximal_path(4, 0), Spectral(3, 0.1)), std::invalid_argument);
    EXPECT_THROW(l4_closed_form(Model(ModelParams{KernelKind::trigonometric}), maximal_path(4, 0), Spectral(4, 0.1)),
                 DomainError);
}

TEST(Solution, PsiVectorLivesOnAnchoredBasis)
{
    Sampler s(37);
    const Draw dr = draw(s, KernelKind::elliptic, 6, 0);
    const Model m(dr.params);
    const StateVector v = psi_vector(m, 2, dr.u, 2);
    EXPECT_EQ(v.size(), 20u);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ(v[k], psi_component(m, 2, (*v.basis)[k], dr.u));
}
