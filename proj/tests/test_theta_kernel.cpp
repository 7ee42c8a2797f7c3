#include <sosq/kernel.hpp>
#include <sosq/sampling.hpp>

#include <gtest/gtest.h>

using namespace sosq;

namespace {

// Jacobi triple products, an independent route to theta_j.
cplx theta_product(int j, cplx u, cplx tau)
{
    const cplx p = std::exp(I * pi * tau);
    cplx prod = 1.0;
    for (int n = 1; n < 200; ++n) {
        const cplx p2n = std::pow(p, 2.0 * n), p2n1 = std::pow(p, 2.0 * n - 1.0);
        switch (j) {
        case 1: prod *= (1.0 - p2n) * (1.0 - 2.0 * p2n * std::cos(2.0 * u) + p2n * p2n); break;
        case 2: prod *= (1.0 - p2n) * (1.0 + 2.0 * p2n * std::cos(2.0 * u) + p2n * p2n); break;
        case 3: prod *= (1.0 - p2n) * (1.0 + 2.0 * p2n1 * std::cos(2.0 * u) + p2n1 * p2n1); break;
        case 4: prod *= (1.0 - p2n) * (1.0 - 2.0 * p2n1 * std::cos(2.0 * u) + p2n1 * p2n1); break;
        }
    }
    const cplx q4 = std::exp(I * pi * tau / 4.0);
    if (j == 1) return 2.0 * q4 * std::sin(u) * prod;
    if (j == 2) return 2.0 * q4 * std::cos(u) * prod;
    return prod;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Theta, MatchesTripleProduct)
{
    Sampler s(7);
    for (int draw = 0; draw < 20; ++draw) {
        const cplx tau{s.uniform(-0.5, 0.5), s.uniform(0.5, 2.0)};
        const cplx u = s.point();
        for (int j = 1; j <= 4; ++j) EXPECT_LT(rel(theta(j, u, tau), theta_product(j, u, tau)), 1e-12) << j;
    }
}

TEST(Theta, QuasiPeriodicity)
{
    Sampler s(11);
    for (int draw = 0; draw < 30; ++draw) {
        const cplx tau{s.uniform(-0.5, 0.5), s.uniform(0.5, 2.0)};
        const cplx u = s.point();
        for (int j = 1; j <= 4; ++j) {
            for (int r1 = -2; r1 <= 2; ++r1) {
                for (int r2 = -2; r2 <= 2; ++r2) {
                    const cplx shifted = theta(j, u + (double(r1) + double(r2) * tau) * pi, tau);
                    EXPECT_LT(rel(shifted, quasi_period_factor(j, r1, r2, u, tau) * theta(j, u, tau)), 1e-11)
                        << "j=" << j << " r=" << r1 << "," << r2;
                }
            }
        }
    }
}

TEST(Theta, DerivativeAtZero)
{
    const cplx tau{0.2, 0.9};
    // Jacobi: theta1'(0) = theta2(0) theta3(0) theta4(0)
    EXPECT_LT(rel(theta1_prime0(tau), theta(2, 0.0, tau) * theta(3, 0.0, tau) * theta(4, 0.0, tau)), 1e-13);
    const double h = 1e-4;
    const cplx fd = (theta(1, h, tau) - theta(1, -h, tau)) / (2.0 * h);
    EXPECT_LT(rel(theta1_prime0(tau), fd), 1e-8);
    EXPECT_LT(rel(norm_const_c(tau), 1.0 / theta1_prime0(tau)), 1e-13);
}

TEST(Theta, RejectsBadInput)
{
    EXPECT_THROW(theta(1, 0.1, cplx{0.0, -1.0}), DomainError);
    EXPECT_THROW(theta(5, 0.1, cplx{0.0, 1.0}), DomainError);
    EXPECT_THROW(theta(1, cplx{std::nan(""), 0.0}, cplx{0.0, 1.0}), DomainError);
}

TEST(Kernel, EllipticIsOdd)
{
    Sampler s(3);
    ModelParams p;
    for (int draw = 0; draw < 20; ++draw) {
        p.tau = {s.uniform(-0.5, 0.5), s.uniform(0.5, 2.0)};
        const cplx u = s.point();
        EXPECT_LT(rel(kernel_f(p, -u), -kernel_f(p, u)), 1e-12);
    }
}

TEST(Kernel, TrigonometricLimit)
{
    ModelParams p;
    p.tau = {0.0, 30.0};
    const cplx q4 = std::exp(I * pi * p.tau / 4.0);
    for (double x : {-1.0, -0.4, 0.3, 0.9}) {
        for (double y : {-0.3, 0.0, 0.2}) {
            const cplx u{x, y};
            EXPECT_LT(rel(kernel_f(p, u) / (2.0 * q4), std::sin(u)), 1e-8);
        }
    }
}

TEST(Kernel, DegenerateKernels)
{
    ModelParams trig{KernelKind::trigonometric};
    ModelParams rat{KernelKind::rational};
    const cplx u{0.4, -0.2};
    EXPECT_EQ(kernel_f(trig, u), std::sin(u));
    EXPECT_EQ(kernel_fj(trig, 2, u), std::cos(u));
    EXPECT_EQ(kernel_fj(trig, 3, u), cplx(1.0));
    EXPECT_EQ(kernel_f(rat, u), u);
    EXPECT_EQ(kernel_fj(rat, 2, u), u * u);
    EXPECT_EQ(kernel_fj(rat, 3, u), cplx(1.0));
    EXPECT_THROW(kernel_fj(trig, 1, u), DomainError);
}

TEST(Kernel, SecondaryFunctionsUseDoubledModulus)
{
    ModelParams p;
    p.tau = {0.1, 0.7};
    const cplx u{0.3, 0.1};
    EXPECT_EQ(kernel_fj(p, 2, u), theta(2, u, 2.0 * p.tau));
    EXPECT_EQ(kernel_fj(p, 3, u), theta(3, u, 2.0 * p.tau));
}

TEST(Kernel, NamesRoundTrip)
{
    for (KernelKind k : {KernelKind::elliptic, KernelKind::trigonometric, KernelKind::rational})
        EXPECT_EQ(kernel_from_string(to_string(k)), k);
    EXPECT_FALSE(kernel_from_string("hyperbolic"));
}
