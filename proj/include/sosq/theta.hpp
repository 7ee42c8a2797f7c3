#pragma once

// Jacobi theta functions with complex argument and complex modulus.
//
// Conventions (nome p = exp(i pi tau), Im tau > 0):
//
//   theta_1(u|tau) = 2 SUM_{n>=0} (-1)^n p^{(n+1/2)^2} sin((2n+1)u)
//   theta_2(u|tau) = 2 SUM_{n>=0}        p^{(n+1/2)^2} cos((2n+1)u)
//   theta_3(u|tau) = 1 + 2 SUM_{n>=1}        p^{n^2} cos(2nu)
//   theta_4(u|tau) = 1 + 2 SUM_{n>=1} (-1)^n p^{n^2} cos(2nu)
//
// Powers of the nome are always formed as exp(i pi tau x) so that no branch
// of p^{1/4} has to be chosen.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sosq {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline constexpr int kThetaMaxTerms = 400;
inline constexpr double kThetaRelTol = 1e-18;

inline void require_modulus(cplx tau)
{
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag())) {
        throw DomainError("theta: Im(tau) must be strictly positive, got tau = (" +
                          std::to_string(tau.real()) + ", " + std::to_string(tau.imag()) + ")");
    }
}

inline void require_finite(cplx u)
{
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
        throw DomainError("theta: non-finite argument");
    }
}

// exp(i pi tau x)
inline cplx nome_power(cplx tau, double x) { return std::exp(I * pi * tau * x); }

// Index past which the terms of the series decay monotonically for this |Im u|.
inline int theta_peak_index(cplx u, cplx tau)
{
    return static_cast<int>(std::abs(u.imag()) / (pi * tau.imag())) + 1;
}

}  // namespace detail

/// Jacobi theta function theta_j(u|tau), j in {1,2,3,4}, by direct q-series.
/// Summation stops once a term drops below 1e-18 of the partial sum (after the
/// terms have started to decay), or after 400 terms.
inline cplx theta(int j, cplx u, cplx tau)
{
    detail::require_modulus(tau);
    detail::require_finite(u);
    const int peak = detail::theta_peak_index(u, tau);

    cplx sum{0.0, 0.0};
    switch (j) {
    case 1:
    case 2:
        for (int n = 0; n < detail::kThetaMaxTerms; ++n) {
            const double h = n + 0.5;
            const cplx w = detail::nome_power(tau, h * h);
            const double k = 2.0 * n + 1.0;
            cplx term = (j == 1) ? 2.0 * w * std::sin(k * u) : 2.0 * w * std::cos(k * u);
            if (j == 1 && (n % 2 == 1)) term = -term;
            sum += term;
            // bound on |term| that does not vanish at zeros of sin/cos
            const double bound = 2.0 * std::abs(w) * std::cosh(k * u.imag());
            if (n > peak && bound <= detail::kThetaRelTol * std::abs(sum)) break;
        }
        return sum;
    case 3:
    case 4:
        sum = 1.0;
        for (int n = 1; n < detail::kThetaMaxTerms; ++n) {
            const cplx w = detail::nome_power(tau, static_cast<double>(n) * n);
            cplx term = 2.0 * w * std::cos(2.0 * n * u);
            if (j == 4 && (n % 2 == 1)) term = -term;
            sum += term;
            const double bound = 2.0 * std::abs(w) * std::cosh(2.0 * n * u.imag());
            if (n > peak && bound <= detail::kThetaRelTol * std::abs(sum)) break;
        }
        return sum;
    default:
        throw DomainError("theta: index j must be 1, 2, 3 or 4");
    }
}

/// theta_1'(0|tau) by term-wise differentiation of the series.
inline cplx theta1_prime0(cplx tau)
{
    detail::require_modulus(tau);
    cplx sum{0.0, 0.0};
    for (int n = 0; n < detail::kThetaMaxTerms; ++n) {
        const double h = n + 0.5;
        cplx term = 2.0 * (2.0 * n + 1.0) * detail::nome_power(tau, h * h);
        if (n % 2 == 1) term = -term;
        sum += term;
        if (std::abs(term) <= detail::kThetaRelTol * std::abs(sum)) break;
    }
    return sum;
}

/// Residue normalisation c = 1 / (2 p^{1/4} (p^2;p^2)_inf^3), equal to 1/theta_1'(0).
inline cplx norm_const_c(cplx tau)
{
    detail::require_modulus(tau);
    cplx prod{1.0, 0.0};
    for (int n = 1; n < detail::kThetaMaxTerms; ++n) {
        const cplx w = detail::nome_power(tau, 2.0 * n);
        const cplx factor = 1.0 - w;
        prod *= factor * factor * factor;
        if (std::abs(w) <= detail::kThetaRelTol) break;
    }
    return 1.0 / (2.0 * detail::nome_power(tau, 0.25) * prod);
}

/// Prefactor F with theta_j(u + (r1 + r2 tau) pi | tau) = F * theta_j(u | tau).
inline cplx quasi_period_factor(int j, int r1, int r2, cplx u, cplx tau)
{
    detail::require_modulus(tau);
    const cplx base = detail::nome_power(tau, -static_cast<double>(r2) * r2) *
                      std::exp(-2.0 * I * static_cast<double>(r2) * u);
    auto parity = [](int m) { return (m % 2 == 0) ? 1.0 : -1.0; };
    switch (j) {
    case 1: return parity(r1 + r2) * base;
    case 2: return parity(r1) * base;
    case 3: return base;
    case 4: return parity(r2) * base;
    default: throw DomainError("quasi_period_factor: index j must be 1, 2, 3 or 4");
    }
}

}  // namespace sosq
