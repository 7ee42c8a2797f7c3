#pragma once

// SOS face weights W(a,b,c,d|u).
//
//   W(a, a+-1, a+-1, a+-2 | u) = f(eta+u) / f(eta-u)
//   W(a, a+-1, a-+1, a    | u) = f(u) f(a eta +- eta + zeta) / (f(eta-u) f(a eta + zeta))
//   W(a, a+-1, a+-1, a    | u) = f(eta) f(a eta -+ u + zeta) / (f(eta-u) f(a eta + zeta))
//
// Any other height pattern has weight zero.

#include <sosq/kernel.hpp>

#include <stdexcept>
#include <string>

namespace sosq {

/// A denominator of a weight or solution term vanished under the pole guard.
class PoleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline cplx guarded_denominator(const Model& m, cplx value, const char* what)
{
    if (m.vanishes(value)) throw PoleError(std::string("pole: ") + what + " vanishes");
    return value;
}

}  // namespace detail

inline bool admissible_face(int a, int b, int c, int d)
{
    return std::abs(a - b) == 1 && std::abs(a - c) == 1 && std::abs(b - d) == 1 && std::abs(c - d) == 1;
}

inline cplx sos_weight(const Model& m, int a, int b, int c, int d, cplx u)
{
    if (!admissible_face(a, b, c, d)) return {0.0, 0.0};
    const cplx eta = m.eta();
    const cplx zeta = m.zeta();
    const cplx den = detail::guarded_denominator(m, m.f(eta - u), "f(eta-u)");

    if (b == c) {
        if (d != a) return m.f(eta + u) / den;  // straight: d = 2b - a
        const int s = b - a;
        const cplx fa = detail::guarded_denominator(m, m.f(double(a) * eta + zeta), "f(a eta+zeta)");
        return m.f(eta) * m.f(double(a) * eta - double(s) * u + zeta) / (den * fa);
    }
    // b = a+s, c = a-s, d = a
    const int s = b - a;
    const cplx fa = detail::guarded_denominator(m, m.f(double(a) * eta + zeta), "f(a eta+zeta)");
    return m.f(u) * m.f(double(a) * eta + double(s) * eta + zeta) / (den * fa);
}

inline cplx sos_weight(const ModelParams& p, int a, int b, int c, int d, cplx u)
{
    return sos_weight(Model(p), a, b, c, d, u);
}

}  // namespace sosq
