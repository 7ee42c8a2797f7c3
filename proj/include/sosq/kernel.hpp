#pragma once

// The function family f, f^(2), f^(3) entering the face weights and the
// solution formulas, for the elliptic kernel and its two degenerations.
//
//   elliptic       f = theta_1(u|tau)   f2 = theta_2(u|2tau)   f3 = theta_3(u|2tau)
//   trigonometric  f = sin(u)           f2 = cos(u)            f3 = 1
//   rational       f = u                f2 = u^2               f3 = 1

#include <sosq/theta.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace sosq {

enum class KernelKind { elliptic, trigonometric, rational };

inline std::string_view to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::elliptic: return "elliptic";
    case KernelKind::trigonometric: return "trigonometric";
    case KernelKind::rational: return "rational";
    }
    return "unknown";
}

inline std::optional<KernelKind> kernel_from_string(std::string_view name)
{
    if (name == "elliptic") return KernelKind::elliptic;
    if (name == "trigonometric" || name == "trig") return KernelKind::trigonometric;
    if (name == "rational") return KernelKind::rational;
    return std::nullopt;
}

/// Model parameters: kernel selector, modulus tau (elliptic only), crossing
/// parameter eta and dynamical parameter zeta.
struct ModelParams {
    KernelKind kind = KernelKind::elliptic;
    cplx tau{0.0, 0.8};
    cplx eta{0.5, 0.0};
    cplx zeta{0.3, 0.0};

    cplx nome() const { return std::exp(I * pi * tau); }

    void validate() const
    {
        if (kind == KernelKind::elliptic) detail::require_modulus(tau);
        detail::require_finite(eta);
        detail::require_finite(zeta);
    }
};

/// 2 pi / 3, the crossing parameter of the combinatorial line.
inline constexpr double kCombinatorialEta = 2.0 * pi / 3.0;

inline cplx kernel_f(const ModelParams& params, cplx u)
{
    switch (params.kind) {
    case KernelKind::elliptic: return theta(1, u, params.tau);
    case KernelKind::trigonometric: return std::sin(u);
    case KernelKind::rational: return u;
    }
    throw DomainError("kernel_f: unknown kernel");
}

inline cplx kernel_fj(const ModelParams& params, int j, cplx u)
{
    if (j != 2 && j != 3) throw DomainError("kernel_fj: j must be 2 or 3");
    switch (params.kind) {
    case KernelKind::elliptic: return theta(j, u, 2.0 * params.tau);
    case KernelKind::trigonometric: return j == 2 ? std::cos(u) : cplx{1.0, 0.0};
    case KernelKind::rational: return j == 2 ? u * u : cplx{1.0, 0.0};
    }
    throw DomainError("kernel_fj: unknown kernel");
}

/// f'(0); sets the scale of the pole guard.
inline cplx kernel_fprime0(const ModelParams& params)
{
    if (params.kind == KernelKind::elliptic) return theta1_prime0(params.tau);
    return {1.0, 0.0};
}

/// Relative size below which a denominator theta value counts as a pole.
inline constexpr double kPoleGuard = 1e-13;

/// ModelParams bound to its kernel, with the pole-guard scale precomputed.
class Model {
public:
    Model() : Model(ModelParams{}) {}

    explicit Model(ModelParams params) : params_(params)
    {
        params_.validate();
        pole_threshold_ = kPoleGuard * std::abs(kernel_fprime0(params_));
    }

    const ModelParams& params() const { return params_; }
    KernelKind kind() const { return params_.kind; }
    cplx eta() const { return params_.eta; }
    cplx zeta() const { return params_.zeta; }
    cplx tau() const { return params_.tau; }

    cplx f(cplx u) const { return kernel_f(params_, u); }
    cplx fj(int j, cplx u) const { return kernel_fj(params_, j, u); }

    double pole_threshold() const { return pole_threshold_; }
    bool vanishes(cplx value) const { return std::abs(value) < pole_threshold_; }

    Model with_eta(cplx eta) const
    {
        ModelParams p = params_;
        p.eta = eta;
        return Model(p);
    }

    Model with_zeta(cplx zeta) const
    {
        ModelParams p = params_;
        p.zeta = zeta;
        return Model(p);
    }

private:
    ModelParams params_;
    double pole_threshold_ = 0.0;
};

}  // namespace sosq
