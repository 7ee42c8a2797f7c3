#pragma once

// Seeded draws of generic parameters for property checks.

#include <sosq/kernel.hpp>

#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sosq {

/// Relative distance below which a draw counts as non-generic: |f(x)| < kGenericGap |f'(0)|.
inline constexpr double kGenericGap = 2e-2;

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform on [-1,1] + [-0.3,0.3] i.
    cplx point()
    {
        std::uniform_real_distribution<double> re(-1.0, 1.0), im(-0.3, 0.3);
        const double x = re(rng_);
        return {x, im(rng_)};
    }

    std::vector<cplx> points(int count)
    {
        std::vector<cplx> v(static_cast<std::size_t>(count));
        for (cplx& x : v) x = point();
        return v;
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::uint64_t seed_;
};

inline const cplx kSampleTaus[2] = {{0.0, 0.8}, {0.3, 0.9}};

/// True when no weight or solution denominator of a chain of length L with
/// heights in [-(L+4), L+4] comes near a zero of f.
inline bool generic_point(const Model& m, const std::vector<cplx>& u, int height_span = 8)
{
    const double gap = kGenericGap * std::abs(kernel_fprime0(m.params()));
    auto far = [&](cplx x) { return std::abs(m.f(x)) > gap; };
    const cplx eta = m.eta(), zeta = m.zeta();
    for (int k = 1; k <= 2; ++k)
        if (!far(double(k) * eta)) return false;
    for (int a = -height_span; a <= height_span; ++a)
        if (!far(double(a) * eta + zeta)) return false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (i == j) continue;
            const cplx d = u[i] - u[j];
            for (int k = -3; k <= 3; ++k)
                if (!far(double(k) * eta + d)) return false;
        }
    }
    return true;
}

struct Draw {
    ModelParams params;
    std::vector<cplx> u;
    int attempt = 0;

    std::string digest() const
    {
        std::ostringstream os;
        os.precision(17);
        os << "kind=" << to_string(params.kind) << " tau=" << params.tau << " eta=" << params.eta
           << " zeta=" << params.zeta << " u=[";
        for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
        os << "]";
        return os.str();
    }
};

struct DrawSpec {
    KernelKind kind = KernelKind::elliptic;
    int length = 4;
    int tau_choice = -1;  // -1: alternate by draw index
    bool combinatorial = false;
    int extra_u = 0;  // spectral points drawn in addition to the L inhomogeneities
};

/// Rejection-samples a generic draw. Throws PoleDominated after many rejections.
class PoleDominated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Draw draw_generic(Sampler& s, const DrawSpec& spec, int index = 0)
{
    for (int attempt = 0; attempt < 200; ++attempt) {
        Draw d;
        d.attempt = attempt;
        d.params.kind = spec.kind;
        const int tc = spec.tau_choice >= 0 ? spec.tau_choice : index % 2;
        d.params.tau = kSampleTaus[tc];
        d.params.eta = spec.combinatorial ? cplx{kCombinatorialEta, 0.0} : s.point();
        d.params.zeta = s.point();
        d.u = s.points(spec.length + spec.extra_u);
        const Model m(d.params);
        if (generic_point(m, d.u, spec.length + 4)) return d;
    }
    throw PoleDominated("draw_generic: no generic parameter draw after 200 attempts");
}

}  // namespace sosq
