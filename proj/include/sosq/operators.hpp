#pragma once

// R-matrices, transfer matrix, rotation rho and height shift T on the path space.

#include <sosq/paths.hpp>
#include <sosq/weights.hpp>

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <vector>

namespace sosq {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline std::shared_ptr<const PathBasis> share(PathBasis b) { return std::make_shared<const PathBasis>(std::move(b)); }

/// Relative max-entry difference, scaled by the larger of the two operands.
inline double relative_residual(const Matrix& a, const Matrix& b)
{
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double relative_residual(const Vector& a, const Vector& b)
{
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// <a'|R_i(u)|a> = W(a_{i-1}, a'_i, a_i, a_{i+1} | u), for 1 <= i <= L-1.
inline Matrix r_matrix(const Model& m, int i, cplx u, const PathBasis& basis)
{
    const int len = basis.length();
    if (i < 1 || i > len - 1) throw std::out_of_range("r_matrix: site index must satisfy 1 <= i <= L-1");
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Matrix r = Matrix::Zero(dim, dim);
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const Path& a = basis[col];
        const int left = a.at(i - 1);
        for (int h : {left + 1, left - 1}) {
            Heights hp = a.heights();
            hp[static_cast<std::size_t>(i - 1)] = h;
            if (std::abs(h - a.at(i + 1)) != 1) continue;
            auto row = basis.find(hp);
            if (!row) continue;
            r(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) +=
                sos_weight(m, left, h, a.at(i), a.at(i + 1), u);
        }
    }
    return r;
}

inline StateVector apply_R(const Model& m, int i, cplx u, const StateVector& state)
{
    return StateVector(state.basis, r_matrix(m, i, u, *state.basis) * state.amplitudes);
}

/// <a'|t(u)|a> = prod_i W(a'_{i-1}, a'_i, a_{i-1}, a_i | u - u_i) between two bases.
inline Matrix transfer_matrix(const Model& m, cplx u, const std::vector<cplx>& inhom, const PathBasis& target,
                              const PathBasis& source)
{
    const int len = source.length();
    if (target.length() != len || static_cast<int>(inhom.size()) != len) {
        throw std::invalid_argument("transfer_matrix: dimension mismatch");
    }
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(target.size()), static_cast<Eigen::Index>(source.size()));
    for (std::size_t row = 0; row < target.size(); ++row) {
        const Path& ap = target[row];
        for (std::size_t col = 0; col < source.size(); ++col) {
            const Path& a = source[col];
            bool linked = true;
            for (int i = 1; i <= len && linked; ++i) linked = std::abs(ap.at(i) - a.at(i)) == 1;
            if (!linked) continue;
            cplx w{1.0, 0.0};
            for (int i = 1; i <= len; ++i) {
                w *= sos_weight(m, ap.at(i - 1), ap.at(i), a.at(i - 1), a.at(i), u - inhom[static_cast<std::size_t>(i - 1)]);
                if (w == cplx{}) break;
            }
            t(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = w;
        }
    }
    return t;
}

/// t(u) acting from the anchors A-1, A+1 into anchor A, the only nonzero block.
struct TransferBlock {
    std::shared_ptr<const PathBasis> target;
    std::shared_ptr<const PathBasis> source;
    Matrix matrix;
};

inline TransferBlock transfer_block(const Model& m, cplx u, const std::vector<cplx>& inhom, int anchor)
{
    const int len = static_cast<int>(inhom.size());
    auto target = share(enumerate_paths(len, anchor));
    auto source = share(enumerate_paths(len, {anchor - 1, anchor + 1}));
    return {target, source, transfer_matrix(m, u, inhom, *target, *source)};
}

/// Permutation matrix <b|P|a> = 1 iff b = op(a).
template <class Op>
Matrix path_map_matrix(const PathBasis& target, const PathBasis& source, Op op)
{
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(target.size()), static_cast<Eigen::Index>(source.size()));
    for (std::size_t col = 0; col < source.size(); ++col) {
        if (auto row = target.find(op(source[col]))) {
            p(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) = 1.0;
        }
    }
    return p;
}

namespace detail {

template <class Op>
StateVector relabel(const StateVector& state, Op op)
{
    std::vector<Path> image;
    image.reserve(state.size());
    for (const Path& p : *state.basis) image.push_back(op(p));
    return StateVector(share(PathBasis(std::move(image))), state.amplitudes);
}

}  // namespace detail

/// rho|a_1..a_L> = |a_L,a_1..a_{L-1}>. The image keeps its own height labels,
/// so the returned state lives on the rotated basis.
inline StateVector rotate_rho(const StateVector& state)
{
    return detail::relabel(state, [](const Path& p) { return p.rotated(); });
}

/// T shifts every height by +3.
inline StateVector shift_T(const StateVector& state)
{
    return detail::relabel(state, [](const Path& p) { return p.shifted(3); });
}

/// R_i(u) R_{i+1}(u+v) R_i(v) vs R_{i+1}(v) R_i(u+v) R_{i+1}(u), maximised over
/// the bulk sites of an anchored chain.
inline double yang_baxter_residual(const Model& m, cplx u, cplx v, int length, int anchor = 0)
{
    const PathBasis basis = enumerate_paths(length, anchor);
    double worst = 0.0;
    for (int i = 1; i + 1 <= length - 1; ++i) {
        const Matrix lhs = r_matrix(m, i, u, basis) * r_matrix(m, i + 1, u + v, basis) * r_matrix(m, i, v, basis);
        const Matrix rhs = r_matrix(m, i + 1, v, basis) * r_matrix(m, i, u + v, basis) * r_matrix(m, i + 1, u, basis);
        worst = std::max(worst, relative_residual(lhs, rhs));
    }
    return worst;
}

/// [t(u), t(v)] on the anchor-A to anchor-A block of t(u)t(v), which passes
/// through the anchors A-1 and A+1.
inline double transfer_commutator_residual(const Model& m, cplx u, cplx v, const std::vector<cplx>& inhom,
                                           int anchor = 0)
{
    const int len = static_cast<int>(inhom.size());
    const PathBasis mid = enumerate_paths(len, {anchor - 1, anchor + 1});
    const PathBasis home = enumerate_paths(len, anchor);
    const Matrix uv = transfer_matrix(m, u, inhom, home, mid) * transfer_matrix(m, v, inhom, mid, home);
    const Matrix vu = transfer_matrix(m, v, inhom, home, mid) * transfer_matrix(m, u, inhom, mid, home);
    return relative_residual(uv, vu);
}

}  // namespace sosq
