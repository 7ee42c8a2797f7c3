#pragma once

// Closed height paths and the path Hilbert space.
//
// A path of even length L is a sequence (a_1, ..., a_L) of integers with
// |a_i - a_{i-1}| = 1 for all i, indices taken mod L (a_0 = a_L). Bases are
// materialised at fixed anchor heights a_L.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosq {

using Heights = std::vector<int>;

class Path {
public:
    Path() = default;

    /// Throws std::invalid_argument unless the heights form a closed unit-step loop.
    explicit Path(Heights heights) : heights_(std::move(heights))
    {
        if (heights_.empty()) throw std::invalid_argument("Path: empty height sequence");
        const int len = static_cast<int>(heights_.size());
        for (int i = 1; i <= len; ++i) {
            if (std::abs(at(i) - at(i - 1)) != 1) {
                throw std::invalid_argument("Path: heights " + to_string() + " are not a closed unit-step loop");
            }
        }
    }

    int length() const { return static_cast<int>(heights_.size()); }
    int half_length() const { return length() / 2; }
    int anchor() const { return heights_.back(); }

    /// a_i with 1-based cyclic indexing: at(0) == at(L) == a_L.
    int at(int i) const
    {
        const int len = length();
        const int k = ((i - 1) % len + len) % len;
        return heights_[static_cast<std::size_t>(k)];
    }

    /// a_i - a_{i-1}, i.e. +1 at an ascent and -1 at a descent.
    int step(int i) const { return at(i) - at(i - 1); }

    const Heights& heights() const { return heights_; }

    /// rho |a_1 .. a_L> = |a_L, a_1, .., a_{L-1}>
    Path rotated() const
    {
        Heights h(heights_.size());
        h[0] = heights_.back();
        std::copy(heights_.begin(), heights_.end() - 1, h.begin() + 1);
        return Path(std::move(h));
    }

    Path shifted(int offset) const
    {
        Heights h = heights_;
        for (int& x : h) x += offset;
        return Path(std::move(h));
    }

    std::string to_string() const
    {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < heights_.size(); ++i) os << (i ? "," : "") << heights_[i];
        os << ')';
        return os.str();
    }

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path& a, const Path& b) { return a.heights_ <=> b.heights_; }

private:
    Heights heights_;
};

/// Ordered list of paths with an index lookup.
class PathBasis {
public:
    PathBasis() = default;

    explicit PathBasis(std::vector<Path> paths) : paths_(std::move(paths))
    {
        for (std::size_t k = 0; k < paths_.size(); ++k) {
            if (!index_.emplace(paths_[k].heights(), k).second) {
                throw std::invalid_argument("PathBasis: duplicate path " + paths_[k].to_string());
            }
        }
    }

    std::size_t size() const { return paths_.size(); }
    const Path& operator[](std::size_t k) const { return paths_[k]; }
    const std::vector<Path>& paths() const { return paths_; }
    auto begin() const { return paths_.begin(); }
    auto end() const { return paths_.end(); }

    int length() const { return paths_.empty() ? 0 : paths_.front().length(); }

    std::optional<std::size_t> find(const Heights& heights) const
    {
        auto it = index_.find(heights);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::size_t> find(const Path& path) const { return find(path.heights()); }

    friend bool operator==(const PathBasis& a, const PathBasis& b) { return a.paths_ == b.paths_; }

private:
    std::vector<Path> paths_;
    std::map<Heights, std::size_t> index_;
};

inline constexpr int kMaxChainLength = 12;

/// All closed paths of length L with a_L = anchor, ordered lexicographically
/// on the step sequence with +1 before -1.
inline PathBasis enumerate_paths(int length, int anchor)
{
    if (length < 2 || length % 2 != 0 || length > kMaxChainLength) {
        throw std::invalid_argument("enumerate_paths: L must be even with 2 <= L <= 12, got " +
                                    std::to_string(length));
    }
    std::vector<Path> out;
    Heights h(static_cast<std::size_t>(length));
    // steps encoded as bits, bit (L-1-i) = 1 means a descent at step i+1
    const unsigned total = 1u << length;
    for (unsigned code = 0; code < total; ++code) {
        int height = anchor;
        int net = 0;
        for (int i = 0; i < length; ++i) {
            const int s = ((code >> (length - 1 - i)) & 1u) ? -1 : +1;
            net += s;
            height += s;
            h[static_cast<std::size_t>(i)] = height;
        }
        if (net == 0) out.emplace_back(h);
    }
    return PathBasis(std::move(out));
}

/// Concatenation of the anchored bases, in the order given.
inline PathBasis enumerate_paths(int length, std::span<const int> anchors)
{
    std::vector<Path> out;
    for (int a : anchors) {
        PathBasis b = enumerate_paths(length, a);
        out.insert(out.end(), b.begin(), b.end());
    }
    return PathBasis(std::move(out));
}

inline PathBasis enumerate_paths(int length, std::initializer_list<int> anchors)
{
    return enumerate_paths(length, std::span<const int>(anchors.begin(), anchors.size()));
}

/// Finite vector in the path Hilbert space.
struct StateVector {
    std::shared_ptr<const PathBasis> basis;
    Eigen::VectorXcd amplitudes;

    StateVector() = default;
    explicit StateVector(std::shared_ptr<const PathBasis> b)
        : basis(std::move(b)), amplitudes(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size())))
    {
    }
    StateVector(std::shared_ptr<const PathBasis> b, Eigen::VectorXcd amps)
        : basis(std::move(b)), amplitudes(std::move(amps))
    {
        if (static_cast<std::size_t>(amplitudes.size()) != basis->size()) {
            throw std::invalid_argument("StateVector: amplitude count does not match basis");
        }
    }

    std::size_t size() const { return basis ? basis->size() : 0; }
    std::complex<double> operator[](std::size_t k) const { return amplitudes[static_cast<Eigen::Index>(k)]; }

    /// Amplitude of a path, zero if it is outside the basis.
    std::complex<double> amplitude(const Path& p) const
    {
        auto k = basis->find(p);
        return k ? amplitudes[static_cast<Eigen::Index>(*k)] : std::complex<double>{};
    }

    double norm() const { return amplitudes.norm(); }
    double max_abs() const { return amplitudes.size() ? amplitudes.cwiseAbs().maxCoeff() : 0.0; }

    StateVector& operator*=(std::complex<double> s)
    {
        amplitudes *= s;
        return *this;
    }
    friend StateVector operator*(std::complex<double> s, StateVector v) { return v *= s; }

    friend StateVector operator+(const StateVector& a, const StateVector& b)
    {
        if (!(a.basis == b.basis || *a.basis == *b.basis)) {
            throw std::invalid_argument("StateVector: adding vectors over different bases");
        }
        return StateVector(a.basis, a.amplitudes + b.amplitudes);
    }
    friend StateVector operator-(const StateVector& a, const StateVector& b)
    {
        return a + (std::complex<double>{-1.0, 0.0} * b);
    }
};

}  // namespace sosq
