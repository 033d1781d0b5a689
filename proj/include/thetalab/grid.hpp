#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace thetalab {

using cplx = std::complex<double>;

/// Uniform periodic box grid on [-L, L)^n with N points per axis.
///
/// Axis coordinates are x_m = -L + m h, m = 0..N-1, h = 2L/N. N must be
/// even so that the origin is the grid point m = N/2 on every axis.
/// Flattening is row-major: the first axis varies slowest,
///   flat = ((m_0 N + m_1) N + m_2) ... .
struct GridMeta {
    int n = 1;
    int N = 2;
    double L = 1.0;

    GridMeta() = default;
    GridMeta(int n_, int N_, double L_) : n(n_), N(N_), L(L_) { validate(); }

    void validate() const
    {
        detail::require(n >= 1 && n <= 8, "grid dimension must be in [1, 8]");
        detail::require(N >= 2 && N % 2 == 0, "grid points per axis must be even and >= 2");
        detail::require(std::isfinite(L) && L > 0.0, "grid half-width must be positive");
        double total = std::pow(double(N), n);
        detail::require(total < 1e9, "grid too large");
    }

    double h() const { return 2.0 * L / N; }
    std::size_t size() const
    {
        std::size_t s = 1;
        for (int k = 0; k < n; ++k) s *= static_cast<std::size_t>(N);
        return s;
    }
    double coord(int m) const { return -L + m * h(); }
    /// Stride of axis k in the flat index.
    std::size_t stride(int k) const
    {
        std::size_t s = 1;
        for (int j = k + 1; j < n; ++j) s *= static_cast<std::size_t>(N);
        return s;
    }
    /// Index of axis k inside a flat index.
    int axis_index(std::size_t flat, int k) const
    {
        return static_cast<int>((flat / stride(k)) % static_cast<std::size_t>(N));
    }
    std::vector<int> multi_index(std::size_t flat) const
    {
        std::vector<int> m(n);
        for (int k = n - 1; k >= 0; --k) {
            m[k] = static_cast<int>(flat % static_cast<std::size_t>(N));
            flat /= static_cast<std::size_t>(N);
        }
        return m;
    }
    std::size_t flat_index(const std::vector<int>& m) const
    {
        std::size_t f = 0;
        for (int k = 0; k < n; ++k) {
            const int mk = ((m[k] % N) + N) % N;
            f = f * static_cast<std::size_t>(N) + static_cast<std::size_t>(mk);
        }
        return f;
    }
    Eigen::VectorXd point(std::size_t flat) const
    {
        Eigen::VectorXd x(n);
        for (int k = n - 1; k >= 0; --k) {
            x(k) = coord(static_cast<int>(flat % static_cast<std::size_t>(N)));
            flat /= static_cast<std::size_t>(N);
        }
        return x;
    }
    std::size_t origin_index() const { return flat_index(std::vector<int>(n, N / 2)); }
    /// Cell volume h^n.
    double cell_volume() const { return std::pow(h(), n); }

    bool operator==(const GridMeta& o) const { return n == o.n && N == o.N && L == o.L; }
    bool operator!=(const GridMeta& o) const { return !(*this == o); }
};

/// A complex field sampled on a GridMeta grid.
class GridField {
public:
    GridField() = default;
    explicit GridField(const GridMeta& meta) : meta_(meta), values_(Eigen::VectorXcd::Zero(Eigen::Index(meta.size()))) {}
    GridField(const GridMeta& meta, Eigen::VectorXcd values) : meta_(meta), values_(std::move(values))
    {
        detail::require(std::size_t(values_.size()) == meta_.size(), "field length does not match grid");
    }

    /// Samples fn(x) at every grid point.
    static GridField sample(const GridMeta& meta, const std::function<cplx(const Eigen::VectorXd&)>& fn)
    {
        GridField f(meta);
        for (std::size_t i = 0; i < meta.size(); ++i) f.values_(Eigen::Index(i)) = fn(meta.point(i));
        return f;
    }

    /// Discrete point mass at the origin with unit integral (value h^{-n}).
    static GridField delta(const GridMeta& meta)
    {
        GridField f(meta);
        f.values_(Eigen::Index(meta.origin_index())) = 1.0 / meta.cell_volume();
        return f;
    }

    const GridMeta& meta() const { return meta_; }
    const Eigen::VectorXcd& values() const { return values_; }
    Eigen::VectorXcd& values() { return values_; }
    std::size_t size() const { return std::size_t(values_.size()); }
    cplx operator[](std::size_t i) const { return values_(Eigen::Index(i)); }
    cplx& operator[](std::size_t i) { return values_(Eigen::Index(i)); }

    /// Value at the origin grid point.
    cplx at_origin() const { return values_(Eigen::Index(meta_.origin_index())); }

    /// Discrete L^p norm (h^n Σ |f|^p)^{1/p}; p = ∞ gives the max modulus.
    double lp_norm(double p) const
    {
        detail::require(p >= 1.0, "lp_norm: p must be >= 1");
        if (std::isinf(p)) return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
        double s = 0.0;
        for (Eigen::Index i = 0; i < values_.size(); ++i) s += std::pow(std::abs(values_(i)), p);
        return std::pow(meta_.cell_volume() * s, 1.0 / p);
    }
    double l1_norm() const { return lp_norm(1.0); }
    double l2_norm() const { return std::sqrt(meta_.cell_volume() * values_.squaredNorm()); }

    /// Riemann sum h^n Σ f.
    cplx integral() const { return meta_.cell_volume() * values_.sum(); }

    /// Fraction of the L¹ mass carried by points within `width` cells of the
    /// box boundary. Returns 0 for the zero field.
    double boundary_mass_fraction(int width = 4) const
    {
        double total = 0.0, edge = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const double a = std::abs(values_(Eigen::Index(i)));
            total += a;
            bool near = false;
            for (int k = 0; k < meta_.n && !near; ++k) {
                const int m = meta_.axis_index(i, k);
                near = m < width || m >= meta_.N - width;
            }
            if (near) edge += a;
        }
        return total > 0.0 ? edge / total : 0.0;
    }

    GridField& operator+=(const GridField& o)
    {
        detail::require(meta_ == o.meta_, "grid geometry mismatch");
        values_ += o.values_;
        return *this;
    }
    GridField& operator-=(const GridField& o)
    {
        detail::require(meta_ == o.meta_, "grid geometry mismatch");
        values_ -= o.values_;
        return *this;
    }
    GridField& operator*=(cplx c)
    {
        values_ *= c;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(cplx c, GridField a) { return a *= c; }

private:
    GridMeta meta_;
    Eigen::VectorXcd values_;
};

/// Relative discrete L^p distance ‖a - b‖_p / ‖b‖_p (absolute when b = 0).
inline double relative_lp_error(const GridField& a, const GridField& b, double p)
{
    detail::require(a.meta() == b.meta(), "grid geometry mismatch");
    const double d = (a - b).lp_norm(p);
    const double r = b.lp_norm(p);
    return r > 0.0 ? d / r : d;
}

/// Isotropic Gaussian amplitude * exp(-|x - center|² / (2 sigma²)).
inline GridField gaussian_field(const GridMeta& meta, const Eigen::VectorXd& center, double sigma,
                                cplx amplitude = 1.0)
{
    detail::require(center.size() == meta.n, "gaussian_field: center length must equal grid dim");
    detail::require(sigma > 0.0, "gaussian_field: sigma must be positive");
    return GridField::sample(meta, [&](const Eigen::VectorXd& x) {
        return amplitude * std::exp(-(x - center).squaredNorm() / (2.0 * sigma * sigma));
    });
}

} // namespace thetalab
