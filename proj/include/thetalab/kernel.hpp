#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "skewform.hpp"
#include "specfun.hpp"

namespace thetalab {

/// A point z of the open right half plane.
class ComplexTime {
public:
    ComplexTime(cplx z) : z_(z) // NOLINT(google-explicit-constructor)
    {
        detail::require_right_half_plane(z, "ComplexTime");
    }
    ComplexTime(double t) : ComplexTime(cplx(t, 0.0)) {} // NOLINT(google-explicit-constructor)

    cplx value() const { return z_; }
    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }
    double arg() const { return std::arg(z_); }
    /// True when |arg z| <= omega.
    bool in_sector(double omega) const { return std::abs(arg()) <= omega; }

private:
    cplx z_;
};

/// Θ with everything the kernel formulas need.
class KernelSpec {
public:
    explicit KernelSpec(SkewMatrix theta) : ctx_(std::move(theta)) {}

    const SpecfunContext& ctx() const { return ctx_; }
    const SkewMatrix& theta() const { return ctx_.theta(); }
    const CanonicalForm& canon() const { return ctx_.canon(); }
    int dim() const { return ctx_.dim(); }
    double alpha() const { return ctx_.canon().alpha; }

private:
    SpecfunContext ctx_;
};

/// p_z^Θ(s) = (4πz)^{-n/2} √det S(zΘ) exp(-⟨R(zΘ)s, s⟩ / (4z)).
inline cplx p_kernel(const KernelSpec& spec, ComplexTime z, const Eigen::VectorXd& s)
{
    detail::require(s.size() == spec.dim(), "p_kernel: point length must equal dim");
    const cplx zz = z.value();
    const cplx pre = std::pow(4.0 * std::numbers::pi * zz, -0.5 * spec.dim());
    return pre * sqrt_det_S(spec.ctx(), zz) * std::exp(-R_quadratic(spec.ctx(), zz, s) / (4.0 * zz));
}

/// k_z^Θ(x, y) = e^{(i/2)⟨y, Θx⟩} p_z^Θ(y).
inline cplx k_kernel(const KernelSpec& spec, ComplexTime z, const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    detail::require(x.size() == spec.dim() && y.size() == spec.dim(), "k_kernel: point length must equal dim");
    const double form = y.dot(spec.theta().matrix() * x);
    return std::polar(1.0, 0.5 * form) * p_kernel(spec, z, y);
}

/// Shifted kernel b_z(s) = e^{αz} p_z^Θ(s) with α the spectral gap of Θ.
inline cplx shifted_kernel(const KernelSpec& spec, ComplexTime z, const Eigen::VectorXd& s)
{
    return std::exp(spec.alpha() * z.value()) * p_kernel(spec, z, s);
}

/// d/dt p_t(s) for Θ = J₀ in the plane: (-coth t + |s|²/(4 sinh² t)) p_t(s).
inline cplx p_time_derivative(double t, const Eigen::VectorXd& s)
{
    if (!(t > 0.0)) throw DomainError("p_time_derivative: requires t > 0");
    detail::require(s.size() == 2, "p_time_derivative: point must have length 2");
    static const KernelSpec spec(SkewMatrix::standard(1.0));
    const double sh = std::sinh(t);
    const double factor = -1.0 / std::tanh(t) + s.squaredNorm() / (4.0 * sh * sh);
    return factor * p_kernel(spec, t, s);
}

/// Samples p_z (or b_z when shifted) on a grid of matching dimension.
inline GridField sample_kernel(const KernelSpec& spec, ComplexTime z, const GridMeta& meta, bool shifted = false)
{
    detail::require(meta.n == spec.dim(), "sample_kernel: grid dimension must equal dim");
    GridField out(meta);
    const cplx scale = shifted ? std::exp(spec.alpha() * z.value()) : cplx(1.0);
    parallel_for(meta.size(), [&](std::size_t i) { out[i] = scale * p_kernel(spec, z, meta.point(i)); }, 256);
    return out;
}

/// Trapezoid rule for ∫_{[-L,L]^dim} fn with points_per_axis nodes per axis,
/// doubling until the relative change drops below rel_tol. dim is 1 or 2.
inline double trapezoid_box(const std::function<double(double, double)>& fn, int dim, double L,
                            int points_per_axis = 256, double rel_tol = 1e-7, int max_points = 8192)
{
    detail::require(dim == 1 || dim == 2, "trapezoid_box: dim must be 1 or 2");
    auto rule = [&](int N) {
        const double h = 2.0 * L / N;
        double s = 0.0;
        if (dim == 1) {
            for (int i = 0; i <= N; ++i) s += (i == 0 || i == N ? 0.5 : 1.0) * fn(-L + i * h, 0.0);
            return s * h;
        }
        std::vector<double> rows(N + 1);
        parallel_for(std::size_t(N + 1), [&](std::size_t i) {
            double r = 0.0;
            const double x = -L + double(i) * h;
            for (int j = 0; j <= N; ++j) r += (j == 0 || j == N ? 0.5 : 1.0) * fn(x, -L + j * h);
            rows[i] = (i == 0 || int(i) == N ? 0.5 : 1.0) * r;
        });
        for (double r : rows) s += r;
        return s * h * h;
    };
    double prev = rule(points_per_axis);
    for (int N = 2 * points_per_axis; N <= max_points; N *= 2) {
        const double cur = rule(N);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    throw NumericalError("trapezoid_box: quadrature did not converge");
}

namespace detail {

// Half-width of a box capturing a Gaussian exp(-c |s|²) to e^{-36}, never
// smaller than max(8, 10 √Re z).
inline double kernel_box(cplx z, double c)
{
    return std::max({8.0, 10.0 * std::sqrt(z.real()), 6.0 / std::sqrt(c)});
}

} // namespace detail

/// ‖p_z^Θ‖_{L¹(ℝⁿ)} (or ‖b_z‖₁ when shifted) by trapezoid quadrature.
///
/// In dimension 1 and 2 the kernel itself is integrated. In higher
/// dimension the kernel splits over the blocks of the canonical form, so
/// the norm is the product of the 2-D block norms and 1-D null-axis norms.
inline double kernel_l1_norm(const KernelSpec& spec, ComplexTime z, bool shifted = false)
{
    const cplx zz = z.value();
    const double shift = shifted ? std::exp(spec.alpha() * zz.real()) : 1.0;
    const CanonicalForm& cf = spec.canon();
    // Gaussian decay rate of |p_z| in each block: Re(α coth(αz))/4, null block Re(1/z)/4.
    double c = 0.25 * (1.0 / zz).real();
    for (double a : cf.alphas) c = std::min(c, 0.25 * (detail::w_coth(a * zz) / zz).real());
    if (spec.dim() <= 2) {
        const double L = detail::kernel_box(zz, c);
        const int n = spec.dim();
        auto fn = [&](double a, double b) {
            Eigen::VectorXd s(n);
            s(0) = a;
            if (n == 2) s(1) = b;
            return std::abs(p_kernel(spec, z, s));
        };
        return shift * trapezoid_box(fn, n, L);
    }
    double out = shift;
    for (double a : cf.alphas) out *= kernel_l1_norm(KernelSpec(SkewMatrix::standard(a)), z);
    const int null_dim = spec.dim() - 2 * cf.k;
    if (null_dim > 0) {
        const double one = kernel_l1_norm(KernelSpec(SkewMatrix::zero(1)), z);
        out *= std::pow(one, null_dim);
    }
    return out;
}

/// One row of an L¹ sector scan.
struct ScanRow {
    cplx z;
    double l1 = 0.0;       ///< ‖p_z‖₁
    double weighted = 0.0; ///< cos(arg z) e^{α Re z} ‖p_z‖₁
};

/// Quadrature L¹ norms of p_z over the given z samples.
inline std::vector<ScanRow> kernel_l1_scan(const KernelSpec& spec, const std::vector<cplx>& zs)
{
    std::vector<ScanRow> rows(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) {
        const cplx z = zs[i];
        const double l1 = kernel_l1_norm(spec, z);
        rows[i] = ScanRow{z, l1, std::cos(std::arg(z)) * std::exp(spec.alpha() * z.real()) * l1};
    }, 1);
    return rows;
}

/// ‖d/dt p_t + p_t‖_{L¹(ℝ²)} for Θ = J₀, by trapezoid quadrature.
inline double derivative_decay_l1(double t)
{
    if (!(t > 0.0)) throw DomainError("derivative_decay_l1: requires t > 0");
    // p_t' + p_t = p_t (a + b r²) with p_t radial, so with u = r² the L¹ norm is
    // (4 sinh t)^{-1} ∫_0^∞ e^{-c u} |a + b u| du, split at the root u₀ = -a / b.
    const double a = 1.0 - 1.0 / std::tanh(t);
    const double b = 0.25 / (std::sinh(t) * std::sinh(t));
    const double c = 0.25 / std::tanh(t);
    const double u0 = -a / b;
    const double e0 = std::exp(-c * u0);
    const double whole = a / c + b / (c * c);
    const double head = a * (1.0 - e0) / c + b * (1.0 - e0 * (1.0 + c * u0)) / (c * c);
    return (whole - 2.0 * head) / (4.0 * std::sinh(t));
}

/// |k_t^J(x, y) - Π_j k_t^{J_j}(x_j, y_j) k_t^{0}(x'', y'')| for Θ already in
/// block-diagonal form: 2x2 skew blocks along the diagonal followed by a
/// zero block, zero elsewhere.
inline double tensor_split_check(const KernelSpec& spec, double t, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y)
{
    const Eigen::MatrixXd& th = spec.theta().matrix();
    const int n = spec.dim();
    detail::require(x.size() == n && y.size() == n, "tensor_split_check: point length must equal dim");
    int blocks = 0;
    while (2 * blocks + 1 < n && th(2 * blocks, 2 * blocks + 1) != 0.0) ++blocks;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < blocks; ++j) expected.block(2 * j, 2 * j, 2, 2) = th.block(2 * j, 2 * j, 2, 2);
    detail::require(expected == th, "tensor_split_check: theta is not in block-diagonal form");

    const cplx whole = k_kernel(spec, t, x, y);
    cplx product = 1.0;
    for (int j = 0; j < blocks; ++j) {
        const KernelSpec block(SkewMatrix(th.block(2 * j, 2 * j, 2, 2)));
        product *= k_kernel(block, t, x.segment(2 * j, 2), y.segment(2 * j, 2));
    }
    const int rest = n - 2 * blocks;
    if (rest > 0) {
        const KernelSpec zero(SkewMatrix::zero(rest));
        product *= k_kernel(zero, t, x.tail(rest), y.tail(rest));
    }
    return std::abs(whole - product);
}

} // namespace thetalab
