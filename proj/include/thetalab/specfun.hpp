#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "skewform.hpp"

namespace thetalab {

using cplx = std::complex<double>;

namespace detail {

inline constexpr double kSeriesRadius = 1e-4;
inline constexpr double kPoleTol = 1e-300;
// |sin z| below this multiple of max(1, |z|) is a pole up to rounding.
inline constexpr double kSinPoleTol = 1e-14;

inline void require_right_half_plane(cplx z, const char* who)
{
    if (!(z.real() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError(std::string(who) + ": requires finite z with Re z > 0");
}

// w / sinh(w) for Re w >= 0, written as 2w e^{-w} / (1 - e^{-2w}) so that
// large Re w neither overflows nor cancels.
inline cplx w_over_sinh(cplx w)
{
    if (std::abs(w) < kSeriesRadius) return 1.0 - w * w / 6.0;
    const cplx e2 = std::exp(-2.0 * w);
    const cplx den = 1.0 - e2;
    if (std::abs(den) < kPoleTol) throw DomainError("w/sinh(w): pole");
    return 2.0 * w * std::exp(-w) / den;
}

// w coth(w) for Re w >= 0.
inline cplx w_coth(cplx w)
{
    if (std::abs(w) < kSeriesRadius) return 1.0 + w * w / 3.0;
    const cplx e2 = std::exp(-2.0 * w);
    const cplx den = 1.0 - e2;
    if (std::abs(den) < kPoleTol) throw DomainError("w coth(w): pole");
    return w * (1.0 + e2) / den;
}

// coth(z) for Re z > 0.
inline cplx coth_right(cplx z)
{
    const cplx e2 = std::exp(-2.0 * z);
    return (1.0 + e2) / (1.0 - e2);
}

} // namespace detail

/// S(z) = z / sin z, with S(0) = 1.
inline cplx S_scalar(cplx z)
{
    if (std::abs(z) < detail::kSeriesRadius) return 1.0 + z * z / 6.0;
    const cplx s = std::sin(z);
    if (std::abs(s) < detail::kSinPoleTol * std::max(1.0, std::abs(z))) throw DomainError("S(z): z is a pole of z/sin z");
    return z / s;
}

/// R(z) = z / tan z, with R(0) = 1.
inline cplx R_scalar(cplx z)
{
    if (std::abs(z) < detail::kSeriesRadius) return 1.0 - z * z / 3.0;
    const cplx s = std::sin(z);
    if (std::abs(s) < detail::kSinPoleTol * std::max(1.0, std::abs(z))) throw DomainError("R(z): z is a pole of z/tan z");
    return z * std::cos(z) / s;
}

/// Θ together with its cached canonical form.
class SpecfunContext {
public:
    explicit SpecfunContext(SkewMatrix theta) : theta_(std::move(theta)), canon_(canonical_form(theta_)) {}

    const SkewMatrix& theta() const { return theta_; }
    const CanonicalForm& canon() const { return canon_; }
    int dim() const { return theta_.dim(); }

private:
    SkewMatrix theta_;
    CanonicalForm canon_;
};

/// √det S(zΘ) as the product over blocks of S(izα_j) = zα_j / sinh(zα_j).
/// Each factor is evaluated on the principal branch and stays off (-∞, 0]
/// for Re z > 0, so the product is continuous in z.
inline cplx sqrt_det_S(const SpecfunContext& ctx, cplx z)
{
    detail::require_right_half_plane(z, "sqrt_det_S");
    cplx out = 1.0;
    for (double a : ctx.canon().alphas) out *= detail::w_over_sinh(z * a);
    return out;
}

/// ⟨R(zΘ)s, s⟩ evaluated in the adapted basis: each block contributes
/// zα_j coth(zα_j) times the squared length of the projection of s onto
/// that block, the null block contributes its squared length.
inline cplx R_quadratic(const SpecfunContext& ctx, cplx z, const Eigen::VectorXd& s)
{
    detail::require_right_half_plane(z, "R_quadratic");
    detail::require(s.size() == ctx.dim(), "R_quadratic: vector length must equal dim");
    const CanonicalForm& cf = ctx.canon();
    const Eigen::VectorXd u = cf.O * s;
    cplx out = 0.0;
    for (int j = 0; j < cf.k; ++j) {
        const double r2 = u(2 * j) * u(2 * j) + u(2 * j + 1) * u(2 * j + 1);
        out += detail::w_coth(z * cf.alphas[j]) * r2;
    }
    out += u.tail(cf.dim() - 2 * cf.k).squaredNorm();
    return out;
}

/// Dominating profile h_z(y) = (4π|sinh z|)^{-1/2} exp(-Re coth(z) y² / 4).
inline double h_profile(cplx z, double y)
{
    detail::require_right_half_plane(z, "h_profile");
    // |sinh z| = e^{Re z} |1 - e^{-2z}| / 2
    const double one_minus = std::abs(1.0 - std::exp(-2.0 * z));
    const double amp = std::exp(-0.5 * z.real()) / std::sqrt(2.0 * std::numbers::pi * one_minus);
    return amp * std::exp(-0.25 * detail::coth_right(z).real() * y * y);
}

/// h_z'(y) = -(Re coth(z) / 2) y h_z(y).
inline double h_profile_derivative(cplx z, double y)
{
    return -0.5 * detail::coth_right(z).real() * y * h_profile(z, y);
}

/// ‖h_z ⊗ h_z‖_{L¹(ℝ²)} = |sinh z| / (sinh(Re z) cosh(Re z)).
inline double g_l1_norm(cplx z)
{
    detail::require_right_half_plane(z, "g_l1_norm");
    const double x = z.real();
    const double num = 2.0 * std::exp(-x) * std::abs(1.0 - std::exp(-2.0 * z));
    return num / (1.0 - std::exp(-4.0 * x));
}

/// cos(arg z) e^{α Re z} ‖g_z‖₁, the square part of the square-max bound.
inline double weighted_g_l1_norm(cplx z, double alpha = 1.0)
{
    return std::cos(std::arg(z)) * std::exp(alpha * z.real()) * g_l1_norm(z);
}

/// Log-radial by angular sample grid of the sector |arg z| <= max_arg with
/// |z| in [r_min, r_max]; radial index outermost.
inline std::vector<cplx> sector_grid(int n_radial = 20, int n_angular = 17, double r_min = 0.05,
                                     double r_max = 20.0, double max_arg = 0.45 * std::numbers::pi)
{
    detail::require(n_radial >= 1 && n_angular >= 1, "sector_grid: counts must be positive");
    detail::require(r_min > 0.0 && r_max >= r_min, "sector_grid: need 0 < r_min <= r_max");
    detail::require(max_arg >= 0.0 && max_arg < 0.5 * std::numbers::pi,
                    "sector_grid: max_arg must lie in [0, pi/2)");
    std::vector<cplx> zs;
    zs.reserve(static_cast<std::size_t>(n_radial) * n_angular);
    for (int i = 0; i < n_radial; ++i) {
        const double r = n_radial == 1 ? r_min
                                       : r_min * std::pow(r_max / r_min, double(i) / (n_radial - 1));
        for (int j = 0; j < n_angular; ++j) {
            const double phi = n_angular == 1 ? 0.0 : -max_arg + 2.0 * max_arg * j / (n_angular - 1);
            zs.push_back(std::polar(r, phi));
        }
    }
    return zs;
}

} // namespace thetalab
