#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "grid.hpp"
#include "gridop.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"
#include "twistcal.hpp"

namespace thetalab {

// ---------------------------------------------------------------------------
// Laplace-transform measures and the Hille–Phillips calculus

struct LaplaceAtom {
    double t = 0.0;
    cplx w = 0.0;
};

/// Density part of a measure: dμ = rho(t) dt on [0, t_max].
struct LaplaceDensity {
    std::function<cplx(double)> rho;
    double t_max = 0.0;
};

/// How the density part is turned into atoms.
struct LaplaceRule {
    /// Below this time kernels are not resolved by the grid; the density on
    /// [0, 2a] is mapped onto atoms at 0, a, 2a by quadratic interpolation.
    /// Zero disables the mapping.
    double resolved_time = 0.0;
    int nodes_per_panel = 8;
    double first_width = 0.25; ///< width of the first Gauss panel
    double max_width = 4.0;    ///< panel widths double up to this cap
};

/// A finite measure on [0, ∞): point masses plus an optional density.
class LaplaceMeasure {
public:
    static LaplaceMeasure zero() { return {}; }

    static LaplaceMeasure dirac(double t0, cplx w = 1.0)
    {
        LaplaceMeasure m;
        m.add_atom(t0, w);
        return m;
    }

    /// w e^{-ct} dt, whose Laplace transform is w / (c + λ). Truncated where
    /// the density falls below e^{-40} of its peak.
    static LaplaceMeasure exponential(double c, cplx w = 1.0)
    {
        detail::require(c > 0.0, "LaplaceMeasure::exponential: rate must be positive");
        LaplaceMeasure m;
        m.set_density([c, w](double t) { return w * std::exp(-c * t); }, 40.0 / c);
        return m;
    }

    LaplaceMeasure& add_atom(double t, cplx w)
    {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("LaplaceMeasure: atom time must be finite and >= 0");
        atoms_.push_back({t, w});
        return *this;
    }

    LaplaceMeasure& set_density(std::function<cplx(double)> rho, double t_max)
    {
        if (!(t_max > 0.0) || !std::isfinite(t_max))
            throw ValidationError("LaplaceMeasure: density support must be a finite positive interval");
        density_ = LaplaceDensity{std::move(rho), t_max};
        return *this;
    }

    const std::vector<LaplaceAtom>& atoms() const { return atoms_; }
    const std::optional<LaplaceDensity>& density() const { return density_; }

    /// Atoms approximating the measure under the given rule.
    std::vector<LaplaceAtom> discretize(const LaplaceRule& rule = {}) const
    {
        std::vector<LaplaceAtom> out = atoms_;
        if (!density_) return out;
        const auto& rho = density_->rho;
        const double T = density_->t_max;
        double start = 0.0;
        const double a = rule.resolved_time;
        if (a > 0.0) {
            const double end = std::min(2.0 * a, T);
            auto moment = [&](int k) {
                return composite_gauss([&](double t) {
                    const double s = t / a;
                    const double l = k == 0 ? (s - 1.0) * (s - 2.0) / 2.0
                                   : k == 1 ? -s * (s - 2.0)
                                            : s * (s - 1.0) / 2.0;
                    return rho(t) * l;
                }, 0.0, end, 4, 16);
            };
            for (int k = 0; k < 3; ++k) out.push_back({k * a, moment(k)});
            start = end;
        }
        const GaussRule g = gauss_legendre(rule.nodes_per_panel);
        double width = rule.first_width;
        for (double lo = start; lo < T;) {
            const double hi = std::min(T, lo + width);
            const double half = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                const double t = lo + half * (g.nodes[i] + 1.0);
                out.push_back({t, half * g.weights[i] * rho(t)});
            }
            lo = hi;
            width = std::min(2.0 * width, rule.max_width);
        }
        return out;
    }

    /// Σ|w| over the atoms of a fine discretization.
    double total_variation() const
    {
        double tv = 0.0;
        for (const auto& a : discretize({0.0, 16})) tv += std::abs(a.w);
        return tv;
    }

    /// The Laplace transform ∫ e^{-tλ} dμ(t), by quadrature.
    cplx transform(double lambda) const
    {
        cplx s = 0.0;
        for (const auto& a : discretize({0.0, 16})) s += a.w * std::exp(-a.t * lambda);
        return s;
    }

private:
    std::vector<LaplaceAtom> atoms_;
    std::optional<LaplaceDensity> density_;
};

/// A semigroup realized on grid fields: (t, x) ↦ T_t x.
using SemigroupApply = std::function<GridField(double, const GridField&)>;

/// f(A)_HP x = ∫ T_t x dμ(t) = Σ w_i T_{t_i} x over the discretized measure.
inline GridField hille_phillips_apply(const LaplaceMeasure& mu, const SemigroupApply& T, const GridField& x,
                                      const LaplaceRule& rule = {})
{
    GridField out(x.meta());
    for (const auto& a : mu.discretize(rule)) {
        if (a.w == cplx(0.0)) continue;
        out += a.w * (a.t == 0.0 ? x : T(a.t, x));
    }
    return out;
}

/// Hille–Phillips through the grid kernel semigroup of Θ, with the
/// small-time mapping matched to the semigroup's resolved time.
inline GridField hille_phillips_apply(const LaplaceMeasure& mu, const KernelSemigroup& T, const GridField& x,
                                      LaplaceRule rule = {})
{
    rule.resolved_time = T.resolved_time();
    return hille_phillips_apply(mu, SemigroupApply([&T](double t, const GridField& f) { return T(t, f); }), x, rule);
}

namespace detail {

// Replaces atoms with 0 < t < a by the interpolation atoms at 0, a, 2a
// used by KernelSemigroup, then merges nothing: the result is a plain list.
inline std::vector<LaplaceAtom> expand_unresolved(const std::vector<LaplaceAtom>& atoms, double a)
{
    std::vector<LaplaceAtom> out;
    for (const auto& at : atoms) {
        if (!(at.t > 0.0 && at.t < a)) {
            out.push_back(at);
            continue;
        }
        const double s = at.t / a;
        out.push_back({0.0, at.w * (s - 1.0) * (s - 2.0) / 2.0});
        out.push_back({a, at.w * (-s * (s - 2.0))});
        out.push_back({2.0 * a, at.w * s * (s - 1.0) / 2.0});
    }
    return out;
}

inline GridField symbol_from_atoms(const std::vector<LaplaceAtom>& atoms, const KernelSpec& spec, const GridMeta& meta)
{
    GridField g(meta);
    for (const auto& a : atoms) {
        if (a.w == cplx(0.0)) continue;
        if (a.t == 0.0) g += a.w * GridField::delta(meta);
        else g += a.w * sample_kernel(spec, a.t, meta);
    }
    return g;
}

} // namespace detail

/// The kernel g = ∫ p_t dμ(t) sampled on the grid, so that
/// (2π)^{n/2} g is the frequency symbol whose Weyl operator equals f(𝒜)_HP.
/// Atoms at t = 0 become the discrete point mass. The density quadrature is
/// repeated with twice the nodes; a relative ℓ¹ change above 1e-6 is
/// reported as non-convergence.
inline GridField kernel_symbol_extract(const LaplaceMeasure& mu, const SkewMatrix& theta, const GridMeta& meta,
                                       LaplaceRule rule = {})
{
    detail::require(theta.dim() == meta.n, "kernel_symbol_extract: grid dimension does not match theta");
    if (rule.resolved_time == 0.0) rule.resolved_time = meta.h() * meta.h();
    const KernelSpec spec(theta);
    const double a = rule.resolved_time;
    GridField g = detail::symbol_from_atoms(detail::expand_unresolved(mu.discretize(rule), a), spec, meta);
    if (mu.density()) {
        LaplaceRule fine = rule;
        fine.nodes_per_panel *= 2;
        const GridField g2 = detail::symbol_from_atoms(detail::expand_unresolved(mu.discretize(fine), a), spec, meta);
        const double scale = std::max(g2.l1_norm(), 1e-300);
        if ((g - g2).l1_norm() > 1e-6 * scale)
            throw NumericalError("kernel_symbol_extract: density quadrature did not converge");
    }
    return g;
}

/// Applies the symbol-route operator: weyl_apply with â = (2π)^{n/2} g.
inline GridField apply_kernel_symbol(const SkewMatrix& theta, const GridField& g, const GridField& x)
{
    const double scale = std::pow(2.0 * std::numbers::pi, 0.5 * g.meta().n);
    return weyl_apply(CocycleParams(theta), scale * g, x);
}

// ---------------------------------------------------------------------------
// Spectral multiplier symbols

namespace detail {

// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v)
{
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace detail

/// A scalar function on (0, ∞), either closed-form or sampled.
class MultiplierSymbol {
public:
    enum class Kind { ClosedForm, Sampled };

    static MultiplierSymbol closed_form(std::string id, std::function<cplx(double)> f,
                                        double hormander_order = std::numeric_limits<double>::infinity())
    {
        MultiplierSymbol m;
        m.kind_ = Kind::ClosedForm;
        m.id_ = std::move(id);
        m.f_ = std::move(f);
        m.order_ = hormander_order;
        return m;
    }

    /// Piecewise-linear interpolation of samples at increasing positions,
    /// constant beyond the end points.
    static MultiplierSymbol sampled(std::vector<double> lambdas, std::vector<cplx> values)
    {
        detail::require(!lambdas.empty() && lambdas.size() == values.size(), "sampled symbol: bad sample arrays");
        detail::require(std::is_sorted(lambdas.begin(), lambdas.end()), "sampled symbol: positions must increase");
        MultiplierSymbol m;
        m.kind_ = Kind::Sampled;
        m.id_ = "sampled";
        m.f_ = [x = std::move(lambdas), y = std::move(values)](double l) -> cplx {
            if (l <= x.front()) return y.front();
            if (l >= x.back()) return y.back();
            const auto it = std::upper_bound(x.begin(), x.end(), l);
            const std::size_t i = std::size_t(it - x.begin());
            const double s = (l - x[i - 1]) / (x[i] - x[i - 1]);
            return (1.0 - s) * y[i - 1] + s * y[i];
        };
        m.order_ = 0.5;
        return m;
    }

    cplx operator()(double lambda) const { return f_(lambda); }
    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    /// Supremum of the orders s for which the symbol is known to have a
    /// finite Hörmander norm (∞ for smooth symbols with symbol-type decay).
    double hormander_order() const { return order_; }

    /// λ ↦ f(λ / R).
    MultiplierSymbol dilated(double R) const
    {
        detail::require(R > 0.0, "dilated: scale must be positive");
        MultiplierSymbol m = *this;
        m.id_ = id_ + "(/" + detail::format_number(R) + ")";
        m.f_ = [f = f_, R](double l) { return f(l / R); };
        return m;
    }

private:
    Kind kind_ = Kind::ClosedForm;
    std::string id_;
    std::function<cplx(double)> f_;
    double order_ = std::numeric_limits<double>::infinity();
};

/// Bochner–Riesz mean σ_R^ν(λ) = (1 - λ/R)_+^ν.
inline MultiplierSymbol bochner_riesz(double nu, double R)
{
    detail::require(nu > 0.0 && R > 0.0, "bochner_riesz: need nu > 0 and R > 0");
    return MultiplierSymbol::closed_form("br:" + detail::format_number(nu) + "," + detail::format_number(R),
        [nu, R](double l) -> cplx { return l >= R ? 0.0 : std::pow(1.0 - l / R, nu); }, nu + 0.5);
}

/// e^{-tλ}.
inline MultiplierSymbol heat_symbol(double t)
{
    detail::require(t >= 0.0, "heat_symbol: t must be >= 0");
    return MultiplierSymbol::closed_form("exp:" + detail::format_number(t), [t](double l) -> cplx { return std::exp(-t * l); });
}

/// 1 / (c + λ).
inline MultiplierSymbol resolvent_symbol(double c)
{
    detail::require(c > 0.0, "resolvent_symbol: c must be positive");
    return MultiplierSymbol::closed_form("resolvent:" + detail::format_number(c), [c](double l) -> cplx { return 1.0 / (c + l); });
}

/// λ^{iγ} on the principal branch (negative λ allowed).
inline MultiplierSymbol imaginary_power(double gamma = 1.0)
{
    return MultiplierSymbol::closed_form("pow_i:" + detail::format_number(gamma),
        [gamma](double l) -> cplx { return std::pow(cplx(l, 0.0), cplx(0.0, gamma)); });
}

/// The constant 1.
inline MultiplierSymbol unit_symbol()
{
    return MultiplierSymbol::closed_form("one", [](double) -> cplx { return 1.0; });
}

/// Parses "one", "exp:t", "resolvent:c", "br:nu,R", "pow_i" or "pow_i:gamma".
inline MultiplierSymbol parse_symbol(const std::string& spec)
{
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ValidationError("symbol '" + spec + "': bad number '" + s + "'");
        return v;
    };
    if (head == "one" && args.empty()) return unit_symbol();
    if (head == "exp") return heat_symbol(number(args));
    if (head == "resolvent") return resolvent_symbol(number(args));
    if (head == "pow_i") return imaginary_power(args.empty() ? 1.0 : number(args));
    if (head == "br") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw ValidationError("symbol '" + spec + "': expected br:nu,R");
        return bochner_riesz(number(args.substr(0, comma)), number(args.substr(comma + 1)));
    }
    throw ValidationError("unknown symbol '" + spec + "'");
}

/// σ(𝒜 - shift) x through the eigendecomposition.
inline GridField apply_multiplier(const EigenDecomposition& dec, const MultiplierSymbol& sym, const GridField& x,
                                  double shift = 0.0)
{
    return dec.apply_function([&](double l) { return sym(l - shift); }, x);
}

// ---------------------------------------------------------------------------
// Square-max machinery

/// ‖s_z‖₂ = (cos(arg z) e^{Re z} ‖g_z‖₁)^{1/2}.
inline double square_part_norm(cplx z) { return std::sqrt(weighted_g_l1_norm(z, 1.0)); }

namespace detail {

// Half-width beyond which h_z is below e^{-40} of its peak.
inline double profile_extent(cplx z)
{
    return std::sqrt(160.0 / coth_right(z).real());
}

} // namespace detail

/// Total mass of μ_z = 4 y₁y₂ h_z'(y₁) h_z'(y₂) dy₁dy₂ on (0, ∞)², by
/// tensor Gauss–Legendre quadrature.
inline double mu_mass(cplx z)
{
    const double T = detail::profile_extent(z);
    const GaussRule g = gauss_legendre(16);
    const int panels = 24;
    std::vector<double> y, w;
    for (int p = 0; p < panels; ++p) {
        const double lo = T * p / panels, half = 0.5 * T / panels;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            y.push_back(lo + half * (g.nodes[i] + 1.0));
            w.push_back(half * g.weights[i]);
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            s += w[i] * w[j] * 4.0 * y[i] * y[j] * h_profile_derivative(z, y[i]) * h_profile_derivative(z, y[j]);
    return s;
}

/// u(x) = exp(-|x - center|² / (2 σ²)) in the plane.
struct PlaneGaussian {
    double cx = 0.0, cy = 0.0, sigma = 1.0;
    double operator()(double x, double y) const
    {
        return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * sigma * sigma));
    }
    /// ∫_{a}^{b} of the 1-D factor centered at c.
    double segment(double c, double a, double b) const
    {
        const double s = sigma * std::sqrt(2.0);
        return 0.5 * sigma * std::sqrt(2.0 * std::numbers::pi) * (std::erf((b - c) / s) - std::erf((a - c) / s));
    }
};

/// (g_z ∗ u)(x) by trapezoid quadrature over y with g_z = h_z ⊗ h_z.
inline double g_convolve_at(cplx z, const PlaneGaussian& u, double x1, double x2)
{
    const double L = detail::profile_extent(z);
    return trapezoid_box([&](double y1, double y2) {
        return h_profile(z, y1) * h_profile(z, y2) * u(x1 - y1, x2 - y2);
    }, 2, L, 256, 1e-10);
}

/// ∫∫ R¹_{t₁}R²_{t₂}u(x) dμ_z(t₁, t₂), the iterated-average representation of
/// (g_z ∗ u)(x). The box integral of u is evaluated in closed form.
inline double average_representation_at(cplx z, const PlaneGaussian& u, double x1, double x2)
{
    const double T = detail::profile_extent(z);
    // R¹_t R²_s u (x) · 4ts = box integral; μ density carries 4 t s h'(t) h'(s).
    auto line = [&](double c, double x) {
        return composite_gauss([&](double t) { return u.segment(c, x - t, x + t) * h_profile_derivative(z, t); },
                               0.0, T, 24, 16);
    };
    return line(u.cx, x1) * line(u.cy, x2);
}

/// Result of the pointwise maximal domination check on a grid.
struct DominationReport {
    double max_ratio = 0.0;    ///< max_x sup_z c_z(G_z∗u)(x) / (sup_z c_z m_z · M u(x))
    double lp_ratio = 0.0;     ///< ‖sup_z c_z G_z∗u‖_p / ‖u‖_p
    double mass_bound = 0.0;   ///< sup_z c_z m_z with m_z the discrete mass of G_z
};

/// Discrete form of the square-max maximal bound in the plane. For each z
/// the sampled profile h_z is truncated at half the box and its layer-cake
/// decomposition gives (G_z ∗ u)(x) <= m_z · M u(x) exactly, where M is the
/// discrete strong maximal function over centered boxes. u must be real
/// and nonnegative.
inline DominationReport maximal_domination(const std::vector<cplx>& zs, const GridField& u, double p)
{
    const GridMeta& m = u.meta();
    detail::require(m.n == 2, "maximal_domination: grid must be two-dimensional");
    detail::require(p >= 1.0, "maximal_domination: p must be >= 1");
    const int N = m.N, K = N / 2 - 1;
    const double h = m.h();
    Eigen::MatrixXd U(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const cplx v = u[std::size_t(a) * N + b];
            detail::require(v.imag() == 0.0 && v.real() >= 0.0, "maximal_domination: u must be nonnegative");
            U(a, b) = v.real();
        }
    auto wrap = [N](int i) { return ((i % N) + N) % N; };

    // Periodic 2-D prefix sums on a 3x3 tiling for O(1) box sums.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3 * N + 1, 3 * N + 1);
    for (int a = 0; a < 3 * N; ++a)
        for (int b = 0; b < 3 * N; ++b)
            S(a + 1, b + 1) = U(a % N, b % N) + S(a, b + 1) + S(a + 1, b) - S(a, b);
    Eigen::MatrixXd maximal = Eigen::MatrixXd::Zero(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            double best = 0.0;
            for (int j1 = 0; j1 <= K; ++j1)
                for (int j2 = 0; j2 <= K; ++j2) {
                    const int a0 = a + N - j1, a1 = a + N + j1 + 1, b0 = b + N - j2, b1 = b + N + j2 + 1;
                    const double box = S(a1, b1) - S(a0, b1) - S(a1, b0) + S(a0, b0);
                    best = std::max(best, box / ((2.0 * j1 + 1.0) * (2.0 * j2 + 1.0)));
                }
            maximal(a, b) = best;
        }

    DominationReport r;
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(N, N);
    for (cplx z : zs) {
        const double c = std::cos(std::arg(z)) * std::exp(z.real());
        std::vector<double> prof(K + 1);
        double line_mass = 0.0;
        for (int k = 0; k <= K; ++k) {
            prof[k] = h_profile(z, k * h);
            line_mass += (k == 0 ? 1.0 : 2.0) * h * prof[k];
        }
        r.mass_bound = std::max(r.mass_bound, c * line_mass * line_mass);
        // separable discrete convolution, first along axis 1 then axis 0
        Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(N, N), conv = Eigen::MatrixXd::Zero(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                double s = 0.0;
                for (int k = -K; k <= K; ++k) s += prof[std::abs(k)] * U(a, wrap(b - k));
                tmp(a, b) = h * s;
            }
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                double s = 0.0;
                for (int k = -K; k <= K; ++k) s += prof[std::abs(k)] * tmp(wrap(a - k), b);
                conv(a, b) = h * s;
            }
        lhs = lhs.cwiseMax(c * conv);
    }
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            if (lhs(a, b) > 0.0) r.max_ratio = std::max(r.max_ratio, lhs(a, b) / (r.mass_bound * maximal(a, b)));
    GridField l(m);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) l[std::size_t(a) * N + b] = lhs(a, b);
    const double un = u.lp_norm(p);
    r.lp_ratio = un > 0.0 ? l.lp_norm(p) / un : 0.0;
    return r;
}

struct SqmaxRow {
    cplx z;
    double square_norm = 0.0; ///< ‖s_z‖₂
    double g_l1 = 0.0;        ///< closed form ‖g_z‖₁
    double mass = 0.0;        ///< quadrature mass of μ_z
};

struct SqmaxReport {
    std::vector<SqmaxRow> rows;
    double max_square_norm = 0.0;
    double max_mass_error = 0.0;           ///< max |μ_z mass - ‖g_z‖₁|
    double max_representation_error = 0.0; ///< max over sample points
    DominationReport domination;
    bool pass = false;
};

/// Cap on ‖s_z‖₂ over the sampled sector used as the finiteness proxy.
inline constexpr double kSquarePartCap = 2.0;

/// Square-max checks over z samples: square-part norms, the μ_z mass
/// identity, the iterated-average representation at five seeded points and
/// the maximal domination on a 64² grid, L = 8.
inline SqmaxReport sqmax_verify(const std::vector<cplx>& zs, double p, std::uint64_t seed = 42)
{
    detail::require(p > 1.0 && std::isfinite(p), "sqmax_verify: p must lie in (1, ∞)");
    detail::require(!zs.empty(), "sqmax_verify: need at least one z");
    for (cplx z : zs) detail::require_right_half_plane(z, "sqmax_verify");
    SqmaxReport r;
    r.rows.resize(zs.size());
    parallel_for(zs.size(), [&](std::size_t i) {
        const cplx z = zs[i];
        r.rows[i] = SqmaxRow{z, square_part_norm(z), g_l1_norm(z), mu_mass(z)};
    }, 1);
    for (const auto& row : r.rows) {
        r.max_square_norm = std::max(r.max_square_norm, row.square_norm);
        r.max_mass_error = std::max(r.max_mass_error, std::abs(row.mass - row.g_l1));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    const PlaneGaussian u{0.3, -0.2, 0.8};
    const std::size_t rep = std::min<std::size_t>(2, zs.size());
    for (int k = 0; k < 5; ++k) {
        const double x1 = pos(rng), x2 = pos(rng);
        for (std::size_t i = 0; i < rep; ++i) {
            const double a = g_convolve_at(zs[i], u, x1, x2);
            const double b = average_representation_at(zs[i], u, x1, x2);
            r.max_representation_error = std::max(r.max_representation_error, std::abs(a - b));
        }
    }
    const GridMeta grid(2, 64, 8.0);
    GridField ug = GridField::sample(grid, [&](const Eigen::VectorXd& x) { return cplx(u(x(0), x(1))); });
    r.domination = maximal_domination(zs, ug, p);
    r.pass = r.max_square_norm <= kSquarePartCap && r.max_mass_error <= 1e-6 &&
             r.max_representation_error <= 1e-4 && r.domination.max_ratio <= 1.0 + 1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// Square functions of the complex-time semigroup

/// ‖(Σ_j |c_j T_{z_j} f_j|²)^{1/2}‖_p / ‖(Σ_j |f_j|²)^{1/2}‖_p with
/// c_j = cos(arg z_j) e^{α Re z_j} and T_z f = p_z ∗_Θ f, for a 2x2 Θ.
inline double square_function_test(const SkewMatrix& theta, const std::vector<cplx>& zs,
                                   const std::vector<GridField>& fs, double p)
{
    if (!(p >= 2.0) || !std::isfinite(p)) throw ValidationError("square_function_test: p must be finite and >= 2");
    detail::require(theta.dim() == 2, "square_function_test: theta must be 2x2");
    detail::require(!zs.empty() && zs.size() == fs.size(), "square_function_test: need matching z and f lists");
    const GridMeta& m = fs.front().meta();
    const KernelSpec spec(theta);
    const CocycleParams cp(theta);
    Eigen::VectorXd num = Eigen::VectorXd::Zero(Eigen::Index(m.size()));
    Eigen::VectorXd den = Eigen::VectorXd::Zero(Eigen::Index(m.size()));
    for (std::size_t j = 0; j < zs.size(); ++j) {
        detail::require(fs[j].meta() == m, "square_function_test: fields must share one grid");
        const ComplexTime z(zs[j]);
        const double c = std::cos(z.arg()) * std::exp(spec.alpha() * z.re());
        const GridField Tf = twisted_convolve(cp, sample_kernel(spec, z, m), fs[j]);
        num += (c * Tf.values()).cwiseAbs2();
        den += fs[j].values().cwiseAbs2();
    }
    GridField a(m, num.cwiseSqrt().cast<cplx>()), b(m, den.cwiseSqrt().cast<cplx>());
    const double d = b.lp_norm(p);
    detail::require(d > 0.0, "square_function_test: all fields vanish");
    return a.lp_norm(p) / d;
}

/// Recorded cap for the randomized square-function ratio.
inline constexpr double kSquareFunctionCap = 4.0;

struct SquareFunctionReport {
    std::vector<double> ratios;
    double max = 0.0, min = 0.0;
    double cap = kSquareFunctionCap;
    bool stable = false;    ///< max / min < 10
    bool below_cap = false; ///< max <= cap
};

/// One random draw: `per_draw` times z with |z| log-uniform in [1, 4] and
/// |arg z| <= 0.45π, and fields made of 1 to 3 complex Gaussian bumps with
/// centers in [-4, 4]² and widths in [0.5, 1.5].
inline void square_function_draw(std::mt19937_64& rng, const GridMeta& meta, int per_draw,
                                 std::vector<cplx>& zs, std::vector<GridField>& fs)
{
    std::uniform_real_distribution<double> logr(0.0, std::log(4.0)), ang(-0.45 * std::numbers::pi, 0.45 * std::numbers::pi),
        ctr(-4.0, 4.0), wid(0.5, 1.5), ph(0.0, 2.0 * std::numbers::pi), amp(0.2, 1.0);
    std::uniform_int_distribution<int> bumps(1, 3);
    zs.clear();
    fs.clear();
    for (int j = 0; j < per_draw; ++j) {
        zs.push_back(std::polar(std::exp(logr(rng)), ang(rng)));
        GridField f(meta);
        const int nb = bumps(rng);
        for (int b = 0; b < nb; ++b) {
            Eigen::VectorXd c(meta.n);
            for (int k = 0; k < meta.n; ++k) c(k) = ctr(rng);
            const double w = wid(rng);
            const cplx a = std::polar(amp(rng), ph(rng));
            f += gaussian_field(meta, c, w, a);
        }
        fs.push_back(std::move(f));
    }
}

/// Square-function ratios over seeded random draws on the default grid
/// (48², L = 12).
inline SquareFunctionReport square_function_scan(const SkewMatrix& theta, double p, int draws = 50, int per_draw = 4,
                                                 std::uint64_t seed = 42, GridMeta meta = GridMeta(2, 48, 12.0))
{
    detail::require(draws >= 1 && per_draw >= 1, "square_function_scan: counts must be positive");
    std::mt19937_64 rng(seed);
    SquareFunctionReport r;
    std::vector<cplx> zs;
    std::vector<GridField> fs;
    for (int d = 0; d < draws; ++d) {
        square_function_draw(rng, meta, per_draw, zs, fs);
        r.ratios.push_back(square_function_test(theta, zs, fs, p));
    }
    r.max = *std::max_element(r.ratios.begin(), r.ratios.end());
    r.min = *std::min_element(r.ratios.begin(), r.ratios.end());
    r.stable = r.min > 0.0 && r.max / r.min < 10.0;
    r.below_cap = r.max <= r.cap;
    return r;
}

} // namespace thetalab
