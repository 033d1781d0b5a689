#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "grid.hpp"
#include "gridop.hpp"
#include "kernel.hpp"
#include "skewform.hpp"
#include "twistcal.hpp"

namespace thetalab {

/// The symbol f of the Moyal-plane element λ_Θ(f) = ∫ f(s) λ_{Θ,s} ds.
class MoyalSymbol {
public:
    MoyalSymbol(GridField f, SkewMatrix theta) : f_(std::move(f)), theta_(std::move(theta))
    {
        detail::require(f_.meta().n == theta_.dim(), "MoyalSymbol: grid dimension does not match theta");
    }

    const GridField& field() const { return f_; }
    const SkewMatrix& theta() const { return theta_; }
    int dim() const { return theta_.dim(); }

private:
    GridField f_;
    SkewMatrix theta_;
};

namespace detail {

// e^{(i/2)⟨s, Θt⟩} ξ(t - s) with ξ read periodically.
inline GridField modulated_shift(const SkewMatrix& theta, const Eigen::VectorXd& s, const GridField& xi,
                                 const char* who)
{
    const GridMeta& m = xi.meta();
    detail::require(m.n == theta.dim(), std::string(who) + ": grid dimension does not match theta");
    const std::vector<int> steps = grid_steps(m, s, who);
    const Eigen::VectorXd row = 0.5 * theta.matrix().transpose() * s; // ⟨s, Θt⟩ = (Θᵀs)·t
    GridField out(m);
    for (std::size_t a = 0; a < m.size(); ++a) {
        std::vector<int> mi = m.multi_index(a);
        const Eigen::VectorXd t = m.point(a);
        for (int k = 0; k < m.n; ++k) mi[k] -= steps[k];
        out[a] = std::polar(1.0, row.dot(t)) * xi[m.flat_index(mi)];
    }
    return out;
}

} // namespace detail

/// (λ_{Θ,s} ξ)(t) = e^{(i/2)⟨s, Θt⟩} ξ(t - s) for an on-grid s. Unitary on
/// the discrete ℓ².
inline GridField lambda_action(const SkewMatrix& theta, const Eigen::VectorXd& s, const GridField& xi)
{
    return detail::modulated_shift(theta, s, xi, "lambda_action");
}

/// τ_Θ(λ_Θ(f)) = f(0).
inline cplx trace(const MoyalSymbol& m) { return m.field().at_origin(); }

/// e^{itX_k} on symbols: f ↦ e^{(i/2)t(Θs)_k} f(s - t e_k), t on-grid.
inline MoyalSymbol X_group(const SkewMatrix& theta, int k, double t, const MoyalSymbol& m)
{
    detail::require(k >= 0 && k < theta.dim(), "X_group: axis out of range");
    detail::require(theta.matrix() == m.theta().matrix(), "X_group: theta does not match the symbol");
    const GridField& f = m.field();
    const GridMeta& g = f.meta();
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(g.n);
    shift(k) = t;
    const int step = detail::grid_steps(g, shift, "X_group")[k];
    GridField out(g);
    for (std::size_t a = 0; a < g.size(); ++a) {
        const Eigen::VectorXd s = g.point(a);
        std::vector<int> mi = g.multi_index(a);
        mi[k] -= step;
        out[a] = std::polar(1.0, 0.5 * t * theta.matrix().row(k).dot(s)) * f[g.flat_index(mi)];
    }
    return {out, m.theta()};
}

/// e^{it∂_k} on symbols: f ↦ e^{its_k} f(s).
inline MoyalSymbol D_group(int k, double t, const MoyalSymbol& m)
{
    detail::require(k >= 0 && k < m.dim(), "D_group: axis out of range");
    const GridField& f = m.field();
    const GridMeta& g = f.meta();
    GridField out(g);
    for (std::size_t a = 0; a < g.size(); ++a) out[a] = std::polar(1.0, t * g.coord(g.axis_index(a, k))) * f[a];
    return {out, m.theta()};
}

/// Largest phase errors of the commutation relations
///   e^{isX_j} e^{itX_k} = e^{istΘ_jk} e^{itX_k} e^{isX_j},
///   e^{is∂_j} e^{it∂_k} = e^{it∂_k} e^{is∂_j},
///   e^{it∂_k} e^{isX_j} = e^{itsδ_jk} e^{isX_j} e^{it∂_k},
/// each measured as max |lhs - rhs| / max |f|.
struct RelationErrors {
    double xx = 0.0;
    double dd = 0.0;
    double dx = 0.0;
    int cases = 0;
};

/// Random symbols supported well inside the box, random axes and on-grid
/// shifts of at most 3 steps, on a 16^d grid with L = 4.
inline RelationErrors relation_phase_errors(const SkewMatrix& theta, int cases = 100, std::uint64_t seed = 42)
{
    detail::require(cases >= 1, "relation_phase_errors: cases must be >= 1");
    const int d = theta.dim();
    detail::require(d >= 1 && d <= 3, "relation_phase_errors: dimension must be 1, 2 or 3");
    const GridMeta g(d, 16, 4.0);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> axis(0, d - 1), step(-3, 3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto diff = [](const MoyalSymbol& a, const MoyalSymbol& b) {
        return (a.field().values() - b.field().values()).cwiseAbs().maxCoeff();
    };
    RelationErrors r;
    r.cases = cases;
    for (int c = 0; c < cases; ++c) {
        // random complex values on the central half of the box, zero elsewhere
        GridField f(g);
        for (std::size_t a = 0; a < g.size(); ++a) {
            bool inside = true;
            for (int k = 0; k < d; ++k) {
                const int ak = g.axis_index(a, k);
                inside = inside && ak >= g.N / 4 && ak < 3 * g.N / 4;
            }
            if (inside) f[a] = cplx(unit(rng), unit(rng));
        }
        const MoyalSymbol m(f, theta);
        const double scale = f.values().cwiseAbs().maxCoeff();
        const int j = axis(rng), k = axis(rng);
        const double s = step(rng) * g.h(), t = step(rng) * g.h();
        const double ts = unit(rng) * 2.0, tt = unit(rng) * 2.0; // free parameters of the ∂ groups

        const MoyalSymbol lhs_xx = X_group(theta, j, s, X_group(theta, k, t, m));
        MoyalSymbol rhs_xx = X_group(theta, k, t, X_group(theta, j, s, m));
        const cplx pxx = std::polar(1.0, s * t * theta(j, k));
        r.xx = std::max(r.xx, diff(lhs_xx, {pxx * rhs_xx.field(), theta}) / scale);

        const MoyalSymbol lhs_dd = D_group(j, ts, D_group(k, tt, m));
        const MoyalSymbol rhs_dd = D_group(k, tt, D_group(j, ts, m));
        r.dd = std::max(r.dd, diff(lhs_dd, rhs_dd) / scale);

        const MoyalSymbol lhs_dx = D_group(k, tt, X_group(theta, j, s, m));
        const MoyalSymbol rhs_dx = X_group(theta, j, s, D_group(k, tt, m));
        const cplx pdx = std::polar(1.0, j == k ? tt * s : 0.0);
        r.dx = std::max(r.dx, diff(lhs_dx, {pdx * rhs_dx.field(), theta}) / scale);
    }
    return r;
}

/// Θ' = [[Θ, -I], [I, 0]], the matrix of the 2d-tuple (X_1..X_d, ∂_1..∂_d).
inline SkewMatrix moyal_theta_prime(const SkewMatrix& theta)
{
    const int d = theta.dim();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    T.topLeftCorner(d, d) = theta.matrix();
    T.topRightCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    T.bottomLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
    return SkewMatrix(T);
}

/// Symbol-level generators on a d-dimensional grid: X_k is the universal
/// generator ½(Θs)_k - P_k and ∂_k is multiplication by s_k.
inline GeneratorTuple oscillator_tuple(const SkewMatrix& theta, const GridMeta& meta, Stencil s = Stencil::Fourth)
{
    GeneratorTuple t = build_universal_tuple(theta, meta, s);
    for (int k = 0; k < meta.n; ++k) t.generators.push_back({detail::axis_coordinates(meta, k), -1, 0.0});
    return t;
}

struct OscillatorResult {
    OperatorMatrix op;
    SpectrumReport report; ///< gap measured against α(Θ')
};

/// Σ_k (X_k² + ∂_k²) on the symbol grid with its spectrum.
inline OscillatorResult harmonic_oscillator(const SkewMatrix& theta, const GridMeta& meta,
                                            Stencil s = Stencil::Fourth)
{
    detail::require(theta.dim() == 1 || theta.dim() == 2, "harmonic_oscillator: d must be 1 or 2");
    detail::require(meta.n == theta.dim(), "harmonic_oscillator: grid dimension does not match theta");
    OscillatorResult r{sum_of_squares(oscillator_tuple(theta, meta, s)), {}};
    r.report = spectrum(r.op, moyal_theta_prime(theta));
    return r;
}

/// The d = 1 Moyal pair (X, ∂) as a finite Weyl system on ℤ_N with step
/// h = √(4π/N): X shifts by one site per step, ∂ multiplies by e^{ihs}.
/// The relation matrix is Θ' = [[0, -1], [1, 0]] and
/// π_u = e^{(i/2)u₁u₂} e^{iu₁X} e^{iu₂∂}.
inline FiniteWeylSystem finite_weyl_system(int N)
{
    detail::require(N >= 2, "finite_weyl_system: N must be >= 2");
    const double h = std::sqrt(4.0 * std::numbers::pi / N);
    FiniteWeylSystem w{moyal_theta_prime(SkewMatrix::zero(1)), N, h, N, {}};
    w.element = [N, h](const std::vector<int>& u) {
        detail::require(u.size() == 2, "finite_weyl_system: lattice index must have two entries");
        const double u1 = u[0] * h, u2 = u[1] * h;
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(N, N);
        const cplx pre = std::polar(1.0, 0.5 * u1 * u2);
        for (int m = 0; m < N; ++m) {
            // (π_u f)(m) = pre · e^{iu₂ s_{m-u₁}} f(m - u₁), s_j = j h
            const int src = ((m - u[0]) % N + N) % N;
            P(m, src) = pre * std::polar(1.0, u2 * (m - u[0]) * h);
        }
        return P;
    };
    return w;
}

/// exp(-t 𝒜) f for the d = 1 oscillator through the kernel of Θ':
///   T_t f(s) = Σ_{u₁} h ∫ p_t(u₁, u₂) e^{(i/2)u₁u₂} e^{iu₂(s - u₁)} f(s - u₁) du₂,
/// with the u₂ integral by a trapezoid rule of `nodes` points on the
/// kernel box and f taken as zero outside the grid.
inline GridField oscillator_kernel_semigroup(double t, const GridField& f, int nodes = 2048)
{
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("oscillator_kernel_semigroup: t must be finite and > 0");
    const GridMeta& m = f.meta();
    detail::require(m.n == 1, "oscillator_kernel_semigroup: field must be one-dimensional");
    detail::require(nodes >= 16, "oscillator_kernel_semigroup: need at least 16 nodes");
    const KernelSpec spec(moyal_theta_prime(SkewMatrix::zero(1)));
    const int N = m.N;
    const double h = m.h();
    const double L = detail::kernel_box(t, 0.25 / std::tanh(t));
    const double du = 2.0 * L / nodes;
    // kernel table over (u₁ grid offset, u₂ node), trapezoid weights folded in
    Eigen::MatrixXcd P(N, nodes + 1);
    parallel_for(std::size_t(N), [&](std::size_t b) {
        Eigen::VectorXd u(2);
        u(0) = (int(b) - N / 2) * h;
        for (int k = 0; k <= nodes; ++k) {
            u(1) = -L + k * du;
            P(Eigen::Index(b), k) = ((k == 0 || k == nodes) ? 0.5 : 1.0) * du * p_kernel(spec, t, u);
        }
    });
    GridField out(m);
    parallel_for(m.size(), [&](std::size_t a) {
        const double s = m.coord(int(a));
        cplx acc = 0.0;
        for (int b = 0; b < N; ++b) {
            const int src = int(a) - (b - N / 2);
            if (src < 0 || src >= N || f[std::size_t(src)] == cplx(0.0)) continue;
            const double w = s - 0.5 * (b - N / 2) * h;
            cplx integral = 0.0;
            for (int k = 0; k <= nodes; ++k) integral += P(b, k) * std::polar(1.0, (-L + k * du) * w);
            acc += h * integral * f[std::size_t(src)];
        }
        out[a] = acc;
    }, 4);
    return out;
}

} // namespace thetalab
