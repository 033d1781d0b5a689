#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "error.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "skewform.hpp"

namespace thetalab {

/// Parameters of the cocycle σ_Θ(s, t) = e^{(i/2)⟨s, Θt⟩}.
struct CocycleParams {
    SkewMatrix theta;
    explicit CocycleParams(SkewMatrix th) : theta(std::move(th)) {}
    int dim() const { return theta.dim(); }
};

/// Mass fraction near the box edge above which a field is considered to
/// feel the periodic wrap.
inline constexpr double kBoundaryMassThreshold = 1e-8;

/// σ_Θ(s, t) = exp((i/2) s^T Θ t).
inline cplx sigma(const CocycleParams& c, const Eigen::VectorXd& s, const Eigen::VectorXd& t)
{
    detail::require(s.size() == c.dim() && t.size() == c.dim(), "sigma: vector length must equal dim");
    return std::polar(1.0, 0.5 * s.dot(c.theta.matrix() * t));
}

namespace detail {

inline void require_same_grid(const GridField& a, const GridField& b, int n, const char* who)
{
    if (a.meta() != b.meta()) throw ValidationError(std::string(who) + ": grid geometry mismatch");
    if (a.meta().n != n) throw ValidationError(std::string(who) + ": grid dimension does not match theta");
}

// Multi-indices of every flat index, n entries per point.
inline std::vector<int> index_table(const GridMeta& m)
{
    std::vector<int> t(m.size() * std::size_t(m.n));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (int k = 0; k < m.n; ++k) t[i * std::size_t(m.n) + std::size_t(k)] = m.axis_index(i, k);
    return t;
}

// One factor e^{sign (i/2) Θ_jk x_a y_b} of the bilinear phase, tabulated
// over axis coordinates.
struct PhaseTable {
    int j = 0, k = 0;
    std::vector<cplx> table; // [a * N + b]
};

inline std::vector<PhaseTable> phase_tables(const SkewMatrix& theta, const GridMeta& m, double sign)
{
    std::vector<PhaseTable> out;
    const int N = m.N;
    for (int j = 0; j < m.n; ++j)
        for (int k = 0; k < m.n; ++k) {
            const double th = theta(j, k);
            if (th == 0.0) continue;
            PhaseTable p{j, k, std::vector<cplx>(std::size_t(N) * N)};
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b)
                    p.table[std::size_t(a) * N + b] = std::polar(1.0, sign * 0.5 * th * m.coord(a) * m.coord(b));
            out.push_back(std::move(p));
        }
    return out;
}

// In-place n-dimensional DFT along every axis (inverse is normalized).
inline void fftn(Eigen::VectorXcd& v, const GridMeta& m, bool inverse)
{
    Eigen::FFT<double> fft;
    const int N = m.N;
    std::vector<cplx> line(N), out(N);
    for (int k = 0; k < m.n; ++k) {
        const std::size_t stride = m.stride(k);
        for (std::size_t base = 0; base < m.size(); ++base) {
            if ((base / stride) % std::size_t(N) != 0) continue;
            for (int a = 0; a < N; ++a) line[a] = v(Eigen::Index(base + std::size_t(a) * stride));
            if (inverse) fft.inv(out, line);
            else fft.fwd(out, line);
            for (int a = 0; a < N; ++a) v(Eigen::Index(base + std::size_t(a) * stride)) = out[a];
        }
    }
}

} // namespace detail

/// Twisted convolution by direct quadrature,
///   (f ∗_Θ g)(x) = h^n Σ_y f(y) g(x - y) e^{-(i/2)⟨x, Θy⟩}.
/// The difference x - y is wrapped periodically into the box; the phase uses
/// the true coordinates of x and y. Cost O(M²) for M grid points.
inline GridField twisted_convolve(const CocycleParams& c, const GridField& f, const GridField& g)
{
    detail::require_same_grid(f, g, c.dim(), "twisted_convolve");
    const GridMeta& m = f.meta();
    const int n = m.n, N = m.N;
    const std::size_t M = m.size();
    const std::vector<int> idx = detail::index_table(m);
    const auto tables = detail::phase_tables(c.theta, m, -1.0);
    std::vector<std::size_t> strides(n);
    for (int k = 0; k < n; ++k) strides[k] = m.stride(k);
    // diff[a * N + b] = axis index of x_a - y_b after wrapping
    std::vector<int> diff(std::size_t(N) * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) diff[std::size_t(a) * N + b] = ((a - b + N / 2) % N + N) % N;

    std::vector<std::size_t> support;
    for (std::size_t b = 0; b < M; ++b)
        if (f[b] != cplx(0.0)) support.push_back(b);

    GridField out(m);
    const double vol = m.cell_volume();
    parallel_for(M, [&](std::size_t a) {
        const int* ai = &idx[a * n];
        cplx acc = 0.0;
        for (std::size_t b : support) {
            const int* bi = &idx[b * n];
            std::size_t gi = 0;
            for (int k = 0; k < n; ++k) gi += strides[k] * std::size_t(diff[std::size_t(ai[k]) * N + bi[k]]);
            cplx term = f[b] * g[gi];
            for (const auto& t : tables) term *= t.table[std::size_t(ai[t.j]) * N + bi[t.k]];
            acc += term;
        }
        out[a] = vol * acc;
    });
    return out;
}

/// Plain periodic convolution h^n Σ_y f(y) g(x - y) via FFT, with the same
/// wrap convention as twisted_convolve. This is the Θ = 0 fast path.
inline GridField circular_convolve_fft(const GridField& f, const GridField& g)
{
    detail::require(f.meta() == g.meta(), "circular_convolve_fft: grid geometry mismatch");
    const GridMeta& m = f.meta();
    // Re-index g so that index j holds g at axis offset j - N/2 from the
    // origin; the wrapped product then lands on the output grid.
    Eigen::VectorXcd gs(Eigen::Index(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto mi = m.multi_index(i);
        for (int& v : mi) v += m.N / 2;
        gs(Eigen::Index(i)) = g[m.flat_index(mi)];
    }
    Eigen::VectorXcd fv = f.values();
    detail::fftn(fv, m, false);
    detail::fftn(gs, m, false);
    Eigen::VectorXcd prod = fv.cwiseProduct(gs);
    detail::fftn(prod, m, true);
    return GridField(m, m.cell_volume() * prod);
}

/// Applies the Fourier multiplier with symbol a(ξ) to f through the DFT,
/// with ξ_k = 2π k / (N h) in standard FFT order on each axis.
inline GridField fft_multiplier(const GridField& f, const std::function<cplx(const Eigen::VectorXd&)>& a)
{
    const GridMeta& m = f.meta();
    Eigen::VectorXcd v = f.values();
    detail::fftn(v, m, false);
    const double dxi = 2.0 * std::numbers::pi / (m.N * m.h());
    for (std::size_t i = 0; i < m.size(); ++i) {
        Eigen::VectorXd xi(m.n);
        for (int k = 0; k < m.n; ++k) {
            const int q = m.axis_index(i, k);
            xi(k) = dxi * (q < m.N / 2 ? q : q - m.N);
        }
        v(Eigen::Index(i)) *= a(xi);
    }
    detail::fftn(v, m, true);
    return GridField(m, v);
}

namespace detail {

// Integer grid steps of an on-grid translation vector.
inline std::vector<int> grid_steps(const GridMeta& m, const Eigen::VectorXd& t, const char* who)
{
    if (t.size() != m.n) throw ValidationError(std::string(who) + ": vector length must equal grid dim");
    std::vector<int> steps(m.n);
    for (int k = 0; k < m.n; ++k) {
        const double q = t(k) / m.h();
        const double r = std::round(q);
        if (!std::isfinite(q) || std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
            throw ValidationError(std::string(who) + ": translation is not a multiple of the grid step");
        steps[k] = static_cast<int>(r);
    }
    return steps;
}

} // namespace detail

/// (e^{it·A} f)(x) = e^{(i/2)⟨t, Θx⟩} f(x - t) for an on-grid t, with f
/// read periodically. Preserves every discrete ℓ^p norm.
inline GridField group_apply(const CocycleParams& c, const Eigen::VectorXd& t, const GridField& f)
{
    const GridMeta& m = f.meta();
    detail::require(m.n == c.dim(), "group_apply: grid dimension does not match theta");
    const std::vector<int> steps = detail::grid_steps(m, t, "group_apply");
    const Eigen::RowVectorXd form = 0.5 * t.transpose() * c.theta.matrix();
    GridField out(m);
    std::vector<int> mi(m.n);
    for (std::size_t a = 0; a < m.size(); ++a) {
        double phase = 0.0;
        std::size_t src = 0;
        for (int k = 0; k < m.n; ++k) {
            const int ak = m.axis_index(a, k);
            phase += form(k) * m.coord(ak);
            src = src * std::size_t(m.N) + std::size_t(((ak - steps[k]) % m.N + m.N) % m.N);
        }
        out[a] = std::polar(1.0, phase) * f[src];
    }
    return out;
}

/// Weyl calculus a(A) f = (2π)^{-n/2} h^n Σ_u â(u) e^{iu·A} f over grid
/// frequencies u, for the universal tuple. Evaluated point by point with
/// the phase e^{(i/2)⟨u, Θx⟩} and a periodic shift by u.
inline GridField weyl_apply(const CocycleParams& c, const GridField& a_hat, const GridField& f)
{
    detail::require_same_grid(a_hat, f, c.dim(), "weyl_apply");
    const GridMeta& m = f.meta();
    const int n = m.n, N = m.N;
    const std::vector<int> idx = detail::index_table(m);
    const auto tables = detail::phase_tables(c.theta, m, +1.0); // [u_j][x_k]
    std::vector<std::size_t> support;
    for (std::size_t u = 0; u < m.size(); ++u)
        if (a_hat[u] != cplx(0.0)) support.push_back(u);
    const double scale = m.cell_volume() * std::pow(2.0 * std::numbers::pi, -0.5 * n);
    GridField out(m);
    parallel_for(m.size(), [&](std::size_t a) {
        const int* ai = &idx[a * n];
        cplx acc = 0.0;
        for (std::size_t u : support) {
            const int* ui = &idx[u * n];
            std::size_t src = 0;
            for (int k = 0; k < n; ++k) {
                const int shift = ui[k] - N / 2; // u_k = shift * h
                src = src * std::size_t(N) + std::size_t(((ai[k] - shift) % N + N) % N);
            }
            cplx term = a_hat[u] * f[src];
            for (const auto& t : tables) term *= t.table[std::size_t(ui[t.j]) * N + ai[t.k]];
            acc += term;
        }
        out[a] = scale * acc;
    });
    return out;
}

/// A finite-dimensional projective representation u ↦ π_u of the lattice
/// (step·ℤ)^n, periodic with the given period, satisfying
/// π_u π_v = σ_Θ(u, v) π_{u+v}.
struct FiniteWeylSystem {
    SkewMatrix theta;
    int period = 0;         ///< lattice points per axis
    double step = 0.0;      ///< lattice spacing
    int space_dim = 0;      ///< size of the matrices π_u
    std::function<Eigen::MatrixXcd(const std::vector<int>&)> element; ///< π at u = step * index
};

struct TransferenceReport {
    double lhs = 0.0;    ///< ‖(2π)^{-n/2} h^n Σ_u â(u) π_u‖
    double rhs = 0.0;    ///< M_A² ‖(2π)^{-n/2} â ∗_Θ ·‖ on the lattice grid
    double m_a = 0.0;    ///< sup_u ‖π_u‖
    double excess = 0.0; ///< max(0, lhs/rhs - 1)
    bool holds = false;  ///< lhs <= rhs (1 + 1e-6)
};

namespace detail {

inline double spectral_norm(const Eigen::MatrixXcd& A)
{
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

} // namespace detail

/// Transference inequality ‖a(A)‖ <= M_A² ‖C_a^Θ‖ at p = 2 for a finite
/// Weyl system A. a_hat must live on the lattice grid: N = period and
/// h = step, so that grid point u of the box is the lattice point u.
inline TransferenceReport transference_check(const CocycleParams& c, const GridField& a_hat,
                                             const FiniteWeylSystem& tuple)
{
    const GridMeta& m = a_hat.meta();
    detail::require(m.n == c.dim() && tuple.theta.dim() == c.dim(), "transference_check: dimension mismatch");
    detail::require(m.N == tuple.period && std::abs(m.h() - tuple.step) <= 1e-12 * tuple.step,
                    "transference_check: symbol grid must match the lattice of the tuple");
    const double scale = m.cell_volume() * std::pow(2.0 * std::numbers::pi, -0.5 * m.n);

    Eigen::MatrixXcd lhs_m = Eigen::MatrixXcd::Zero(tuple.space_dim, tuple.space_dim);
    double m_a = 0.0;
    for (std::size_t u = 0; u < m.size(); ++u) {
        std::vector<int> lat = m.multi_index(u);
        for (int& v : lat) v -= m.N / 2;
        const Eigen::MatrixXcd pi_u = tuple.element(lat);
        m_a = std::max(m_a, detail::spectral_norm(pi_u));
        if (a_hat[u] != cplx(0.0)) lhs_m += scale * a_hat[u] * pi_u;
    }

    const std::size_t M = m.size();
    const auto dimM = Eigen::Index(M);
    Eigen::MatrixXcd C(dimM, dimM);
    const double cscale = std::pow(2.0 * std::numbers::pi, -0.5 * m.n);
    for (std::size_t j = 0; j < M; ++j) {
        GridField e(m);
        e[j] = 1.0;
        C.col(Eigen::Index(j)) = cscale * twisted_convolve(c, a_hat, e).values();
    }

    TransferenceReport r;
    r.lhs = detail::spectral_norm(lhs_m);
    r.m_a = m_a;
    r.rhs = m_a * m_a * detail::spectral_norm(C);
    r.excess = r.rhs > 0.0 ? std::max(0.0, r.lhs / r.rhs - 1.0) : (r.lhs > 0.0 ? INFINITY : 0.0);
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-6);
    return r;
}

/// The semigroup T_t g = p_t ∗_Θ g realized on a grid through sampled kernels.
///
/// Kernels narrower than the grid cannot be sampled faithfully, so for
/// 0 < t < t_r (t_r = h² by default) T_t g is the quadratic interpolant in t
/// through T_0 g = g, T_{t_r} g and T_{2t_r} g. T_0 is the identity.
class KernelSemigroup {
public:
    KernelSemigroup(SkewMatrix theta, const GridMeta& meta, double resolved_time = -1.0)
        : spec_(theta), cocycle_(theta), meta_(meta),
          t_res_(resolved_time >= 0.0 ? resolved_time : meta.h() * meta.h())
    {
        detail::require(meta.n == theta.dim(), "KernelSemigroup: grid dimension does not match theta");
    }

    double resolved_time() const { return t_res_; }
    const GridMeta& meta() const { return meta_; }
    const KernelSpec& spec() const { return spec_; }
    const CocycleParams& cocycle() const { return cocycle_; }

    /// T_t x for t >= 0.
    GridField operator()(double t, const GridField& x) const
    {
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("KernelSemigroup: time must be finite and >= 0");
        detail::require(x.meta() == meta_, "KernelSemigroup: grid geometry mismatch");
        if (t == 0.0) return x;
        if (t >= t_res_) return direct(t, x);
        const double a = t_res_, s = t / a;
        // Lagrange weights on the nodes 0, a, 2a
        const double w0 = (s - 1.0) * (s - 2.0) / 2.0;
        const double w1 = -s * (s - 2.0);
        const double w2 = s * (s - 1.0) / 2.0;
        return w0 * x + w1 * direct(a, x) + w2 * direct(2.0 * a, x);
    }

    /// Sampled kernel route without interpolation.
    GridField direct(double t, const GridField& x) const
    {
        return twisted_convolve(cocycle_, sample_kernel(spec_, t, meta_), x);
    }

private:
    KernelSpec spec_;
    CocycleParams cocycle_;
    GridMeta meta_;
    double t_res_;
};

} // namespace thetalab
