#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "calculus.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace thetalab {

/// The fixed window η(x) = exp(1/((x - 1/2)(x - 2))) on (1/2, 2), zero
/// elsewhere, scaled so that η(5/4) = 1. Hörmander norms depend on this
/// choice; different windows give equivalent but unequal norms.
inline double eta(double x)
{
    if (!(x > 0.5 && x < 2.0)) return 0.0;
    static const double peak = std::exp(1.0 / ((1.25 - 0.5) * (1.25 - 2.0)));
    return std::exp(1.0 / ((x - 0.5) * (x - 2.0))) / peak;
}

namespace detail {

// |f̂(ξ_k)|² (1 + ξ_k²)^s folded over ±k, in units where the sum over all
// bins is ‖f‖²_{W^{s,2}}. Bin k corresponds to |ξ| = 2π k / (P dx), P the
// zero-padded length.
inline std::vector<double> sobolev_bins(const std::vector<cplx>& samples, double dx, double s)
{
    std::size_t P = 1;
    while (P < 2 * samples.size()) P *= 2;
    std::vector<cplx> in(P, 0.0), out;
    std::copy(samples.begin(), samples.end(), in.begin());
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    const double dxi = 2.0 * std::numbers::pi / (double(P) * dx);
    const double unit = dx / double(P);
    std::vector<double> bins(P / 2 + 1, 0.0);
    for (std::size_t k = 0; k < P; ++k) {
        const std::size_t fold = k <= P / 2 ? k : P - k;
        const double xi = dxi * double(fold);
        bins[fold] += unit * std::norm(out[k]) * std::pow(1.0 + xi * xi, s);
    }
    return bins;
}

} // namespace detail

/// ‖f‖_{W^{s,2}(ℝ)} = ‖f̂(ξ)(1 + ξ²)^{s/2}‖_{L²} for samples of a compactly
/// supported f on a uniform grid of spacing dx, by a zero-padded DFT.
/// With a cutoff, only frequencies |ξ| <= cutoff contribute.
inline double sobolev_norm(const std::vector<cplx>& samples, double dx, double s,
                           std::optional<double> cutoff = std::nullopt)
{
    if (samples.empty()) throw ValidationError("sobolev_norm: empty support");
    detail::require(dx > 0.0 && s >= 0.0, "sobolev_norm: need dx > 0 and s >= 0");
    const auto bins = detail::sobolev_bins(samples, dx, s);
    std::size_t P = 2 * (bins.size() - 1);
    const double dxi = 2.0 * std::numbers::pi / (double(P) * dx);
    double e = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        if (cutoff && dxi * double(k) > *cutoff) break;
        e += bins[k];
    }
    return std::sqrt(e);
}

/// Settings of the Hörmander norm sup_t ‖η · f(t ·)‖_{W^{s,2}}.
struct HormConfig {
    double s = 1.5;          ///< smoothness order
    int octaves = 12;        ///< windows t = 2^{j/q} with |j| <= octaves · q
    int q = 4;               ///< windows per octave at the first level
    int samples = 1 << 14;   ///< samples per window on [1/2, 2)
    int levels = 4;          ///< refinement levels; each doubles q and the band cutoff
    int base_band = 64;      ///< first band cutoff, in multiples of 2π / 1.5
    double rel_tol = 1e-3;   ///< convergence threshold on the relative change
};

struct HormReport {
    double norm = 0.0;
    bool converged = false;
    bool diverged = false;
    bool infinite = false;  ///< the symbol is not finite on some window
    int levels_used = 0;
    int windows = 0;        ///< nonzero windows at the last level
    double argmax_t = 0.0;  ///< window scale attaining the norm
    std::vector<double> history;
};

/// Hörmander norm of f by a dyadic window scan, refined until the value
/// settles. Besides the dyadic range, two far windows t = 2^{±60} stand in
/// for the limits t → 0 and t → ∞.
///
/// Divergence is declared when some window's high-frequency band increments
/// stop decaying (two successive increment ratios >= 0.99, so its Sobolev
/// norm grows without bound as the band widens), or when two successive
/// refinements each grow the norm by more than 5%.
inline HormReport hormander_norm(const MultiplierSymbol& f, const HormConfig& cfg = {})
{
    detail::require(cfg.s >= 0.0 && cfg.octaves >= 1 && cfg.q >= 1 && cfg.samples >= 16 && cfg.levels >= 1,
                    "hormander_norm: invalid configuration");
    const int M = cfg.samples;
    const double dx = 1.5 / M;
    std::vector<double> xs(M), window(M);
    for (int m = 0; m < M; ++m) {
        xs[m] = 0.5 + m * dx;
        window[m] = eta(xs[m]);
    }
    const double band_unit = 2.0 * std::numbers::pi / 1.5;
    constexpr double kFarOctaves = 60.0;

    HormReport r;
    for (int level = 0; level < cfg.levels; ++level) {
        const int q = cfg.q << level;
        std::vector<double> scales;
        scales.push_back(std::exp2(-kFarOctaves));
        for (int j = -cfg.octaves * q; j <= cfg.octaves * q; ++j) scales.push_back(std::exp2(double(j) / q));
        scales.push_back(std::exp2(kFarOctaves));
        const std::size_t count = scales.size();

        // cumulative energies at the band cutoffs K_0 .. K_level for each window
        std::vector<std::vector<double>> energy(count);
        std::vector<char> nonzero(count, 0), bad(count, 0);
        parallel_for(count, [&](std::size_t w) {
            const double t = scales[w];
            std::vector<cplx> g(M);
            bool any = false;
            for (int m = 0; m < M; ++m) {
                if (window[m] == 0.0) continue;
                const cplx v = f(t * xs[m]);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    bad[w] = 1;
                    return;
                }
                g[m] = window[m] * v;
                any = any || v != cplx(0.0);
            }
            if (!any) return;
            nonzero[w] = 1;
            const auto bins = detail::sobolev_bins(g, dx, cfg.s);
            const double dxi = 2.0 * std::numbers::pi / (double(2 * (bins.size() - 1)) * dx);
            std::vector<double> e(level + 1, 0.0);
            double acc = 0.0;
            int band = 0;
            for (std::size_t k = 0; k < bins.size() && band <= level; ++k) {
                while (band <= level && dxi * double(k) > band_unit * cfg.base_band * std::exp2(band))
                    e[band++] = acc;
                acc += bins[k];
            }
            for (; band <= level; ++band) e[band] = acc;
            energy[w] = std::move(e);
        }, 4);
        r.levels_used = level + 1;
        if (std::any_of(bad.begin(), bad.end(), [](char b) { return b != 0; })) {
            r.infinite = true;
            r.norm = std::numeric_limits<double>::infinity();
            return r;
        }

        double best = 0.0;
        std::size_t arg = count;
        int windows = 0;
        for (std::size_t w = 0; w < count; ++w) {
            if (!nonzero[w]) continue;
            ++windows;
            if (energy[w][level] > best) {
                best = energy[w][level];
                arg = w;
            }
        }
        r.norm = std::sqrt(best);
        r.windows = windows;
        r.argmax_t = arg < count ? scales[arg] : 0.0;
        r.history.push_back(r.norm);
        if (arg == count) { // f vanishes on every window
            r.converged = true;
            return r;
        }

        // band increments d_k = E(K_k) - E(K_{k-1}) per window
        bool stalled = false, decaying = true;
        for (std::size_t w = 0; w < count && level >= 2; ++w) {
            if (!nonzero[w]) continue;
            const auto& e = energy[w];
            const double d3 = e[level] - e[level - 1], d2 = e[level - 1] - e[level - 2];
            const bool significant = d3 > 1e-10 * best;
            if (significant && !(d2 > 0.0 && d3 / d2 < 0.99)) decaying = false;
            if (level >= 3 && significant) {
                const double d1 = e[level - 2] - e[level - 3];
                stalled = stalled || (d1 > 0.0 && d2 > 0.0 && d3 / d2 >= 0.99 && d2 / d1 >= 0.99);
            }
        }
        const auto& h = r.history;
        const std::size_t n = h.size();
        const bool growing = n >= 3 && h[n - 1] > 1.05 * h[n - 2] && h[n - 2] > 1.05 * h[n - 3];
        if (stalled || growing) {
            r.diverged = true;
            return r;
        }
        if (level >= 2 && decaying && std::abs(h[n - 1] - h[n - 2]) < cfg.rel_tol * r.norm) {
            r.converged = true;
            return r;
        }
    }
    return r;
}

/// Derivative-based symbol quantities of the Mihlin and Hörmander
/// conditions for a function on (0, ∞).
struct MihlinReport {
    int order = 0;
    std::vector<double> pointwise; ///< sup_s s^k |f^{(k)}(s)| for k = 0..order
    std::vector<double> dyadic;    ///< sup_R R^{2k-1} ∫_R^{2R} |f^{(k)}|² for k = 0..order
    double worst = 0.0;            ///< max over both lists
    bool unbounded = false;        ///< monotone growth at the extreme scales
};

namespace detail {

inline cplx fd_derivative(const std::function<cplx(double)>& f, double s, int k)
{
    const double h = 1e-3 * s;
    switch (k) {
    case 0: return f(s);
    case 1: return (f(s + h) - f(s - h)) / (2.0 * h);
    case 2: return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
    default: return (f(s + 2 * h) - 2.0 * f(s + h) + 2.0 * f(s - h) - f(s - 2 * h)) / (2.0 * h * h * h);
    }
}

// True when the last three steps toward either end of v each grow by 1.5x.
inline bool grows_at_ends(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    if (n < 4) return false;
    auto up = [](double a, double b) { return b > 1.5 * a && b > 1e-300; };
    const bool top = up(v[n - 4], v[n - 3]) && up(v[n - 3], v[n - 2]) && up(v[n - 2], v[n - 1]);
    const bool bottom = up(v[3], v[2]) && up(v[2], v[1]) && up(v[1], v[0]);
    return top || bottom;
}

} // namespace detail

/// Mihlin-type check of a univariate symbol on (0, ∞): derivatives by
/// central differences with step 1e-3 s, scales R = 2^j for
/// |j| <= octaves. Informational; order is at most 3.
inline MihlinReport mihlin_check(const std::function<cplx(double)>& f, int order, int octaves = 8)
{
    detail::require(order >= 0 && order <= 3, "mihlin_check: order must be in [0, 3]");
    detail::require(octaves >= 2, "mihlin_check: need at least 2 octaves");
    MihlinReport r;
    r.order = order;
    for (int k = 0; k <= order; ++k) {
        double point = 0.0;
        const int per_octave = 64;
        for (int i = -octaves * per_octave; i <= (octaves + 1) * per_octave; ++i) {
            const double s = std::exp2(double(i) / per_octave);
            point = std::max(point, std::pow(s, k) * std::abs(detail::fd_derivative(f, s, k)));
        }
        std::vector<double> per_scale;
        for (int j = -octaves; j <= octaves; ++j) {
            const double R = std::exp2(j);
            const int panels = std::max(16, int(std::ceil(R / 2.0)));
            const double integral = composite_gauss(
                [&](double s) { return std::norm(detail::fd_derivative(f, s, k)); }, R, 2.0 * R, panels, 8);
            per_scale.push_back(std::pow(R, 2.0 * k - 1.0) * integral);
        }
        r.pointwise.push_back(point);
        r.dyadic.push_back(*std::max_element(per_scale.begin(), per_scale.end()));
        r.unbounded = r.unbounded || detail::grows_at_ends(per_scale);
    }
    for (double v : r.pointwise) r.worst = std::max(r.worst, v);
    for (double v : r.dyadic) r.worst = std::max(r.worst, v);
    return r;
}

inline MihlinReport mihlin_check(const MultiplierSymbol& f, int order, int octaves = 8)
{
    return mihlin_check(std::function<cplx(double)>([&f](double s) { return f(s); }), order, octaves);
}

/// Smoothness order sufficient for an L^p multiplier theorem in dimension
/// d, interpolated between d + 1/2 at the endpoints and 1/2 at p = 2:
/// (2/p - 1)(d + 1/2) + 1/p' for p <= 2, and the dual value for p >= 2.
inline double required_order(double p, int d)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("required_order: p must lie in (1, ∞)");
    detail::require(d >= 1, "required_order: d must be positive");
    double r = 1.0 / p;
    if (r < 0.5) r = 1.0 - r;
    return (2.0 * r - 1.0) * (d + 0.5) + (1.0 - r);
}

} // namespace thetalab
