#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "calculus.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace thetalab {

/// Largest matrix size accepted by the Schatten norm.
inline constexpr int kMaxSchurSize = 512;

/// ‖A‖_{S^p}: the ℓ^p norm of the singular values (their max for p = ∞).
inline double schatten_norm(const Eigen::MatrixXcd& A, double p)
{
    detail::require(p >= 1.0, "schatten_norm: p must be >= 1");
    detail::require(A.rows() <= kMaxSchurSize && A.cols() <= kMaxSchurSize,
                    "schatten_norm: matrix exceeds 512 x 512");
    if (A.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    if (svd.info() != Eigen::Success) throw NumericalError("schatten_norm: SVD did not converge");
    const Eigen::VectorXd& s = svd.singularValues();
    if (std::isinf(p)) return s(0);
    if (p == 1.0) return s.sum();
    if (p == 2.0) return s.norm();
    const double top = s(0);
    if (top == 0.0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, p);
    return top * std::pow(acc, 1.0 / p);
}

/// A Schur multiplier symbol ψ(j, k) truncated to [0, N)².
struct SchurSymbol {
    std::function<cplx(int, int)> psi;
    int N = 0;
    std::string id;

    Eigen::MatrixXcd materialize() const
    {
        detail::require(N >= 1, "SchurSymbol: size must be positive");
        Eigen::MatrixXcd S(N, N);
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const cplx v = psi(j, k);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw DomainError("SchurSymbol '" + id + "': value at (" + std::to_string(j) + ", " +
                                      std::to_string(k) + ") is not finite");
                S(j, k) = v;
            }
        return S;
    }
};

/// Lower-triangular truncation ψ = 1_{j >= k}.
inline SchurSymbol triangular_symbol(int N)
{
    return {[](int j, int k) -> cplx { return j >= k ? 1.0 : 0.0; }, N, "tri"};
}

/// How a function on (0, ∞) becomes a Toeplitz symbol.
enum class ToeplitzMode {
    Squared, ///< ψ(j, k) = f((j - k)²)
    Signed,  ///< ψ(j, k) = f(j - k), with a separate branch for j < k
};

struct ToeplitzOptions {
    /// Value on the diagonal. When absent, lim_{λ→0⁺} f(λ) is used and must exist.
    std::optional<cplx> diagonal;
    /// Signed mode, j < k: ψ = negative(k - j). Defaults to f(k - j).
    std::function<cplx(double)> negative;
};

namespace detail {

// lim_{λ→0⁺} f(λ) from probes at 1e-8, 1e-10, 1e-12. When f(0) itself is
// finite and agrees with the probes it is returned exactly.
inline cplx right_limit_at_zero(const MultiplierSymbol& f)
{
    const cplx a = f(1e-8), b = f(1e-10), c = f(1e-12);
    const bool finite = std::isfinite(std::abs(a)) && std::isfinite(std::abs(b)) && std::isfinite(std::abs(c));
    if (!finite || std::abs(a - b) > 1e-6 || std::abs(b - c) > 1e-6)
        throw DomainError("toeplitz_symbol: f has no limit at 0+; supply a diagonal value");
    cplx at_zero;
    try {
        at_zero = f(0.0);
    } catch (const Error&) {
        return c;
    }
    if (std::isfinite(std::abs(at_zero)) && std::abs(at_zero - c) <= 1e-6) return at_zero;
    return c;
}

} // namespace detail

/// Toeplitz symbol built from a multiplier function.
inline SchurSymbol toeplitz_symbol(const MultiplierSymbol& f, ToeplitzMode mode, int N,
                                   const ToeplitzOptions& options = {})
{
    detail::require(N >= 1 && N <= kMaxSchurSize, "toeplitz_symbol: size must be in [1, 512]");
    const cplx diag = options.diagonal ? *options.diagonal : detail::right_limit_at_zero(f);
    // tabulate by offset j - k in [-(N-1), N-1]
    std::vector<cplx> table(std::size_t(2 * N - 1));
    for (int d = -(N - 1); d <= N - 1; ++d) {
        cplx v;
        if (d == 0) v = diag;
        else if (mode == ToeplitzMode::Squared) v = f(double(d) * double(d));
        else if (d > 0 || !options.negative) v = f(std::abs(double(d)));
        else v = options.negative(-double(d));
        table[std::size_t(d + N - 1)] = v;
    }
    const std::string tag = mode == ToeplitzMode::Squared ? "toeplitz2:" : "toeplitz:";
    return {[table, N](int j, int k) { return table[std::size_t(j - k + N - 1)]; }, N, tag + f.id()};
}

/// The matrices used to probe a multiplier. The family consists of `trials`
/// seeded complex Gaussian matrices, the Hilbert-type matrix
/// 1/(j - k + 1/2), the all-ones matrix, `trials` seeded random rank-one
/// matrices and the matrix unit at the largest |ψ|.
inline std::vector<Eigen::MatrixXcd> schur_test_family(const SchurSymbol& sym, int trials, std::uint64_t seed)
{
    detail::require(trials >= 1, "schur_test_family: trials must be >= 1");
    const int N = sym.N;
    std::vector<Eigen::MatrixXcd> family(std::size_t(2 * trials + 3));
    parallel_for(std::size_t(trials), [&](std::size_t i) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (i + 1));
        std::normal_distribution<double> g;
        Eigen::MatrixXcd A(N, N), u(N, 1), v(N, 1);
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) A(j, k) = cplx(g(rng), g(rng));
        for (int j = 0; j < N; ++j) {
            u(j, 0) = cplx(g(rng), g(rng));
            v(j, 0) = cplx(g(rng), g(rng));
        }
        family[i] = std::move(A);
        family[std::size_t(trials) + i] = u * v.adjoint();
    }, 1);
    Eigen::MatrixXcd H(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) H(j, k) = 1.0 / (j - k + 0.5);
    family[std::size_t(2 * trials)] = H;
    family[std::size_t(2 * trials + 1)] = Eigen::MatrixXcd::Ones(N, N);
    const Eigen::MatrixXcd S = sym.materialize();
    Eigen::Index r = 0, c = 0;
    S.cwiseAbs().maxCoeff(&r, &c);
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, N);
    E(r, c) = 1.0;
    family[std::size_t(2 * trials + 2)] = E;
    return family;
}

struct SchurBound {
    double lower_bound = 0.0;
    std::size_t argmax = 0; ///< index of the best family member
};

/// max over the given matrices of ‖ψ ∘ A‖_p / ‖A‖_p. This is only a lower
/// bound on the norm of the Schur multiplier on S^p.
inline SchurBound multiplier_lower_bound(const SchurSymbol& sym, double p, const std::vector<Eigen::MatrixXcd>& family)
{
    const Eigen::MatrixXcd S = sym.materialize();
    std::vector<double> ratio(family.size(), 0.0);
    parallel_for(family.size(), [&](std::size_t i) {
        const Eigen::MatrixXcd& A = family[i];
        detail::require(A.rows() == sym.N && A.cols() == sym.N, "multiplier_lower_bound: matrix size mismatch");
        const double d = schatten_norm(A, p);
        if (d > 0.0) ratio[i] = schatten_norm(S.cwiseProduct(A), p) / d;
    }, 1);
    SchurBound b;
    for (std::size_t i = 0; i < ratio.size(); ++i)
        if (ratio[i] > b.lower_bound) {
            b.lower_bound = ratio[i];
            b.argmax = i;
        }
    return b;
}

/// Lower bound over the standard test family.
inline double multiplier_lower_bound(const SchurSymbol& sym, double p, int trials, std::uint64_t seed)
{
    return multiplier_lower_bound(sym, p, schur_test_family(sym, trials, seed)).lower_bound;
}

/// Least-squares line y = slope x + intercept with its R².
struct LinearFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    detail::require(x.size() == y.size() && x.size() >= 2, "linear_fit: need at least two points");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    detail::require(sxx > 0.0, "linear_fit: x values must not all coincide");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

} // namespace thetalab
