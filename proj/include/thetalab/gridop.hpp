#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "error.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "skewform.hpp"
#include "twistcal.hpp"

namespace thetalab {

/// Largest matrix dimension accepted by the dense eigensolver.
inline constexpr std::size_t kMaxDenseDim = 4096;

/// Finite-difference accuracy order of the derivative stencils.
enum class Stencil { Second = 2, Fourth = 4 };

/// Dense complex matrix acting on flattened fields of a grid.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    GridMeta meta;

    std::size_t dim() const { return std::size_t(entries.rows()); }

    GridField apply(const GridField& f) const
    {
        detail::require(f.meta() == meta, "OperatorMatrix::apply: grid geometry mismatch");
        return GridField(meta, entries * f.values());
    }

    /// ‖M - M*‖_∞ / ‖M‖_∞ with ∞ the max-entry norm.
    double hermiticity_defect() const
    {
        const double scale = entries.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff() / scale;
    }

    /// Replaces the matrix by its Hermitian part (M + M*)/2.
    void symmetrize() { entries = (0.5 * (entries + entries.adjoint())).eval(); }
};

namespace detail {

using SparseC = Eigen::SparseMatrix<cplx>;

inline void check_dense_size(const GridMeta& m)
{
    if (m.size() > kMaxDenseDim)
        throw ValidationError("dense operator of dimension " + std::to_string(m.size()) +
                              " exceeds the cap of " + std::to_string(kMaxDenseDim) +
                              "; use a smaller N");
}

// Stencil offsets and weights for the first (order 1) or second derivative.
inline std::vector<std::pair<int, double>> stencil_weights(Stencil s, int derivative, double h)
{
    if (derivative == 1) {
        if (s == Stencil::Second) return {{-1, -0.5 / h}, {1, 0.5 / h}};
        return {{-2, 1.0 / (12 * h)}, {-1, -8.0 / (12 * h)}, {1, 8.0 / (12 * h)}, {2, -1.0 / (12 * h)}};
    }
    const double h2 = h * h;
    if (s == Stencil::Second) return {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}};
    return {{-2, -1.0 / (12 * h2)}, {-1, 16.0 / (12 * h2)}, {0, -30.0 / (12 * h2)},
            {1, 16.0 / (12 * h2)}, {2, -1.0 / (12 * h2)}};
}

// Derivative along axis k with Dirichlet truncation (no wrap).
inline SparseC axis_derivative(const GridMeta& m, int k, Stencil s, int derivative)
{
    const auto w = stencil_weights(s, derivative, m.h());
    const std::size_t stride = m.stride(k);
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(m.size() * w.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const int a = m.axis_index(i, k);
        for (auto [off, c] : w) {
            const int b = a + off;
            if (b < 0 || b >= m.N) continue;
            const std::size_t j = i + std::size_t(b) * stride - std::size_t(a) * stride;
            trips.emplace_back(Eigen::Index(i), Eigen::Index(j), cplx(c));
        }
    }
    SparseC D(Eigen::Index(m.size()), Eigen::Index(m.size()));
    D.setFromTriplets(trips.begin(), trips.end());
    return D;
}

inline SparseC sparse_diagonal(const Eigen::VectorXd& d)
{
    SparseC D(d.size(), d.size());
    std::vector<Eigen::Triplet<cplx>> trips;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) != 0.0) trips.emplace_back(i, i, cplx(d(i)));
    D.setFromTriplets(trips.begin(), trips.end());
    return D;
}

inline Eigen::VectorXd axis_coordinates(const GridMeta& m, int k)
{
    Eigen::VectorXd x(Eigen::Index(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) x(Eigen::Index(i)) = m.coord(m.axis_index(i, k));
    return x;
}

} // namespace detail

/// Q_k: multiplication by the coordinate x_k (axes numbered from 0).
inline OperatorMatrix build_Q(int k, const GridMeta& meta)
{
    detail::require(k >= 0 && k < meta.n, "build_Q: axis out of range");
    detail::check_dense_size(meta);
    return {detail::axis_coordinates(meta, k).cast<cplx>().asDiagonal().toDenseMatrix(), meta};
}

/// P_k = -i ∂_k by central differences with Dirichlet truncation.
inline OperatorMatrix build_P(int k, const GridMeta& meta, Stencil s = Stencil::Fourth)
{
    detail::require(k >= 0 && k < meta.n, "build_P: axis out of range");
    detail::check_dense_size(meta);
    detail::SparseC P = cplx(0.0, -1.0) * detail::axis_derivative(meta, k, s, 1);
    return {Eigen::MatrixXcd(P), meta};
}

/// Generator b(x) + c P_axis: a multiplication part plus an optional
/// momentum part along one axis (axis = -1 for none).
struct WeylGenerator {
    Eigen::VectorXd multiplier;
    int axis = -1;
    double momentum_coeff = 0.0;
};

/// A tuple of generators on one grid, discretized with one stencil.
struct GeneratorTuple {
    GridMeta meta;
    Stencil stencil = Stencil::Fourth;
    std::vector<WeylGenerator> generators;

    std::size_t size() const { return generators.size(); }

    /// Sparse matrix of generator k.
    detail::SparseC sparse(std::size_t k) const
    {
        const WeylGenerator& g = generators.at(k);
        detail::SparseC A = detail::sparse_diagonal(g.multiplier);
        if (g.axis >= 0 && g.momentum_coeff != 0.0)
            A += cplx(0.0, -g.momentum_coeff) * detail::axis_derivative(meta, g.axis, stencil, 1);
        return A;
    }

    /// Dense matrices of all generators.
    std::vector<OperatorMatrix> matrices() const
    {
        detail::check_dense_size(meta);
        std::vector<OperatorMatrix> out;
        for (std::size_t k = 0; k < size(); ++k) out.push_back({Eigen::MatrixXcd(sparse(k)), meta});
        return out;
    }
};

/// The universal tuple A_k = ½ Σ_l Θ_kl Q_l - P_k.
inline GeneratorTuple build_universal_tuple(const SkewMatrix& theta, const GridMeta& meta,
                                            Stencil s = Stencil::Fourth)
{
    detail::require(theta.dim() == meta.n, "build_universal_tuple: grid dimension does not match theta");
    GeneratorTuple t{meta, s, {}};
    std::vector<Eigen::VectorXd> x;
    for (int l = 0; l < meta.n; ++l) x.push_back(detail::axis_coordinates(meta, l));
    for (int k = 0; k < meta.n; ++k) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(Eigen::Index(meta.size()));
        for (int l = 0; l < meta.n; ++l) b += 0.5 * theta(k, l) * x[l];
        t.generators.push_back({b, k, -1.0});
    }
    return t;
}

/// How A_k² is discretized.
enum class SquareMode {
    /// b² + c(bP + Pb) + c² P² with P² the compact second-difference
    /// stencil. Default.
    Compact,
    /// Literal product of the discretized A_k with itself. The squared
    /// central difference decouples even and odd sublattices and doubles
    /// the low spectrum; kept for comparison.
    Product,
};

/// Σ_k A_k² assembled sparsely, densified and symmetrized.
inline OperatorMatrix sum_of_squares(const GeneratorTuple& tuple, SquareMode mode = SquareMode::Compact)
{
    detail::require(tuple.size() > 0, "sum_of_squares: empty tuple");
    detail::check_dense_size(tuple.meta);
    const auto D = Eigen::Index(tuple.meta.size());
    detail::SparseC S(D, D);
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        const WeylGenerator& g = tuple.generators[k];
        if (mode == SquareMode::Product) {
            detail::SparseC A = tuple.sparse(k);
            S += A * A;
            continue;
        }
        detail::SparseC B = detail::sparse_diagonal(g.multiplier);
        S += B * B;
        if (g.axis >= 0 && g.momentum_coeff != 0.0) {
            detail::SparseC P = cplx(0.0, -1.0) * detail::axis_derivative(tuple.meta, g.axis, tuple.stencil, 1);
            detail::SparseC P2 = -detail::axis_derivative(tuple.meta, g.axis, tuple.stencil, 2);
            S += g.momentum_coeff * (B * P + P * B);
            S += (g.momentum_coeff * g.momentum_coeff) * P2;
        }
    }
    OperatorMatrix out{Eigen::MatrixXcd(S), tuple.meta};
    out.symmetrize();
    return out;
}

struct SpectrumReport {
    std::vector<double> eigenvalues; ///< ascending
    double alpha_ref = 0.0;          ///< spectral gap of Θ
    double gap_residual = 0.0;       ///< λ_min - α
};

/// Sorted eigenvalues of a Hermitian operator, with the gap residual
/// measured against α(Θ).
inline SpectrumReport spectrum(const OperatorMatrix& op, const SkewMatrix& theta)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.entries, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver did not converge");
    SpectrumReport r;
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    r.alpha_ref = spectral_gap(theta);
    r.gap_residual = r.eigenvalues.empty() ? 0.0 : r.eigenvalues.front() - r.alpha_ref;
    return r;
}

/// Full eigendecomposition op = V diag(λ) V* of a Hermitian operator.
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    GridMeta meta;

    /// f(op) x = V f(Λ) V* x.
    template <class Fn>
    GridField apply_function(Fn&& f, const GridField& x) const
    {
        detail::require(x.meta() == meta, "apply_function: grid geometry mismatch");
        Eigen::VectorXcd c = vectors.adjoint() * x.values();
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= cplx(f(values(i)));
        return GridField(meta, vectors * c);
    }
};

inline EigenDecomposition decompose(const OperatorMatrix& op)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.entries);
    if (es.info() != Eigen::Success) throw NumericalError("decompose: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors(), op.meta};
}

/// The sum of squares of the universal tuple of Θ on a grid.
inline OperatorMatrix twisted_laplacian(const SkewMatrix& theta, const GridMeta& meta, Stencil s = Stencil::Fourth)
{
    return sum_of_squares(build_universal_tuple(theta, meta, s));
}

/// Memo of eigendecompositions of the universal sum of squares, keyed by
/// (Θ, grid, stencil). Entries are immutable once stored; lookups are
/// thread-safe.
class SpectralCache {
public:
    std::shared_ptr<const EigenDecomposition> get(const SkewMatrix& theta, const GridMeta& meta,
                                                  Stencil s = Stencil::Fourth)
    {
        Key key{std::vector<double>(theta.matrix().data(), theta.matrix().data() + theta.matrix().size()),
                meta.n, meta.N, meta.L, static_cast<int>(s)};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = store_.find(key);
            if (it != store_.end()) return it->second;
        }
        auto d = std::make_shared<const EigenDecomposition>(decompose(twisted_laplacian(theta, meta, s)));
        std::lock_guard<std::mutex> lock(mutex_);
        return store_.emplace(std::move(key), std::move(d)).first->second;
    }

    static SpectralCache& global()
    {
        static SpectralCache cache;
        return cache;
    }

private:
    using Key = std::tuple<std::vector<double>, int, int, double, int>;
    std::mutex mutex_;
    std::map<Key, std::shared_ptr<const EigenDecomposition>> store_;
};

/// Standard test field for semigroup comparisons: a unit Gaussian of width
/// 1 centered at (0.5, -0.3, 0, ...).
inline GridField crossval_test_field(const GridMeta& meta)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(meta.n);
    c(0) = 0.5;
    if (meta.n > 1) c(1) = -0.3;
    return gaussian_field(meta, c, 1.0);
}

/// Relative ℓ² residual between exp(-t𝒜)g through the eigendecomposition of
/// the discretized sum of squares and T_t g = p_t ∗_Θ g through kernels.
inline double semigroup_crossval(const SkewMatrix& theta, const GridMeta& meta, double t,
                                 Stencil s = Stencil::Fourth, SpectralCache& cache = SpectralCache::global())
{
    if (!(t > 0.0) || t > 3.0) throw DomainError("semigroup_crossval: t must lie in (0, 3]");
    const GridField g = crossval_test_field(meta);
    const auto dec = cache.get(theta, meta, s);
    const GridField eig = dec->apply_function([t](double lam) { return std::exp(-t * lam); }, g);
    const KernelSemigroup T(theta, meta);
    return relative_lp_error(T(t, g), eig, 2.0);
}

} // namespace thetalab
