#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace thetalab {

/// Real skew-symmetric n x n matrix Θ.
///
/// Construction accepts entries that are skew-symmetric up to a tolerance
/// (relative to the largest entry, with an absolute floor of 1e-12) and then
/// stores the exact skew part (A - A^T)/2, so the diagonal is exactly zero.
class SkewMatrix {
public:
    explicit SkewMatrix(const Eigen::MatrixXd& entries, double tol = 1e-12)
    {
        detail::require(entries.rows() > 0 && entries.rows() == entries.cols(),
                        "skew matrix must be square and non-empty");
        detail::require(entries.allFinite(), "skew matrix has non-finite entries");
        const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
        const double defect = (entries + entries.transpose()).cwiseAbs().maxCoeff();
        if (defect > tol * scale)
            throw ValidationError("matrix is not skew-symmetric (max |A + A^T| = " +
                                  std::to_string(defect) + ")");
        m_ = 0.5 * (entries - entries.transpose());
    }

    static SkewMatrix zero(int n) { return SkewMatrix(Eigen::MatrixXd::Zero(n, n)); }

    /// alpha * [[0, 1], [-1, 0]].
    static SkewMatrix standard(double alpha = 1.0)
    {
        Eigen::Matrix2d m;
        m << 0.0, alpha, -alpha, 0.0;
        return SkewMatrix(m);
    }

    /// Block-diagonal matrix diag(a_1 J, ..., a_k J, 0) of size n, with J the
    /// standard 2x2 block.
    static SkewMatrix block_diagonal(std::span<const double> alphas, int n)
    {
        detail::require(2 * static_cast<int>(alphas.size()) <= n, "too many blocks for dimension");
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            m(2 * j, 2 * j + 1) = alphas[j];
            m(2 * j + 1, 2 * j) = -alphas[j];
        }
        return SkewMatrix(m);
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(int j, int k) const { return m_(j, k); }
    bool is_zero() const { return m_.cwiseAbs().maxCoeff() == 0.0; }

private:
    Eigen::MatrixXd m_;
};

/// Orthogonal block decomposition Θ = O^T J O with
/// J = diag(α_1 J₀, ..., α_k J₀, 0_{n-2k}) and J₀ = [[0, 1], [-1, 0]].
struct CanonicalForm {
    Eigen::MatrixXd O;          ///< orthogonal, rows are the adapted basis
    int k = 0;                  ///< number of nonzero 2x2 blocks
    std::vector<double> alphas; ///< block magnitudes, descending
    double alpha = 0.0;         ///< spectral gap, sum of alphas
    double beta = 0.0;          ///< smallest alpha, 0 when k == 0

    int dim() const { return static_cast<int>(O.rows()); }

    /// The block matrix J built from alphas.
    Eigen::MatrixXd block_matrix() const
    {
        return SkewMatrix::block_diagonal(alphas, dim()).matrix();
    }

    /// max-entry norm of O^T J O - Θ.
    double reconstruction_residual(const SkewMatrix& theta) const
    {
        return (O.transpose() * block_matrix() * O - theta.matrix()).cwiseAbs().maxCoeff();
    }

    /// max-entry norm of O^T O - I.
    double orthogonality_defect() const
    {
        const auto n = O.rows();
        return (O.transpose() * O - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    }
};

/// Eigenvalues of iΘ below this magnitude are treated as part of the null block.
inline constexpr double kZeroBlockTol = 1e-10;

/// Canonical block form of Θ from the eigenpairs of the Hermitian matrix iΘ.
///
/// For an eigenpair iΘv = λv with λ > 0 and v = a + ib, the real vectors
/// √2 a and √2 b are orthonormal and span an invariant plane on which Θ acts
/// as λJ₀. Repeated λ are fine since distinct eigenvectors give mutually
/// orthogonal planes. The null block basis is the orthogonal complement of
/// the block planes.
inline CanonicalForm canonical_form(const SkewMatrix& theta)
{
    const int n = theta.dim();
    CanonicalForm cf;
    cf.O = Eigen::MatrixXd::Identity(n, n);
    if (n == 1 || theta.is_zero()) return cf;
    if (n == 2) {
        // exact: Θ = θ₀₁ J₀, and a swap of the axes flips the sign
        const double a = theta(0, 1);
        cf.k = 1;
        cf.alphas = {std::abs(a)};
        cf.alpha = cf.beta = std::abs(a);
        if (a < 0.0) cf.O << 0.0, 1.0, 1.0, 0.0;
        return cf;
    }

    const Eigen::MatrixXcd H = std::complex<double>(0.0, 1.0) * theta.matrix().cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success)
        throw NumericalError("canonical_form: eigensolver did not converge");

    // eigenvalues ascending: the largest positive ones come last
    const Eigen::VectorXd& lam = es.eigenvalues();
    std::vector<int> positive;
    for (int i = n - 1; i >= 0; --i)
        if (lam(i) >= kZeroBlockTol) positive.push_back(i);
    cf.k = static_cast<int>(positive.size());

    Eigen::MatrixXd rows(n, n);
    for (int j = 0; j < cf.k; ++j) {
        const Eigen::VectorXcd v = es.eigenvectors().col(positive[j]);
        // Θ a = λ b and Θ b = -λ a; O rows (b, a) then give the λJ₀ block.
        rows.row(2 * j) = std::sqrt(2.0) * v.imag().transpose();
        rows.row(2 * j + 1) = std::sqrt(2.0) * v.real().transpose();
        cf.alphas.push_back(lam(positive[j]));
    }
    if (2 * cf.k < n) {
        Eigen::MatrixXd B = rows.topRows(2 * cf.k).transpose();
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - B * B.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ps(0.5 * (P + P.transpose()));
        if (ps.info() != Eigen::Success)
            throw NumericalError("canonical_form: null-space solve did not converge");
        const int m = n - 2 * cf.k;
        rows.bottomRows(m) = ps.eigenvectors().rightCols(m).transpose();
    }
    cf.O = rows;
    for (double a : cf.alphas) cf.alpha += a;
    cf.beta = cf.k > 0 ? cf.alphas.back() : 0.0;
    return cf;
}

/// Spectral gap α = Σ α_j of Θ.
inline double spectral_gap(const SkewMatrix& theta) { return canonical_form(theta).alpha; }

} // namespace thetalab
