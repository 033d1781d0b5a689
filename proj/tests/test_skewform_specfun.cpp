#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <thetalab/skewform.hpp>
#include <thetalab/specfun.hpp>

#include "oracles.hpp"

using namespace thetalab;

namespace {

SkewMatrix conjugated_blocks(const std::vector<double>& alphas, int n, std::mt19937_64& rng)
{
    const SkewMatrix J = SkewMatrix::block_diagonal(alphas, n);
    const Eigen::MatrixXd Q = oracle::random_orthogonal(n, rng);
    return SkewMatrix(Q.transpose() * J.matrix() * Q, 1e-10);
}

} // namespace

TEST(SkewMatrix, RejectsNonSkewAndNonSquare)
{
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.0, 1.0, 0.0;
    EXPECT_THROW(SkewMatrix{A}, ValidationError);
    EXPECT_THROW(SkewMatrix{Eigen::MatrixXd::Zero(2, 3)}, ValidationError);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
    B(0, 1) = NAN;
    EXPECT_THROW(SkewMatrix{B}, ValidationError);
}

TEST(SkewMatrix, StoresExactSkewPart)
{
    Eigen::MatrixXd A(2, 2);
    A << 1e-14, 2.0, -2.0 + 1e-13, 0.0;
    const SkewMatrix s(A, 1e-12);
    EXPECT_EQ(s(0, 0), 0.0);
    EXPECT_EQ(s(0, 1), -s(1, 0));
}

TEST(CanonicalForm, TwoByTwoIsExact)
{
    const CanonicalForm cf = canonical_form(SkewMatrix::standard(1.0));
    ASSERT_EQ(cf.alphas.size(), 1u);
    EXPECT_EQ(cf.alphas[0], 1.0);
    EXPECT_EQ(cf.alpha, 1.0);
    const SkewMatrix neg = SkewMatrix::standard(-2.5);
    const CanonicalForm cn = canonical_form(neg);
    EXPECT_EQ(cn.alpha, 2.5);
    EXPECT_LT(cn.reconstruction_residual(neg), 1e-15);
}

TEST(CanonicalForm, RecoversPlantedBlocks)
{
    std::mt19937_64 rng(7);
    const std::vector<std::vector<double>> cases{{3.0, 0.5}, {1.0, 1.0}, {2.0}, {4.0, 2.0, 1.0}};
    const std::vector<int> dims{4, 5, 3, 7};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const SkewMatrix th = conjugated_blocks(cases[c], dims[c], rng);
        const CanonicalForm cf = canonical_form(th);
        ASSERT_EQ(cf.alphas.size(), cases[c].size());
        for (std::size_t j = 0; j < cf.alphas.size(); ++j) EXPECT_NEAR(cf.alphas[j], cases[c][j], 1e-10);
        EXPECT_NEAR(cf.beta, cases[c].back(), 1e-10);
        const Eigen::MatrixXd I = cf.O * cf.O.transpose();
        EXPECT_LT((I - Eigen::MatrixXd::Identity(dims[c], dims[c])).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(cf.reconstruction_residual(th), 1e-12);
    }
}

TEST(CanonicalForm, ZeroAndOneDimensional)
{
    const CanonicalForm z = canonical_form(SkewMatrix::zero(3));
    EXPECT_EQ(z.k, 0);
    EXPECT_EQ(z.alpha, 0.0);
    EXPECT_EQ(z.beta, 0.0);
    EXPECT_EQ(canonical_form(SkewMatrix::zero(1)).alpha, 0.0);
}

TEST(CanonicalForm, SpectralGapIsBlockSum)
{
    const std::vector<double> a{3.0, 0.5};
    EXPECT_NEAR(spectral_gap(SkewMatrix::block_diagonal(a, 4)), 3.5, 1e-12);
}

TEST(Specfun, ScalarFunctionsMatchDefinitions)
{
    for (cplx z : {cplx(0.3, 0.1), cplx(1.0, -2.0), cplx(-2.5, 0.7), cplx(1e-5, 0.0)}) {
        EXPECT_LT(std::abs(S_scalar(z) - z / std::sin(z)), 1e-12 * std::abs(S_scalar(z)));
        EXPECT_LT(std::abs(R_scalar(z) - z * std::cos(z) / std::sin(z)), 1e-10 * std::abs(R_scalar(z)));
    }
    EXPECT_EQ(S_scalar(0.0), cplx(1.0));
    EXPECT_EQ(R_scalar(0.0), cplx(1.0));
    // on the imaginary axis S(iy) = y / sinh y and R(iy) = y coth y
    EXPECT_NEAR(S_scalar(cplx(0.0, 2.0)).real(), 2.0 / std::sinh(2.0), 1e-14);
    EXPECT_NEAR(R_scalar(cplx(0.0, 2.0)).real(), 2.0 / std::tanh(2.0), 1e-14);
}

TEST(Specfun, PolesAreDomainErrors)
{
    EXPECT_THROW(S_scalar(std::numbers::pi), DomainError);
    EXPECT_THROW(R_scalar(cplx(-2.0 * std::numbers::pi, 0.0)), DomainError);
    EXPECT_THROW(g_l1_norm(cplx(-1.0, 0.0)), DomainError);
    EXPECT_THROW(h_profile(cplx(0.0, 1.0), 0.0), DomainError);
}

TEST(Specfun, SqrtDetMatchesEigenvalueProduct)
{
    std::mt19937_64 rng(11);
    const SkewMatrix th = conjugated_blocks({2.0, 0.7}, 5, rng);
    const SpecfunContext ctx(th);
    for (cplx z : {cplx(1.0, 0.0), cplx(0.5, 1.5), cplx(3.0, -2.0)}) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(z * th.matrix().cast<cplx>());
        cplx det = 1.0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) det *= S_scalar(es.eigenvalues()(i));
        const cplx r = sqrt_det_S(ctx, z);
        EXPECT_LT(std::abs(r * r - det), 1e-10 * std::abs(det));
    }
}

TEST(Specfun, RQuadraticForStandardBlock)
{
    const SpecfunContext ctx(SkewMatrix::standard(1.0));
    const cplx z(0.8, 0.4);
    const Eigen::Vector2d s(0.3, -1.1);
    const cplx expected = z / std::tanh(z) * s.squaredNorm();
    EXPECT_LT(std::abs(R_quadratic(ctx, z, s) - expected), 1e-13);
}

TEST(Specfun, GL1NormAtOneIsSech)
{
    EXPECT_NEAR(g_l1_norm(1.0), 1.0 / std::cosh(1.0), 1e-14);
    // quadrature of h_1 ⊗ h_1 as the square of a 1-D Simpson integral
    const double one_d = oracle::simpson([](double y) { return h_profile(1.0, y); }, -30.0, 30.0, 6000);
    EXPECT_NEAR(one_d * one_d, 1.0 / std::cosh(1.0), 1e-6);
}

TEST(Specfun, GL1NormOffAxis)
{
    for (cplx z : {cplx(1.0, 1.0), cplx(0.2, 1.7), cplx(5.0, -4.0)}) {
        const double c = (1.0 / std::tanh(z)).real();
        const double L = std::sqrt(200.0 / c);
        const double one_d = oracle::simpson([&](double y) { return h_profile(z, y); }, -L, L, 8000);
        EXPECT_NEAR(one_d * one_d, g_l1_norm(z), 1e-8 * g_l1_norm(z)) << z;
    }
    // frozen value at 1 + i
    EXPECT_NEAR(g_l1_norm(cplx(1.0, 1.0)), 0.79705112090, 1e-10);
}

TEST(Specfun, ProfileIsEvenAndDecreasing)
{
    const cplx z(0.4, 1.1);
    for (double y = 0.0; y < 10.0; y += 0.01) {
        EXPECT_EQ(h_profile(z, y), h_profile(z, -y));
        EXPECT_LE(h_profile(z, y + 0.01), h_profile(z, y));
        const double fd = (h_profile(z, y + 1e-6) - h_profile(z, y - 1e-6)) / 2e-6;
        EXPECT_NEAR(h_profile_derivative(z, y), fd, 1e-7);
    }
}

TEST(Specfun, SectorScanStaysBounded)
{
    const auto zs = sector_grid();
    ASSERT_EQ(zs.size(), 20u * 17u);
    double worst = 0.0;
    for (cplx z : zs) {
        EXPECT_LE(std::abs(std::arg(z)), 0.45 * std::numbers::pi + 1e-12);
        worst = std::max(worst, weighted_g_l1_norm(z));
    }
    EXPECT_LE(worst, 4.0);
    EXPECT_GE(worst, 1.0);
}

TEST(Specfun, WideSectorGridIsRejected)
{
    EXPECT_THROW(sector_grid(5, 5, 0.1, 1.0, 0.5 * std::numbers::pi), ValidationError);
    EXPECT_THROW(sector_grid(0, 5), ValidationError);
}
