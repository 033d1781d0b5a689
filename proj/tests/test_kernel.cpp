#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <thetalab/kernel.hpp>
#include <thetalab/twistcal.hpp>

#include "oracles.hpp"

using namespace thetalab;

namespace {

std::vector<std::pair<cplx, Eigen::Vector2d>> sample_points(std::uint64_t seed, int count)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> r(0.05, 4.0), phi(-1.4, 1.4), x(-3.0, 3.0);
    std::vector<std::pair<cplx, Eigen::Vector2d>> out;
    for (int i = 0; i < count; ++i) out.push_back({std::polar(r(rng), phi(rng)), Eigen::Vector2d(x(rng), x(rng))});
    return out;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Kernel, StandardBlockMatchesClosedForm)
{
    const KernelSpec spec(SkewMatrix::standard(1.0));
    for (const auto& [z, x] : sample_points(1, 10))
        EXPECT_LT(rel(p_kernel(spec, z, x), oracle::landau(z, x(0), x(1))), 1e-12) << z;
}

TEST(Kernel, ZeroThetaIsHeatKernel)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 4; ++n) {
        const KernelSpec spec(SkewMatrix::zero(n));
        for (const auto& [z, unused] : sample_points(3, 10)) {
            Eigen::VectorXd x(n);
            for (int k = 0; k < n; ++k) x(k) = g(rng);
            EXPECT_LT(rel(p_kernel(spec, z, x), oracle::heat(z, x)), 1e-12);
        }
    }
}

TEST(Kernel, ScalingLawInAlpha)
{
    const KernelSpec unit(SkewMatrix::standard(1.0));
    for (double a : {0.25, 2.0, 3.5}) {
        const KernelSpec spec(SkewMatrix::standard(a));
        for (const auto& [z, x] : sample_points(4, 10)) {
            const cplx lhs = p_kernel(spec, z, x);
            EXPECT_LT(rel(lhs, a * p_kernel(unit, a * z, std::sqrt(a) * x)), 1e-12);
            EXPECT_LT(rel(lhs, oracle::landau(z, x(0), x(1), a)), 1e-12);
        }
    }
}

TEST(Kernel, TensorSplitting)
{
    Eigen::MatrixXd th = Eigen::MatrixXd::Zero(5, 5);
    th(0, 1) = 2.0;
    th(1, 0) = -2.0;
    th(2, 3) = 0.5;
    th(3, 2) = -0.5;
    const KernelSpec spec{SkewMatrix(th)};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 10; ++i) {
        Eigen::VectorXd x(5), y(5);
        for (int k = 0; k < 5; ++k) {
            x(k) = g(rng);
            y(k) = g(rng);
        }
        EXPECT_LT(tensor_split_check(spec, 0.3 + i * 0.2, x, y), 1e-10);
    }
}

TEST(Kernel, ConjugationByCanonicalBasis)
{
    std::mt19937_64 rng(9);
    const Eigen::MatrixXd Q = oracle::random_orthogonal(4, rng);
    const std::vector<double> alphas{1.5, 0.5};
    const SkewMatrix J = SkewMatrix::block_diagonal(alphas, 4);
    const KernelSpec blocks(J), rotated(SkewMatrix(Q.transpose() * J.matrix() * Q, 1e-10));
    Eigen::VectorXd s(4);
    s << 0.3, -0.8, 1.1, 0.2;
    const cplx z(0.7, 0.3);
    EXPECT_LT(rel(p_kernel(rotated, z, s), p_kernel(blocks, z, Q * s)), 1e-11);
}

TEST(Kernel, KernelPhaseAndShift)
{
    const KernelSpec spec(SkewMatrix::standard(1.0));
    const Eigen::Vector2d x(0.4, 1.0), y(-0.7, 0.2);
    const cplx z(1.2, 0.4);
    const cplx k = k_kernel(spec, z, x, y);
    EXPECT_NEAR(std::abs(k), std::abs(p_kernel(spec, z, y)), 1e-15);
    EXPECT_LT(rel(shifted_kernel(spec, z, y), std::exp(z) * p_kernel(spec, z, y)), 1e-14);
}

TEST(Kernel, L1NormOfStandardKernelIsSech)
{
    // ‖p_t‖₁ = (4π sinh t)^{-1} · 4π tanh t = 1 / cosh t for real t
    const KernelSpec spec(SkewMatrix::standard(1.0));
    for (double t : {0.2, 1.0, 3.0}) EXPECT_NEAR(kernel_l1_norm(spec, t), 1.0 / std::cosh(t), 1e-8);
    // heat kernel has unit mass, including in higher dimension through the split
    EXPECT_NEAR(kernel_l1_norm(KernelSpec(SkewMatrix::zero(1)), 0.7), 1.0, 1e-8);
    EXPECT_NEAR(kernel_l1_norm(KernelSpec(SkewMatrix::zero(3)), 0.7), 1.0, 1e-8);
}

TEST(Kernel, ComplexTimeL1NormMatchesProfileBound)
{
    // |p_z^J| = h_z ⊗ h_z pointwise, so the two L¹ norms agree
    const KernelSpec spec(SkewMatrix::standard(1.0));
    for (cplx z : {cplx(1.0, 1.0), cplx(0.3, -0.9)})
        EXPECT_NEAR(kernel_l1_norm(spec, z), g_l1_norm(z), 1e-7 * g_l1_norm(z));
}

TEST(Kernel, TimeDerivativeMatchesFiniteDifference)
{
    const KernelSpec spec(SkewMatrix::standard(1.0));
    const Eigen::VectorXd s = Eigen::Vector2d(0.6, -1.3);
    for (double t : {0.5, 1.0, 2.0}) {
        const cplx fd = (p_kernel(spec, t + 1e-5, s) - p_kernel(spec, t - 1e-5, s)) / 2e-5;
        EXPECT_LT(std::abs(p_time_derivative(t, s) - fd), 1e-9);
    }
    EXPECT_THROW(p_time_derivative(0.0, s), DomainError);
}

TEST(Kernel, DerivativeDecayNormMatchesRadialQuadrature)
{
    const KernelSpec spec(SkewMatrix::standard(1.0));
    for (double t : {0.5, 1.0, 2.0}) {
        const double q = oracle::simpson(
            [&](double r) {
                const Eigen::VectorXd s = Eigen::Vector2d(r, 0.0);
                return 2.0 * std::numbers::pi * r * std::abs(p_time_derivative(t, s) + p_kernel(spec, t, s));
            },
            0.0, 40.0, 40000);
        EXPECT_NEAR(derivative_decay_l1(t), q, 1e-6 * q) << t;
    }
    EXPECT_NEAR(derivative_decay_l1(1.0), 0.25064052320, 1e-10);
}

TEST(Kernel, DerivativeDecayRate)
{
    // log ‖p_t' + p_t‖₁ against t on [1, 3]
    std::vector<double> ts, ls;
    for (double t = 1.0; t <= 3.0 + 1e-12; t += 0.25) {
        ts.push_back(t);
        ls.push_back(std::log(derivative_decay_l1(t)));
    }
    double mt = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i] / double(ts.size());
        ml += ls[i] / double(ts.size());
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mt) * (ls[i] - ml);
        sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    const double slope = sxy / sxx;
    EXPECT_GE(slope, -3.2);
    EXPECT_LE(slope, -2.9);
}

TEST(Kernel, RejectsLeftHalfPlaneAndBadShapes)
{
    const KernelSpec spec(SkewMatrix::standard(1.0));
    EXPECT_THROW(p_kernel(spec, cplx(-0.1, 1.0), Eigen::Vector2d(0, 0)), DomainError);
    EXPECT_THROW(p_kernel(spec, 1.0, Eigen::Vector3d(0, 0, 0)), ValidationError);
}

TEST(Kernel, SemigroupLawOnSmallGrid)
{
    const GridMeta m(2, 48, 8.0);
    const SkewMatrix th = SkewMatrix::standard(1.0);
    const KernelSpec spec(th);
    const GridField half = sample_kernel(spec, 0.5, m);
    const GridField conv = twisted_convolve(CocycleParams(th), half, half);
    EXPECT_LT(relative_lp_error(conv, sample_kernel(spec, 1.0, m), 1.0), 1e-3);
}
