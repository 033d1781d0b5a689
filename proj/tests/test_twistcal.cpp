#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <thetalab/moyal.hpp>
#include <thetalab/twistcal.hpp>

#include "oracles.hpp"

using namespace thetalab;

namespace {

GridField random_field(const GridMeta& m, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    GridField f(m);
    for (std::size_t i = 0; i < m.size(); ++i) f[i] = cplx(g(rng), g(rng));
    return f;
}

// Random field supported in the central half of the box.
GridField central_field(const GridMeta& m, std::mt19937_64& rng)
{
    GridField f = random_field(m, rng);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.point(i).cwiseAbs().maxCoeff() > 0.5 * m.L) f[i] = 0.0;
    return f;
}

Eigen::VectorXd on_grid_vector(const GridMeta& m, std::mt19937_64& rng, int max_steps)
{
    std::uniform_int_distribution<int> u(-max_steps, max_steps);
    Eigen::VectorXd t(m.n);
    for (int k = 0; k < m.n; ++k) t(k) = u(rng) * m.h();
    return t;
}

} // namespace

TEST(Cocycle, MatchesDefinitionAndLaws)
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(3, 3);
    A << 0, 1.3, -0.4, -1.3, 0, 2.2, 0.4, -2.2, 0;
    const CocycleParams c{SkewMatrix(A)};
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd s(3), t(3), r(3);
        for (int k = 0; k < 3; ++k) {
            s(k) = 3 * g(rng);
            t(k) = 3 * g(rng);
            r(k) = 3 * g(rng);
        }
        EXPECT_LT(std::abs(sigma(c, s, t) - oracle::cocycle(A, s, t)), 1e-15);
        EXPECT_LT(std::abs(sigma(c, s, t) * sigma(c, s + t, r) - sigma(c, s, t + r) * sigma(c, t, r)), 1e-12);
        EXPECT_EQ(sigma(c, zero, t), cplx(1.0));
        EXPECT_LT(std::abs(sigma(c, s, -s) - 1.0), 1e-13);
    }
}

TEST(TwistedConvolution, MatchesDirectDoubleLoop)
{
    std::mt19937_64 rng(2);
    for (int n : {1, 2}) {
        const GridMeta m(n, n == 1 ? 16 : 8, 3.0);
        Eigen::MatrixXd th = Eigen::MatrixXd::Zero(n, n);
        if (n == 2) {
            th(0, 1) = 0.9;
            th(1, 0) = -0.9;
        }
        const GridField f = random_field(m, rng), g = random_field(m, rng);
        const GridField a = twisted_convolve(CocycleParams(SkewMatrix(th)), f, g);
        EXPECT_LT(relative_lp_error(a, oracle::twisted_conv(th, f, g), 2.0), 1e-13);
    }
}

TEST(TwistedConvolution, ZeroThetaEqualsFft)
{
    std::mt19937_64 rng(3);
    const GridMeta m(2, 16, 4.0);
    const GridField f = random_field(m, rng), g = random_field(m, rng);
    const GridField direct = twisted_convolve(CocycleParams(SkewMatrix::zero(2)), f, g);
    EXPECT_LT(relative_lp_error(circular_convolve_fft(f, g), direct, 2.0), 1e-12);
}

TEST(TwistedConvolution, GridMismatchIsRejected)
{
    const GridField f(GridMeta(2, 8, 3.0)), g(GridMeta(2, 8, 4.0));
    EXPECT_THROW(twisted_convolve(CocycleParams(SkewMatrix::standard()), f, g), ValidationError);
}

TEST(GroupAction, CompositionLaw)
{
    std::mt19937_64 rng(4);
    const GridMeta m(2, 32, 6.0);
    Eigen::MatrixXd A(2, 2);
    A << 0, 0.7, -0.7, 0;
    const CocycleParams c{SkewMatrix(A)};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const GridField f = central_field(m, rng);
        // shifts keep the support away from the periodic edge
        const Eigen::VectorXd t = on_grid_vector(m, rng, 3), s = on_grid_vector(m, rng, 3);
        const GridField lhs = group_apply(c, t, group_apply(c, s, f));
        const GridField rhs = oracle::cocycle(A, t, s) * group_apply(c, t + s, f);
        worst = std::max(worst, (lhs - rhs).values().cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(GroupAction, CommutationOfCoordinateGroups)
{
    std::mt19937_64 rng(5);
    const GridMeta m(2, 32, 6.0);
    Eigen::MatrixXd A(2, 2);
    A << 0, 1.1, -1.1, 0;
    const CocycleParams c{SkewMatrix(A)};
    std::uniform_int_distribution<int> u(-6, 6);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const GridField f = central_field(m, rng);
        const int j = i % 2, k = 1 - j;
        const double t = u(rng) * m.h(), s = u(rng) * m.h();
        Eigen::VectorXd tj = Eigen::VectorXd::Zero(2), sk = Eigen::VectorXd::Zero(2);
        tj(j) = t;
        sk(k) = s;
        const GridField lhs = group_apply(c, tj, group_apply(c, sk, f));
        const GridField rhs = std::exp(cplx(0.0, A(j, k) * t * s)) * group_apply(c, sk, group_apply(c, tj, f));
        worst = std::max(worst, (lhs - rhs).values().cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(GroupAction, IsometricAndRejectsOffGrid)
{
    std::mt19937_64 rng(6);
    const GridMeta m(2, 16, 4.0);
    const CocycleParams c{SkewMatrix::standard(1.0)};
    const GridField f = random_field(m, rng);
    const GridField u = group_apply(c, on_grid_vector(m, rng, 20), f);
    for (double p : {1.0, 2.0, 4.0}) EXPECT_NEAR(u.lp_norm(p), f.lp_norm(p), 1e-12 * f.lp_norm(p));
    EXPECT_THROW(group_apply(c, Eigen::Vector2d(0.3 * m.h(), 0.0), f), ValidationError);
}

TEST(WeylCalculus, EqualsScaledTwistedConvolution)
{
    std::mt19937_64 rng(7);
    const GridMeta m(2, 16, 4.0);
    const CocycleParams c{SkewMatrix::standard(1.3)};
    const GridField a = random_field(m, rng), f = random_field(m, rng);
    const GridField tc = (1.0 / (2.0 * std::numbers::pi)) * twisted_convolve(c, a, f);
    EXPECT_LT(relative_lp_error(weyl_apply(c, a, f), tc, 2.0), 1e-12);
}

TEST(FourierMultiplier, GaussianSymbol)
{
    const GridMeta m(1, 128, 20.0);
    const GridField f = gaussian_field(m, Eigen::VectorXd::Zero(1), 1.0);
    // e^{-ξ²/2} applied to e^{-x²/2} gives e^{-x²/4}/√2
    const GridField out = fft_multiplier(f, [](const Eigen::VectorXd& xi) { return cplx(std::exp(-0.5 * xi.squaredNorm())); });
    GridField ref(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = m.point(i)(0);
        ref[i] = f[m.origin_index()] * std::exp(-0.25 * x * x) / std::sqrt(2.0);
    }
    EXPECT_LT(relative_lp_error(out, ref, 2.0), 1e-10);
}

TEST(Transference, HoldsOnRandomSymbols)
{
    const FiniteWeylSystem sys = finite_weyl_system(6);
    const GridMeta m(2, sys.period, 0.5 * sys.period * sys.step);
    const CocycleParams c(sys.theta);
    std::mt19937_64 rng(42);
    for (int i = 0; i < 5; ++i) {
        const TransferenceReport r = transference_check(c, random_field(m, rng), sys);
        EXPECT_TRUE(r.holds) << r.lhs << " " << r.rhs;
        EXPECT_NEAR(r.m_a, 1.0, 1e-12);
    }
}

TEST(KernelSemigroup, ApproximatesSemigroupProperty)
{
    const GridMeta m(2, 40, 7.0);
    const KernelSemigroup T(SkewMatrix::standard(1.0), m);
    const GridField f = gaussian_field(m, Eigen::Vector2d(0.5, -0.3), 1.0);
    const GridField two = T(0.6, T(0.4, f));
    EXPECT_LT(relative_lp_error(two, T(1.0, f), 2.0), 1e-4);
    EXPECT_LT(relative_lp_error(T(0.0, f), f, 2.0), 1e-15);
}
