#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <thetalab/moyal.hpp>

using namespace thetalab;

TEST(Moyal, CommutationRelationsHold)
{
    for (double th : {0.0, 1.0, 2.5}) {
        const RelationErrors e = relation_phase_errors(SkewMatrix::standard(th), 100, 42);
        EXPECT_EQ(e.cases, 100);
        EXPECT_LT(e.xx, 1e-12);
        EXPECT_LT(e.dd, 1e-12);
        EXPECT_LT(e.dx, 1e-12);
    }
    EXPECT_LT(relation_phase_errors(SkewMatrix::zero(1), 100, 42).dx, 1e-12);
}

TEST(Moyal, TraceIsValueAtOrigin)
{
    const GridMeta m(2, 8, 2.0);
    GridField f(m);
    f[m.origin_index()] = cplx(2.0, -1.0);
    EXPECT_EQ(trace(MoyalSymbol(f, SkewMatrix::standard(1.0))), cplx(2.0, -1.0));
}

TEST(Moyal, LambdaActionIsUnitary)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const GridMeta m(2, 16, 4.0);
    GridField xi(m);
    for (std::size_t i = 0; i < m.size(); ++i) xi[i] = cplx(g(rng), g(rng));
    const GridField out = lambda_action(SkewMatrix::standard(0.8), Eigen::Vector2d(2 * m.h(), -m.h()), xi);
    EXPECT_NEAR(out.lp_norm(2.0), xi.lp_norm(2.0), 1e-12 * xi.lp_norm(2.0));
}

TEST(Moyal, ThetaPrimeGap)
{
    for (double th : {0.0, 0.5, 1.0, 3.0}) {
        const SkewMatrix tp = moyal_theta_prime(SkewMatrix::standard(th));
        EXPECT_EQ(tp.dim(), 4);
        EXPECT_NEAR(spectral_gap(tp), std::sqrt(th * th + 4.0), 1e-12);
    }
    EXPECT_NEAR(spectral_gap(moyal_theta_prime(SkewMatrix::zero(1))), 1.0, 1e-15);
}

TEST(Oscillator, OneDimensionalHermiteSpectrum)
{
    const OscillatorResult r = harmonic_oscillator(SkewMatrix::zero(1), GridMeta(1, 200, 10.0));
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(r.report.eigenvalues[std::size_t(k)], 2 * k + 1, 0.01 * (2 * k + 1));
    EXPECT_NEAR(r.report.alpha_ref, 1.0, 1e-15);
}

TEST(Oscillator, MehlerTrace)
{
    const OscillatorResult r = harmonic_oscillator(SkewMatrix::zero(1), GridMeta(1, 200, 10.0));
    for (double t : {0.5, 1.0, 2.0}) {
        double tr = 0.0;
        for (double l : r.report.eigenvalues)
            if (l < 60.0) tr += std::exp(-t * l);
        EXPECT_NEAR(tr, 1.0 / (2.0 * std::sinh(t)), 0.01 / (2.0 * std::sinh(t)));
    }
}

TEST(Oscillator, KernelRouteMatchesEigenRoute)
{
    const GridMeta m(1, 128, 10.0);
    const OscillatorResult r = harmonic_oscillator(SkewMatrix::zero(1), m);
    const EigenDecomposition dec = decompose(r.op);
    const GridField f = gaussian_field(m, Eigen::VectorXd::Constant(1, 0.5), 1.0);
    const GridField eig = dec.apply_function([](double l) { return std::exp(-0.5 * l); }, f);
    EXPECT_LT(relative_lp_error(oscillator_kernel_semigroup(0.5, f), eig, 2.0), 1e-3);
    EXPECT_THROW(oscillator_kernel_semigroup(0.0, f), DomainError);
}

TEST(Oscillator, RejectsUnsupportedDimension)
{
    EXPECT_THROW(harmonic_oscillator(SkewMatrix::zero(3), GridMeta(3, 4, 2.0)), ValidationError);
    EXPECT_THROW(harmonic_oscillator(SkewMatrix::zero(1), GridMeta(2, 4, 2.0)), ValidationError);
}

TEST(FiniteWeyl, ProjectiveRelation)
{
    const FiniteWeylSystem w = finite_weyl_system(10);
    const CocycleParams c(w.theta);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(-9, 9);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const std::vector<int> a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const Eigen::MatrixXcd lhs = w.element(a) * w.element(b);
        const Eigen::MatrixXcd rhs =
            sigma(c, Eigen::Vector2d(a[0] * w.step, a[1] * w.step), Eigen::Vector2d(b[0] * w.step, b[1] * w.step)) *
            w.element({a[0] + b[0], a[1] + b[1]});
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-12);
}
