// Acceptance run: one PASS/FAIL line per criterion with the measured values
// and wall time. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <thetalab/thetalab.hpp>

#include "oracles.hpp"

using namespace thetalab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

int failures = 0;

void run(int id, const char* title, double time_limit, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (time_limit > 0.0 && secs > time_limit) {
        o.pass = false;
        timing += fmt(" exceeds %.0f s", time_limit);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

GridField seeded_field(const GridMeta& m, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    GridField f(m);
    for (std::size_t i = 0; i < m.size(); ++i) f[i] = cplx(g(rng), g(rng));
    return f;
}

Outcome exact_kernels()
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> r(0.05, 4.0), phi(-1.4, 1.4), x(-3.0, 3.0);
    const KernelSpec unit(SkewMatrix::standard(1.0)), zero(SkewMatrix::zero(2));
    double landau = 0.0, heat = 0.0, scaling = 0.0, split = 0.0;
    Eigen::MatrixXd th = Eigen::MatrixXd::Zero(5, 5);
    th(0, 1) = 2.0, th(1, 0) = -2.0, th(2, 3) = 0.5, th(3, 2) = -0.5;
    const KernelSpec blocks{SkewMatrix(th)};
    for (int i = 0; i < 10; ++i) {
        const cplx z = std::polar(r(rng), phi(rng));
        const Eigen::VectorXd s = Eigen::Vector2d(x(rng), x(rng));
        landau = std::max(landau, rel(p_kernel(unit, z, s), oracle::landau(z, s(0), s(1))));
        heat = std::max(heat, rel(p_kernel(zero, z, s), oracle::heat(z, s)));
        for (double a : {0.5, 2.0, 3.0}) {
            const KernelSpec sa(SkewMatrix::standard(a));
            scaling = std::max(scaling, rel(p_kernel(sa, z, s), a * p_kernel(unit, a * z, std::sqrt(a) * s)));
        }
        Eigen::VectorXd u(5), v(5);
        for (int k = 0; k < 5; ++k) {
            u(k) = x(rng);
            v(k) = x(rng);
        }
        split = std::max(split, tensor_split_check(blocks, r(rng), u, v));
    }
    return {landau < 1e-12 && heat < 1e-12 && scaling < 1e-12 && split < 1e-10,
            fmt("standard %.1e, heat %.1e, scaling %.1e, split %.1e", landau, heat, scaling, split)};
}

Outcome semigroup_law()
{
    const GridMeta m(2, 64, 8.0);
    double worst = 0.0;
    std::string parts;
    for (double a : {0.0, 1.0, 2.0}) {
        const SkewMatrix th = a == 0.0 ? SkewMatrix::zero(2) : SkewMatrix::standard(a);
        const KernelSpec spec(th);
        const GridField half = sample_kernel(spec, 0.5, m);
        const double e = relative_lp_error(twisted_convolve(CocycleParams(th), half, half), sample_kernel(spec, 1.0, m), 1.0);
        worst = std::max(worst, e);
        parts += fmt("%.1e ", e);
    }
    return {worst < 1e-3, "l1 errors for 0, J, 2J: " + parts};
}

Outcome algebraic_laws()
{
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    // shifts keep the support of the test fields away from the periodic edge
    std::uniform_int_distribution<int> step(-3, 3);
    const int cases = 100;
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.3, -1.3, 0.0;
    const CocycleParams c{SkewMatrix(A)};
    const GridMeta m(2, 32, 6.0);
    double cocycle = 0.0, normal = 0.0, compose = 0.0, commute = 0.0;
    for (int i = 0; i < cases; ++i) {
        const Eigen::VectorXd s = Eigen::Vector2d(3 * g(rng), 3 * g(rng)), t = Eigen::Vector2d(3 * g(rng), 3 * g(rng)),
                              r = Eigen::Vector2d(3 * g(rng), 3 * g(rng));
        cocycle = std::max(cocycle, std::abs(sigma(c, s, t) * sigma(c, s + t, r) - sigma(c, s, t + r) * sigma(c, t, r)));
        normal = std::max(normal, std::abs(sigma(c, Eigen::Vector2d::Zero(), t) - 1.0) + std::abs(sigma(c, s, -s) - 1.0));

        GridField f = seeded_field(m, 1000 + std::uint64_t(i));
        for (std::size_t k = 0; k < m.size(); ++k)
            if (m.point(k).cwiseAbs().maxCoeff() > 0.5 * m.L) f[k] = 0.0;
        const Eigen::VectorXd u = Eigen::Vector2d(step(rng) * m.h(), step(rng) * m.h());
        const Eigen::VectorXd v = Eigen::Vector2d(step(rng) * m.h(), step(rng) * m.h());
        const GridField lhs = group_apply(c, u, group_apply(c, v, f));
        const GridField rhs = oracle::cocycle(A, u, v) * group_apply(c, u + v, f);
        compose = std::max(compose, (lhs - rhs).values().cwiseAbs().maxCoeff());
        const int j = i % 2, k = 1 - j;
        Eigen::VectorXd tj = Eigen::VectorXd::Zero(2), sk = Eigen::VectorXd::Zero(2);
        tj(j) = u(0);
        sk(k) = v(1);
        const GridField a = group_apply(c, tj, group_apply(c, sk, f));
        const GridField b = std::exp(cplx(0.0, A(j, k) * tj(j) * sk(k))) * group_apply(c, sk, group_apply(c, tj, f));
        commute = std::max(commute, (a - b).values().cwiseAbs().maxCoeff());
    }
    const RelationErrors mr = relation_phase_errors(SkewMatrix::standard(1.0), cases, 42);
    const double moyal = std::max({mr.xx, mr.dd, mr.dx});
    const double worst = std::max({cocycle, normal, compose, commute, moyal});
    return {worst < 1e-12, fmt("cocycle %.1e, normalization %.1e, composition %.1e, commutation %.1e", cocycle, normal,
                               compose, commute) +
                               fmt(", Moyal %.1e (%g cases each)", moyal, double(cases))};
}

Outcome kernel_norms()
{
    double worst = 0.0;
    for (cplx z : sector_grid(20, 17)) worst = std::max(worst, weighted_g_l1_norm(z));
    const double one_d = oracle::simpson([](double y) { return h_profile(1.0, y); }, -30.0, 30.0, 6000);
    const double quad_err = std::abs(one_d * one_d - 1.0 / std::cosh(1.0));
    const double closed_err = std::abs(g_l1_norm(1.0) - 1.0 / std::cosh(1.0));
    std::vector<double> ts, ls;
    for (double t = 1.0; t <= 3.0 + 1e-12; t += 0.25) {
        ts.push_back(t);
        ls.push_back(std::log(derivative_decay_l1(t)));
    }
    const LinearFit fit = linear_fit(ts, ls);
    return {worst <= 4.0 && quad_err < 1e-6 && closed_err < 1e-6 && fit.slope >= -3.2 && fit.slope <= -2.9,
            fmt("sector max %.4f, ||g_1||_1 errors %.1e / %.1e, decay slope %.4f", worst, quad_err, closed_err, fit.slope)};
}

Outcome spectral_gaps()
{
    const SkewMatrix J = SkewMatrix::standard(1.0);
    const double lap = spectrum(twisted_laplacian(J, GridMeta(2, 48, 8.0)), J).eigenvalues.front();
    const OscillatorResult one = harmonic_oscillator(SkewMatrix::zero(1), GridMeta(1, 200, 10.0));
    double hermite = 0.0;
    for (int k = 0; k < 5; ++k)
        hermite = std::max(hermite, std::abs(one.report.eigenvalues[std::size_t(k)] / (2 * k + 1) - 1.0));
    const OscillatorResult two = harmonic_oscillator(J, GridMeta(2, 48, 8.0));
    const double moyal = std::abs(two.report.eigenvalues.front() / std::sqrt(5.0) - 1.0);
    return {lap >= 0.97 && lap <= 1.03 && hermite < 0.01 && moyal < 0.03,
            fmt("twisted Laplacian lambda_min %.5f, Hermite max rel %.1e, Moyal d=2 lambda_min %.5f (rel %.1e)", lap,
                hermite, two.report.eigenvalues.front(), moyal)};
}

Outcome mehler()
{
    const OscillatorResult r = harmonic_oscillator(SkewMatrix::zero(1), GridMeta(1, 200, 10.0));
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
        double tr = 0.0;
        for (double l : r.report.eigenvalues)
            if (l < 60.0) tr += std::exp(-t * l);
        worst = std::max(worst, std::abs(tr * 2.0 * std::sinh(t) - 1.0));
    }
    return {worst < 0.01, fmt("max relative trace error %.2e", worst)};
}

Outcome two_routes()
{
    const SkewMatrix J = SkewMatrix::standard(1.0);
    const GridMeta m(2, 48, 8.0);
    const KernelSemigroup T(J, m);
    const GridField f = crossval_test_field(m);
    double routes = 0.0;
    GridField hp_resolvent;
    for (const LaplaceMeasure& mu : {LaplaceMeasure::dirac(1.0), LaplaceMeasure::exponential(1.0)}) {
        const GridField hp = hille_phillips_apply(mu, T, f);
        const GridField ks = apply_kernel_symbol(J, kernel_symbol_extract(mu, J, m), f);
        routes = std::max(routes, relative_lp_error(ks, hp, 2.0));
        hp_resolvent = hp;
    }
    const auto dec = SpectralCache::global().get(J, m);
    const double eig = relative_lp_error(apply_multiplier(*dec, resolvent_symbol(1.0), f), hp_resolvent, 2.0);
    return {routes < 1e-3 && eig < 1e-3, fmt("Hille-Phillips vs kernel symbol %.2e, eigen resolvent %.2e", routes, eig)};
}

Outcome bochner_riesz_means()
{
    const SkewMatrix J = SkewMatrix::standard(1.0);
    const GridMeta m(2, 48, 8.0);
    const auto dec = SpectralCache::global().get(J, m);
    const GridField f = crossval_test_field(m);
    std::vector<double> errs;
    for (double R : {4.0, 16.0, 64.0})
        errs.push_back(relative_lp_error(apply_multiplier(*dec, bochner_riesz(2.0, R), f, spectral_gap(J)), f, 2.0));
    return {errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 0.05,
            fmt("errors at R = 4, 16, 64: %.4f %.4f %.4f", errs[0], errs[1], errs[2])};
}

Outcome square_max()
{
    const SqmaxReport r = sqmax_verify({cplx(1.0), cplx(1.0, 1.0)}, 2.0, 42);
    const SquareFunctionReport s = square_function_scan(SkewMatrix::standard(1.0), 2.0, 50, 4, 42);
    const double spread = s.max / s.min;
    return {r.max_mass_error < 1e-6 && r.max_representation_error < 1e-4 && spread < 10.0 && s.max <= s.cap,
            fmt("mass %.1e, representation %.1e, square function max %.6f min %.6f", r.max_mass_error,
                r.max_representation_error, s.max, s.min) +
                fmt(" (cap %.1f)", s.cap)};
}

Outcome hormander()
{
    const HormConfig cfg;
    const MultiplierSymbol f = MultiplierSymbol::closed_form("test", [](double l) -> cplx { return l * std::exp(-l); });
    const double base = hormander_norm(f, cfg).norm;
    double dil = 0.0;
    for (int k : {1, 3, -5}) dil = std::max(dil, std::abs(hormander_norm(f.dilated(std::exp2(double(k) / cfg.q)), cfg).norm - base) / base);
    const HormReport good = hormander_norm(bochner_riesz(cfg.s + 0.5, 1.0), cfg);
    const HormReport bad = hormander_norm(bochner_riesz(cfg.s - 0.6, 1.0), cfg);
    const bool orders = required_order(2.0, 1) == 0.5 && required_order(2.0, 2) == 0.5 && required_order(2.0, 5) == 0.5 &&
                        required_order(4.0, 1) == 1.0;
    return {dil < 1e-9 && good.converged && bad.diverged && !bad.converged && orders,
            fmt("dilation %.1e, nu = 2 norm %.4f (converged %g), nu = 0.9 diverged %g", dil, good.norm,
                double(good.converged), double(bad.diverged))};
}

Outcome schur_growth()
{
    std::vector<double> logs, tri;
    for (int N : {8, 16, 32, 64, 128}) {
        logs.push_back(std::log(double(N)));
        tri.push_back(multiplier_lower_bound(triangular_symbol(N), 1.0, 20, 42));
    }
    const LinearFit fit = linear_fit(logs, tri);
    const MultiplierSymbol f = imaginary_power();
    ToeplitzOptions opt;
    opt.diagonal = 1.0;
    opt.negative = [f](double x) { return f(-x); };
    const double t16 = multiplier_lower_bound(toeplitz_symbol(f, ToeplitzMode::Signed, 16, opt), 4.0, 20, 42);
    double tmax = 0.0;
    for (int N : {32, 64, 128})
        tmax = std::max(tmax, multiplier_lower_bound(toeplitz_symbol(f, ToeplitzMode::Signed, N, opt), 4.0, 20, 42));
    return {fit.slope > 0.0 && fit.r2 > 0.9 && tmax < 3.0 * t16,
            fmt("triangular slope %.4f R^2 %.5f; lambda^i N=16 %.4f, max N<=128 %.4f", fit.slope, fit.r2, t16, tmax)};
}

Outcome transference()
{
    const FiniteWeylSystem sys = finite_weyl_system(8);
    const GridMeta m(2, sys.period, 0.5 * sys.period * sys.step);
    const CocycleParams c(sys.theta);
    double excess = 0.0;
    int held = 0;
    for (int i = 0; i < 20; ++i) {
        const TransferenceReport r = transference_check(c, seeded_field(m, 42 + std::uint64_t(i)), sys);
        excess = std::max(excess, r.excess);
        held += r.holds ? 1 : 0;
    }
    return {held == 20 && excess <= 1e-6, fmt("%g of 20 symbols hold, max relative excess %.1e", double(held), excess)};
}

} // namespace

int main()
{
    run(1, "exact kernel formulas", 1.0, exact_kernels);
    run(2, "twisted semigroup law", 30.0, semigroup_law);
    run(3, "algebraic laws", 5.0, algebraic_laws);
    run(4, "kernel norm estimates", 0.0, kernel_norms);
    run(5, "spectral gaps", 120.0, spectral_gaps);
    run(6, "Mehler trace", 0.0, mehler);
    run(7, "two-route multiplier agreement", 0.0, two_routes);
    run(8, "Bochner-Riesz means", 0.0, bochner_riesz_means);
    run(9, "square-max machinery", 0.0, square_max);
    run(10, "Hormander norms", 0.0, hormander);
    run(11, "Schur growth contrast", 0.0, schur_growth);
    run(12, "transference inequality", 0.0, transference);
    std::printf("%d of 12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
