#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "calculus.hpp"
#include "gridop.hpp"
#include "horm.hpp"
#include "kernel.hpp"
#include "moyal.hpp"
#include "schur.hpp"
#include "skewform.hpp"
#include "specfun.hpp"
#include "twistcal.hpp"

namespace thetalab {

/// One measured invariant.
struct VerifyCheck {
    std::string module;
    std::string invariant;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation; ///< "<=" or ">="
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;

    bool pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
    }

    void at_most(std::string module, std::string invariant, double value, double threshold)
    {
        checks.push_back({std::move(module), std::move(invariant), value, threshold, "<=", value <= threshold});
    }

    void at_least(std::string module, std::string invariant, double value, double threshold)
    {
        checks.push_back({std::move(module), std::move(invariant), value, threshold, ">=", value >= threshold});
    }

    void append(const VerifyReport& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }
};

/// A random skew matrix with standard normal upper entries.
inline SkewMatrix random_skew(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            A(j, k) = g(rng);
            A(k, j) = -A(j, k);
        }
    return SkewMatrix(A);
}

/// Square-max checks over a sector sample that starts with z = 1 and 1 + i.
inline VerifyReport verify_sqmax(std::uint64_t seed = 42, bool quick = false)
{
    std::vector<cplx> zs{cplx(1.0, 0.0), cplx(1.0, 1.0)};
    for (cplx z : quick ? sector_grid(6, 5) : sector_grid()) zs.push_back(z);
    const SqmaxReport r = sqmax_verify(zs, 2.0, seed);
    VerifyReport v;
    v.at_most("calculus", "square part sup ||s_z||_2 over sector", r.max_square_norm, kSquarePartCap);
    v.at_most("calculus", "mu_z mass vs ||g_z||_1", r.max_mass_error, 1e-6);
    v.at_most("calculus", "iterated-average representation error", r.max_representation_error, 1e-4);
    v.at_most("calculus", "maximal domination ratio", r.domination.max_ratio, 1.0 + 1e-12);
    double shared = 0.0;
    for (const auto& row : r.rows)
        shared = std::max(shared, std::abs(row.square_norm * row.square_norm - weighted_g_l1_norm(row.z)));
    v.at_most("calculus", "square part matches weighted ||g_z||_1 scan", shared, 1e-9);
    return v;
}

/// Square-function ratios over seeded draws, plus the single-operator case.
inline VerifyReport verify_squarefn(std::uint64_t seed = 42, bool quick = false)
{
    const SkewMatrix J = SkewMatrix::standard(1.0);
    const GridMeta meta = quick ? GridMeta(2, 32, 10.0) : GridMeta(2, 48, 12.0);
    const SquareFunctionReport r = square_function_scan(J, 2.0, quick ? 10 : 50, 4, seed, meta);
    VerifyReport v;
    v.at_most("calculus", "square-function max/min over draws", r.max / r.min, 10.0);
    v.at_most("calculus", "square-function max ratio", r.max, r.cap);
    const Eigen::Vector2d c(0.5, -0.3);
    const GridField f = gaussian_field(meta, c, 1.0);
    const double single = square_function_test(J, {cplx(1.0)}, {f}, 2.0);
    v.at_most("calculus", "single real z ratio at p = 2", single, 1.0 + 1e-2);
    return v;
}

/// The invariant suite of every module. Quick mode uses reduced sizes.
inline VerifyReport verify_all(std::uint64_t seed = 42, bool quick = false)
{
    VerifyReport v;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const SkewMatrix J = SkewMatrix::standard(1.0);

    // skewform
    {
        double spec_err = 0.0, conj_err = 0.0, recon = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + trial % 5;
            const SkewMatrix th = random_skew(n, rng);
            const CanonicalForm cf = canonical_form(th);
            Eigen::EigenSolver<Eigen::MatrixXd> es(th.matrix());
            std::vector<double> ims;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                if (es.eigenvalues()(i).imag() > kZeroBlockTol) ims.push_back(es.eigenvalues()(i).imag());
            std::sort(ims.rbegin(), ims.rend());
            if (ims.size() != cf.alphas.size()) spec_err = INFINITY;
            else
                for (std::size_t i = 0; i < ims.size(); ++i) spec_err = std::max(spec_err, std::abs(ims[i] - cf.alphas[i]));
            Eigen::MatrixXd R(n, n);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) R(j, k) = g(rng);
            const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ();
            const CanonicalForm cq = canonical_form(SkewMatrix(Q.transpose() * th.matrix() * Q));
            for (std::size_t i = 0; i < cf.alphas.size() && i < cq.alphas.size(); ++i)
                conj_err = std::max(conj_err, std::abs(cf.alphas[i] - cq.alphas[i]));
            recon = std::max(recon, cf.reconstruction_residual(th));
        }
        v.at_most("skewform", "alphas vs eigenvalue imaginary parts", spec_err, 1e-9);
        v.at_most("skewform", "alphas invariant under orthogonal conjugation", conj_err, 1e-9);
        v.at_most("skewform", "reconstruction residual", recon, 1e-10);
    }

    // specfun
    {
        double even = 0.0;
        for (int i = 0; i < 100; ++i) {
            const cplx z(2.0 * unit(rng), 2.0 * unit(rng));
            even = std::max(even, std::abs(S_scalar(z) - S_scalar(-z)) + std::abs(R_scalar(z) - R_scalar(-z)));
        }
        v.at_most("specfun", "evenness of S and R", even, 1e-12);
        double det_err = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const SkewMatrix th = random_skew(2 + trial % 3, rng);
            const SpecfunContext ctx(th);
            const cplx z(0.2 + 1.5 * std::abs(unit(rng)), unit(rng));
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(z * th.matrix().cast<cplx>());
            cplx det = 1.0;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) det *= S_scalar(es.eigenvalues()(i));
            const cplx sq = sqrt_det_S(ctx, z);
            det_err = std::max(det_err, std::abs(sq * sq - det) / std::max(1.0, std::abs(det)));
        }
        v.at_most("specfun", "sqrt_det_S squared vs eigenvalue product", det_err, 1e-8);
        double l1_err = 0.0;
        for (cplx z : {cplx(1.0, 0.0), cplx(1.0, 1.0), cplx(0.2, 2.0)}) {
            const double L = std::sqrt(160.0 / detail::coth_right(z).real());
            const double q = trapezoid_box([&](double a, double b) { return h_profile(z, a) * h_profile(z, b); }, 2, L,
                                           256, 1e-9);
            l1_err = std::max(l1_err, std::abs(q - g_l1_norm(z)));
        }
        v.at_most("specfun", "g_l1_norm vs 2-D quadrature", l1_err, 1e-6);
        double rise = 0.0;
        for (cplx z : {cplx(1.0, 0.0), cplx(0.3, 1.2), cplx(4.0, -3.0)}) {
            double prev = h_profile(z, 0.0);
            for (int i = 1; i <= 10000; ++i) {
                const double cur = h_profile(z, 0.002 * i);
                rise = std::max(rise, cur - prev);
                prev = cur;
            }
        }
        v.at_most("specfun", "h_z nonincreasing on [0, 20]", rise, 0.0);
    }

    // kernel
    {
        const KernelSpec spec(J);
        double landau = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double t = 0.1 + 2.0 * std::abs(unit(rng));
            const Eigen::Vector2d s(2.0 * unit(rng), 2.0 * unit(rng));
            const cplx ref = std::exp(-s.squaredNorm() / (4.0 * std::tanh(t))) / (4.0 * std::numbers::pi * std::sinh(t));
            landau = std::max(landau, std::abs(p_kernel(spec, t, Eigen::VectorXd(s)) - ref) / std::abs(ref));
        }
        v.at_most("kernel", "Landau formula for Theta = J", landau, 1e-12);
        const KernelSpec eps(SkewMatrix::standard(1e-3)), zero(SkewMatrix::zero(2));
        const Eigen::VectorXd s = Eigen::Vector2d(0.7, -0.4);
        const cplx pe = p_kernel(eps, cplx(1.0, 0.5), s), p0 = p_kernel(zero, cplx(1.0, 0.5), s);
        v.at_most("kernel", "heat-kernel limit at eps = 1e-3", std::abs(pe - p0) / std::abs(p0), 1e-5);
        const GridMeta m(2, quick ? 48 : 64, 8.0);
        double law = 0.0;
        for (double a : {0.0, 1.0, 2.0}) {
            const SkewMatrix th = a == 0.0 ? SkewMatrix::zero(2) : SkewMatrix::standard(a);
            const KernelSpec ks(th);
            const GridField pt = sample_kernel(ks, 0.5, m);
            const GridField conv = twisted_convolve(CocycleParams(th), pt, pt);
            law = std::max(law, relative_lp_error(conv, sample_kernel(ks, 1.0, m), 1.0));
        }
        v.at_most("kernel", "twisted semigroup law at t = s = 0.5", law, 1e-3);
    }

    // twistcal
    {
        const CocycleParams c(random_skew(3, rng));
        double cocycle = 0.0, inverse = 0.0;
        for (int i = 0; i < 100; ++i) {
            Eigen::VectorXd s(3), t(3), r(3);
            for (int k = 0; k < 3; ++k) {
                s(k) = 3.0 * unit(rng);
                t(k) = 3.0 * unit(rng);
                r(k) = 3.0 * unit(rng);
            }
            cocycle = std::max(cocycle, std::abs(sigma(c, s, t) * sigma(c, s + t, r) - sigma(c, s, t + r) * sigma(c, t, r)));
            inverse = std::max(inverse, std::abs(sigma(c, s, t) * sigma(c, t, s) - 1.0));
        }
        v.at_most("twistcal", "cocycle identity", cocycle, 1e-12);
        v.at_most("twistcal", "sigma(s, t) sigma(t, s) = 1", inverse, 1e-12);
        const GridMeta m(2, 24, 6.0);
        const CocycleParams cj(J);
        GridField f(m);
        for (std::size_t i = 0; i < m.size(); ++i) f[i] = cplx(g(rng), g(rng));
        double iso = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Eigen::Vector2d t(std::round(5 * unit(rng)) * m.h(), std::round(5 * unit(rng)) * m.h());
            const GridField u = group_apply(cj, t, f);
            for (double p : {1.0, 2.0, 3.0}) iso = std::max(iso, std::abs(u.lp_norm(p) - f.lp_norm(p)) / f.lp_norm(p));
        }
        v.at_most("twistcal", "group_apply preserves l^p norms", iso, 1e-12);
        const GridField a = gaussian_field(m, Eigen::Vector2d(0.3, -0.5), 0.8, cplx(1.0, 0.5));
        const GridField w = weyl_apply(cj, a, f);
        const GridField tc = std::pow(2.0 * std::numbers::pi, -1.0) * twisted_convolve(cj, a, f);
        v.at_most("twistcal", "weyl_apply equals scaled twisted convolution", relative_lp_error(w, tc, 2.0), 1e-10);
    }

    // gridop
    {
        const GridMeta m = quick ? GridMeta(2, 24, 6.0) : GridMeta(2, 40, 7.0);
        const OperatorMatrix A = twisted_laplacian(J, m);
        v.at_most("gridop", "sum of squares hermiticity after symmetrization", A.hermiticity_defect(), 1e-10);
        const SpectrumReport sr = spectrum(A, J);
        v.at_least("gridop", "sum of squares positive semidefinite", sr.eigenvalues.front(), -1e-10);
        v.at_most("gridop", "twisted Laplacian |lambda_min - alpha|", std::abs(sr.gap_residual), 0.03);
        const SkewMatrix J2 = SkewMatrix::standard(2.0);
        const SpectrumReport s2 = spectrum(twisted_laplacian(J2, m), J2);
        v.at_most("gridop", "twisted Laplacian |lambda_min - alpha| at alpha = 2", std::abs(s2.gap_residual), 0.05);
        SpectralCache cache;
        v.at_most("gridop", "semigroup cross-validation at t = 0.5", semigroup_crossval(J, m, 0.5, Stencil::Fourth, cache), 2e-2);
    }

    // calculus
    {
        const GridMeta m = quick ? GridMeta(2, 24, 6.0) : GridMeta(2, 32, 7.0);
        SpectralCache cache;
        const auto dec = cache.get(J, m);
        const KernelSemigroup T(J, m);
        const GridField f = crossval_test_field(m);
        double two_route = 0.0;
        for (const LaplaceMeasure& mu : {LaplaceMeasure::dirac(1.0), LaplaceMeasure::exponential(1.0)}) {
            const GridField hp = hille_phillips_apply(mu, T, f);
            const GridField ks = apply_kernel_symbol(J, kernel_symbol_extract(mu, J, m), f);
            two_route = std::max(two_route, relative_lp_error(ks, hp, 2.0));
        }
        v.at_most("calculus", "Hille-Phillips vs kernel-symbol route", two_route, 1e-3);
        double br = 0.0;
        for (double R = 2.0; R <= 128.0; R *= 2.0) {
            const MultiplierSymbol s = bochner_riesz(2.0, R);
            for (int i = 0; i < 3; ++i) {
                GridField x(m);
                for (std::size_t k = 0; k < m.size(); ++k) x[k] = cplx(g(rng), g(rng));
                br = std::max(br, apply_multiplier(*dec, s, x, 1.0).lp_norm(2.0) / x.lp_norm(2.0));
            }
        }
        v.at_most("calculus", "Bochner-Riesz l2 ratio bounded by 1", br, 1.0 + 1e-12);
    }

    // horm
    {
        HormConfig cfg;
        if (quick) {
            cfg.samples = 1 << 12;
            cfg.octaves = 6;
        }
        const MultiplierSymbol f1 = MultiplierSymbol::closed_form("a", [](double l) -> cplx { return l * std::exp(-l); });
        const MultiplierSymbol f2 = MultiplierSymbol::closed_form("b", [](double l) -> cplx { return 1.0 / (1.0 + l * l); });
        const MultiplierSymbol sum = MultiplierSymbol::closed_form("a+b", [&](double l) { return f1(l) + f2(l); });
        const MultiplierSymbol scaled = MultiplierSymbol::closed_form("-3a", [&](double l) { return -3.0 * f1(l); });
        const double n1 = hormander_norm(f1, cfg).norm, n2 = hormander_norm(f2, cfg).norm;
        v.at_most("horm", "triangle inequality excess", hormander_norm(sum, cfg).norm - (n1 + n2), 1e-9 * (n1 + n2));
        v.at_most("horm", "absolute homogeneity", std::abs(hormander_norm(scaled, cfg).norm - 3.0 * n1), 1e-9 * n1);
        HormConfig lower = cfg;
        lower.s = 1.0;
        v.at_most("horm", "monotone in s", hormander_norm(f1, lower).norm - n1, 1e-9 * n1);
        const double nd = hormander_norm(f1.dilated(std::exp2(1.0 / cfg.q)), cfg).norm;
        v.at_most("horm", "dilation invariance on the window grid", std::abs(nd - n1), 1e-9 * n1);
    }

    // schur
    {
        const SchurSymbol tri = triangular_symbol(16);
        const double a = multiplier_lower_bound(tri, 1.0, 5, seed), b = multiplier_lower_bound(tri, 1.0, 5, seed);
        v.at_most("schur", "determinism under a fixed seed", std::abs(a - b), 0.0);
        const MultiplierSymbol br = bochner_riesz(2.0, 64.0);
        const SchurSymbol toe = toeplitz_symbol(br, ToeplitzMode::Squared, 16);
        const double top = toe.materialize().cwiseAbs().maxCoeff();
        v.at_most("schur", "p = 2 bound equals max |psi|", std::abs(multiplier_lower_bound(toe, 2.0, 5, seed) - top), 1e-12);
        const auto family = schur_test_family(tri, 5, seed);
        const std::vector<Eigen::MatrixXcd> sub(family.begin(), family.begin() + 3);
        v.at_most("schur", "bound monotone in the test family",
                  multiplier_lower_bound(tri, 1.0, sub).lower_bound - multiplier_lower_bound(tri, 1.0, family).lower_bound,
                  0.0);
    }

    // moyal
    {
        const RelationErrors re = relation_phase_errors(SkewMatrix::standard(1.0), 100, seed);
        v.at_most("moyal", "X-X relation phase error", re.xx, 1e-12);
        v.at_most("moyal", "d-d relation phase error", re.dd, 1e-12);
        v.at_most("moyal", "d-X relation phase error", re.dx, 1e-12);
        double alpha_err = 0.0;
        for (double th : {0.0, 0.3, 1.0, 2.5})
            alpha_err = std::max(alpha_err, std::abs(spectral_gap(moyal_theta_prime(SkewMatrix::standard(th))) -
                                                     std::sqrt(th * th + 4.0)));
        v.at_most("moyal", "alpha of Theta' equals sqrt(theta^2 + 4)", alpha_err, 1e-9);
        const GridMeta m(1, quick ? 96 : 200, 10.0);
        const OscillatorResult osc = harmonic_oscillator(SkewMatrix::zero(1), m);
        const GridField f = gaussian_field(m, Eigen::VectorXd::Constant(1, 0.5), 1.0);
        const EigenDecomposition dec = decompose(osc.op);
        const GridField eig = dec.apply_function([](double l) { return std::exp(-0.5 * l); }, f);
        v.at_most("moyal", "oscillator eigen route vs kernel route at t = 0.5",
                  relative_lp_error(oscillator_kernel_semigroup(0.5, f), eig, 2.0), 2e-2);
        v.at_most("moyal", "oscillator |lambda_min - alpha(Theta')|", std::abs(osc.report.gap_residual), 0.01);
    }

    v.append(verify_sqmax(seed, quick));
    v.append(verify_squarefn(seed, quick));
    return v;
}

} // namespace thetalab
