// Evaluates the twisted heat kernel for Θ = α𝒥 and checks the semigroup law
// p_t ∗_Θ p_s = p_{t+s} on a grid.
#include <cstdio>

#include <thetalab/thetalab.hpp>

int main()
{
    using namespace thetalab;
    const GridMeta grid(2, 64, 8.0);
    for (double a : {0.0, 1.0, 2.0}) {
        const SkewMatrix theta = a == 0.0 ? SkewMatrix::zero(2) : SkewMatrix::standard(a);
        const KernelSpec spec(theta);
        const cplx origin = p_kernel(spec, 1.0, Eigen::VectorXd::Zero(2));
        const GridField half = sample_kernel(spec, 0.5, grid);
        const GridField conv = twisted_convolve(CocycleParams(theta), half, half);
        const double err = relative_lp_error(conv, sample_kernel(spec, 1.0, grid), 1.0);
        std::printf("alpha = %.1f  p_1(0) = %.12f  ||p_1 - p_.5 * p_.5||_1 / ||p_1||_1 = %.3e\n", a, origin.real(), err);
    }
}
