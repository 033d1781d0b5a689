// Lowest eigenvalues of the Moyal harmonic oscillator in one and two
// dimensions, compared with the gap α(Θ') = Σ √(θ_j² + 4).
#include <cstdio>

#include <thetalab/thetalab.hpp>

int main()
{
    using namespace thetalab;
    const OscillatorResult one = harmonic_oscillator(SkewMatrix::zero(1), GridMeta(1, 200, 10.0));
    std::printf("d = 1:");
    for (int i = 0; i < 5; ++i) std::printf(" %.6f", one.report.eigenvalues[std::size_t(i)]);
    std::printf("   (expected 1 3 5 7 9)\n");

    const OscillatorResult two = harmonic_oscillator(SkewMatrix::standard(1.0), GridMeta(2, 40, 7.0));
    std::printf("d = 2, theta = 1: lambda_min = %.6f, alpha(Theta') = %.6f\n", two.report.eigenvalues.front(),
                two.report.alpha_ref);
}
