// Lower bounds for the triangular truncation on S^1 grow like log N, while
// the Toeplitz multiplier built from λ^i stays bounded on S^4.
#include <cmath>
#include <cstdio>
#include <vector>

#include <thetalab/thetalab.hpp>

int main()
{
    using namespace thetalab;
    const MultiplierSymbol f = imaginary_power();
    ToeplitzOptions opt;
    opt.diagonal = 1.0;
    opt.negative = [f](double x) { return f(-x); };

    std::vector<double> logs, tri;
    std::printf("%6s %14s %14s\n", "N", "tri on S^1", "lambda^i on S^4");
    for (int N = 8; N <= 64; N *= 2) {
        const double t = multiplier_lower_bound(triangular_symbol(N), 1.0, 10, 42);
        const double p = multiplier_lower_bound(toeplitz_symbol(f, ToeplitzMode::Signed, N, opt), 4.0, 10, 42);
        std::printf("%6d %14.6f %14.6f\n", N, t, p);
        logs.push_back(std::log(double(N)));
        tri.push_back(t);
    }
    const LinearFit fit = linear_fit(logs, tri);
    std::printf("tri ~ %.4f log N + %.4f  (R^2 = %.4f)\n", fit.slope, fit.intercept, fit.r2);
}
