// thetalab command-line driver.
//
// Every subcommand prints a JSON report on stdout. Tabular results go to a
// CSV file when --csv is given and are embedded in the JSON otherwise.
// Exit codes: 0 success, 1 invalid input, 2 numerical failure or a failed
// verification.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <thetalab/thetalab.hpp>

namespace {

using namespace thetalab;
using json = nlohmann::ordered_json;

/// Exit status for a failed verification; shares the numerical-failure code.
struct VerifyFailed {};

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size() || !std::isfinite(v))
            throw ValidationError(what + ": cannot parse '" + tok + "' as a number");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError(what + ": empty list");
    return out;
}

cplx parse_complex(const std::string& text, const std::string& what)
{
    const auto v = parse_list(text, what);
    if (v.size() > 2) throw ValidationError(what + ": expected re or re,im");
    return {v[0], v.size() == 2 ? v[1] : 0.0};
}

GridMeta parse_grid(const std::string& text, int n)
{
    const auto v = parse_list(text, "--grid");
    if (v.size() != 2) throw ValidationError("--grid: expected N,L");
    if (v[0] != std::floor(v[0]) || v[0] < 2.0 || v[0] > 4096.0)
        throw ValidationError("--grid: N must be an integer in [2, 4096]");
    return GridMeta(n, int(v[0]), v[1]);
}

SkewMatrix read_theta(const std::string& path) { return SkewMatrix(io::read_matrix(path)); }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json header(const std::string& command, std::uint64_t seed)
{
    json j;
    j["command"] = command;
    j["version"] = version;
    j["seed"] = seed;
    return j;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

/// Writes the table to `path`, or stores it under j["table"] when path is empty.
void emit_table(json& j, const io::Table& t, const std::string& path, std::uint64_t seed)
{
    if (path.empty()) {
        j["table"]["columns"] = t.header;
        j["table"]["rows"] = t.rows;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    io::write_table(out, t, seed);
    j["csv"] = path;
}

std::vector<int> parse_sizes(const std::string& text)
{
    std::vector<int> out;
    for (double v : parse_list(text, "--sizes")) {
        if (v != std::floor(v) || v < 1 || v > kMaxSchurSize)
            throw ValidationError("--sizes: entries must be integers in [1, 512]");
        out.push_back(int(v));
    }
    return out;
}

Stencil parse_stencil(int order)
{
    if (order == 2) return Stencil::Second;
    if (order == 4) return Stencil::Fourth;
    throw ValidationError("--stencil must be 2 or 4");
}

json verify_json(const VerifyReport& r, const std::string& command, std::uint64_t seed)
{
    json j = header(command, seed);
    j["pass"] = r.pass();
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"module", c.module},
                          {"invariant", c.invariant},
                          {"value", c.value},
                          {"relation", c.relation},
                          {"threshold", c.threshold},
                          {"pass", c.pass}});
    j["checks"] = checks;
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"thetalab: numerical experiments on twisted convolution and Weyl-type sums of squares"};
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "Seed for every randomized step")->capture_default_str();

    // canon
    std::string canon_matrix;
    auto* canon = app.add_subcommand("canon", "Canonical block form of a skew matrix");
    canon->add_option("--matrix", canon_matrix, "Matrix file (whitespace or comma separated)")->required();

    // kernel
    std::string kernel_theta, kernel_z = "1,0", kernel_point = "0", kernel_csv;
    bool kernel_shifted = false;
    int scan_radial = 20, scan_angular = 17;
    auto* kernel = app.add_subcommand("kernel", "Evaluate the twisted heat kernel");
    kernel->add_option("--theta", kernel_theta, "Skew matrix file")->required();
    kernel->add_option("--z", kernel_z, "Complex time re,im")->capture_default_str();
    kernel->add_option("--point", kernel_point, "Point s as comma separated coordinates")->capture_default_str();
    kernel->add_flag("--shifted", kernel_shifted, "Evaluate e^{αz} p_z instead of p_z");
    kernel->require_subcommand(0, 1);
    auto* scan = kernel->add_subcommand("scan-l1", "L1 norms of p_z over a sector grid of z");
    scan->add_option("--radial", scan_radial, "Radial samples")->check(CLI::Range(1, 200))->capture_default_str();
    scan->add_option("--angular", scan_angular, "Angular samples")->check(CLI::Range(1, 200))->capture_default_str();
    scan->add_option("--csv", kernel_csv, "Write the table here instead of stdout");

    // twist conv
    std::string tw_theta, tw_f, tw_g, tw_out;
    auto* twist = app.add_subcommand("twist", "Twisted convolution tools");
    twist->require_subcommand(1);
    auto* conv = twist->add_subcommand("conv", "f *_Θ g on a grid");
    conv->add_option("--theta", tw_theta, "Skew matrix file")->required();
    conv->add_option("--f", tw_f, "Left field file")->required();
    conv->add_option("--g", tw_g, "Right field file")->required();
    conv->add_option("--out", tw_out, "Output field file (.csv for text)")->required();

    // spectrum
    std::string sp_theta, sp_grid, sp_csv;
    int sp_count = 10, sp_stencil = 4;
    auto* spec = app.add_subcommand("spectrum", "Lowest eigenvalues of the discretized twisted Laplacian");
    spec->add_option("--theta", sp_theta, "Skew matrix file")->required();
    spec->add_option("--grid", sp_grid, "N,L")->required();
    spec->add_option("--count", sp_count, "Number of eigenvalues to report")->check(CLI::PositiveNumber)->capture_default_str();
    spec->add_option("--stencil", sp_stencil, "Finite-difference order (2 or 4)")->capture_default_str();
    spec->add_option("--csv", sp_csv, "Write eigenvalues to this CSV file");

    // multiplier
    std::string mu_theta, mu_grid, mu_symbol, mu_f, mu_out;
    auto* mult = app.add_subcommand("multiplier", "Apply a spectral multiplier of the twisted Laplacian");
    mult->add_option("--theta", mu_theta, "Skew matrix file")->required();
    mult->add_option("--grid", mu_grid, "N,L")->required();
    mult->add_option("--symbol", mu_symbol, "exp:t | resolvent:c | br:nu,R | pow_i[:g] | one")->required();
    mult->add_option("--f", mu_f, "Input field (default: Gaussian test field)");
    mult->add_option("--out", mu_out, "Output field file");

    // horm
    std::string hm_symbol;
    HormConfig hcfg;
    double ord_p = 2.0;
    int ord_d = 1;
    auto* horm = app.add_subcommand("horm", "Hörmander-Sobolev norm of a multiplier");
    horm->require_subcommand(0, 1);
    horm->add_option("--symbol", hm_symbol, "Multiplier spec");
    horm->add_option("--s", hcfg.s, "Sobolev order")->check(CLI::PositiveNumber)->capture_default_str();
    horm->add_option("--octaves", hcfg.octaves, "Dyadic octaves on each side")->check(CLI::Range(1, 40))->capture_default_str();
    horm->add_option("--q", hcfg.q, "Windows per octave")->check(CLI::Range(1, 64))->capture_default_str();
    horm->add_option("--samples", hcfg.samples, "Samples per window")->check(CLI::Range(64, 1 << 20))->capture_default_str();
    horm->add_option("--levels", hcfg.levels, "Band refinement levels")->check(CLI::Range(1, 8))->capture_default_str();
    auto* order = horm->add_subcommand("order", "Sobolev order needed at exponent p in dimension d");
    order->add_option("--p", ord_p, "Exponent")->required();
    order->add_option("--d", ord_d, "Dimension")->required()->check(CLI::PositiveNumber);

    // schur
    std::string sc_symbol = "tri", sc_sizes = "8,16,32,64,128", sc_diag, sc_csv;
    double sc_p = 1.0;
    int sc_trials = 200;
    auto* schur = app.add_subcommand("schur", "Lower bounds for Schur multiplier norms on S^p");
    schur->add_option("--symbol", sc_symbol, "tri | toeplitz:<spec> | toeplitz2:<spec>")->capture_default_str();
    schur->add_option("--p", sc_p, "Schatten exponent")->capture_default_str();
    schur->add_option("--sizes", sc_sizes, "Comma separated matrix sizes")->capture_default_str();
    schur->add_option("--trials", sc_trials, "Random matrices of each kind")->check(CLI::Range(1, 100000))->capture_default_str();
    schur->add_option("--diagonal", sc_diag, "Toeplitz diagonal value re,im");
    schur->add_option("--csv", sc_csv, "Write (N, lower_bound) to this CSV file");

    // moyal
    std::string my_theta, my_grid, my_csv;
    int my_count = 10, my_cases = 100;
    auto* moyal = app.add_subcommand("moyal", "Moyal-plane experiments");
    moyal->require_subcommand(1);
    auto* mspec = moyal->add_subcommand("spectrum", "Spectrum of the Moyal harmonic oscillator");
    mspec->add_option("--theta", my_theta, "d x d skew matrix file (d = 1 or 2)")->required();
    mspec->add_option("--grid", my_grid, "N,L")->required();
    mspec->add_option("--count", my_count, "Number of eigenvalues to report")->check(CLI::PositiveNumber)->capture_default_str();
    mspec->add_option("--csv", my_csv, "Write eigenvalues to this CSV file");
    auto* mrel = moyal->add_subcommand("relations", "Phase errors of the Moyal commutation relations");
    mrel->add_option("--theta", my_theta, "d x d skew matrix file")->required();
    mrel->add_option("--cases", my_cases, "Random cases per relation")->check(CLI::Range(1, 100000))->capture_default_str();

    // verify
    bool quick = false;
    auto* verify = app.add_subcommand("verify", "Invariant suites");
    verify->require_subcommand(1);
    auto* v_sqmax = verify->add_subcommand("sqmax", "Square-max machinery");
    auto* v_sqfn = verify->add_subcommand("squarefn", "Square-function ratios");
    auto* v_all = verify->add_subcommand("all", "Every module's invariants");
    for (auto* v : {v_sqmax, v_sqfn, v_all}) v->add_flag("--quick", quick, "Reduced problem sizes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*canon) {
            const SkewMatrix th = read_theta(canon_matrix);
            const CanonicalForm cf = canonical_form(th);
            json j = header("canon", seed);
            j["alphas"] = cf.alphas;
            j["alpha"] = cf.alpha;
            j["beta"] = cf.beta;
            j["blocks"] = cf.k;
            j["reconstruction_residual"] = cf.reconstruction_residual(th);
            emit(j);
        } else if (*kernel) {
            const KernelSpec ks(read_theta(kernel_theta));
            if (*scan) {
                const auto rows = kernel_l1_scan(ks, sector_grid(scan_radial, scan_angular));
                io::Table t{{"re_z", "im_z", "l1", "weighted_l1"}, {}};
                double worst = 0.0;
                for (const auto& r : rows) {
                    t.rows.push_back({r.z.real(), r.z.imag(), r.l1, r.weighted});
                    worst = std::max(worst, r.weighted);
                }
                if (kernel_csv.empty()) {
                    io::write_table(std::cout, t, seed);
                } else {
                    json j = header("kernel scan-l1", seed);
                    emit_table(j, t, kernel_csv, seed);
                    j["max_weighted_l1"] = worst;
                    emit(j);
                }
            } else {
                const cplx z = parse_complex(kernel_z, "--z");
                const auto p = parse_list(kernel_point, "--point");
                if (int(p.size()) != ks.dim())
                    throw ValidationError("--point: expected " + std::to_string(ks.dim()) + " coordinates");
                const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(p.data(), Eigen::Index(p.size()));
                const cplx v = kernel_shifted ? shifted_kernel(ks, z, s) : p_kernel(ks, z, s);
                json j = header("kernel", seed);
                j["z"] = cjson(z);
                j["point"] = p;
                j["shifted"] = kernel_shifted;
                j["value"] = cjson(v);
                j["abs"] = std::abs(v);
                emit(j);
            }
        } else if (*conv) {
            const SkewMatrix th = read_theta(tw_theta);
            const GridField f = io::read_field(tw_f), g = io::read_field(tw_g);
            const GridField out = twisted_convolve(CocycleParams(th), f, g);
            io::write_field(tw_out, out);
            json j = header("twist conv", seed);
            j["grid"] = {{"n", out.meta().n}, {"N", out.meta().N}, {"L", out.meta().L}};
            j["out"] = tw_out;
            j["l1_norm"] = out.lp_norm(1.0);
            j["l2_norm"] = out.lp_norm(2.0);
            j["young_bound"] = f.lp_norm(1.0) * g.lp_norm(1.0);
            emit(j);
        } else if (*spec) {
            const SkewMatrix th = read_theta(sp_theta);
            const GridMeta m = parse_grid(sp_grid, th.dim());
            const SpectrumReport r = spectrum(twisted_laplacian(th, m, parse_stencil(sp_stencil)), th);
            const int count = std::min<int>(sp_count, int(r.eigenvalues.size()));
            json j = header("spectrum", seed);
            j["grid"] = {{"n", m.n}, {"N", m.N}, {"L", m.L}};
            j["alpha"] = r.alpha_ref;
            j["lambda_min"] = r.eigenvalues.front();
            j["residual"] = r.gap_residual;
            io::Table t{{"index", "eigenvalue"}, {}};
            for (int i = 0; i < count; ++i) t.rows.push_back({double(i), r.eigenvalues[std::size_t(i)]});
            emit_table(j, t, sp_csv, seed);
            emit(j);
        } else if (*mult) {
            const SkewMatrix th = read_theta(mu_theta);
            const GridMeta m = parse_grid(mu_grid, th.dim());
            const MultiplierSymbol sym = parse_symbol(mu_symbol);
            const GridField f = mu_f.empty() ? crossval_test_field(m) : io::read_field(mu_f);
            if (f.meta() != m) throw ValidationError("--f: field grid does not match --grid");
            const auto dec = SpectralCache::global().get(th, m);
            const bool is_br = mu_symbol.rfind("br:", 0) == 0;
            const double shift = is_br ? spectral_gap(th) : 0.0;
            const GridField out = apply_multiplier(*dec, sym, f, shift);
            json j = header("multiplier", seed);
            j["symbol"] = sym.id();
            j["shift"] = shift;
            j["norm_ratio"] = out.lp_norm(2.0) / f.lp_norm(2.0);
            std::optional<LaplaceMeasure> mu;
            if (mu_symbol.rfind("exp:", 0) == 0) mu = LaplaceMeasure::dirac(parse_list(mu_symbol.substr(4), "exp")[0]);
            if (mu_symbol.rfind("resolvent:", 0) == 0)
                mu = LaplaceMeasure::exponential(parse_list(mu_symbol.substr(10), "resolvent")[0]);
            if (mu) {
                const KernelSemigroup T(th, m);
                j["hille_phillips_residual"] = relative_lp_error(hille_phillips_apply(*mu, T, f), out, 2.0);
                j["kernel_symbol_residual"] =
                    relative_lp_error(apply_kernel_symbol(th, kernel_symbol_extract(*mu, th, m), f), out, 2.0);
            }
            if (is_br) j["identity_residual"] = relative_lp_error(out, f, 2.0);
            if (!mu_out.empty()) {
                io::write_field(mu_out, out);
                j["out"] = mu_out;
            }
            emit(j);
        } else if (*horm) {
            if (*order) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", required_order(ord_p, ord_d));
                std::cout << buf << '\n';
            } else {
                if (hm_symbol.empty()) throw ValidationError("horm: --symbol is required");
                const MultiplierSymbol sym = parse_symbol(hm_symbol);
                const HormReport r = hormander_norm(sym, hcfg);
                json j = header("horm", seed);
                j["symbol"] = sym.id();
                j["s"] = hcfg.s;
                j["norm"] = std::isfinite(r.norm) ? json(r.norm) : json(nullptr);
                j["converged"] = r.converged;
                j["diverged"] = r.diverged;
                j["infinite"] = r.infinite;
                j["levels_used"] = r.levels_used;
                j["windows"] = r.windows;
                j["argmax_t"] = r.argmax_t;
                j["history"] = r.history;
                emit(j);
            }
        } else if (*schur) {
            if (!(sc_p >= 1.0)) throw ValidationError("--p must be >= 1");
            const std::vector<int> sizes = parse_sizes(sc_sizes);
            std::function<SchurSymbol(int)> make;
            if (sc_symbol == "tri") {
                make = triangular_symbol;
            } else {
                const bool squared = sc_symbol.rfind("toeplitz2:", 0) == 0;
                const bool signed_mode = sc_symbol.rfind("toeplitz:", 0) == 0;
                if (!squared && !signed_mode) throw ValidationError("--symbol: expected tri, toeplitz:<spec> or toeplitz2:<spec>");
                const MultiplierSymbol f = parse_symbol(sc_symbol.substr(sc_symbol.find(':') + 1));
                ToeplitzOptions opt;
                if (!sc_diag.empty()) opt.diagonal = parse_complex(sc_diag, "--diagonal");
                opt.negative = [f](double x) { return f(-x); };
                const ToeplitzMode mode = squared ? ToeplitzMode::Squared : ToeplitzMode::Signed;
                make = [f, mode, opt](int N) { return toeplitz_symbol(f, mode, N, opt); };
            }
            io::Table t{{"N", "lower_bound"}, {}};
            std::vector<double> logs, bounds;
            for (int N : sizes) {
                const double b = multiplier_lower_bound(make(N), sc_p, sc_trials, seed);
                t.rows.push_back({double(N), b});
                logs.push_back(std::log(double(N)));
                bounds.push_back(b);
            }
            json j = header("schur", seed);
            j["symbol"] = sc_symbol;
            j["p"] = sc_p;
            j["trials"] = sc_trials;
            if (sizes.size() >= 2 && logs.front() != logs.back()) {
                const LinearFit fit = linear_fit(logs, bounds);
                j["regression"] = {{"against", "log N"}, {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
            }
            emit_table(j, t, sc_csv, seed);
            emit(j);
        } else if (*mspec) {
            const SkewMatrix th = read_theta(my_theta);
            const GridMeta m = parse_grid(my_grid, th.dim());
            const OscillatorResult r = harmonic_oscillator(th, m);
            const int count = std::min<int>(my_count, int(r.report.eigenvalues.size()));
            json j = header("moyal spectrum", seed);
            j["alpha"] = r.report.alpha_ref;
            j["lambda_min"] = r.report.eigenvalues.front();
            j["residual"] = r.report.gap_residual;
            io::Table t{{"index", "eigenvalue"}, {}};
            for (int i = 0; i < count; ++i) t.rows.push_back({double(i), r.report.eigenvalues[std::size_t(i)]});
            emit_table(j, t, my_csv, seed);
            emit(j);
        } else if (*mrel) {
            const RelationErrors e = relation_phase_errors(read_theta(my_theta), my_cases, seed);
            json j = header("moyal relations", seed);
            j["cases"] = e.cases;
            j["xx"] = e.xx;
            j["dd"] = e.dd;
            j["dx"] = e.dx;
            j["pass"] = std::max({e.xx, e.dd, e.dx}) < 1e-12;
            emit(j);
        } else if (*verify) {
            VerifyReport r;
            std::string name;
            if (*v_sqmax) {
                r = verify_sqmax(seed, quick);
                name = "verify sqmax";
            } else if (*v_sqfn) {
                r = verify_squarefn(seed, quick);
                name = "verify squarefn";
            } else {
                r = verify_all(seed, quick);
                name = "verify all";
            }
            json j = verify_json(r, name, seed);
            j["quick"] = quick;
            emit(j);
            for (const auto& c : r.checks)
                if (!c.pass)
                    std::cerr << "FAIL " << c.module << ": " << c.invariant << " = " << c.value << " (needs "
                              << c.relation << ' ' << c.threshold << ")\n";
            if (!r.pass()) throw VerifyFailed{};
        }
    } catch (const VerifyFailed&) {
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
