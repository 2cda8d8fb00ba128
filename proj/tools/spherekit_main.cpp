#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spherekit/calculus.hpp"
#include "spherekit/expr.hpp"
#include "spherekit/poisson.hpp"
#include "spherekit/sfun_io.hpp"

using namespace spherekit;

namespace {

std::vector<double> parse_numbers(const std::string& text, size_t count, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw parse_error(std::string("bad number in ") + what, pos);
    }
    if (out.size() != count)
        throw parse_error(std::string(what) + ": expected " + std::to_string(count) + " values", 0);
    return out;
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw parse_error("--sizes: expected a comma-separated list", 0);
    return out;
}

sphere_fn make_fn(const std::string& expr_text, const std::string& coords) {
    const Expr e = Expr::parse(expr_text);
    if (coords == "sph" && e.vars() == VarSet::cart)
        throw parse_error("--coords sph given but the expression uses x,y,z", 0);
    if (coords == "cart" && e.vars() == VarSet::sph)
        throw parse_error("--coords cart given but the expression uses lam,th", 0);
    return e.as_sphere_fn();
}

void print_summary(const LowRankSphereFun& f) {
    std::printf("sphere function\n");
    std::printf("  %-14s %6s %16s\n", "domain", "rank", "vertical scale");
    std::printf("  %-14s %6d %16.3g\n", "unit sphere", f.rank(), f.vscale);
}

// One term per lambda mode: d = 1, the coefficient column as the theta
// factor and a one-hot lambda factor. Parity follows the mode symmetry.
LowRankSphereFun solution_to_fun(const Matrix& x, double vscale, double tol) {
    LowRankSphereFun f;
    const int m = x.rows(), n = x.cols();
    for (int kc = 0; kc < n; ++kc) {
        const int k = kc - n / 2;
        CoeffVec col(m), row(n);
        bool nonzero = false;
        for (int i = 0; i < m; ++i) {
            col[i] = x.at(i, kc);
            if (col[i] != complex{}) nonzero = true;
        }
        if (!nonzero) continue;
        row.mode(k) = 1.0;
        f.d.push_back(1.0);
        f.col_coeffs.push_back(std::move(col));
        f.row_coeffs.push_back(std::move(row));
        f.parity.push_back(k % 2 == 0 ? Parity::even : Parity::odd);
    }
    f.vscale = vscale;
    f.tol = tol;
    return f;
}

struct Rgb {
    unsigned char r, g, b;
};

// Fixed 256-entry diverging colormap, interpolated from nine anchors.
const std::array<Rgb, 256>& colormap() {
    static const std::array<Rgb, 256> table = [] {
        constexpr int anchors[9][3] = {{59, 76, 192},   {98, 130, 234},  {141, 176, 254},
                                       {184, 208, 249}, {221, 221, 221}, {245, 196, 173},
                                       {244, 154, 123}, {222, 96, 77},   {180, 4, 38}};
        std::array<Rgb, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double s = i / 255.0 * 8.0;
            const int a = std::min(7, static_cast<int>(s));
            const double w = s - a;
            t[i].r = static_cast<unsigned char>(std::lround((1 - w) * anchors[a][0] + w * anchors[a + 1][0]));
            t[i].g = static_cast<unsigned char>(std::lround((1 - w) * anchors[a][1] + w * anchors[a + 1][1]));
            t[i].b = static_cast<unsigned char>(std::lround((1 - w) * anchors[a][2] + w * anchors[a + 1][2]));
        }
        return t;
    }();
    return table;
}

void write_raster(const std::string& path, const std::string& format,
                  const std::vector<double>& vals, int rows, int cols) {
    double lo = vals[0], hi = vals[0];
    for (double v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    if (format == "pgm") {
        out << "P5\n" << cols << " " << rows << "\n255\n";
        for (double v : vals) out.put(static_cast<char>(std::lround((v - lo) / span * 255.0)));
    } else {
        out << "P6\n" << cols << " " << rows << "\n255\n";
        for (double v : vals) {
            const Rgb& c = colormap()[static_cast<size_t>(std::lround((v - lo) / span * 255.0))];
            out.put(static_cast<char>(c.r));
            out.put(static_cast<char>(c.g));
            out.put(static_cast<char>(c.b));
        }
    }
    if (!out) throw io_error("write to '" + path + "' failed");
}

int run(int argc, char** argv) {
    CLI::App app{"computing with smooth functions on the unit sphere"};
    app.require_subcommand(1);

    std::string expr_text, coords = "cart", in_path, out_path, rhs_path, sol_path;
    std::string point_text, sph_text, dir = "x", format = "csv", sizes_text = "256,512,1024";
    std::string vec_prefix, bench_what;
    double tol = 0x1p-52;
    int m_size = 64, n_size = 64;

    CLI::App* c_construct = app.add_subcommand("construct", "build a function from an expression");
    c_construct->add_option("--expr", expr_text)->required();
    c_construct->add_option("--coords", coords)->check(CLI::IsMember({"cart", "sph"}));
    c_construct->add_option("--tol", tol);
    c_construct->add_option("--out", out_path)->required();

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate a stored function at a point");
    c_eval->add_option("file", in_path)->required();
    c_eval->add_option("--point", point_text);
    c_eval->add_option("--sph", sph_text);

    CLI::App* c_sum2 = app.add_subcommand("sum2", "surface integral");
    c_sum2->add_option("file", in_path)->required();

    CLI::App* c_diff = app.add_subcommand("diff", "tangential derivative");
    c_diff->add_option("file", in_path)->required();
    c_diff->add_option("--dir", dir)->check(CLI::IsMember({"x", "y", "z"}));
    c_diff->add_option("--out", out_path)->required();

    CLI::App* c_grad = app.add_subcommand("grad", "surface gradient (writes .x/.y/.z components)");
    c_grad->add_option("file", in_path)->required();
    c_grad->add_option("--out", out_path)->required();

    CLI::App* c_div = app.add_subcommand("div", "surface divergence of a vector field");
    c_div->add_option("--in-vec", vec_prefix)->required();
    c_div->add_option("--out", out_path)->required();

    CLI::App* c_curl = app.add_subcommand("curl", "surface curl (scalar input: n x grad)");
    c_curl->add_option("--in", in_path);
    c_curl->add_option("--in-vec", vec_prefix);
    c_curl->add_option("--out", out_path)->required();

    CLI::App* c_vort = app.add_subcommand("vort", "vorticity of a tangent vector field");
    c_vort->add_option("--in-vec", vec_prefix)->required();
    c_vort->add_option("--out", out_path)->required();

    CLI::App* c_poisson = app.add_subcommand("poisson", "solve the surface Poisson equation");
    c_poisson->add_option("--expr", expr_text);
    c_poisson->add_option("--coords", coords)->check(CLI::IsMember({"cart", "sph"}));
    c_poisson->add_option("--in", in_path);
    c_poisson->add_option("--m", m_size)->required();
    c_poisson->add_option("--n", n_size)->required();
    c_poisson->add_option("--out", out_path)->required();

    CLI::App* c_sample = app.add_subcommand("sample", "rasterize a stored function");
    c_sample->add_option("file", in_path)->required();
    c_sample->add_option("--m", m_size)->required();
    c_sample->add_option("--n", n_size)->required();
    c_sample->add_option("--format", format)->check(CLI::IsMember({"csv", "pgm", "ppm"}));
    c_sample->add_option("--out", out_path)->required();

    CLI::App* c_resid = app.add_subcommand("residual", "check a Poisson solution against its data");
    c_resid->add_option("--rhs", rhs_path)->required();
    c_resid->add_option("--sol", sol_path)->required();

    CLI::App* c_bench = app.add_subcommand("bench", "timing table");
    c_bench->add_option("what", bench_what)->check(CLI::IsMember({"poisson"}))->required();
    c_bench->add_option("--sizes", sizes_text);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (c_construct->parsed()) {
        ConstructorConfig cfg;
        cfg.tol = tol;
        const LowRankSphereFun f = construct(make_fn(expr_text, coords), cfg);
        print_summary(f);
        save_sfun(f, out_path);
        return 0;
    }

    if (c_eval->parsed()) {
        const LowRankSphereFun f = load_sfun(in_path);
        complex v;
        if (!point_text.empty()) {
            const std::vector<double> p = parse_numbers(point_text, 3, "--point");
            v = evaluate(f, CartPoint{p[0], p[1], p[2]});
        } else if (!sph_text.empty()) {
            const std::vector<double> p = parse_numbers(sph_text, 2, "--sph");
            v = evaluate(f, SphPoint{p[0], p[1]});
        } else {
            throw parse_error("eval: give --point x,y,z or --sph lam,th", 0);
        }
        if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())))
            std::fprintf(stderr, "warning: imaginary part %.3g discarded\n", v.imag());
        std::printf("%.17g\n", v.real());
        return 0;
    }

    if (c_sum2->parsed()) {
        const complex s = sum2(load_sfun(in_path));
        if (std::abs(s.imag()) > 1e-12 * std::max(1.0, std::abs(s.real())))
            std::fprintf(stderr, "warning: imaginary part %.3g discarded\n", s.imag());
        std::printf("%.17g\n", s.real());
        return 0;
    }

    if (c_diff->parsed()) {
        const Axis a = dir == "x" ? Axis::x : dir == "y" ? Axis::y : Axis::z;
        const LowRankSphereFun d = diff_tangential(load_sfun(in_path), a);
        print_summary(d);
        save_sfun(d, out_path);
        return 0;
    }

    auto load_vec = [](const std::string& prefix) {
        return VectorSphereFun{load_sfun(prefix + ".x.sfun"), load_sfun(prefix + ".y.sfun"),
                               load_sfun(prefix + ".z.sfun")};
    };
    auto save_vec = [](const VectorSphereFun& v, const std::string& prefix) {
        save_sfun(v.x, prefix + ".x.sfun");
        save_sfun(v.y, prefix + ".y.sfun");
        save_sfun(v.z, prefix + ".z.sfun");
        std::printf("wrote %s.{x,y,z}.sfun\n", prefix.c_str());
    };

    if (c_grad->parsed()) {
        save_vec(gradient(load_sfun(in_path)), out_path);
        return 0;
    }

    if (c_div->parsed()) {
        const LowRankSphereFun d = divergence(load_vec(vec_prefix));
        print_summary(d);
        save_sfun(d, out_path);
        return 0;
    }

    if (c_curl->parsed()) {
        if (in_path.empty() == vec_prefix.empty())
            throw parse_error("curl: give exactly one of --in or --in-vec", 0);
        save_vec(in_path.empty() ? curl_vec(load_vec(vec_prefix)) : curl_scalar(load_sfun(in_path)),
                 out_path);
        return 0;
    }

    if (c_vort->parsed()) {
        const LowRankSphereFun z = vorticity(load_vec(vec_prefix));
        print_summary(z);
        save_sfun(z, out_path);
        return 0;
    }

    if (c_poisson->parsed()) {
        if (expr_text.empty() == in_path.empty())
            throw parse_error("poisson: give exactly one of --expr or --in", 0);
        const LowRankSphereFun f =
            expr_text.empty() ? load_sfun(in_path) : construct(make_fn(expr_text, coords));
        AssembleReport rep;
        const PoissonProblem pb = assemble_poisson(f, m_size, n_size, &rep);
        if (rep.mean_removed)
            std::fprintf(stderr, "warning: removed nonzero surface mean %.6g\n",
                         rep.removed_mean.real());
        const PoissonSolution sol = solve(pb);
        const ResidualReport rr = residual(pb, sol);
        std::printf("poisson solve %dx%d: residual %.3g, constraint %.3g\n", m_size, n_size,
                    rr.interior_max, rr.constraint_abs);
        const double vs = sample_grid(CoeffMatrix::from_dense(sol.x), m_size, n_size).max_abs();
        save_sfun(solution_to_fun(sol.x, vs, f.tol), out_path);
        return 0;
    }

    if (c_sample->parsed()) {
        const LowRankSphereFun f = load_sfun(in_path);
        if (m_size < 2 || n_size < 1) throw precondition_error("sample: sizes too small");
        std::vector<double> vals(static_cast<size_t>(m_size) * n_size);
        for (int i = 0; i < m_size; ++i) {
            const double th = kPi * i / (m_size - 1);
            for (int k = 0; k < n_size; ++k) {
                const double lam = -kPi + kTwoPi * k / n_size;
                vals[static_cast<size_t>(i) * n_size + k] = evaluate(f, SphPoint{lam, th}).real();
            }
        }
        if (format == "csv") {
            std::ofstream out(out_path);
            if (!out) throw io_error("cannot open '" + out_path + "' for writing");
            out << "# spherekit sample rows=" << m_size << " cols=" << n_size
                << " theta=i*pi/(rows-1) lambda=-pi+2*pi*k/cols\n";
            char buf[32];
            for (int i = 0; i < m_size; ++i) {
                for (int k = 0; k < n_size; ++k) {
                    std::snprintf(buf, sizeof buf, "%.17g", vals[static_cast<size_t>(i) * n_size + k]);
                    out << buf << (k + 1 < n_size ? "," : "\n");
                }
            }
            if (!out) throw io_error("write to '" + out_path + "' failed");
        } else {
            write_raster(out_path, format, vals, m_size, n_size);
        }
        return 0;
    }

    if (c_resid->parsed()) {
        const LowRankSphereFun rhs = load_sfun(rhs_path);
        const LowRankSphereFun solf = load_sfun(sol_path);
        const int m = solf.theta_modes(), n = solf.lambda_modes();
        if (m == 0 || n == 0) throw precondition_error("residual: empty solution file");
        PoissonSolution sol;
        sol.x = coeffs2(solf).densified();
        const PoissonProblem pb = assemble_poisson(rhs, m, n);
        const ResidualReport rr = residual(pb, sol);
        std::printf("interior residual:      %.6g\n", rr.interior_max);
        std::printf("replaced-row residual:  %.6g\n", rr.replaced_row_abs);
        std::printf("constraint |2pi w'X0|:  %.6g\n", rr.constraint_abs);
        return 0;
    }

    if (c_bench->parsed()) {
        const std::vector<BenchRow> rows = bench_poisson(parse_sizes(sizes_text));
        std::printf("%8s %6s %12s %8s %10s\n", "size", "reps", "sec/solve", "ratio", "Mdof/s");
        double prev = 0;
        for (const BenchRow& r : rows) {
            const double dofs = static_cast<double>(r.size) * r.size / 2.0;
            if (prev > 0)
                std::printf("%8d %6d %12.5f %8.2f %10.1f\n", r.size, r.reps, r.seconds,
                            r.seconds / prev, dofs / r.seconds / 1e6);
            else
                std::printf("%8d %6d %12.5f %8s %10.1f\n", r.size, r.reps, r.seconds, "-",
                            dofs / r.seconds / 1e6);
            prev = r.seconds;
        }
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const size_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const structure_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const pivot_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const unresolved_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
