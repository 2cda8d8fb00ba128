// Acceptance suite: runs every shipping criterion end to end and prints one
// pass/fail line each. Exits nonzero if anything fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spherekit/calculus.hpp"
#include "spherekit/expr.hpp"
#include "spherekit/poisson.hpp"
#include "support/helpers.hpp"
#include "support/poisson_oracle.hpp"

using namespace spherekit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_between(const std::chrono::steady_clock::time_point& a,
                   const std::chrono::steady_clock::time_point& b) {
    return std::chrono::duration<double>(b - a).count();
}

complex eq1(double lam, double th) {
    const double x = std::cos(lam) * std::sin(th);
    const double y = std::sin(lam) * std::sin(th);
    const double z = std::cos(th);
    return {std::cos(1 + 2 * kPi * (x + y) + 5 * std::sin(kPi * z)), 0.0};
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Outcome c01_oscillatory_rank() {
    const auto t0 = std::chrono::steady_clock::now();
    const LowRankSphereFun f = construct(eq1);
    const double secs = now_between(t0, std::chrono::steady_clock::now());
    const bool pass = f.rank() >= 21 && f.rank() <= 25 && secs < 5.0;
    return {pass, fmt("rank=%d (want 21..25), %.2fs (limit 5s)", f.rank(), secs)};
}

Outcome c02_polynomial_integral() {
    const auto t0 = std::chrono::steady_clock::now();
    const LowRankSphereFun f = construct([](double lam, double th) {
        const double x = std::cos(lam) * std::sin(th);
        const double y = std::sin(lam) * std::sin(th);
        const double z = std::cos(th);
        return complex(1 + x + y * y + x * x * y + std::pow(x, 4) + std::pow(y, 5) +
                           (x * y * z) * (x * y * z),
                       0.0);
    });
    const double err = std::abs(sum2(f) - 216.0 * kPi / 35.0);
    const double secs = now_between(t0, std::chrono::steady_clock::now());
    const bool pass = err <= 5e-15 && secs < 2.0;
    return {pass, fmt("|sum2 - 216pi/35| = %.3g (limit 5e-15), %.2fs (limit 2s)", err, secs)};
}

Outcome c03_skeleton_rank() {
    const LowRankSphereFun f = construct([](double lam, double th) {
        const double x = std::cos(lam) * std::sin(th);
        const double y = std::sin(lam) * std::sin(th);
        const double z = std::cos(th);
        return complex(std::cos(x * z - std::sin(y)), 0.0);
    });
    const bool pass = f.rank() >= 15 && f.rank() <= 19;
    return {pass, fmt("rank=%d (want 17 +- 2)", f.rank())};
}

Outcome c04_exact_recovery() {
    int worst_excess = 0;
    double worst_err = 0;
    for (unsigned trial = 0; trial < 50; ++trial) {
        const int k = 1 + static_cast<int>(trial % 8);
        const sphere_fn f = testing::random_exact_rank(k, 4242 + trial, trial % 3 == 0);
        const LowRankSphereFun g = construct(f);
        worst_excess = std::max(worst_excess, g.rank() - (k + 1));
        const BMCGrid ref = sample_dfs(f, 256, 256);
        const BMCGrid got = sample_fun(g, 256, 256);
        double err = 0;
        for (size_t i = 0; i < ref.v.size(); ++i) err = std::max(err, std::abs(ref.v[i] - got.v[i]));
        worst_err = std::max(worst_err, err / std::max(g.vscale, 1e-300));
    }
    const bool pass = worst_excess <= 0 && worst_err <= 1e-12;
    return {pass, fmt("50 trials, rank excess over K+1: %d, worst relative error %.3g (limit 1e-12)",
                      worst_excess, worst_err)};
}

Outcome c05_growth_bound() {
    const double bound = std::sqrt(1.0 + 4.0 / 0.01);  // alpha = 1/100
    double worst = 0;
    size_t steps = 0;
    for (auto [alpha, ratio] : growth_log()) {
        if (alpha != 0.01) continue;
        worst = std::max(worst, ratio);
        ++steps;
    }
    const bool pass = steps > 0 && worst <= bound;
    return {pass, fmt("max growth %.3f over %zu steps (hard bound %.2f)", worst, steps, bound)};
}

Outcome c06_derivatives() {
    // The worked example first: the x-derivative of z is -xz, uniformly.
    const LowRankSphereFun z = construct([](double, double th) { return complex(std::cos(th), 0.0); });
    const LowRankSphereFun dz = diff_tangential(z, Axis::x);
    double worked = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 1; j < 32; ++j) {
            const SphPoint p{-kPi + kTwoPi * i / 64.0, kPi * j / 32.0};
            const CartPoint c = sph_to_cart(p);
            worked = std::max(worked, std::abs(evaluate(dz, p) - complex(-c.x * c.z, 0)));
        }

    testing::ExprGen gen(20260808);
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> ul(-kPi, kPi), ut(0.05, kPi - 0.05);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        const std::string text = gen.next();
        const Expr e = Expr::parse(text);
        const LowRankSphereFun f = construct(e.as_sphere_fn());
        const LowRankSphereFun dx = diff_tangential(f, Axis::x);
        const LowRankSphereFun dy = diff_tangential(f, Axis::y);
        const LowRankSphereFun dzf = diff_tangential(f, Axis::z);
        const auto ambient = [&e](double x, double y, double zz) { return e.eval_cart(x, y, zz); };
        for (int q = 0; q < 100; ++q) {
            const SphPoint p{ul(rng), ut(rng)};
            const CartPoint c = sph_to_cart(p);
            const auto g = testing::surface_grad_fd(ambient, c.x, c.y, c.z);
            worst = std::max(worst, std::abs(evaluate(dx, p) - complex(g[0], 0)));
            worst = std::max(worst, std::abs(evaluate(dy, p) - complex(g[1], 0)));
            worst = std::max(worst, std::abs(evaluate(dzf, p) - complex(g[2], 0)));
        }
    }
    const bool pass = worked <= 1e-12 && worst <= 1e-7;
    return {pass, fmt("-xz example err %.3g (limit 1e-12); 20 exprs x 100 pts vs FD oracle %.3g "
                      "(limit 1e-7)",
                      worked, worst)};
}

Outcome c07_eigenfunctions() {
    double worst = 0;
    for (int l = 1; l <= 8; ++l) {
        for (int m = -l; m <= l; ++m) {
            const LowRankSphereFun y = construct([l, m](double lam, double th) {
                return complex(testing::real_sph_harmonic(l, m, lam, th), 0.0);
            });
            const PoissonProblem pb = assemble_poisson(y, 64, 64);
            const PoissonSolution sol = solve(pb);
            Matrix yc(64, 64);
            const Matrix src = coeffs2(y).densified();
            for (int i = 0; i < src.rows(); ++i)
                for (int k = 0; k < src.cols(); ++k)
                    yc.at(i - src.rows() / 2 + 32, k - src.cols() / 2 + 32) = src.at(i, k);
            double err = 0, scale = 0;
            for (int i = 0; i < 64; ++i)
                for (int k = 0; k < 64; ++k) {
                    err = std::max(err, std::abs(sol.x.at(i, k) + yc.at(i, k) / (l * (l + 1.0))));
                    scale = std::max(scale, std::abs(yc.at(i, k)));
                }
            worst = std::max(worst, err / scale);
        }
    }
    const bool pass = worst <= 1e-10;
    return {pass, fmt("80 harmonics (l<=8) at 64x64, worst relative error %.3g (limit 1e-10)", worst)};
}

Outcome c08_oracle_equivalence() {
    double worst = 0;
    int done = 0;
    for (int s : {16, 32, 64}) {
        const testing::DenseOracle oracle(s, s);
        const int reps = s == 16 ? 10 : s == 32 ? 6 : 4;
        for (int r = 0; r < reps; ++r) {
            const PoissonProblem pb = testing::random_mean_zero_problem(s, s, 7000 + s + r);
            const PoissonSolution fast = solve(pb);
            const Matrix ref = oracle.solve(pb);
            double err = 0, scale = 0;
            for (int i = 0; i < s; ++i)
                for (int k = 0; k < s; ++k) {
                    err = std::max(err, std::abs(fast.x.at(i, k) - ref.at(i, k)));
                    scale = std::max(scale, std::abs(ref.at(i, k)));
                }
            worst = std::max(worst, err / scale);
            ++done;
        }
    }
    const bool pass = done == 20 && worst <= 1e-10;
    return {pass, fmt("20 random RHS at 16/32/64, worst relative gap %.3g (limit 1e-10)", worst)};
}

Outcome c09_scaling() {
    setenv("SPHEREKIT_THREADS", "1", 1);
    const std::vector<BenchRow> rows = bench_poisson({512, 1024, 2048});
    unsetenv("SPHEREKIT_THREADS");
    const double r1 = rows[1].seconds / rows[0].seconds;
    const double r2 = rows[2].seconds / rows[1].seconds;
    const bool pass = r1 >= 3.0 && r1 <= 6.0 && r2 >= 3.0 && r2 <= 6.0 && rows[2].seconds < 30.0;
    return {pass, fmt("t(512)=%.4fs t(1024)=%.4fs t(2048)=%.4fs ratios %.2f, %.2f (want 3..6), "
                      "t(2048) limit 30s",
                      rows[0].seconds, rows[1].seconds, rows[2].seconds, r1, r2)};
}

Outcome c10_sin50xyz() {
    const LowRankSphereFun f = construct([](double lam, double th) {
        const double x = std::cos(lam) * std::sin(th);
        const double y = std::sin(lam) * std::sin(th);
        const double z = std::cos(th);
        return complex(std::sin(50 * x * y * z), 0.0);
    });
    const PoissonProblem pb = assemble_poisson(f, 150, 150);
    const PoissonSolution sol = solve(pb);
    const ResidualReport rr = residual(pb, sol);
    const double fscale = pb.f.max_abs();
    const bool pass = f.rank() >= 10 && f.rank() <= 14 && rr.interior_max <= 1e-10 * fscale &&
                      rr.constraint_abs <= 1e-12;
    return {pass, fmt("rank=%d (want 12 +- 2); 150x150 residual %.3g (limit %.3g), constraint %.3g "
                      "(limit 1e-12)",
                      f.rank(), rr.interior_max, 1e-10 * fscale, rr.constraint_abs)};
}

Outcome c11_property_suites() {
    std::string detail;
    bool pass = true;

    // Transform round trips across even sizes, including non-powers of two.
    {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> u(-1, 1);
        double worst = 0;
        for (int n : {4, 6, 16, 150, 256, 602, 1024, 4096}) {
            CoeffVec c(n);
            for (int i = 0; i < n; ++i) c[i] = complex(u(rng), u(rng));
            const CoeffVec back = analyze_1d(synthesize_1d(c, n));
            double err = 0;
            for (int i = 0; i < n; ++i) err = std::max(err, std::abs(back[i] - c[i]));
            worst = std::max(worst, err / (n * c.max_abs()));
        }
        pass = pass && worst <= 1e-14;
        detail += fmt("fft round trip %.3g; ", worst);
    }

    // Structure preservation through chains of GE steps, bit for bit.
    {
        BMCGrid g(32, 32);
        for (int j = 0; j < 32; ++j)
            for (int k = 0; k < 32; ++k)
                g.at(j, k) = std::cos(2 * g.theta(j)) * std::cos(2 * g.lambda(k)) +
                             std::sin(g.theta(j)) * std::sin(g.lambda(k)) +
                             0.25 * std::sin(2 * g.theta(j)) * std::sin(4 * g.lambda(k)) + 0.4;
        for (int j = 0; j < 32; ++j)
            for (int k = 0; k < 32; ++k)
                g.at((32 - j) % 32, (k + 16) % 32) = g.at(j, k);
        bool exact = true;
        for (int step = 0; step < 8; ++step) {
            auto p = pivot_search(g);
            if (!p) break;
            g = ge_step(g, *p);
            for (int j = 0; j < 32 && exact; ++j)
                for (int k = 0; k < 32; ++k)
                    if (g.at(j, k) != g.at((32 - j) % 32, (k + 16) % 32)) {
                        exact = false;
                        break;
                    }
        }
        pass = pass && exact;
        detail += fmt("BMC preserved exactly through GE: %s; ", exact ? "yes" : "NO");
    }

    // Vector identities on random smooth functions.
    {
        testing::ExprGen gen(777);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> ul(-kPi, kPi), ut(0.1, kPi - 0.1);
        double worst = 0;
        for (int t = 0; t < 3; ++t) {
            const Expr e = Expr::parse(gen.next());
            const LowRankSphereFun f = construct(e.as_sphere_fn());
            const VectorSphereFun gr = gradient(f);
            const LowRankSphereFun dc = divergence(curl_scalar(f));
            const LowRankSphereFun vg = vorticity(gr);
            const double vs = std::max(f.vscale, 1e-300);
            for (int q = 0; q < 40; ++q) {
                const SphPoint p{ul(rng), ut(rng)};
                const CartPoint c = sph_to_cart(p);
                const complex ng = c.x * evaluate(gr.x, p) + c.y * evaluate(gr.y, p) +
                                   c.z * evaluate(gr.z, p);
                worst = std::max(worst, std::abs(evaluate(dc, p)) / vs);
                worst = std::max(worst, std::abs(evaluate(vg, p)) / vs);
                worst = std::max(worst, std::abs(ng) / vs);
            }
        }
        pass = pass && worst <= 1e-10;
        detail += fmt("vector identities %.3g (limit 1e-10)", worst);
    }

    return {pass, detail};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"c01 oscillatory test function rank", c01_oscillatory_rank},
        {"c02 polynomial surface integral", c02_polynomial_integral},
        {"c03 cos(xz - sin y) rank", c03_skeleton_rank},
        {"c04 exact recovery of finite-rank functions", c04_exact_recovery},
        {"c05 GE growth bound", c05_growth_bound},
        {"c06 tangential derivatives vs oracle", c06_derivatives},
        {"c07 Poisson eigenfunctions", c07_eigenfunctions},
        {"c08 Poisson fast vs dense oracle", c08_oracle_equivalence},
        {"c09 Poisson scaling", c09_scaling},
        {"c10 sin(50xyz) rank and 150x150 solve", c10_sin50xyz},
        {"c11 property suites", c11_property_suites},
    };

    clear_growth_log();
    int failures = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failures,
                criteria.size(), now_between(t0, std::chrono::steady_clock::now()));
    return failures == 0 ? 0 : 1;
}
