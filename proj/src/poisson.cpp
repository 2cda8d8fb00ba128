#include "spherekit/poisson.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "spherekit/calculus.hpp"

namespace spherekit {

ThetaOperators build_operators(int m) {
    if (m <= 0 || m % 2 != 0) throw size_error("build_operators: m must be positive and even");
    ThetaOperators ops;
    ops.dm_diag.resize(m);
    for (int j = 0; j < m; ++j) ops.dm_diag[j] = complex(0, j - m / 2);

    ops.msin = BandMatrix(m, 1, 1);
    ops.mcos = BandMatrix(m, 1, 1);
    const complex half_i(0, 0.5);
    for (int i = 0; i < m; ++i) {
        if (i + 1 < m) {
            ops.msin.at(i, i + 1) = half_i;
            ops.mcos.at(i, i + 1) = 0.5;
        }
        if (i - 1 >= 0) {
            ops.msin.at(i, i - 1) = -half_i;
            ops.mcos.at(i, i - 1) = 0.5;
        }
    }

    const BandMatrix dm = band_diag(ops.dm_diag);
    const BandMatrix msin_dm = band_mul(ops.msin, dm);
    ops.lap = band_add(band_mul(band_mul(ops.msin, msin_dm), dm),
                       band_mul(ops.mcos, msin_dm));
    return ops;
}

std::vector<complex> integration_weights(int m) {
    std::vector<complex> w(m);
    for (int i = 0; i < m; ++i) {
        const int k = i - m / 2;
        if (k % 2 != 0) continue;  // includes w_{+-1} = 0
        w[i] = 2.0 / (1.0 - static_cast<double>(k) * k);
    }
    return w;
}

PoissonProblem assemble_poisson(const LowRankSphereFun& f, int m, int n, AssembleReport* report) {
    if (m % 2 != 0 || n % 2 != 0 || m <= 0 || n <= 0)
        throw size_error("assemble_poisson: sizes must be positive and even");
    PoissonProblem pb;
    pb.m = m;
    pb.n = n;
    pb.f = Matrix(m, n);

    const ThetaOperators ops = build_operators(m);
    const BandMatrix msin2 = band_mul(ops.msin, ops.msin);
    for (int j = 0; j < f.rank(); ++j) {
        const CoeffVec a = pad_to(f.col_coeffs[j], m);
        const CoeffVec b = pad_to(f.row_coeffs[j], n);
        const std::vector<complex> sa = msin2.apply(a.raw());
        for (int i = 0; i < m; ++i) {
            const complex da = f.d[j] * sa[i];
            if (da == complex{}) continue;
            for (int k = 0; k < n; ++k) pb.f.at(i, k) += da * b[k];
        }
    }

    const complex integral = sum2(f);
    const complex mu = integral / (4.0 * kPi);
    AssembleReport rep;
    if (std::abs(mu) > 1e-11 * std::max(f.vscale, 1e-300)) {
        rep.mean_removed = true;
        rep.removed_mean = mu;
        // Subtract mu in f-space: F loses mu * (coefficients of sin^2 theta).
        pb.f.at(m / 2, n / 2) -= mu * 0.5;
        if (m / 2 + 2 < m) pb.f.at(m / 2 + 2, n / 2) -= mu * -0.25;
        pb.f.at(m / 2 - 2, n / 2) -= mu * -0.25;
    }
    if (report) *report = rep;
    return pb;
}

namespace {

int thread_budget(int columns) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SPHEREKIT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    if (columns < 64) return 1;
    return static_cast<int>(std::min<unsigned>(hw, 16));
}

void check_mean_zero(const PoissonProblem& pb) {
    const int m = pb.m;
    CoeffVec f0(m);
    for (int i = 0; i < m; ++i) f0[i] = pb.f.at(i, pb.n / 2);
    const double fscale = pb.f.max_abs();
    if (fscale == 0.0) return;
    // Recover the zero mode of f~ itself (two sin-theta divisions) and test
    // its weighted mean. This only guards against grossly incompatible data;
    // assemble_poisson produces mean-zero problems to much tighter accuracy.
    const CoeffVec a = div_sin(div_sin(f0));
    const std::vector<complex> w = integration_weights(m);
    complex mean{};
    for (int i = 0; i < m; ++i) mean += w[i] * a[i];
    mean *= kTwoPi;
    if (std::abs(mean) > 1e-6 * 4.0 * kPi * fscale)
        throw precondition_error("poisson solve: right-hand side has a nonzero surface mean");
}

}  // namespace

PoissonSolution solve(const PoissonProblem& pb) {
    const int m = pb.m, n = pb.n;
    if (m <= 0 || n <= 0 || m % 2 != 0 || n % 2 != 0)
        throw size_error("poisson solve: sizes must be positive and even");
    check_mean_zero(pb);

    const ThetaOperators ops = build_operators(m);
    const std::vector<complex> w = integration_weights(m);
    PoissonSolution sol;
    sol.x = Matrix(m, n);

    auto solve_column = [&](int kc) {
        const int k = kc - n / 2;
        std::vector<complex> rhs(m);
        for (int i = 0; i < m; ++i) rhs[i] = pb.f.at(i, kc);
        std::vector<complex> x;
        if (k != 0) {
            BandMatrix a = ops.lap;
            band_shift_diag(a, -static_cast<double>(k) * k);
            x = band_solve(a, rhs);
        } else {
            x = band_solve_with_dense_row(ops.lap, m / 2, w, complex{}, rhs);
        }
        for (int i = 0; i < m; ++i) sol.x.at(i, kc) = x[i];
    };

    const int nthreads = thread_budget(n);
    if (nthreads <= 1) {
        for (int kc = 0; kc < n; ++kc) solve_column(kc);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t]() {
                for (int kc = t; kc < n; kc += nthreads) solve_column(kc);
            });
        }
        for (std::thread& th : pool) th.join();
    }
    return sol;
}

ResidualReport residual(const PoissonProblem& pb, const PoissonSolution& sol) {
    const int m = pb.m, n = pb.n;
    const ThetaOperators ops = build_operators(m);
    ResidualReport rep;
    std::vector<complex> xk(m);
    for (int kc = 0; kc < n; ++kc) {
        const int k = kc - n / 2;
        for (int i = 0; i < m; ++i) xk[i] = sol.x.at(i, kc);
        std::vector<complex> r = ops.lap.apply(xk);
        for (int i = 0; i < m; ++i) {
            r[i] -= static_cast<double>(k) * k * xk[i] + pb.f.at(i, kc);
            const bool replaced = (k == 0 && i == m / 2);
            if (replaced)
                rep.replaced_row_abs = std::abs(r[i]);
            else
                rep.interior_max = std::max(rep.interior_max, std::abs(r[i]));
        }
    }
    const std::vector<complex> w = integration_weights(m);
    complex c{};
    for (int i = 0; i < m; ++i) c += w[i] * sol.x.at(i, n / 2);
    rep.constraint_abs = std::abs(kTwoPi * c);
    return rep;
}

std::vector<BenchRow> bench_poisson(const std::vector<int>& sizes) {
    std::vector<BenchRow> rows;
    std::mt19937_64 rng(0x5eedu);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int s : sizes) {
        if (s < 16 || s % 2 != 0) throw size_error("bench_poisson: sizes must be even and >= 16");
        PoissonProblem pb;
        pb.m = pb.n = s;
        pb.f = Matrix(s, s);
        const ThetaOperators ops = build_operators(s);
        const BandMatrix msin2 = band_mul(ops.msin, ops.msin);
        const std::vector<complex> w = integration_weights(s);
        const int band = std::max(2, s / 8);
        std::vector<complex> col(s);
        for (int kc = 0; kc < s; ++kc) {
            const int k = kc - s / 2;
            std::fill(col.begin(), col.end(), complex{});
            if (std::abs(k) <= band)
                for (int i = 0; i < s; ++i)
                    if (std::abs(i - s / 2) <= band) col[i] = complex(unit(rng), unit(rng));
            if (k == 0) {
                // Enforce a zero surface mean on the k = 0 slice.
                complex mean{};
                for (int i = 0; i < s; ++i) mean += w[i] * col[i];
                col[s / 2] -= mean / w[s / 2];
            }
            const std::vector<complex> f = msin2.apply(col);
            for (int i = 0; i < s; ++i) pb.f.at(i, kc) = f[i];
        }
        static volatile double sink = 0;
        const int reps = std::max(3, static_cast<int>(4e7 / (static_cast<double>(s) * s)));
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < reps; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            PoissonSolution sol = solve(pb);
            const auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            sink = sink + std::abs(sol.x.at(s / 2, s / 2));  // keep the solve observable
        }
        rows.push_back({s, reps, best});
    }
    return rows;
}

}  // namespace spherekit
