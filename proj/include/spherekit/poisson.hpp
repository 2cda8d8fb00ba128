#pragma once

#include "spherekit/banded.hpp"
#include "spherekit/fourier.hpp"
#include "spherekit/lowrank.hpp"

namespace spherekit {

// Spectral operators acting on theta modes -m/2..m/2-1. The square
// truncations follow the matrix products, so compositions drop the couple of
// modes that fall off the ends.
struct ThetaOperators {
    std::vector<complex> dm_diag;  // d/dtheta: diag(i*k)
    BandMatrix msin;               // multiplication by sin(theta)
    BandMatrix mcos;               // multiplication by cos(theta)
    BandMatrix lap;                // Msin^2 Dm^2 + Mcos Msin Dm (pentadiagonal)
};
ThetaOperators build_operators(int m);

// Integration weights over half a period: w_{+-1} = 0, w_k = (1+e^{i pi k})/(1-k^2).
std::vector<complex> integration_weights(int m);

struct PoissonProblem {
    int m = 0, n = 0;
    Matrix f;  // 2D Fourier coefficients of sin(theta)^2 * f~
};

struct PoissonSolution {
    Matrix x;  // 2D Fourier coefficients of u~
};

struct AssembleReport {
    bool mean_removed = false;
    complex removed_mean{};  // the subtracted surface mean of f
};

// Builds the right-hand side coefficients from the rank-factored form of f
// (Msin^2 applied to the theta factors, then densified). A nonzero surface
// mean is subtracted, since the problem is only solvable for mean-zero data.
PoissonProblem assemble_poisson(const LowRankSphereFun& f, int m, int n,
                                AssembleReport* report = nullptr);

// Solves the doubled Poisson equation: n decoupled banded systems, with the
// zero-mode row of the k = 0 system replaced by the integral constraint
// 2 pi w^T X_0 = 0. Columns are solved in parallel when SPHEREKIT_THREADS
// allows; results are identical to the sequential order.
PoissonSolution solve(const PoissonProblem& pb);

struct ResidualReport {
    double interior_max = 0;      // all equations except the replaced one
    double replaced_row_abs = 0;  // the discarded (j=0, k=0) equation
    double constraint_abs = 0;    // |2 pi w^T X_0|
};
ResidualReport residual(const PoissonProblem& pb, const PoissonSolution& sol);

struct BenchRow {
    int size = 0;
    int reps = 0;
    double seconds = 0;  // best time of one solve
};
std::vector<BenchRow> bench_poisson(const std::vector<int>& sizes);

}  // namespace spherekit
