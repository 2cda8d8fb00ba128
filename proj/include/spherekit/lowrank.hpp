#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spherekit/fourier.hpp"
#include "spherekit/sphere_domain.hpp"
#include "spherekit/types.hpp"

namespace spherekit {

enum class Parity { even, odd };

// One 2x2 GE pivot. (lambda_star, theta_star) lies in [0,pi]^2 and pairs with
// (lambda_star - pi, -theta_star); a and b are the doubled-function values at
// the paired locations and (m_even, m_odd) the entries of the spectral form
// of the eps-pseudoinverse of [a b; b a].
struct PivotBlock {
    double lambda_star = 0;
    double theta_star = 0;
    complex a{};
    complex b{};
    complex m_even{};
    complex m_odd{};
};

struct ConstructorConfig {
    double alpha = 0.01;   // coupling parameter of the pseudoinverse
    double tol = 0x1p-52;  // relative termination tolerance
    int max_rank = 1024;
    int max_grid = 2048;
};

struct ConstructDiagnostics {
    int phase1_grid = 0;
    bool zero_out = false;
    double lambda0 = 0;
    std::vector<PivotBlock> pivots;
    double max_growth = 0;  // largest per-step residual growth ratio
};

// Rank-K representation sum_j d_j c_j(theta) r_j(lambda) of the doubled
// function, stored as Fourier coefficient columns with per-term parity.
// Even terms have c_j even in theta and r_j pi-periodic; odd terms have c_j
// odd and r_j pi-antiperiodic. Immutable after construction.
struct LowRankSphereFun {
    std::vector<complex> d;
    std::vector<CoeffVec> col_coeffs;  // K vectors of length m (theta modes)
    std::vector<CoeffVec> row_coeffs;  // K vectors of length n (lambda modes)
    std::vector<Parity> parity;
    double vscale = 0;
    double tol = 0x1p-52;
    ConstructDiagnostics diag;

    int rank() const { return static_cast<int>(d.size()); }
    int theta_modes() const { return col_coeffs.empty() ? 0 : col_coeffs.front().size(); }
    int lambda_modes() const { return row_coeffs.empty() ? 0 : row_coeffs.front().size(); }
};

// Thrown when max_rank or max_grid is exhausted; carries the best approximant.
struct unresolved_error : std::runtime_error {
    unresolved_error(const std::string& what, LowRankSphereFun best_so_far)
        : std::runtime_error(what), best(std::move(best_so_far)) {}
    LowRankSphereFun best;
};

// Singular values of the centrosymmetric 2x2 pivot matrix [a b; b a].
std::pair<double, double> sv_2x2(complex a, complex b);

// (m_even, m_odd) of the eps-pseudoinverse with eps = alpha * sigma1.
// Throws pivot_error when a = b = 0.
std::pair<complex, complex> pinv_2x2(complex a, complex b, double alpha);

// Rank-1 pole correction f~ <- f~ - f~(lambda0, .). Returns the residual as a
// callable on the doubled domain plus the captured term (d=1, c=f~(lambda0,.),
// r=1, even). The residual vanishes wherever f~ is lambda-independent, in
// particular along theta = 0 and +-pi for smooth sphere functions.
struct ZeroOutResult {
    std::function<complex(double, double)> residual;
    std::function<complex(double)> captured_col;  // c_1(theta)
    double lambda0 = 0;
};
ZeroOutResult pole_zero_out(std::function<complex(double, double)> f_doubled, double lambda0);

// Complete pivoting over the grid restricted to (lambda*, theta*) in [0,pi]^2.
// Ties break toward the smallest theta, then the smallest lambda. Returns
// nothing when the grid is entirely zero (convergence).
std::optional<PivotBlock> pivot_search(const BMCGrid& residual, double alpha = 0.01);

// One structure-preserving GE update on a full doubled grid. The pivot must
// lie on grid nodes. Exactly preserves the BMC symmetry of the samples.
BMCGrid ge_step(const BMCGrid& residual, const PivotBlock& p);

// Max absolute value of the doubled function over a g x g phase-1 grid.
double vscale_estimate(const sphere_fn& f, int g);

// Adaptive two-phase constructor (pivot hunt on doubling grids, then skeleton
// slice refinement). Deterministic; samples only theta in [0,pi].
LowRankSphereFun construct(const sphere_fn& f, const ConstructorConfig& cfg = {});

// Fourier coefficients of the representation in rank-factored form.
CoeffMatrix coeffs2(const LowRankSphereFun& f);

// Samples the representation on an m x n doubled grid.
BMCGrid sample_fun(const LowRankSphereFun& f, int m, int n);

// Process-wide record of per-step growth ratios from every constructor run,
// used by the growth-bound checks.
std::vector<std::pair<double, double>> growth_log();  // (alpha, ratio)
void clear_growth_log();

}  // namespace spherekit
