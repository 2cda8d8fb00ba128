#pragma once

#include <functional>
#include <utility>

#include "spherekit/types.hpp"

namespace spherekit {

// Point in longitude-colatitude coordinates. lambda is the azimuth in
// [-pi,pi]; theta is the polar angle, in [0,pi] on the physical domain or
// [-pi,pi] on the doubled domain.
struct SphPoint {
    double lambda = 0;
    double theta = 0;
};

struct CartPoint {
    double x = 0;
    double y = 0;
    double z = 0;
};

// A scalar function on the sphere given in longitude-colatitude form on
// [-pi,pi] x [0,pi].
using sphere_fn = std::function<complex(double lambda, double theta)>;

CartPoint sph_to_cart(const SphPoint& p);

// Radially projects off-sphere points. Throws domain error on the zero vector.
SphPoint cart_to_sph(const CartPoint& p);

// Glide-reflected extension of f to the doubled domain [-pi,pi]^2 (the double
// Fourier sphere construction). Lazy: a single point is evaluated, nothing is
// sampled eagerly.
complex dfs_extend(const sphere_fn& f, const SphPoint& p);

// Convenience wrapper returning the doubled function as a callable.
std::function<complex(double, double)> dfs_doubled(sphere_fn f);

// Samples of a bi-periodic function on the uniform doubled grid
// lambda_k = -pi + 2*pi*k/cols, theta_j = -pi + 2*pi*j/rows.
struct BMCGrid {
    BMCGrid() = default;
    BMCGrid(int rows, int cols);

    int rows = 0;  // theta samples, even
    int cols = 0;  // lambda samples, even
    std::vector<complex> v;  // row-major

    complex& at(int j, int k) { return v[static_cast<size_t>(j) * cols + k]; }
    const complex& at(int j, int k) const { return v[static_cast<size_t>(j) * cols + k]; }

    double theta(int j) const { return -kPi + kTwoPi * j / rows; }
    double lambda(int k) const { return -kPi + kTwoPi * k / cols; }

    double max_abs() const;
};

// Samples dfs_extend(f) on an m x n doubled grid.
BMCGrid sample_dfs(const sphere_fn& f, int m, int n);

// True iff the grid satisfies the block-mirror-centrosymmetric relation
// v(theta,lambda) == v(-theta, lambda+pi) to within tol * max|v|.
bool bmc_check(const BMCGrid& g, double tol);

// BMC plus constant rows along theta = 0 and theta = +-pi (pole lines).
bool bmc1_check(const BMCGrid& g, double tol);

// Splits f~ into (f+, f-) with f~ = (f+ + f-)/2, f+ even in theta and
// pi-periodic in lambda, f- odd in theta and pi-antiperiodic in lambda.
// Throws structure_error if the input is not BMC to within guard_tol.
std::pair<BMCGrid, BMCGrid> even_odd_split(const BMCGrid& g, double guard_tol = 1e-10);

}  // namespace spherekit
