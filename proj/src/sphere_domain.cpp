#include "spherekit/sphere_domain.hpp"

#include <algorithm>
#include <cmath>

namespace spherekit {

CartPoint sph_to_cart(const SphPoint& p) {
    const double s = std::sin(p.theta);
    return {std::cos(p.lambda) * s, std::sin(p.lambda) * s, std::cos(p.theta)};
}

SphPoint cart_to_sph(const CartPoint& p) {
    const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    if (r == 0.0) throw std::domain_error("cart_to_sph: zero vector has no direction");
    return {std::atan2(p.y, p.x), std::acos(std::clamp(p.z / r, -1.0, 1.0))};
}

complex dfs_extend(const sphere_fn& f, const SphPoint& p) {
    // Four-branch glide reflection. With g(l,t) = f(l-pi,t) and h = f on
    // [0,pi]^2 the upper half collapses to f itself; the lower half is f
    // reflected in theta and shifted by pi in lambda. Seams: theta = 0 goes
    // to the upper blocks, lambda in [0,pi] to the h-branch.
    if (p.theta >= 0.0) return f(p.lambda, p.theta);
    return f(p.lambda >= 0.0 ? p.lambda - kPi : p.lambda + kPi, -p.theta);
}

std::function<complex(double, double)> dfs_doubled(sphere_fn f) {
    return [f = std::move(f)](double lambda, double theta) {
        return dfs_extend(f, {lambda, theta});
    };
}

BMCGrid::BMCGrid(int rows_, int cols_) : rows(rows_), cols(cols_) {
    if (rows % 2 != 0 || cols % 2 != 0 || rows <= 0 || cols <= 0)
        throw size_error("BMCGrid: sample counts must be positive and even");
    v.assign(static_cast<size_t>(rows) * cols, complex{});
}

double BMCGrid::max_abs() const {
    double m = 0;
    for (const complex& x : v) m = std::max(m, std::abs(x));
    return m;
}

BMCGrid sample_dfs(const sphere_fn& f, int m, int n) {
    BMCGrid g(m, n);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < n; ++k)
            g.at(j, k) = dfs_extend(f, {g.lambda(k), g.theta(j)});
    return g;
}

bool bmc_check(const BMCGrid& g, double tol) {
    if (g.rows % 2 != 0 || g.cols % 2 != 0) throw size_error("bmc_check: grid sizes must be even");
    const double bound = tol * g.max_abs();
    for (int j = 0; j < g.rows; ++j) {
        const int jm = (g.rows - j) % g.rows;  // theta -> -theta
        for (int k = 0; k < g.cols; ++k) {
            const int km = (k + g.cols / 2) % g.cols;  // lambda -> lambda + pi
            if (std::abs(g.at(j, k) - g.at(jm, km)) > bound) return false;
        }
    }
    return true;
}

bool bmc1_check(const BMCGrid& g, double tol) {
    if (!bmc_check(g, tol)) return false;
    const double bound = tol * g.max_abs();
    for (int j : {0, g.rows / 2}) {  // theta = -pi and theta = 0 rows
        const complex ref = g.at(j, 0);
        for (int k = 1; k < g.cols; ++k)
            if (std::abs(g.at(j, k) - ref) > bound) return false;
    }
    return true;
}

std::pair<BMCGrid, BMCGrid> even_odd_split(const BMCGrid& g, double guard_tol) {
    if (!bmc_check(g, guard_tol))
        throw structure_error("even_odd_split: input grid is not BMC");
    BMCGrid plus(g.rows, g.cols), minus(g.rows, g.cols);
    for (int j = 0; j < g.rows; ++j) {
        for (int k = 0; k < g.cols; ++k) {
            const int km = (k + g.cols / 2) % g.cols;
            plus.at(j, k) = g.at(j, k) + g.at(j, km);
            minus.at(j, k) = g.at(j, k) - g.at(j, km);
        }
    }
    return {std::move(plus), std::move(minus)};
}

}  // namespace spherekit
