#pragma once

#include <span>
#include <vector>

#include "spherekit/types.hpp"

namespace spherekit {

// Square banded complex matrix with lower bandwidth kl and upper bandwidth ku.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), data_(static_cast<size_t>(n) * (kl + ku + 1)) {}

    int n() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    bool in_band(int i, int j) const { return j - i >= -kl_ && j - i <= ku_; }

    complex& at(int i, int j) { return data_[static_cast<size_t>(i) * width() + (j - i + kl_)]; }
    complex get(int i, int j) const {
        return in_band(i, j) && j >= 0 && j < n_ ? data_[static_cast<size_t>(i) * width() + (j - i + kl_)]
                                                 : complex{};
    }

    std::vector<complex> apply(std::span<const complex> x) const;

    double max_abs() const {
        double m = 0;
        for (const complex& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    int width() const { return kl_ + ku_ + 1; }
    int n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<complex> data_;
};

BandMatrix band_mul(const BandMatrix& a, const BandMatrix& b);
BandMatrix band_add(const BandMatrix& a, const BandMatrix& b);
BandMatrix band_scale(const BandMatrix& a, complex s);
// Diagonal matrix as a bandwidth-zero band.
BandMatrix band_diag(std::span<const complex> d);
// Adds s to the main diagonal, in place.
void band_shift_diag(BandMatrix& a, complex s);

// Solves A x = b by Gaussian elimination with partial pivoting restricted to
// the band. Throws structure_error on a numerically singular matrix.
std::vector<complex> band_solve(const BandMatrix& a, std::span<const complex> b);

// Solves the bordered system formed by the rows of A with row `skip_row`
// removed plus one dense row w (with right-hand side dense_rhs):
//
//   [ rows of A, i != skip_row ] x = [ b_i ]
//   [          w^T             ]     [ dense_rhs ]
//
// Partial pivoting prefers band rows; the dense row is selected where the
// remaining band column is structurally zero (which is how the constraint
// enters the spectral Poisson solve). Band rows hit by a dense pivot are
// promoted to dense rows, so the routine stays correct for general inputs.
std::vector<complex> band_solve_with_dense_row(const BandMatrix& a, int skip_row,
                                               std::span<const complex> w, complex dense_rhs,
                                               std::span<const complex> b);

}  // namespace spherekit
