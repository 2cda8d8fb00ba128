#pragma once

#include <span>
#include <vector>

#include "spherekit/sphere_domain.hpp"
#include "spherekit/types.hpp"

namespace spherekit {

// Fourier coefficients c_k for k = -n/2 .. n/2-1, n even. Storage is
// ascending in k, so storage index 0 holds the unpaired mode k = -n/2.
class CoeffVec {
public:
    CoeffVec() = default;
    explicit CoeffVec(int n) : a_(check_even(n)) {}
    explicit CoeffVec(std::vector<complex> a) : a_(std::move(a)) {
        check_even(static_cast<int>(a_.size()));
    }

    int size() const { return static_cast<int>(a_.size()); }
    int kmin() const { return -size() / 2; }

    complex& operator[](int i) { return a_[i]; }
    const complex& operator[](int i) const { return a_[i]; }

    // Mode access; reads outside the stored range are zero.
    complex at_mode(int k) const {
        const int i = k - kmin();
        return (i >= 0 && i < size()) ? a_[i] : complex{};
    }
    complex& mode(int k) { return a_[k - kmin()]; }

    double max_abs() const {
        double m = 0;
        for (const complex& c : a_) m = std::max(m, std::abs(c));
        return m;
    }

    std::vector<complex>& raw() { return a_; }
    const std::vector<complex>& raw() const { return a_; }

private:
    static int check_even(int n) {
        if (n < 0 || n % 2 != 0) throw size_error("CoeffVec: length must be even");
        return n;
    }
    std::vector<complex> a_;
};

// Trigonometric interpolation on the uniform grid x_j = -pi + 2*pi*j/n.
CoeffVec analyze_1d(std::span<const complex> samples);
// Zero-pads when n_out exceeds the coefficient count; smaller sizes drop the
// out-of-range modes (a truncated resampling).
std::vector<complex> synthesize_1d(const CoeffVec& c, int n_out);

// c_k <- i*k*c_k (differentiation).
CoeffVec deriv_coeffs(const CoeffVec& c);

// Coefficients of cos(x)*c and sin(x)*c; both grow by two modes.
CoeffVec mult_cos(const CoeffVec& c);
CoeffVec mult_sin(const CoeffVec& c);

// Solves the square tridiagonal system M_sin u = c, i.e. divides by sin(x)
// in coefficient space. The system is nonsingular for even lengths; the
// caller is responsible for the quotient being a smooth function.
CoeffVec div_sin(const CoeffVec& c);

// Centered zero-pad (or truncate) to an even length n.
CoeffVec pad_to(const CoeffVec& c, int n);

// Horner evaluation of sum_k c_k e^{ikx}.
complex eval_series(const CoeffVec& c, double x);

// 2D Fourier coefficients X of a doubled function, either dense (m x n, row
// index = theta mode, column index = lambda mode) or rank-factored
// X = A diag(d) B^T with the columns of A and B holding 1D coefficients.
class CoeffMatrix {
public:
    CoeffMatrix() = default;

    static CoeffMatrix from_dense(Matrix x);
    static CoeffMatrix from_factors(std::vector<CoeffVec> col, std::vector<complex> d,
                                    std::vector<CoeffVec> row);

    bool factored() const { return factored_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int rank() const { return static_cast<int>(d_.size()); }

    const Matrix& dense() const;
    Matrix densified() const;  // multiplies out the factors when needed

    const std::vector<CoeffVec>& col_factors() const { return col_; }
    const std::vector<CoeffVec>& row_factors() const { return row_; }
    const std::vector<complex>& weights() const { return d_; }

private:
    bool factored_ = false;
    int rows_ = 0, cols_ = 0;
    Matrix x_;
    std::vector<CoeffVec> col_, row_;
    std::vector<complex> d_;
};

// Row/column 2D transforms on dense sample grids and coefficient matrices.
Matrix analyze_2d(const BMCGrid& samples);
BMCGrid sample_grid(const CoeffMatrix& x, int m, int n);

}  // namespace spherekit
