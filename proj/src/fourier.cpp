#include "spherekit/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "spherekit/banded.hpp"

namespace spherekit {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// TODO: cache plans per size if transform setup ever shows up in profiles.
void run_fft(std::vector<complex>& data, int sign) {
    const int n = static_cast<int>(data.size());
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace

CoeffVec analyze_1d(std::span<const complex> samples) {
    const int n = static_cast<int>(samples.size());
    if (n <= 0 || n % 2 != 0) throw size_error("analyze_1d: sample count must be even");
    std::vector<complex> work(samples.begin(), samples.end());
    run_fft(work, FFTW_FORWARD);  // F_t = sum_j s_j e^{-2*pi*i*j*t/n}
    // c_k = (1/n) (-1)^k F_{k mod n}; the (-1)^k accounts for the grid
    // starting at -pi rather than 0.
    CoeffVec out(n);
    for (int k = -n / 2; k < n / 2; ++k) {
        const int t = (k + n) % n;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out.mode(k) = sign / n * work[t];
    }
    return out;
}

std::vector<complex> synthesize_1d(const CoeffVec& c, int n_out) {
    if (n_out <= 0 || n_out % 2 != 0) throw size_error("synthesize_1d: output size must be even");
    std::vector<complex> g(n_out, complex{});
    const int lo = std::max(c.kmin(), -n_out / 2);
    const int hi = std::min(-c.kmin(), n_out / 2);  // exclusive
    for (int k = lo; k < hi; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        g[(k + n_out) % n_out] += sign * c.at_mode(k);
    }
    run_fft(g, FFTW_BACKWARD);  // f_j = sum_t G_t e^{+2*pi*i*j*t/n}
    return g;
}

CoeffVec deriv_coeffs(const CoeffVec& c) {
    CoeffVec out(c.size());
    for (int k = c.kmin(); k < -c.kmin(); ++k)
        out.mode(k) = complex(0, k) * c.at_mode(k);
    return out;
}

CoeffVec mult_cos(const CoeffVec& c) {
    CoeffVec out(c.size() + 2);
    for (int k = out.kmin(); k < -out.kmin(); ++k)
        out.mode(k) = 0.5 * (c.at_mode(k + 1) + c.at_mode(k - 1));
    return out;
}

CoeffVec mult_sin(const CoeffVec& c) {
    // sin(x) e^{ikx} = (e^{i(k+1)x} - e^{i(k-1)x}) / (2i), so the output
    // mode k collects (c_{k-1} - c_{k+1}) / (2i).
    const complex half_i(0, 0.5);
    CoeffVec out(c.size() + 2);
    for (int k = out.kmin(); k < -out.kmin(); ++k)
        out.mode(k) = half_i * (c.at_mode(k + 1) - c.at_mode(k - 1));
    return out;
}

CoeffVec div_sin(const CoeffVec& c) {
    const int n = c.size();
    if (n == 0) throw size_error("div_sin: empty input");
    BandMatrix msin(n, 1, 1);
    const complex half_i(0, 0.5);
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n) msin.at(i, i + 1) = half_i;
        if (i - 1 >= 0) msin.at(i, i - 1) = -half_i;
    }
    std::vector<complex> u = band_solve(msin, c.raw());
    return CoeffVec(std::move(u));
}

CoeffVec pad_to(const CoeffVec& c, int n) {
    if (n % 2 != 0 || n < 0) throw size_error("pad_to: target length must be even");
    CoeffVec out(n);
    const int lo = std::max(c.kmin(), out.kmin());
    const int hi = std::min(-c.kmin(), -out.kmin());
    for (int k = lo; k < hi; ++k) out.mode(k) = c.at_mode(k);
    return out;
}

complex eval_series(const CoeffVec& c, double x) {
    const int n = c.size();
    if (n == 0) return {};
    const complex z = std::polar(1.0, x);
    complex acc = c[n - 1];
    for (int i = n - 2; i >= 0; --i) acc = acc * z + c[i];
    return acc * std::polar(1.0, c.kmin() * x);
}

CoeffMatrix CoeffMatrix::from_dense(Matrix x) {
    CoeffMatrix c;
    c.factored_ = false;
    c.rows_ = x.rows();
    c.cols_ = x.cols();
    c.x_ = std::move(x);
    return c;
}

CoeffMatrix CoeffMatrix::from_factors(std::vector<CoeffVec> col, std::vector<complex> d,
                                      std::vector<CoeffVec> row) {
    if (col.size() != d.size() || row.size() != d.size())
        throw size_error("CoeffMatrix: factor counts disagree");
    CoeffMatrix c;
    c.factored_ = true;
    c.rows_ = col.empty() ? 0 : col.front().size();
    c.cols_ = row.empty() ? 0 : row.front().size();
    for (const CoeffVec& v : col)
        if (v.size() != c.rows_) throw size_error("CoeffMatrix: ragged column factors");
    for (const CoeffVec& v : row)
        if (v.size() != c.cols_) throw size_error("CoeffMatrix: ragged row factors");
    c.col_ = std::move(col);
    c.row_ = std::move(row);
    c.d_ = std::move(d);
    return c;
}

const Matrix& CoeffMatrix::dense() const {
    if (factored_) throw structure_error("CoeffMatrix: dense() called on factored form");
    return x_;
}

Matrix CoeffMatrix::densified() const {
    if (!factored_) return x_;
    Matrix x(rows_, cols_);
    for (size_t t = 0; t < d_.size(); ++t) {
        const CoeffVec& a = col_[t];
        const CoeffVec& b = row_[t];
        for (int i = 0; i < rows_; ++i) {
            const complex da = d_[t] * a[i];
            if (da == complex{}) continue;
            for (int j = 0; j < cols_; ++j) x.at(i, j) += da * b[j];
        }
    }
    return x;
}

Matrix analyze_2d(const BMCGrid& samples) {
    const int m = samples.rows, n = samples.cols;
    Matrix x(m, n);
    // Columns first (theta direction), then rows (lambda direction).
    std::vector<complex> col(m);
    Matrix half(m, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < m; ++j) col[j] = samples.at(j, k);
        CoeffVec c = analyze_1d(col);
        for (int j = 0; j < m; ++j) half.at(j, k) = c[j];
    }
    std::vector<complex> row(n);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < n; ++k) row[k] = half.at(j, k);
        CoeffVec c = analyze_1d(row);
        for (int k = 0; k < n; ++k) x.at(j, k) = c[k];
    }
    return x;
}

BMCGrid sample_grid(const CoeffMatrix& xm, int m, int n) {
    if (m % 2 != 0 || n % 2 != 0) throw size_error("sample_grid: output sizes must be even");
    const Matrix x = xm.densified();
    // theta synthesis per lambda mode, then lambda synthesis per row.
    Matrix half(m, x.cols());
    for (int k = 0; k < x.cols(); ++k) {
        CoeffVec c(x.rows());
        for (int j = 0; j < x.rows(); ++j) c[j] = x.at(j, k);
        std::vector<complex> vals = synthesize_1d(c, m);
        for (int j = 0; j < m; ++j) half.at(j, k) = vals[j];
    }
    BMCGrid g(m, n);
    for (int j = 0; j < m; ++j) {
        CoeffVec c(x.cols());
        for (int k = 0; k < x.cols(); ++k) c[k] = half.at(j, k);
        std::vector<complex> vals = synthesize_1d(c, n);
        for (int k = 0; k < n; ++k) g.at(j, k) = vals[k];
    }
    return g;
}

}  // namespace spherekit
