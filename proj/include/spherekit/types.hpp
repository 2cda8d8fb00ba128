#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace spherekit {

using complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Dense row-major complex matrix. Heavy linear algebra in this library is
// banded or rank-structured; this is just a value container.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    complex& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const complex& at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    std::vector<complex>& data() { return data_; }
    const std::vector<complex>& data() const { return data_; }

    double max_abs() const {
        double m = 0;
        for (const complex& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<complex> data_;
};

struct size_error : std::invalid_argument {
    explicit size_error(const std::string& what) : std::invalid_argument(what) {}
};

struct structure_error : std::runtime_error {
    explicit structure_error(const std::string& what) : std::runtime_error(what) {}
};

struct pivot_error : std::runtime_error {
    explicit pivot_error(const std::string& what) : std::runtime_error(what) {}
};

struct index_error : std::out_of_range {
    explicit index_error(const std::string& what) : std::out_of_range(what) {}
};

struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spherekit
