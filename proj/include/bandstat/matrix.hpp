#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace bandstat {

// Dense square matrix, row-major.  The periodic band has corner blocks, so
// dense storage is the working representation at desk scale.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t dim() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    // max_{i,j} |a_ij|
    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    // max_{i,j} |a_ij - a_ji|
    double max_asymmetry() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_squared() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return s;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

}  // namespace bandstat
