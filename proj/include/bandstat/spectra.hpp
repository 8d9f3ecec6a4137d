#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "bandstat/matrix.hpp"
#include "bandstat/testfunction.hpp"

namespace bandstat {

// Eigendecomposition result.  Eigenvalues ascend; when present, column j of
// eigenvectors is the unit eigenvector of eigenvalues[j].
struct Spectrum {
    std::vector<double> eigenvalues;
    std::optional<Matrix> eigenvectors;

    std::size_t size() const { return eigenvalues.size(); }
    bool has_vectors() const { return eigenvectors.has_value(); }
};

// Dense symmetric eigensolve (divide and conquer).  The input must be
// symmetric within 1e-12 absolute.
Spectrum eigen(const Matrix& m, bool want_vectors);

// N_n(phi) = sum_i phi(lambda_i); real phi gives exact zero imaginary part.
std::complex<double> linear_statistic(const Spectrum& s, const TestFunction& phi);

// sqrt(b/n) * value, the scale on which the linear statistic has an
// order-one limit (centering happens downstream).
std::complex<double> normalized_statistic(std::complex<double> value,
                                          std::size_t n, std::size_t b);
double normalized_statistic(double value, std::size_t n, std::size_t b);

// f(M) = V diag(phi(lambda)) V^T for real phi; requires eigenvectors.
Matrix matrix_function(const Spectrum& s, const TestFunction& phi);

// gamma_n = Tr (M - zI)^{-1} = sum_i 1/(lambda_i - z), Im z != 0.
std::complex<double> resolvent_trace(const Spectrum& s, std::complex<double> z);

}  // namespace bandstat
