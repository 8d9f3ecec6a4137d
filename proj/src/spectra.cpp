#include "bandstat/spectra.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <cmath>
#include <string>

#include "bandstat/errors.hpp"

namespace bandstat {

Spectrum eigen(const Matrix& m, bool want_vectors) {
    const std::size_t n = m.dim();
    if (n == 0) throw argument_error("eigen: empty matrix");
    if (m.max_asymmetry() > 1e-12)
        throw argument_error("eigen: input not symmetric within 1e-12");

    Matrix work = m;
    std::vector<double> evals(n);
    lapack_int info = LAPACKE_dsyevd(
        LAPACK_ROW_MAJOR, want_vectors ? 'V' : 'N', 'L',
        static_cast<lapack_int>(n), work.data(), static_cast<lapack_int>(n),
        evals.data());
    if (info < 0)
        throw argument_error("eigen: invalid argument " + std::to_string(-info) +
                             " to dsyevd");
    if (info > 0)
        throw numeric_error("eigen: dsyevd failed to converge (info=" +
                            std::to_string(info) + ", n=" + std::to_string(n) +
                            ")");

    Spectrum s;
    s.eigenvalues = std::move(evals);
    if (want_vectors) s.eigenvectors = std::move(work);
    return s;
}

std::complex<double> linear_statistic(const Spectrum& s, const TestFunction& phi) {
    if (s.size() == 0) throw argument_error("linear_statistic: empty spectrum");
    if (phi.is_real()) {
        double acc = 0.0;
        for (double lam : s.eigenvalues) acc += phi.real_at(lam);
        return {acc, 0.0};
    }
    std::complex<double> acc = 0.0;
    for (double lam : s.eigenvalues) acc += phi(lam);
    return acc;
}

std::complex<double> normalized_statistic(std::complex<double> value,
                                          std::size_t n, std::size_t b) {
    if (n == 0 || b == 0)
        throw argument_error("normalized_statistic: n and b must be positive");
    return std::sqrt(static_cast<double>(b) / static_cast<double>(n)) * value;
}

double normalized_statistic(double value, std::size_t n, std::size_t b) {
    return normalized_statistic(std::complex<double>(value, 0.0), n, b).real();
}

Matrix matrix_function(const Spectrum& s, const TestFunction& phi) {
    if (!s.has_vectors())
        throw state_error("matrix_function: spectrum has no eigenvectors");
    if (!phi.is_real())
        throw argument_error("matrix_function: test function must be real");
    const std::size_t n = s.size();
    const Matrix& v = *s.eigenvectors;

    // Scale column j of V by phi(lambda_j), then multiply by V^T.
    Matrix scaled = v;
    for (std::size_t j = 0; j < n; ++j) {
        const double f = phi.real_at(s.eigenvalues[j]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= f;
    }
    Matrix out(n);
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans,
                static_cast<blasint>(n), static_cast<blasint>(n),
                static_cast<blasint>(n), 1.0, scaled.data(),
                static_cast<blasint>(n), v.data(), static_cast<blasint>(n),
                0.0, out.data(), static_cast<blasint>(n));
    return out;
}

std::complex<double> resolvent_trace(const Spectrum& s, std::complex<double> z) {
    if (s.size() == 0) throw argument_error("resolvent_trace: empty spectrum");
    if (z.imag() == 0.0)
        throw argument_error("resolvent_trace: z must have nonzero imaginary part");
    std::complex<double> acc = 0.0;
    for (double lam : s.eigenvalues) acc += 1.0 / (lam - z);
    return acc;
}

}  // namespace bandstat
