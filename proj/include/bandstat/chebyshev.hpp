#pragma once

#include <complex>
#include <vector>

#include "bandstat/testfunction.hpp"

namespace bandstat::chebyshev {

// Rescaled Chebyshev polynomial of the second kind on [-2*sqrt(2), 2*sqrt(2)]:
// U_0 = 1, U_1 = x/sqrt(2), U_{k+1} = (x/sqrt(2)) U_k - U_{k-1}.  For
// |x| <= 2*sqrt(2) this equals sin((k+1)theta)/sin(theta) with
// x = 2*sqrt(2)*cos(theta).
double u_poly(int k, double x);

// Coefficients of an expansion f ~ sum_k f_k U_k under the semicircle weight
// sqrt(8-x^2)/(4*pi).
struct ChebSeries {
    std::vector<std::complex<double>> coeffs;  // f_0 .. f_K
    int truncation = 0;                        // K
    int quad_order = 0;                        // nodes used
};

// f_k = (1/4pi) * int f(x) U_k(x) sqrt(8-x^2) dx via Gauss-Chebyshev
// (second kind) nodes; exact for polynomial f of degree <= 2*quad_order-1-k.
// quad_order < k+1 is rejected as under-resolved.
std::complex<double> semicircle_coeff(const TestFunction& f, int k,
                                      int quad_order);

ChebSeries expand(const TestFunction& f, int K, int quad_order);

// <f,g> ~ sum_{k=0}^{K} 2 gamma_{k+1} f_k g_k (bilinear, no conjugation).
std::complex<double> bilinear_form(const TestFunction& f,
                                   const TestFunction& g, int K,
                                   int quad_order);

struct SeriesResult {
    double value = 0.0;          // tail-completed sum
    double tail_estimate = 0.0;  // pi * gamma_{K+2} / (sin tx * sin ty)
    int truncation = 0;          // K
};

// F(x,y) = pi * sum_{k>=0} U_k(x) U_k(y) gamma_{k+1}, summed through k = K
// with the remainder closed by an Abel/Euler tail transform of the
// equivalent cosine series.  Requires |x|, |y| < 2*sqrt(2) and x != y
// (the series diverges on the diagonal).
SeriesResult kernel_series(double x, double y, int K);

}  // namespace bandstat::chebyshev
