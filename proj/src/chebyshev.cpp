#include "bandstat/chebyshev.hpp"

#include <cmath>
#include <string>

#include "bandstat/combinatorics.hpp"
#include "bandstat/errors.hpp"

namespace bandstat::chebyshev {

namespace {

constexpr double kHalfSupport = 2.8284271247461903;  // 2*sqrt(2)
constexpr double kInvSqrt2 = 0.7071067811865476;

// Partial sum of sum_{m=1}^{M} gamma_m cos(m*alpha) plus the remainder
// sum_{m>M} gamma_m cos(m*alpha), the latter via the Euler/Abel identity
// sum_{m>=N} a_m z^m = sum_{j>=0} (Delta^j a)(N) z^{N+j} / (1-z)^{j+1}
// with forward differences, truncated adaptively where the terms stop
// shrinking (gamma varies slowly, so a few differences suffice).
double cosine_series_with_tail(const std::vector<double>& gamma, int M,
                               double alpha) {
    double acc = 0.0;
    for (int m = 1; m <= M; ++m) acc += gamma[m] * std::cos(m * alpha);

    const int max_diff = 8;
    std::vector<double> diff(gamma.begin() + (M + 1),
                             gamma.begin() + (M + 1) + max_diff + 1);
    std::complex<double> z = std::polar(1.0, alpha);
    std::complex<double> inv = 1.0 / (1.0 - z);
    std::complex<double> zpow = std::polar(1.0, (M + 1) * alpha);
    std::complex<double> factor = inv;
    double tail = 0.0;
    double prev_mag = HUGE_VAL;
    for (int j = 0; j <= max_diff; ++j) {
        std::complex<double> term = diff[0] * zpow * factor;
        double mag = std::abs(term);
        if (mag >= prev_mag) break;
        tail += term.real();
        prev_mag = mag;
        for (int i = 0; i + 1 <= max_diff - j; ++i)
            diff[i] = diff[i + 1] - diff[i];
        zpow *= z;
        factor *= inv;
    }
    return acc + tail;
}

}  // namespace

double u_poly(int k, double x) {
    if (k < 0) throw argument_error("u_poly: k must be nonnegative");
    double t = x * kInvSqrt2;
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = t;
    for (int j = 1; j < k; ++j) {
        double next = t * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::complex<double> semicircle_coeff(const TestFunction& f, int k,
                                      int quad_order) {
    if (k < 0) throw argument_error("semicircle_coeff: k must be nonnegative");
    if (quad_order < k + 1)
        throw argument_error(
            "semicircle_coeff: quadrature order " + std::to_string(quad_order) +
            " cannot resolve U_" + std::to_string(k) +
            " (need at least k+1 nodes)");
    const int q = quad_order;
    std::complex<double> acc = 0.0;
    for (int i = 1; i <= q; ++i) {
        double theta = i * M_PI / (q + 1);
        double s = std::sin(theta);
        acc += s * std::sin((k + 1) * theta) *
               f(kHalfSupport * std::cos(theta));
    }
    return acc * (2.0 / (q + 1));
}

ChebSeries expand(const TestFunction& f, int K, int quad_order) {
    if (K < 0) throw argument_error("expand: K must be nonnegative");
    if (quad_order < K + 1)
        throw argument_error(
            "expand: quadrature order cannot resolve U_K (need >= K+1 nodes)");
    const int q = quad_order;
    std::vector<double> theta(q), s(q);
    std::vector<std::complex<double>> fx(q);
    for (int i = 0; i < q; ++i) {
        theta[i] = (i + 1) * M_PI / (q + 1);
        s[i] = std::sin(theta[i]);
        fx[i] = f(kHalfSupport * std::cos(theta[i]));
    }
    ChebSeries out;
    out.truncation = K;
    out.quad_order = q;
    out.coeffs.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < q; ++i)
            acc += s[i] * std::sin((k + 1) * theta[i]) * fx[i];
        out.coeffs[k] = acc * (2.0 / (q + 1));
    }
    return out;
}

std::complex<double> bilinear_form(const TestFunction& f,
                                   const TestFunction& g, int K,
                                   int quad_order) {
    ChebSeries fs = expand(f, K, quad_order);
    ChebSeries gs = expand(g, K, quad_order);
    auto gamma = combinatorics::gamma_table(K + 1);
    std::complex<double> acc = 0.0;
    for (int k = 0; k <= K; ++k)
        acc += 2.0 * (*gamma)[k + 1] * fs.coeffs[k] * gs.coeffs[k];
    return acc;
}

SeriesResult kernel_series(double x, double y, int K) {
    if (K < 0) throw argument_error("kernel_series: K must be nonnegative");
    if (std::abs(x) >= kHalfSupport || std::abs(y) >= kHalfSupport)
        throw argument_error(
            "kernel_series: |x| and |y| must be < 2*sqrt(2)");
    if (x == y)
        throw numeric_error("kernel_series: series diverges on the diagonal");

    double tx = std::acos(x / kHalfSupport);
    double ty = std::acos(y / kHalfSupport);
    double sx = std::sin(tx), sy = std::sin(ty);
    double delta = std::abs(tx - ty);
    double sigma = tx + ty;

    // pi sum U_k(x) U_k(y) gamma_{k+1}
    //   = pi/(2 sx sy) sum_{m>=1} gamma_m [cos(m delta) - cos(m sigma)]
    const int M = K + 1;
    auto gamma = combinatorics::gamma_table(M + 9);
    double even = cosine_series_with_tail(*gamma, M, delta);
    double odd = cosine_series_with_tail(*gamma, M, sigma);

    SeriesResult out;
    out.truncation = K;
    out.value = M_PI / (2.0 * sx * sy) * (even - odd);
    out.tail_estimate = M_PI * (*gamma)[K + 2] / (sx * sy);
    return out;
}

}  // namespace bandstat::chebyshev
