#include "bandstat/quadrature.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bandstat/chebyshev.hpp"
#include "bandstat/errors.hpp"
#include "bandstat/integrate.hpp"

namespace bandstat::quadrature {

namespace {

constexpr double kHalfSupport = 2.8284271247461903;  // 2*sqrt(2)

// Integrand of F in u = sin(s)/s:
//   R(u) = (u^2 - u^4) / (2(1-u^2)^2 + u^2(x^2+y^2) - u(1+u^2) xy).
// As a power series R(u) = sum_{j>=2} c_j u^j with denominator coefficients
// d = (2, -xy, x^2+y^2-4, -xy, 2); the tail integral beyond S reduces to
// sum_j c_j * int_S^inf (sin s / s)^j ds.
std::array<double, 9> tail_coeffs(double x, double y) {
    double p = x * y, q = x * x + y * y;
    std::array<double, 5> d{2.0, -p, q - 4.0, -p, 2.0};
    std::array<double, 9> n{};
    n[2] = 1.0;
    n[4] = -1.0;
    std::array<double, 9> c{};
    for (int j = 0; j < 9; ++j) {
        double acc = n[j];
        for (int i = 1; i <= 4 && i <= j; ++i) acc -= d[i] * c[j - i];
        c[j] = acc / d[0];
    }
    return c;
}

}  // namespace

KernelIntegralResult kernel_integral(double x, double y, double s_max,
                                     double tol) {
    if (std::abs(x) >= kHalfSupport || std::abs(y) >= kHalfSupport)
        throw argument_error(
            "kernel_integral: |x| and |y| must be < 2*sqrt(2)");
    if (!(s_max >= 130.0))
        throw argument_error(
            "kernel_integral: s_max must be >= 130 (tail validity)");
    if (!(tol > 0.0)) throw argument_error("kernel_integral: tol must be > 0");

    const double p = x * y, q = x * x + y * y;
    auto integrand = [&](double s) {
        if (s == 0.0) return 0.0;
        double u = std::sin(s) / s;
        double u2 = u * u;
        double one_m = 1.0 - u2;
        double den = 2.0 * one_m * one_m + u2 * q - u * (1.0 + u2) * p;
        if (den <= 0.0)
            throw numeric_error(
                "kernel_integral: denominator sign change (pole) at x=" +
                std::to_string(x) + " y=" + std::to_string(y) +
                " s=" + std::to_string(s));
        return u2 * one_m / den;  // u^2 - u^4 = u^2 (1 - u^2)
    };

    const int panels = static_cast<int>(std::llround(s_max / M_PI));
    const double S = panels * M_PI;
    const double panel_tol = std::max(1e-15, tol / (8.0 * panels));
    double acc = 0.0, err = 0.0;
    for (int k = 0; k < panels; ++k) {
        auto r = integrate::integrate_adaptive(integrand, k * M_PI,
                                               (k + 1) * M_PI, panel_tol);
        acc += r.value;
        err += r.error;
    }

    auto c = tail_coeffs(x, y);
    double tail = 0.0;
    for (int j = 2; j <= 7; ++j)
        tail += c[j] * integrate::sin_power_tail(j, S);
    // First dropped term bounds the residual: |c_8| * int_S^inf s^-8 ds.
    double residual = std::abs(c[8]) * std::pow(S, -7.0) / 7.0;

    KernelIntegralResult out;
    out.value = 4.0 * (acc + tail);
    out.error = 4.0 * (err + residual);
    return out;
}

namespace {

// Midpoint Gauss-Chebyshev (first kind) rule absorbing 1/sqrt(8-mu^2):
// int g(mu)/sqrt(8-mu^2) dmu ~ (pi/Q) sum g(mu_i),
// mu_i = 2*sqrt(2) cos((2i-1) pi / (2Q)).
double gc1_weighted_sum(const TestFunction& phi, int quad_order,
                        bool kappa_form) {
    double acc = 0.0;
    for (int i = 1; i <= quad_order; ++i) {
        double mu = kHalfSupport * std::cos((2 * i - 1) * M_PI /
                                            (2.0 * quad_order));
        double w = kappa_form ? (4.0 - mu * mu) : mu;
        acc += w * phi.real_at(mu);
    }
    return acc * M_PI / quad_order;
}

void check_variance_args(const TestFunction& phi, int quad_order,
                         const char* who) {
    if (!phi.is_real())
        throw argument_error(std::string(who) +
                             ": requires a real test function");
    if (quad_order < 2)
        throw argument_error(std::string(who) + ": quad_order must be >= 2");
}

}  // namespace

double variance_kappa_term(const TestFunction& phi, double kappa4,
                           int quad_order) {
    check_variance_args(phi, quad_order, "variance_kappa_term");
    double inner = gc1_weighted_sum(phi, quad_order, true);
    return kappa4 / (16.0 * M_PI * M_PI) * inner * inner;
}

double variance_sigma_term(const TestFunction& phi, double sigma2,
                           int quad_order) {
    check_variance_args(phi, quad_order, "variance_sigma_term");
    double inner = gc1_weighted_sum(phi, quad_order, false);
    return sigma2 / (16.0 * M_PI * M_PI) * inner * inner;
}

namespace {

// Principal-value lattice sums for the inner integrals of the kernel term.
// The outer node x = 2*sqrt(2) cos((2i-1) pi / (2Q)) lies exactly on the
// inner midpoint lattice of Q_in = mult*Q nodes when mult is odd (node index
// 2r-1 = mult*(2i-1)); excising that node leaves a symmetric-in-theta
// neighborhood, so the simple-pole sum converges as a principal value.
// pole_power = 1 computes int mu phi/((x-mu) sqrt(8-mu^2)),
// pole_power = 2 the literal squared-pole version (no principal value
// exists; the sum grows with the lattice and the growth is surfaced through
// the refinement error estimate).
double pv_inner_sum(const TestFunction& phi, int outer_q, int outer_index,
                    int mult, int pole_power) {
    const int qin = mult * outer_q;
    const int pole_node = mult * (2 * outer_index - 1);  // odd, = 2r-1
    const double pole =
        kHalfSupport * std::cos(pole_node * M_PI / (2.0 * qin));
    double acc = 0.0;
    for (int r = 1; r <= qin; ++r) {
        if (2 * r - 1 == pole_node) continue;
        double mu = kHalfSupport * std::cos((2 * r - 1) * M_PI / (2.0 * qin));
        double dx = pole - mu;
        double f = mu * phi.real_at(mu);
        acc += (pole_power == 1) ? f / dx : f / (dx * dx);
    }
    return acc * M_PI / qin;
}

double kernel_term_at_level(const TestFunction& phi, KernelVariant variant,
                            int qx, int mult, int series_k) {
    const int qy = qx + 1;
    // Even x-lattice against odd y-lattice: (2i-1)*qy is odd while
    // (2j-1)*qx is even, so no outer pair ever lands on the diagonal of F.
    std::vector<std::vector<double>> fgrid(qx, std::vector<double>(qy));
    for (int i = 0; i < qx; ++i) {
        double x = kHalfSupport * std::cos((2 * i + 1) * M_PI / (2.0 * qx));
        for (int j = 0; j < qy; ++j) {
            double y =
                kHalfSupport * std::cos((2 * j + 1) * M_PI / (2.0 * qy));
            fgrid[i][j] = chebyshev::kernel_series(x, y, series_k).value;
        }
    }

    std::vector<double> wx(qx), wy(qy), ax(qx), bx, ay;
    for (int i = 0; i < qx; ++i) {
        double theta = (2 * i + 1) * M_PI / (2.0 * qx);
        double s = std::sin(theta);
        wx[i] = 8.0 * M_PI / qx * s * s;
        ax[i] = pv_inner_sum(phi, qx, i + 1, mult, 1);
    }
    if (variant == KernelVariant::printed) {
        bx.resize(qx);
        for (int i = 0; i < qx; ++i)
            bx[i] = pv_inner_sum(phi, qx, i + 1, mult, 2);
    } else {
        ay.resize(qy);
    }
    for (int j = 0; j < qy; ++j) {
        double theta = (2 * j + 1) * M_PI / (2.0 * qy);
        double s = std::sin(theta);
        wy[j] = 8.0 * M_PI / qy * s * s;
        if (variant == KernelVariant::symmetrized)
            ay[j] = pv_inner_sum(phi, qy, j + 1, mult, 1);
    }

    double acc = 0.0;
    for (int i = 0; i < qx; ++i) {
        double inner_x =
            (variant == KernelVariant::printed) ? ax[i] * bx[i] : ax[i];
        for (int j = 0; j < qy; ++j) {
            double inner = (variant == KernelVariant::printed)
                               ? inner_x
                               : inner_x * ay[j];
            acc += wx[i] * wy[j] * fgrid[i][j] * inner;
        }
    }
    if (variant == KernelVariant::symmetrized)
        acc /= 8.0 * M_PI * M_PI * M_PI;
    return acc;
}

}  // namespace

KernelTermResult variance_kernel_term(const TestFunction& phi,
                                      KernelVariant variant,
                                      const KernelTermOrders& orders) {
    if (!phi.is_real())
        throw argument_error(
            "variance_kernel_term: requires a real test function");
    if (orders.outer_q < 8 || orders.outer_q % 2 != 0)
        throw argument_error(
            "variance_kernel_term: outer_q must be even and >= 8");
    if (orders.inner_mult < 3 || orders.inner_mult % 2 == 0)
        throw argument_error(
            "variance_kernel_term: inner_mult must be odd and >= 3");
    if (orders.levels < 1)
        throw argument_error("variance_kernel_term: levels must be >= 1");

    // Refinement doubles the outer lattice per level; F's integrable
    // |x-y|^(-1/2) diagonal singularity dominates the quadrature error, so
    // the level spread is the meaningful error signal.  The inner lattices
    // scale with the outer one, which also makes the printed variant's
    // squared-pole growth visible in the spread.
    double value = 0.0, prev = 0.0, spread = HUGE_VAL;
    for (int level = 0; level < orders.levels; ++level) {
        int qx = orders.outer_q << level;
        value = kernel_term_at_level(phi, variant, qx, orders.inner_mult,
                                     orders.series_k);
        if (level > 0) spread = std::abs(value - prev);
        prev = value;
    }

    if (spread > orders.tol)
        throw numeric_error(
            "variance_kernel_term: principal-value refinement did not "
            "converge (spread " +
            std::to_string(spread) + " > tol)");

    KernelTermResult out;
    out.value = value;
    out.error_estimate = spread;
    out.variant = variant;
    return out;
}

VarianceBreakdown variance_total(const TestFunction& phi, double kappa4,
                                 double sigma2, KernelVariant variant,
                                 int quad_order,
                                 const KernelTermOrders& orders) {
    VarianceBreakdown out;
    out.variant = variant;
    out.quad_order = quad_order;
    out.orders = orders;
    out.kappa_term = variance_kappa_term(phi, kappa4, quad_order);
    out.sigma_term = variance_sigma_term(phi, sigma2, quad_order);
    auto kt = variance_kernel_term(phi, variant, orders);
    out.kernel_term = kt.value;
    out.kernel_error = kt.error_estimate;
    out.total = out.kappa_term + out.sigma_term + out.kernel_term;
    return out;
}

std::complex<double> stieltjes_f(std::complex<double> z) {
    if (z.imag() == 0.0 && std::abs(z.real()) <= kHalfSupport)
        throw argument_error(
            "stieltjes_f: real z inside [-2*sqrt(2), 2*sqrt(2)] lies on the "
            "branch cut");
    // Principal square roots of the two linear factors pick the branch with
    // Im f > 0 on the upper half-plane and f ~ -1/z at infinity.  The
    // rationalized form -2/(z + sqrt(z^2-8)) equals (-z + sqrt(z^2-8))/4
    // without the large-|z| cancellation of the subtracted form.
    std::complex<double> root =
        std::sqrt(z - kHalfSupport) * std::sqrt(z + kHalfSupport);
    return -2.0 / (z + root);
}

}  // namespace bandstat::quadrature
