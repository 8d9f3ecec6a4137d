#pragma once

#include <complex>
#include <limits>

#include "bandstat/testfunction.hpp"

namespace bandstat::quadrature {

struct KernelIntegralResult {
    double value = 0.0;
    double error = 0.0;  // panel estimates plus residual tail bound
};

// F(x,y) evaluated from the improper-integral form: panels of length pi on
// [0, s_max] by adaptive Gauss-Kronrod, the remainder handled in closed form
// through the power series of the integrand in u = sin(s)/s.  The
// denominator is monitored for sign changes; one inside the range is a pole
// and raises a numeric error naming the offending (x, y, s).
KernelIntegralResult kernel_integral(double x, double y, double s_max = 400.0,
                                     double tol = 1e-9);

// (kappa4/16pi^2) * (int (4-mu^2) phi(mu)/sqrt(8-mu^2) dmu)^2 via
// Gauss-Chebyshev (first kind) nodes absorbing the edge weight.
double variance_kappa_term(const TestFunction& phi, double kappa4,
                           int quad_order = 256);

// (sigma2/16pi^2) * (int mu phi(mu)/sqrt(8-mu^2) dmu)^2, same scheme.
double variance_sigma_term(const TestFunction& phi, double sigma2,
                           int quad_order = 256);

enum class KernelVariant { printed, symmetrized };

struct KernelTermOrders {
    int outer_q = 48;     // even; the y-lattice uses outer_q + 1 nodes
    int inner_mult = 9;   // odd lattice refinement so poles land on nodes
    int levels = 2;       // outer-lattice doublings; spread of the last two
                          // levels is the reported error estimate
    int series_k = 400;   // truncation for the F(x,y) series evaluations
    double tol = std::numeric_limits<double>::infinity();
};

struct KernelTermResult {
    double value = 0.0;
    double error_estimate = 0.0;  // spread across inner refinement levels
    KernelVariant variant = KernelVariant::printed;
};

// Third term of the limiting variance.  "printed" follows the displayed
// formula literally: both inner principal-value denominators carry the outer
// x variable and the second is squared (the squared pole has no principal
// value, which surfaces as a non-shrinking error estimate).  "symmetrized"
// evaluates the hypothesis substitution (x-mu2)^2 -> (y-mu2) with a 1/(8pi^3)
// prefactor; it is labeled experimental in output metadata.  Principal
// values use midpoint Gauss-Chebyshev lattices chosen so each pole falls
// exactly on an excised interior node.
KernelTermResult variance_kernel_term(const TestFunction& phi,
                                      KernelVariant variant,
                                      const KernelTermOrders& orders = {});

struct VarianceBreakdown {
    double kappa_term = 0.0;
    double sigma_term = 0.0;
    double kernel_term = 0.0;
    double total = 0.0;
    KernelVariant variant = KernelVariant::printed;
    int quad_order = 0;           // order used for the kappa/sigma integrals
    KernelTermOrders orders;      // lattice orders used for the kernel term
    double kernel_error = 0.0;    // error estimate attached to kernel_term
};

VarianceBreakdown variance_total(const TestFunction& phi, double kappa4,
                                 double sigma2, KernelVariant variant,
                                 int quad_order = 256,
                                 const KernelTermOrders& orders = {});

// Stieltjes transform of the scaled semicircle law:
// f(z) = (-z + sqrt(z^2-8))/4, branch with Im f > 0 on the upper half-plane
// and f -> 0 at infinity.  Real z inside [-2*sqrt(2), 2*sqrt(2)] lies on the
// branch cut and is rejected.
std::complex<double> stieltjes_f(std::complex<double> z);

}  // namespace bandstat::quadrature
