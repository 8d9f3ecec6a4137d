#pragma once

#include <functional>

namespace bandstat::integrate {

struct quad_result {
    double value = 0.0;
    double error = 0.0;
};

// One Gauss-Kronrod 7-15 application on [a, b]; error from |G7 - K15|.
quad_result gauss_kronrod_15(const std::function<double(double)>& f,
                             double a, double b);

// Adaptive bisection driven by the GK15 error estimate.
quad_result integrate_adaptive(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12,
                               int max_depth = 12);

// Sine and cosine integrals Si(x), Ci(x) for x >= 40 via the asymptotic
// auxiliary series (optimal truncation far below double epsilon there).
double si_large(double x);
double ci_large(double x);

// int_S^inf (sin s / s)^j ds in closed form through Si/Ci recursions;
// requires S >= 40 and 1 <= j <= 16.
double sin_power_tail(int j, double S);

}  // namespace bandstat::integrate
