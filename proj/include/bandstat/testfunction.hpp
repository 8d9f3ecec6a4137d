#pragma once

#include <complex>
#include <functional>
#include <string>

namespace bandstat {

// A named test function phi: R -> C, parsed from a string identifier so the
// CLI, harness, and quadrature layers share one registry.
//
// Built-ins:
//   "identity"          phi(x) = x
//   "gauss"             phi(x) = exp(-x^2)
//   "semicircle16"      phi(x) = sqrt(16 - x^2) on [-4,4], 0 outside
//   "poly:c0,c1,..."    polynomial with the given coefficients
//   "chebU:k"           rescaled Chebyshev U_k on [-2*sqrt(2), 2*sqrt(2)]
//   "resolvent:mu,eta"  phi(x) = 1/(x - (mu + i*eta)), eta != 0
class TestFunction {
public:
    static TestFunction parse(const std::string& id);

    // Process-wide count of semicircle16 evaluations clipped to 0 because
    // the argument fell outside [-4, 4].
    static long clip_count();

    const std::string& id() const { return id_; }
    bool is_real() const { return real_; }

    std::complex<double> operator()(double x) const { return eval_(x); }

    // Real-valued evaluation; requires is_real().
    double real_at(double x) const;

private:
    TestFunction(std::string id, bool real,
                 std::function<std::complex<double>(double)> f);

    std::string id_;
    bool real_;
    std::function<std::complex<double>(double)> eval_;
};

}  // namespace bandstat
