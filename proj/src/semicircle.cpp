#include "bandstat/semicircle.hpp"

#include <algorithm>
#include <cmath>

#include "bandstat/errors.hpp"

namespace bandstat {

namespace {
constexpr double kEdge = 2.8284271247461903;  // 2 sqrt 2
}

double semicircle_cdf(double x) {
    if (x <= -kEdge) return 0.0;
    if (x >= kEdge) return 1.0;
    return 0.5 + x * std::sqrt(8.0 - x * x) / (8.0 * M_PI) +
           std::asin(x / kEdge) / M_PI;
}

EsdReport esd_report(const Spectrum& s, std::size_t nbins) {
    const std::size_t n = s.size();
    if (n == 0) throw argument_error("esd_report: empty spectrum");
    if (nbins < 1) throw argument_error("esd_report: need at least one bin");

    std::vector<double> lam = s.eigenvalues;
    std::sort(lam.begin(), lam.end());

    EsdReport out;

    // KS distance: the empirical CDF jumps by 1/n at each eigenvalue, so the
    // sup over x is attained just below or at some lambda_i.
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = semicircle_cdf(lam[i]);
        out.ks = std::max({out.ks, static_cast<double>(i + 1) / dn - f,
                           f - static_cast<double>(i) / dn});
    }

    std::size_t outside = 0;
    for (double x : lam)
        if (std::abs(x) > kEdge) ++outside;
    out.outside_fraction = static_cast<double>(outside) / dn;

    // Histogram over the hull of the support and the sample, so both the
    // semicircle edge and any stray eigenvalues are covered.
    double lo = std::min(lam.front(), -kEdge);
    double hi = std::max(lam.back(), kEdge);
    hi = std::nextafter(hi, hi + 1.0);  // make the last bin right-closed
    const double width = (hi - lo) / static_cast<double>(nbins);
    out.bin_edges.resize(nbins + 1);
    for (std::size_t k = 0; k <= nbins; ++k)
        out.bin_edges[k] = lo + width * static_cast<double>(k);
    std::vector<std::size_t> counts(nbins, 0);
    for (double x : lam) {
        auto k = static_cast<std::size_t>((x - lo) / width);
        if (k >= nbins) k = nbins - 1;
        ++counts[k];
    }
    out.densities.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k)
        out.densities[k] = static_cast<double>(counts[k]) / (dn * width);
    return out;
}

}  // namespace bandstat
