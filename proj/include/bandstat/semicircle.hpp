#pragma once

#include <cstddef>
#include <vector>

#include "bandstat/spectra.hpp"

namespace bandstat {

// CDF of the semicircle law on [-2 sqrt 2, 2 sqrt 2]:
// 1/2 + x sqrt(8 - x^2) / (8 pi) + asin(x / (2 sqrt 2)) / pi inside the
// support, clamped to {0, 1} outside.
double semicircle_cdf(double x);

// Empirical-spectral-distribution diagnostics for one spectrum.
struct EsdReport {
    std::vector<double> bin_edges;  // nbins + 1 ascending edges
    std::vector<double> densities;  // nbins values; sum(density * width) = 1
    double ks = 0.0;                // sup |ESD - semicircle CDF|
    double outside_fraction = 0.0;  // share of eigenvalues with |x| > 2 sqrt 2
};

EsdReport esd_report(const Spectrum& s, std::size_t nbins = 64);

}  // namespace bandstat
