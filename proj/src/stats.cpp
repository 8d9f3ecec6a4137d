#include "bandstat/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bandstat/errors.hpp"

namespace bandstat {

namespace {

// Shared tail: turn central power sums (m2..m4 as plain sums, not yet
// divided by n) into the summary fields.
MomentSummary finish_summary(std::size_t n, double mean, double s2, double s3,
                             double s4) {
    if (n < 4) throw argument_error("moment_summary: need at least 4 samples");
    if (!(s2 > 0.0)) throw argument_error("moment_summary: degenerate variance");
    const double dn = static_cast<double>(n);
    const double m2 = s2 / dn;
    const double m3 = s3 / dn;
    const double m4 = s4 / dn;
    MomentSummary out;
    out.n_samples = n;
    out.mean = mean;
    out.variance = s2 / (dn - 1.0);
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis_ratio = m4 / (m2 * m2);
    out.excess_kurtosis = out.kurtosis_ratio - 3.0;
    return out;
}

}  // namespace

MomentSummary moment_summary(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 4) throw argument_error("moment_summary: need at least 4 samples");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) throw argument_error("moment_summary: degenerate variance");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    return finish_summary(n, mean, s2, s3, s4);
}

void RunningMoments::add(double x) {
    // Pebay's single-pass central-moment updates.
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
           4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
}

MomentSummary RunningMoments::summary() const {
    return finish_summary(n_, mean_, m2_, m3_, m4_);
}

double jarque_bera_pvalue(double statistic) {
    if (statistic < 0.0)
        throw argument_error("jarque_bera_pvalue: statistic must be nonnegative");
    return std::exp(-0.5 * statistic);  // chi-squared(2) tail
}

JarqueBera jarque_bera(std::span<const double> samples) {
    if (samples.size() < 20)
        throw argument_error("jarque_bera: need at least 20 samples");
    const MomentSummary m = moment_summary(samples);
    const double s = m.skewness;
    const double k = m.excess_kurtosis;
    JarqueBera out;
    out.statistic =
        static_cast<double>(samples.size()) / 6.0 * (s * s + 0.25 * k * k);
    out.pvalue = jarque_bera_pvalue(out.statistic);
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw argument_error("normal_quantile: p must lie in (0, 1)");

    // Acklam's rational approximation, then one Halley step against erfc.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double ks_normal(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 20) throw argument_error("ks_normal: need at least 20 samples");
    const MomentSummary m = moment_summary(samples);
    const double sd = std::sqrt(m.variance);
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal_cdf((sorted[i] - m.mean) / sd);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
        const double lo = f - static_cast<double>(i) / static_cast<double>(n);
        d = std::max({d, hi, lo});
    }
    return d;
}

NormalityReport normality_report(std::span<const double> samples) {
    const MomentSummary m = moment_summary(samples);
    const JarqueBera jb = jarque_bera(samples);
    NormalityReport out;
    out.n_samples = m.n_samples;
    out.skewness = m.skewness;
    out.excess_kurtosis = m.excess_kurtosis;
    out.kurtosis_ratio = m.kurtosis_ratio;
    out.jarque_bera_stat = jb.statistic;
    out.jarque_bera_pvalue = jb.pvalue;
    out.ks_stat = ks_normal(samples);

    const std::size_t n = samples.size();
    const double sd = std::sqrt(m.variance);
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    out.qq.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        out.qq.emplace_back(m.mean + sd * normal_quantile(p), sorted[i]);
    }
    return out;
}

}  // namespace bandstat
