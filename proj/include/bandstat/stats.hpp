#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace bandstat {

// Central-moment summary.  variance is the unbiased (n-1) sample variance;
// skewness and the kurtosis quantities use the biased central moments
// m_p = (1/n) sum (x - mean)^p, so kurtosis_ratio = m4 / m2^2 with Gaussian
// target 3 and excess_kurtosis = kurtosis_ratio - 3.
struct MomentSummary {
    std::size_t n_samples = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double kurtosis_ratio = 0.0;
};

// Two-pass moments.  Requires >= 4 samples and positive variance.
MomentSummary moment_summary(std::span<const double> samples);

// One-pass (streaming) accumulator for the same summary, kept so persisted
// records can be cross-checked against the streaming totals.
class RunningMoments {
public:
    void add(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    // Central power sums sum (x - mean)^p, not yet divided by n.
    double sum2() const { return m2_; }
    double sum3() const { return m3_; }
    double sum4() const { return m4_; }
    // Same field conventions as moment_summary; same preconditions.
    MomentSummary summary() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;  // sum (x - mean)^2
    double m3_ = 0.0;
    double m4_ = 0.0;
};

struct JarqueBera {
    double statistic = 0.0;
    double pvalue = 1.0;
};

// JB = n/6 (S^2 + K^2/4) with S skewness and K excess kurtosis; p-value is
// the exact chi-squared(2) tail exp(-JB/2).  Requires >= 20 samples.
JarqueBera jarque_bera(std::span<const double> samples);
double jarque_bera_pvalue(double statistic);

// Kolmogorov-Smirnov distance against a normal fitted by the sample mean
// and (n-1) standard deviation -- the Lilliefors setup, reported as a
// descriptive statistic.  Requires >= 20 samples.
double ks_normal(std::span<const double> samples);

// Standard normal CDF, absolute error below 1e-12.
double normal_cdf(double x);
// Inverse standard normal CDF on (0, 1).
double normal_quantile(double p);

struct NormalityReport {
    std::size_t n_samples = 0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double kurtosis_ratio = 0.0;
    double jarque_bera_stat = 0.0;
    double jarque_bera_pvalue = 1.0;
    double ks_stat = 0.0;
    // (fitted normal quantile at (i - 1/2)/n, i-th order statistic);
    // ascending in both coordinates.
    std::vector<std::pair<double, double>> qq;
};

NormalityReport normality_report(std::span<const double> samples);

}  // namespace bandstat
