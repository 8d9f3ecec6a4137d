#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bandstat/errors.hpp"
#include "bandstat/rng.hpp"
#include "bandstat/stats.hpp"
#include "oracle_values.hpp"

using namespace bandstat;

namespace {

std::vector<double> gaussian_draws(std::size_t n, std::uint64_t seed) {
    rng::stream s(seed, 0);
    std::vector<double> out(n);
    for (double& x : out) x = s.gaussian();
    return out;
}

}  // namespace

TEST_CASE("moment_summary: two-point alternating sample") {
    std::vector<double> x = {-1.0, 1.0, -1.0, 1.0};
    MomentSummary m = moment_summary(x);
    CHECK(m.n_samples == 4);
    CHECK(m.mean == 0.0);
    CHECK(m.kurtosis_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.excess_kurtosis == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(m.skewness == 0.0);
    CHECK(m.variance == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("moment_summary: gaussian kurtosis ratio near 3") {
    auto x = gaussian_draws(100000, 2024);
    MomentSummary m = moment_summary(x);
    CHECK(m.kurtosis_ratio > 2.9);
    CHECK(m.kurtosis_ratio < 3.1);
    CHECK(std::abs(m.mean) < 0.02);
    CHECK(std::abs(m.variance - 1.0) < 0.02);
}

TEST_CASE("moment_summary: affine invariance of shape") {
    auto x = gaussian_draws(500, 7);
    for (double& v : x) v = v * v;  // skewed input
    MomentSummary base = moment_summary(x);
    std::vector<double> y = x;
    for (double& v : y) v = 2.5 * v - 7.0;
    MomentSummary shifted = moment_summary(y);
    CHECK(std::abs(shifted.skewness - base.skewness) < 1e-10);
    CHECK(std::abs(shifted.kurtosis_ratio - base.kurtosis_ratio) < 1e-10);
}

TEST_CASE("moment_summary: preconditions") {
    std::vector<double> few = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(moment_summary(few), argument_error);
    std::vector<double> flat(10, 4.2);
    CHECK_THROWS_AS(moment_summary(flat), argument_error);
}

TEST_CASE("RunningMoments: matches two-pass within 1e-9 relative") {
    auto x = gaussian_draws(5000, 99);
    for (double& v : x) v = std::exp(0.3 * v);  // asymmetric, heavy tail
    RunningMoments run;
    for (double v : x) run.add(v);
    MomentSummary a = run.summary();
    MomentSummary b = moment_summary(x);
    CHECK(a.n_samples == b.n_samples);
    CHECK(std::abs(a.mean - b.mean) <= 1e-9 * std::abs(b.mean));
    CHECK(std::abs(a.variance - b.variance) <= 1e-9 * b.variance);
    CHECK(std::abs(a.skewness - b.skewness) <= 1e-9 * std::abs(b.skewness));
    CHECK(std::abs(a.kurtosis_ratio - b.kurtosis_ratio) <=
          1e-9 * b.kurtosis_ratio);
}

TEST_CASE("jarque_bera: mesokurtic zero, chi2 anchor, bimodal rejection") {
    // One -a, four zeros, one +a repeated: S = 0 and m4/m2^2 = 3 exactly.
    std::vector<double> meso;
    const double a = 2.0;
    for (int rep = 0; rep < 4; ++rep) {
        meso.push_back(-a);
        for (int i = 0; i < 4; ++i) meso.push_back(0.0);
        meso.push_back(a);
    }
    JarqueBera jb = jarque_bera(meso);
    CHECK(jb.statistic < 1e-12);
    CHECK(jb.pvalue > 1.0 - 1e-12);

    CHECK(jarque_bera_pvalue(5.99) == doctest::Approx(0.05).epsilon(2e-2));
    CHECK(std::abs(jarque_bera_pvalue(5.99) - 0.05) < 1e-3);
    CHECK(jarque_bera_pvalue(5.99) ==
          doctest::Approx(oracle::jb_pvalue_599).epsilon(1e-15));
    CHECK(jarque_bera_pvalue(0.0) == 1.0);

    std::vector<double> bimodal;
    for (int i = 0; i < 400; ++i) bimodal.push_back(i % 2 == 0 ? 1.0 : -1.0);
    JarqueBera heavy = jarque_bera(bimodal);
    CHECK(heavy.pvalue < 0.001);

    std::vector<double> few(19, 0.0);
    CHECK_THROWS_AS(jarque_bera(few), argument_error);
}

TEST_CASE("normal_cdf: anchor, symmetry") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(std::abs(normal_cdf(1.96) - oracle::normal_cdf_196) < 1e-12);
    for (double x : {0.3, 1.0, 2.2, 3.7}) {
        CHECK(std::abs(normal_cdf(x) + normal_cdf(-x) - 1.0) < 1e-15);
    }
}

TEST_CASE("normal_quantile: inverse of normal_cdf") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    for (double p = 0.001; p < 1.0; p += 0.0199) {
        const double x = normal_quantile(p);
        CHECK(std::abs(normal_cdf(x) - p) < 1e-14);
    }
    CHECK(std::abs(normal_quantile(oracle::normal_cdf_196) - 1.96) < 1e-12);
    CHECK_THROWS_AS(normal_quantile(0.0), argument_error);
    CHECK_THROWS_AS(normal_quantile(1.0), argument_error);
}

TEST_CASE("ks_normal: gaussian passes, uniform fails, shift invariant") {
    auto x = gaussian_draws(10000, 31337);
    CHECK(ks_normal(x) < 0.02);

    std::vector<double> shifted = x;
    for (double& v : shifted) v += 100.0;
    CHECK(std::abs(ks_normal(shifted) - ks_normal(x)) < 1e-9);

    rng::stream s(5, 0);
    std::vector<double> uni(10000);
    for (double& v : uni) v = s.uniform01();
    CHECK(ks_normal(uni) > 0.05);

    std::vector<double> few(19, 0.0);
    CHECK_THROWS_AS(ks_normal(few), argument_error);
}

TEST_CASE("normality_report: fields and qq ordering") {
    auto x = gaussian_draws(800, 12);
    NormalityReport rep = normality_report(x);
    CHECK(rep.n_samples == 800);
    CHECK(rep.qq.size() == 800);
    CHECK(rep.jarque_bera_pvalue >= 0.0);
    CHECK(rep.jarque_bera_pvalue <= 1.0);
    CHECK(rep.ks_stat >= 0.0);
    CHECK(rep.ks_stat <= 1.0);
    for (std::size_t i = 1; i < rep.qq.size(); ++i) {
        CHECK(rep.qq[i - 1].first <= rep.qq[i].first);
        CHECK(rep.qq[i - 1].second <= rep.qq[i].second);
    }

    // Affine invariance of every shape diagnostic.
    std::vector<double> y = x;
    for (double& v : y) v = 3.0 * v + 5.0;
    NormalityReport rep2 = normality_report(y);
    CHECK(std::abs(rep2.skewness - rep.skewness) < 1e-9);
    CHECK(std::abs(rep2.kurtosis_ratio - rep.kurtosis_ratio) < 1e-9);
    CHECK(std::abs(rep2.jarque_bera_stat - rep.jarque_bera_stat) < 1e-9);
    CHECK(std::abs(rep2.ks_stat - rep.ks_stat) < 1e-9);
}
