#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bandstat/ensemble.hpp"
#include "bandstat/testfunction.hpp"

namespace bandstat {

// One Monte Carlo run: reps draws of the ensemble, one linear statistic per
// draw.  Bandwidth comes either from `b` directly or, when b_exponent > 0,
// from b = round(n^b_exponent).
struct RunConfig {
    std::size_t n = 0;
    std::size_t b = 0;
    double b_exponent = 0.0;
    EntryDistribution dist{};
    std::string phi = "identity";
    std::size_t reps = 0;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    std::filesystem::path output_dir;  // empty: nothing persisted
    bool include_timings = true;
    // Test mode: every sample reuses stream id 0, so all draws coincide.
    bool force_equal_streams = false;

    std::size_t resolved_b() const;
    MatrixSpec matrix_spec() const;  // template with seed = master_seed
    void validate() const;
};

struct SampleRecord {
    std::size_t index = 0;
    double raw_stat = 0.0;
    double wall_seconds = 0.0;
    bool failed = false;
};

// Records as JSON Lines, one {"index":..,"stat":..,"ms":..} object per
// sample ({"index":..,"failed":true} for excluded ones).  With timings
// disabled the ms field is written as 0 so files are byte-stable.
void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const SampleRecord> records,
                         bool include_timings);
std::vector<SampleRecord> read_records_jsonl(const std::filesystem::path& path);

struct RunSummary {
    std::size_t count = 0;     // successful samples
    std::size_t failures = 0;  // eigensolver failures, excluded from moments
    double mean = 0.0;         // of the raw statistics N_n(phi)
    // Shape of the centered normalized samples sqrt(b/n) (N_i - mean);
    // variance is unbiased.  NaN when the run is degenerate (variance 0).
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double kurtosis_ratio = 0.0;
    std::vector<double> centered_normalized;
    std::vector<SampleRecord> records;
    double wall_seconds = 0.0;
    std::size_t resolved_b = 0;
};

// Runs the full ensemble.  Per-sample RNG streams are keyed by
// (master_seed, sample index), so records are byte-identical for any worker
// count.  When output_dir is set, writes records.jsonl and summary.json
// under an exclusive directory lock.
RunSummary run_ensemble(const RunConfig& config);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
};

// Monte Carlo estimate of <f,g>_n = (1/b) E[ sum_{i,j in I_1} f(M)_ij g(M)_ji ]
// via restricted matrix functions.  All pairs share the same samples.
std::vector<Estimate> empirical_inner_products(
    std::span<const std::pair<TestFunction, TestFunction>> pairs,
    std::size_t n, std::size_t b, std::size_t reps, std::uint64_t seed,
    const EntryDistribution& dist = {});
Estimate empirical_inner_product(const TestFunction& f, const TestFunction& g,
                                 std::size_t n, std::size_t b,
                                 std::size_t reps, std::uint64_t seed,
                                 const EntryDistribution& dist = {});

// Empirical Var(Tr G(z)) over a grid of (n, b) cells, with the scaling
// ratio Var * b / n for inspection against the Var <= C n / b bound.
struct ResolventCell {
    std::size_t n = 0;
    std::size_t b = 0;
    double variance = 0.0;   // E |gamma - mean|^2, unbiased
    double std_error = 0.0;  // plug-in SE of the variance estimate
    double ratio = 0.0;      // variance * b / n
};
std::vector<ResolventCell> resolvent_variance_scan(
    std::span<const std::size_t> n_list, std::span<const std::size_t> b_list,
    std::complex<double> z, std::size_t reps, std::uint64_t seed,
    const EntryDistribution& dist = {});

// Distance between the sampled mean of Tr G(z) / n and the semicircle
// Stieltjes transform f(z), reported with the 1/b reference scale.
struct StieltjesComparison {
    std::complex<double> mean_normalized_trace;
    std::complex<double> f_value;
    double deviation = 0.0;
    double std_error = 0.0;
    double b_scale = 0.0;  // 1/b
};
StieltjesComparison stieltjes_compare(std::size_t n, std::size_t b,
                                      std::complex<double> z, std::size_t reps,
                                      std::uint64_t seed,
                                      const EntryDistribution& dist = {});

}  // namespace bandstat
