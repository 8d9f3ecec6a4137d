#include "bandstat/harness.hpp"

#include <cblas.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bandstat/errors.hpp"
#include "bandstat/io.hpp"
#include "bandstat/quadrature.hpp"
#include "bandstat/spectra.hpp"
#include "bandstat/stats.hpp"
#include "bandstat/version.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace bandstat {

namespace {

// Each worker owns a full eigensolve, so BLAS-internal threads would only
// oversubscribe and perturb timing; results stay deterministic per sample.
void pin_blas_threads() {
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

// Shared-nothing index queue; first exception wins and stops the pool.
template <typename Fn>
void parallel_samples(std::size_t reps, std::size_t workers, Fn&& body) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> bad{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            if (bad.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= reps) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                bad.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

nlohmann::json summary_json(const RunConfig& config, const RunSummary& s) {
    nlohmann::json j;
    j["version"] = version;
    j["wall_seconds"] = s.wall_seconds;
    j["config"] = {
        {"n", config.n},
        {"b", s.resolved_b},
        {"b_exponent", config.b_exponent},
        {"dist", to_string(config.dist.kind)},
        {"sigma2", config.dist.sigma2},
        {"mu4", config.dist.mu4},
        {"kappa4", config.dist.kappa4},
        {"phi", config.phi},
        {"reps", config.reps},
        {"master_seed", config.master_seed},
        {"workers", config.workers},
        {"include_timings", config.include_timings},
        {"centering", "sample_mean"},
    };
    j["summary"] = {
        {"count", s.count},
        {"failures", s.failures},
        {"mean_raw", s.mean},
        {"variance", s.variance},
        {"skewness", s.skewness},
        {"excess_kurtosis", s.excess_kurtosis},
        {"kurtosis_ratio", s.kurtosis_ratio},
    };
    return j;
}

// |a - b| within 1e-9 relative (with an absolute floor for near-zero
// values, where the two formulas agree to machine rounding anyway).
bool moments_agree(double a, double b) {
    return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double s2 = 0.0;
    for (double x : xs) s2 += (x - mean) * (x - mean);
    MeanSe out;
    out.mean = mean;
    out.se = xs.size() > 1 ? std::sqrt(s2 / (n - 1.0) / n) : 0.0;
    return out;
}

}  // namespace

std::size_t RunConfig::resolved_b() const {
    if (b_exponent > 0.0) {
        const double raw = std::pow(static_cast<double>(n), b_exponent);
        return static_cast<std::size_t>(std::llround(raw));
    }
    return b;
}

MatrixSpec RunConfig::matrix_spec() const {
    return MatrixSpec{n, resolved_b(), dist, master_seed};
}

void RunConfig::validate() const {
    matrix_spec().validate();
    if (reps < 2) throw argument_error("RunConfig: reps must be at least 2");
    if (workers < 1) throw argument_error("RunConfig: workers must be at least 1");
    if (!TestFunction::parse(phi).is_real())
        throw argument_error(
            "RunConfig: phi must be real-valued (records store one float per "
            "sample); resolvent statistics go through the scan operations");
}

void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const SampleRecord> records,
                         bool include_timings) {
    std::ostringstream os;
    for (const auto& rec : records) {
        if (rec.failed) {
            os << "{\"index\":" << rec.index << ",\"failed\":true}\n";
        } else {
            os << "{\"index\":" << rec.index << ",\"stat\":" << io::num(rec.raw_stat)
               << ",\"ms\":"
               << (include_timings ? io::num(rec.wall_seconds * 1000.0) : "0")
               << "}\n";
        }
    }
    io::write_text_file(path, os.str());
}

std::vector<SampleRecord> read_records_jsonl(const std::filesystem::path& path) {
    std::istringstream in(io::read_text_file(path));
    std::vector<SampleRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw io_error("bad record line in " + path.string() + ": " +
                           e.what());
        }
        SampleRecord rec;
        rec.index = j.at("index").get<std::size_t>();
        if (j.value("failed", false)) {
            rec.failed = true;
            rec.raw_stat = std::numeric_limits<double>::quiet_NaN();
        } else {
            rec.raw_stat = j.at("stat").get<double>();
            rec.wall_seconds = j.value("ms", 0.0) / 1000.0;
        }
        out.push_back(rec);
    }
    return out;
}

RunSummary run_ensemble(const RunConfig& config) {
    config.validate();
    pin_blas_threads();
    const auto t_start = std::chrono::steady_clock::now();

    const std::size_t b = config.resolved_b();
    const TestFunction phi = TestFunction::parse(config.phi);
    const MatrixSpec spec = config.matrix_spec();

    std::vector<SampleRecord> records(config.reps);
    parallel_samples(config.reps, config.workers, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        SampleRecord rec;
        rec.index = i;
        try {
            rng::stream stream(config.master_seed,
                               config.force_equal_streams ? 0 : i);
            Matrix m = sample_matrix(spec, stream);
            Spectrum s = eigen(m, false);
            rec.raw_stat = linear_statistic(s, phi).real();
        } catch (const numeric_error&) {
            rec.failed = true;
            rec.raw_stat = std::numeric_limits<double>::quiet_NaN();
        }
        rec.wall_seconds = seconds_since(t0);
        records[i] = rec;
    });

    // Aggregation in index order over the materialized buffer.
    RunSummary out;
    out.resolved_b = b;
    RunningMoments streamed;
    for (const auto& rec : records) {
        if (rec.failed)
            ++out.failures;
        else
            streamed.add(rec.raw_stat);
    }
    out.count = streamed.count();
    if (out.count < 2)
        throw numeric_error("run_ensemble: fewer than two samples succeeded");
    out.mean = streamed.mean();

    const double scale =
        std::sqrt(static_cast<double>(b) / static_cast<double>(config.n));
    out.centered_normalized.reserve(out.count);
    for (const auto& rec : records)
        if (!rec.failed)
            out.centered_normalized.push_back(scale * (rec.raw_stat - out.mean));

    if (streamed.sum2() > 0.0) {
        const double dn = static_cast<double>(out.count);
        const double m2 = streamed.sum2() / dn;
        const double m3 = streamed.sum3() / dn;
        const double m4 = streamed.sum4() / dn;
        out.variance = scale * scale * streamed.sum2() / (dn - 1.0);
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis_ratio = m4 / (m2 * m2);
        out.excess_kurtosis = out.kurtosis_ratio - 3.0;

        // Cross-check the streamed moments against a plain two-pass run
        // over the same values the records hold.
        if (out.count >= 4) {
            const MomentSummary twopass = moment_summary(out.centered_normalized);
            if (!moments_agree(twopass.variance, out.variance) ||
                !moments_agree(twopass.skewness, out.skewness) ||
                !moments_agree(twopass.kurtosis_ratio, out.kurtosis_ratio))
                throw numeric_error(
                    "run_ensemble: streamed and two-pass moments disagree");
        }
    } else {
        out.variance = 0.0;
        out.skewness = std::numeric_limits<double>::quiet_NaN();
        out.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
        out.kurtosis_ratio = std::numeric_limits<double>::quiet_NaN();
    }

    out.wall_seconds = seconds_since(t_start);

    if (!config.output_dir.empty()) {
        io::DirectoryLock lock(config.output_dir);
        // Records land under a .partial name first, so an interrupted run
        // leaves its incompleteness visible in the filename.
        const auto partial = config.output_dir / "records.jsonl.partial";
        write_records_jsonl(partial, records, config.include_timings);
        std::filesystem::rename(partial, config.output_dir / "records.jsonl");
        io::write_text_file(config.output_dir / "summary.json",
                            summary_json(config, out).dump(2) + "\n");
    }

    out.records = std::move(records);
    return out;
}

std::vector<Estimate> empirical_inner_products(
    std::span<const std::pair<TestFunction, TestFunction>> pairs,
    std::size_t n, std::size_t b, std::size_t reps, std::uint64_t seed,
    const EntryDistribution& dist) {
    if (pairs.empty())
        throw argument_error("empirical_inner_products: no function pairs");
    if (reps < 2)
        throw argument_error("empirical_inner_products: need reps >= 2");
    for (const auto& [f, g] : pairs)
        if (!f.is_real() || !g.is_real())
            throw argument_error(
                "empirical_inner_products: test functions must be real");
    const MatrixSpec spec{n, b, dist, seed};
    spec.validate();
    pin_blas_threads();

    const BandIndexSet band(n, b);
    const std::vector<std::size_t> row1 = band.row1_indices();
    const std::size_t m = row1.size();  // 2b
    const auto bi = static_cast<blasint>(m);
    const auto bn = static_cast<blasint>(n);

    std::vector<std::vector<double>> stats(pairs.size(),
                                           std::vector<double>(reps));
    for (std::size_t r = 0; r < reps; ++r) {
        rng::stream stream(seed, r);
        const Matrix mat = sample_matrix(spec, stream);
        const Spectrum s = eigen(mat, true);
        const Matrix& v = *s.eigenvectors;

        // Rows of V restricted to I_1.
        std::vector<double> vs(m * n);
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t row = row1[a] - 1;
            for (std::size_t c = 0; c < n; ++c) vs[a * n + c] = v(row, c);
        }

        // f(M) restricted to I_1 x I_1 = (Vs diag f(lambda)) Vs^T, computed
        // once per distinct function id (std::map keeps references stable).
        std::map<std::string, std::vector<double>> subs;
        auto restricted = [&](const TestFunction& fn) -> const std::vector<double>& {
            auto it = subs.find(fn.id());
            if (it != subs.end()) return it->second;
            std::vector<double> scaled(vs);
            for (std::size_t c = 0; c < n; ++c) {
                const double f = fn.real_at(s.eigenvalues[c]);
                for (std::size_t a = 0; a < m; ++a) scaled[a * n + c] *= f;
            }
            std::vector<double> sub(m * m);
            cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, bi, bi, bn,
                        1.0, scaled.data(), bn, vs.data(), bn, 0.0, sub.data(),
                        bi);
            return subs.emplace(fn.id(), std::move(sub)).first->second;
        };

        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto& fs = restricted(pairs[p].first);
            const auto& gs = restricted(pairs[p].second);
            double acc = 0.0;
            for (std::size_t k = 0; k < m * m; ++k) acc += fs[k] * gs[k];
            stats[p][r] = acc / static_cast<double>(b);
        }
    }

    std::vector<Estimate> out(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const MeanSe ms = mean_and_se(stats[p]);
        out[p] = Estimate{ms.mean, ms.se, reps};
    }
    return out;
}

Estimate empirical_inner_product(const TestFunction& f, const TestFunction& g,
                                 std::size_t n, std::size_t b,
                                 std::size_t reps, std::uint64_t seed,
                                 const EntryDistribution& dist) {
    const std::pair<TestFunction, TestFunction> pair{f, g};
    return empirical_inner_products({&pair, 1}, n, b, reps, seed, dist)[0];
}

std::vector<ResolventCell> resolvent_variance_scan(
    std::span<const std::size_t> n_list, std::span<const std::size_t> b_list,
    std::complex<double> z, std::size_t reps, std::uint64_t seed,
    const EntryDistribution& dist) {
    if (z.imag() == 0.0)
        throw argument_error("resolvent_variance_scan: Im z must be nonzero");
    if (reps < 2) throw argument_error("resolvent_variance_scan: need reps >= 2");
    if (n_list.empty() || b_list.empty())
        throw argument_error("resolvent_variance_scan: empty grid");
    pin_blas_threads();

    std::vector<ResolventCell> out;
    std::size_t cell = 0;
    for (std::size_t n : n_list) {
        for (std::size_t b : b_list) {
            const MatrixSpec spec{n, b, dist, seed};
            spec.validate();

            std::vector<std::complex<double>> vals(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                rng::stream stream(seed, cell * reps + r);
                const Matrix m = sample_matrix(spec, stream);
                vals[r] = resolvent_trace(eigen(m, false), z);
            }
            std::complex<double> mean = 0.0;
            for (const auto& v : vals) mean += v;
            mean /= static_cast<double>(reps);

            // Var = E|gamma - mean|^2; its SE comes from the scatter of the
            // per-sample squared deviations.
            std::vector<double> dev2(reps);
            for (std::size_t r = 0; r < reps; ++r)
                dev2[r] = std::norm(vals[r] - mean);
            double var = 0.0;
            for (double d : dev2) var += d;
            var /= static_cast<double>(reps - 1);
            const MeanSe ms = mean_and_se(dev2);

            ResolventCell c;
            c.n = n;
            c.b = b;
            c.variance = var;
            c.std_error = ms.se * static_cast<double>(reps) /
                          static_cast<double>(reps - 1);
            c.ratio = var * static_cast<double>(b) / static_cast<double>(n);
            out.push_back(c);
            ++cell;
        }
    }
    return out;
}

StieltjesComparison stieltjes_compare(std::size_t n, std::size_t b,
                                      std::complex<double> z, std::size_t reps,
                                      std::uint64_t seed,
                                      const EntryDistribution& dist) {
    if (z.imag() == 0.0)
        throw argument_error("stieltjes_compare: Im z must be nonzero");
    if (reps < 2) throw argument_error("stieltjes_compare: need reps >= 2");
    const MatrixSpec spec{n, b, dist, seed};
    spec.validate();
    pin_blas_threads();

    std::vector<std::complex<double>> vals(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        rng::stream stream(seed, r);
        const Matrix m = sample_matrix(spec, stream);
        vals[r] = resolvent_trace(eigen(m, false), z) /
                  static_cast<double>(n);
    }
    std::complex<double> mean = 0.0;
    for (const auto& v : vals) mean += v;
    mean /= static_cast<double>(reps);

    double var = 0.0;
    for (const auto& v : vals) var += std::norm(v - mean);
    var /= static_cast<double>(reps - 1);

    StieltjesComparison out;
    out.mean_normalized_trace = mean;
    out.f_value = quadrature::stieltjes_f(z);
    out.deviation = std::abs(mean - out.f_value);
    out.std_error = std::sqrt(var / static_cast<double>(reps));
    out.b_scale = 1.0 / static_cast<double>(b);
    return out;
}

}  // namespace bandstat
