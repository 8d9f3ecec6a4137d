// bandstat: one executable exposing every workflow in the library, from the
// exact gamma_k table through Monte Carlo ensemble runs.  All subcommands are
// non-interactive; outputs are CSV (LF, '.' decimal, header row, provenance
// in a leading '#' comment) or JSON (resolved config embedded).
//
// A JSON config file (--config) may supply any long flag by name (flat keys);
// flags given on the command line win over file values, and unknown keys are
// rejected.  Exit codes: 0 success, 1 usage/argument error, 2 numeric or I/O
// failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bandstat/chebyshev.hpp"
#include "bandstat/combinatorics.hpp"
#include "bandstat/ensemble.hpp"
#include "bandstat/errors.hpp"
#include "bandstat/harness.hpp"
#include "bandstat/io.hpp"
#include "bandstat/quadrature.hpp"
#include "bandstat/rng.hpp"
#include "bandstat/semicircle.hpp"
#include "bandstat/spectra.hpp"
#include "bandstat/stats.hpp"
#include "bandstat/testfunction.hpp"
#include "bandstat/version.hpp"

namespace {

using bandstat::argument_error;
using bandstat::io_error;
using bandstat::numeric_error;
using json = nlohmann::json;
namespace io = bandstat::io;
namespace combinatorics = bandstat::combinatorics;
namespace chebyshev = bandstat::chebyshev;
namespace quadrature = bandstat::quadrature;

// ---------------------------------------------------------------------------
// Output plumbing

// Routes a document to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw io_error("cannot open for writing: " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        if (file_.is_open()) {
            file_.flush();
            if (!file_) throw io_error("write failed");
        }
    }

private:
    std::ofstream file_;
};

void provenance_comment(std::ostream& os, const json& config) {
    os << "# " << config.dump() << "\n";
}

void emit_json(const std::string& out_path, const json& doc) {
    Output out(out_path);
    out.os() << doc.dump(2) << "\n";
    out.finish();
}

json base_config(const char* command) {
    return json{{"command", command}, {"version", bandstat::version}};
}

// ---------------------------------------------------------------------------
// Small parsers shared by subcommands

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         const char* flag) {
    std::vector<std::size_t> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            text.substr(start, comma == std::string::npos ? comma : comma - start);
        std::size_t value = 0;
        const auto [ptr, ec] =
            std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size() || value == 0)
            throw argument_error(std::string(flag) +
                                 " expects positive integers separated by commas");
        values.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.empty())
        throw argument_error(std::string(flag) + " expects at least one value");
    return values;
}

std::size_t resolve_bandwidth(std::size_t n, std::size_t b, double b_exp) {
    if (b > 0 && b_exp > 0.0)
        throw argument_error("--b and --b-exp are mutually exclusive");
    if (b_exp > 0.0) {
        if (b_exp >= 1.0) throw argument_error("--b-exp must lie in (0, 1)");
        return static_cast<std::size_t>(
            std::llround(std::pow(static_cast<double>(n), b_exp)));
    }
    if (b == 0) throw argument_error("one of --b or --b-exp is required");
    return b;
}

std::size_t env_default_workers() {
    const char* raw = std::getenv("BANDSTAT_WORKERS");
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || value == 0)
        throw argument_error("BANDSTAT_WORKERS must be a positive integer");
    return static_cast<std::size_t>(value);
}

// NaN round-trips through JSON as null.
json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}
double null_or_num(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(steps));
    if (steps == 1) {
        xs.push_back(lo);
        return xs;
    }
    for (int i = 0; i < steps; ++i)
        xs.push_back(lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
    return xs;
}

std::vector<io::HistogramRow> uniform_histogram(const std::vector<double>& xs,
                                                int bins) {
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<io::HistogramRow> rows(static_cast<std::size_t>(bins));
    const double width = (hi - lo) / bins;
    for (int i = 0; i < bins; ++i) {
        rows[static_cast<std::size_t>(i)].left = lo + width * i;
        rows[static_cast<std::size_t>(i)].right = lo + width * (i + 1);
    }
    rows.back().right = hi;
    for (double x : xs) {
        auto idx = static_cast<std::size_t>((x - lo) / width);
        if (idx >= rows.size()) idx = rows.size() - 1;
        rows[idx].count += 1;
    }
    for (auto& r : rows)
        r.density = static_cast<double>(r.count) /
                    (static_cast<double>(xs.size()) * width);
    return rows;
}

// ---------------------------------------------------------------------------
// Per-subcommand argument bundles

struct EnsembleArgs {
    std::string dist = "gaussian";
    double sigma2 = 1.0;
    std::uint64_t seed = 1;
};

struct GammaArgs {
    int max_k = 10;
    std::string out, config;
};

struct DyckArgs {
    int l = 0, m = 0, k = -1;
    std::string out, config;
};

struct ClmArgs {
    int l = -1, m = -1, max_l = 6;
    std::string out, config;
};

struct InnerprodArgs {
    std::string f, g;
    int trunc = 24, quad_order = 64;
    bool empirical = false;
    std::size_t n = 400, b = 0, reps = 100;
    double b_exp = 0.0;
    EnsembleArgs ens;
    std::string out, config;
};

struct KernelArgs {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    int steps = 5;
    std::string method = "both";
    int series_k = 200;
    double s_max = 400.0, tol = 1e-9;
    std::string out, config;
};

struct VarianceArgs {
    std::string phi;
    double kappa4 = 0.0, sigma2 = 1.0;
    std::string variant = "both";
    int quad_order = 256;
    quadrature::KernelTermOrders orders{};
    std::string out, config;
};

struct SimulateArgs {
    std::size_t n = 0, b = 0, reps = 0, workers = 1;
    double b_exp = 0.0;
    std::string phi = "identity";
    EnsembleArgs ens;
    std::string out_dir, config;
    bool timings = true;
};

struct ReportArgs {
    std::string dir;
    int bins = 64;
    std::string histogram, qq, out, config;
};

struct EsdArgs {
    std::size_t n = 0, b = 0;
    double b_exp = 0.0;
    EnsembleArgs ens;
    int bins = 64;
    std::string histogram, out, config;
};

struct ScanArgs {
    std::string n_list, b_list;
    double re = 0.0, im = 2.0;
    std::size_t reps = 100;
    EnsembleArgs ens;
    std::string out, config;
};

struct StieltjesArgs {
    std::size_t n = 0, b = 0, reps = 100;
    double b_exp = 0.0, re = 0.0, im = 2.0;
    EnsembleArgs ens;
    std::string out, config;
};

void add_ensemble_options(CLI::App* sub, EnsembleArgs& args) {
    sub->add_option("--dist", args.dist, "entry distribution")
        ->check(CLI::IsMember({"gaussian", "uniform", "rademacher"}));
    sub->add_option("--sigma2", args.sigma2, "diagonal entry variance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", args.seed, "master seed");
}

void add_common_options(CLI::App* sub, std::string& out, std::string& config,
                        const char* out_help = "output file (default stdout)") {
    sub->add_option("--out", out, out_help);
    sub->add_option("--config", config,
                    "JSON config file; flat keys mirror long flag names and "
                    "command-line flags win");
}

json ensemble_config(const EnsembleArgs& args) {
    return json{{"dist", args.dist},
                {"sigma2", args.sigma2},
                {"master_seed", args.seed}};
}

// ---------------------------------------------------------------------------
// Subcommand bodies

void run_gamma(const GammaArgs& args) {
    json prov = base_config("gamma");
    prov["max_k"] = args.max_k;
    Output out(args.out);
    auto& os = out.os();
    provenance_comment(os, prov);
    io::csv_row(os, std::vector<std::string>{"k", "numerator", "denominator",
                                             "value"});
    for (int k = 1; k <= args.max_k; ++k) {
        const auto g = combinatorics::gamma(k);
        io::csv_row(os, std::vector<std::string>{
                            std::to_string(k), g.get_num().get_str(),
                            g.get_den().get_str(), io::num(g.get_d())});
    }
    out.finish();
}

void run_dyck(const DyckArgs& args) {
    if ((args.l + args.m) % 2 != 0)
        throw argument_error("dyck: l+m must be even");
    json prov = base_config("dyck");
    prov["l"] = args.l;
    prov["m"] = args.m;
    if (args.k >= 0) prov["k"] = args.k;
    Output out(args.out);
    auto& os = out.os();
    provenance_comment(os, prov);
    io::csv_row(os, std::vector<std::string>{"l", "m", "k", "count"});
    std::vector<int> ks;
    if (args.k >= 0) {
        ks.push_back(args.k);
    } else {
        for (int k = 0; k <= (args.l + args.m) / 2; ++k) ks.push_back(k);
    }
    for (int k : ks) {
        const auto count = combinatorics::dyck_count(args.l, args.m, k);
        io::csv_row(os, std::vector<std::string>{
                            std::to_string(args.l), std::to_string(args.m),
                            std::to_string(k), count.get_str()});
    }
    out.finish();
}

void run_clm(const ClmArgs& args) {
    const bool single = args.l >= 0 || args.m >= 0;
    if (single && (args.l < 0 || args.m < 0))
        throw argument_error("--l and --m must be given together");
    json prov = base_config("clm");
    if (single) {
        prov["l"] = args.l;
        prov["m"] = args.m;
    } else {
        prov["max_l"] = args.max_l;
    }
    Output out(args.out);
    auto& os = out.os();
    provenance_comment(os, prov);
    io::csv_row(os, std::vector<std::string>{"l", "m", "numerator",
                                             "denominator", "value"});
    auto emit = [&os](int l, int m) {
        // C_{l,m} vanishes for odd l+m: there are no Dyck paths of odd length.
        const auto c = (l + m) % 2 == 0 ? combinatorics::c_lm(l, m)
                                        : bandstat::rational(0);
        io::csv_row(os, std::vector<std::string>{
                            std::to_string(l), std::to_string(m),
                            c.get_num().get_str(), c.get_den().get_str(),
                            io::num(c.get_d())});
    };
    if (single) {
        emit(args.l, args.m);
    } else {
        for (int l = 0; l <= args.max_l; ++l)
            for (int m = 0; m <= args.max_l; ++m) emit(l, m);
    }
    out.finish();
}

void run_innerprod(const InnerprodArgs& args) {
    const auto f = bandstat::TestFunction::parse(args.f);
    const auto g = bandstat::TestFunction::parse(args.g);
    const auto fs = chebyshev::expand(f, args.trunc, args.quad_order);
    const auto gs = chebyshev::expand(g, args.trunc, args.quad_order);
    const auto gammas = combinatorics::gamma_table(args.trunc + 1);

    json prov = base_config("innerprod");
    prov["f"] = args.f;
    prov["g"] = args.g;
    prov["K"] = args.trunc;
    prov["quad_order"] = args.quad_order;

    std::complex<double> total = 0.0;
    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k <= args.trunc; ++k) {
        const auto fk = fs.coeffs[static_cast<std::size_t>(k)];
        const auto gk = gs.coeffs[static_cast<std::size_t>(k)];
        const auto term = 2.0 * (*gammas)[static_cast<std::size_t>(k) + 1] * fk * gk;
        total += term;
        rows.push_back({std::to_string(k), io::num(fk.real()), io::num(fk.imag()),
                        io::num(gk.real()), io::num(gk.imag()),
                        io::num(term.real()), io::num(term.imag()),
                        io::num(total.real()), io::num(total.imag())});
    }

    if (!args.empirical) {
        Output out(args.out);
        auto& os = out.os();
        provenance_comment(os, prov);
        io::csv_row(os, std::vector<std::string>{
                            "k", "f_coeff_re", "f_coeff_im", "g_coeff_re",
                            "g_coeff_im", "term_re", "term_im",
                            "cumulative_re", "cumulative_im"});
        for (const auto& row : rows) io::csv_row(os, row);
        out.finish();
        return;
    }

    const std::size_t b = resolve_bandwidth(args.n, args.b, args.b_exp);
    const auto dist =
        bandstat::EntryDistribution::parse(args.ens.dist, args.ens.sigma2);
    const auto est = bandstat::empirical_inner_product(f, g, args.n, b,
                                                       args.reps, args.ens.seed,
                                                       dist);
    prov.update(ensemble_config(args.ens));
    prov["n"] = args.n;
    prov["b"] = b;
    if (args.b_exp > 0) prov["b_exp"] = args.b_exp;
    prov["reps"] = args.reps;
    json doc;
    doc["config"] = prov;
    doc["theoretical"] = {{"re", total.real()}, {"im", total.imag()}};
    doc["empirical"] = {{"value", est.value},
                        {"std_error", est.std_error},
                        {"reps", est.reps}};
    emit_json(args.out, doc);
}

void run_kernel(const KernelArgs& args) {
    json prov = base_config("kernel");
    prov["xmin"] = args.xmin;
    prov["xmax"] = args.xmax;
    prov["ymin"] = args.ymin;
    prov["ymax"] = args.ymax;
    prov["steps"] = args.steps;
    prov["method"] = args.method;
    prov["series_k"] = args.series_k;
    prov["s_max"] = args.s_max;
    prov["tol"] = args.tol;

    const bool want_series = args.method != "integral";
    const bool want_integral = args.method != "series";
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Output out(args.out);
    auto& os = out.os();
    provenance_comment(os, prov);
    io::csv_row(os, std::vector<std::string>{"x", "y", "F", "err", "method"});
    for (double x : linspace(args.xmin, args.xmax, args.steps)) {
        for (double y : linspace(args.ymin, args.ymax, args.steps)) {
            if (want_series) {
                double value = nan, err = nan;
                try {
                    const auto r = chebyshev::kernel_series(x, y, args.series_k);
                    value = r.value;
                    err = r.tail_estimate;
                } catch (const std::exception&) {
                    // diagonal or edge points: the series diverges; keep NaN
                }
                io::csv_row(os, std::vector<std::string>{
                                    io::num(x), io::num(y), io::num(value),
                                    io::num(err), "series"});
            }
            if (want_integral) {
                double value = nan, err = nan;
                try {
                    const auto r =
                        quadrature::kernel_integral(x, y, args.s_max, args.tol);
                    value = r.value;
                    err = r.error;
                } catch (const std::exception&) {
                    // pole in the denominator (e.g. on the diagonal); keep NaN
                }
                io::csv_row(os, std::vector<std::string>{
                                    io::num(x), io::num(y), io::num(value),
                                    io::num(err), "integral"});
            }
        }
    }
    out.finish();
}

void run_variance(const VarianceArgs& args) {
    const auto phi = bandstat::TestFunction::parse(args.phi);
    json prov = base_config("variance");
    prov["phi"] = args.phi;
    prov["kappa4"] = args.kappa4;
    prov["sigma2"] = args.sigma2;
    prov["variant"] = args.variant;
    prov["quad_order"] = args.quad_order;
    prov["orders"] = {{"outer_q", args.orders.outer_q},
                      {"inner_mult", args.orders.inner_mult},
                      {"levels", args.orders.levels},
                      {"series_k", args.orders.series_k}};

    std::vector<quadrature::KernelVariant> variants;
    if (args.variant == "printed" || args.variant == "both")
        variants.push_back(quadrature::KernelVariant::printed);
    if (args.variant == "symmetrized" || args.variant == "both")
        variants.push_back(quadrature::KernelVariant::symmetrized);

    json doc;
    doc["config"] = prov;
    doc["variants"] = json::array();
    for (const auto variant : variants) {
        const auto r = quadrature::variance_total(phi, args.kappa4, args.sigma2,
                                                  variant, args.quad_order,
                                                  args.orders);
        doc["kappa_term"] = r.kappa_term;
        doc["sigma_term"] = r.sigma_term;
        const bool symmetrized =
            variant == quadrature::KernelVariant::symmetrized;
        doc["variants"].push_back(
            {{"name", symmetrized ? "symmetrized" : "printed"},
             {"experimental", symmetrized},
             {"kernel_term", r.kernel_term},
             {"kernel_error", r.kernel_error},
             {"total", r.total}});
    }
    emit_json(args.out, doc);
}

void run_simulate(const SimulateArgs& args, bool workers_given) {
    bandstat::RunConfig config;
    config.n = args.n;
    config.b = args.b;
    config.b_exponent = args.b_exp;
    config.dist = bandstat::EntryDistribution::parse(args.ens.dist,
                                                     args.ens.sigma2);
    config.phi = args.phi;
    config.reps = args.reps;
    config.master_seed = args.ens.seed;
    config.workers = workers_given ? args.workers : env_default_workers();
    config.output_dir = args.out_dir;
    config.include_timings = args.timings;
    if (config.b > 0 && config.b_exponent > 0.0)
        throw argument_error("--b and --b-exp are mutually exclusive");
    if (config.b == 0 && config.b_exponent == 0.0)
        throw argument_error("one of --b or --b-exp is required");

    bandstat::run_ensemble(config);
    // The persisted summary (config echo, moments, version) doubles as the
    // stdout document.
    std::cout << io::read_text_file(
        std::filesystem::path(args.out_dir) / "summary.json");
}

void run_report(const ReportArgs& args) {
    const std::filesystem::path dir(args.dir);
    const json stored = json::parse(io::read_text_file(dir / "summary.json"));
    auto records = bandstat::read_records_jsonl(dir / "records.jsonl");
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.index < b.index; });

    const auto n = stored.at("config").at("n").get<std::size_t>();
    const auto b = stored.at("config").at("b").get<std::size_t>();
    std::vector<double> raw;
    std::size_t failures = 0;
    for (const auto& rec : records) {
        if (rec.failed) {
            ++failures;
            continue;
        }
        raw.push_back(rec.raw_stat);
    }
    if (raw.size() < 2)
        throw numeric_error("report: need at least two successful records");

    double mean_raw = 0.0;
    for (double x : raw) mean_raw += x;
    mean_raw /= static_cast<double>(raw.size());
    const double scale =
        std::sqrt(static_cast<double>(b) / static_cast<double>(n));
    std::vector<double> centered(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        centered[i] = scale * (raw[i] - mean_raw);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    double variance = 0.0, skewness = nan, excess = nan, ratio = nan;
    const auto [lo, hi] = std::minmax_element(centered.begin(), centered.end());
    const bool degenerate = *lo == *hi;
    if (!degenerate) {
        const auto ms = bandstat::moment_summary(centered);
        variance = ms.variance;
        skewness = ms.skewness;
        excess = ms.excess_kurtosis;
        ratio = ms.kurtosis_ratio;
    }

    // The recomputed moments must agree with the persisted summary.
    const json& summary = stored.at("summary");
    auto agree = [](double a, double bb) {
        if (std::isnan(a) && std::isnan(bb)) return true;
        return std::abs(a - bb) <= 1e-9 * (1.0 + std::abs(bb));
    };
    const std::vector<std::pair<const char*, double>> recomputed = {
        {"mean_raw", mean_raw},       {"variance", variance},
        {"skewness", skewness},       {"excess_kurtosis", excess},
        {"kurtosis_ratio", ratio}};
    double max_diff = 0.0;
    for (const auto& [key, value] : recomputed) {
        const double stored_value = null_or_num(summary.at(key));
        if (!agree(value, stored_value))
            throw numeric_error(std::string("report: recomputed ") + key +
                                " deviates from the stored summary");
        if (!std::isnan(value) && !std::isnan(stored_value))
            max_diff = std::max(max_diff, std::abs(value - stored_value));
    }

    json doc;
    doc["config"] = stored.at("config");
    doc["command"] = "report";
    doc["version"] = bandstat::version;
    doc["source"] = dir.string();
    doc["records"] = {{"count", raw.size()}, {"failures", failures}};
    doc["recomputed"] = {{"mean_raw", mean_raw},
                         {"variance", num_or_null(variance)},
                         {"skewness", num_or_null(skewness)},
                         {"excess_kurtosis", num_or_null(excess)},
                         {"kurtosis_ratio", num_or_null(ratio)}};
    doc["stored"] = summary;
    doc["max_abs_difference"] = max_diff;

    if (!degenerate && centered.size() >= 20) {
        const auto rep = bandstat::normality_report(centered);
        doc["normality"] = {{"jb_stat", rep.jarque_bera_stat},
                            {"jb_pvalue", rep.jarque_bera_pvalue},
                            {"ks_distance", rep.ks_stat}};
    } else {
        doc["normality"] = nullptr;
    }

    doc["histogram_file"] = nullptr;
    if (!args.histogram.empty()) {
        if (degenerate)
            throw numeric_error("report: degenerate sample has no histogram");
        const auto rows = uniform_histogram(centered, args.bins);
        std::ofstream hs(args.histogram, std::ios::binary | std::ios::trunc);
        if (!hs) throw io_error("cannot open for writing: " + args.histogram);
        provenance_comment(hs, doc["config"]);
        io::write_histogram_csv(hs, rows);
        doc["histogram_file"] = args.histogram;
    }

    doc["qq_file"] = nullptr;
    if (!args.qq.empty()) {
        if (degenerate || centered.size() < 20)
            throw numeric_error("report: sample unfit for a QQ table");
        const auto rep = bandstat::normality_report(centered);
        std::ofstream qs(args.qq, std::ios::binary | std::ios::trunc);
        if (!qs) throw io_error("cannot open for writing: " + args.qq);
        provenance_comment(qs, doc["config"]);
        io::csv_row(qs, std::vector<std::string>{"theoretical", "sample"});
        for (const auto& [t, s] : rep.qq)
            io::csv_row(qs, std::vector<std::string>{io::num(t), io::num(s)});
        doc["qq_file"] = args.qq;
    }

    emit_json(args.out, doc);
}

void run_esd(const EsdArgs& args) {
    const std::size_t b = resolve_bandwidth(args.n, args.b, args.b_exp);
    const auto dist =
        bandstat::EntryDistribution::parse(args.ens.dist, args.ens.sigma2);
    const bandstat::MatrixSpec spec{args.n, b, dist, args.ens.seed};
    spec.validate();
    bandstat::rng::stream stream(args.ens.seed, 0);
    const auto m = bandstat::sample_matrix(spec, stream);
    const auto spectrum = bandstat::eigen(m, false);
    const auto report = bandstat::esd_report(
        spectrum, static_cast<std::size_t>(args.bins));

    json prov = base_config("esd");
    prov.update(ensemble_config(args.ens));
    prov["n"] = args.n;
    prov["b"] = b;
    if (args.b_exp > 0) prov["b_exp"] = args.b_exp;
    prov["bins"] = args.bins;

    if (!args.histogram.empty()) {
        std::ofstream hs(args.histogram, std::ios::binary | std::ios::trunc);
        if (!hs) throw io_error("cannot open for writing: " + args.histogram);
        provenance_comment(hs, prov);
        io::csv_row(hs, std::vector<std::string>{"bin_left", "bin_right",
                                                 "density"});
        for (std::size_t i = 0; i + 1 < report.bin_edges.size(); ++i)
            io::csv_row(hs, std::vector<std::string>{
                                io::num(report.bin_edges[i]),
                                io::num(report.bin_edges[i + 1]),
                                io::num(report.densities[i])});
    }

    json doc;
    doc["config"] = prov;
    doc["ks_distance"] = report.ks;
    doc["outside_fraction"] = report.outside_fraction;
    doc["eigenvalues"] = spectrum.size();
    doc["histogram_file"] =
        args.histogram.empty() ? json(nullptr) : json(args.histogram);
    emit_json(args.out, doc);
}

void run_scan(const ScanArgs& args) {
    const auto ns = parse_size_list(args.n_list, "--n");
    const auto bs = parse_size_list(args.b_list, "--b");
    const std::complex<double> z(args.re, args.im);
    const auto dist =
        bandstat::EntryDistribution::parse(args.ens.dist, args.ens.sigma2);
    const auto table =
        bandstat::resolvent_variance_scan(ns, bs, z, args.reps, args.ens.seed,
                                          dist);

    json prov = base_config("scan-resolvent");
    prov.update(ensemble_config(args.ens));
    prov["n"] = ns;
    prov["b"] = bs;
    prov["z_re"] = args.re;
    prov["z_im"] = args.im;
    prov["reps"] = args.reps;

    Output out(args.out);
    auto& os = out.os();
    provenance_comment(os, prov);
    io::csv_row(os, std::vector<std::string>{"n", "b", "variance", "std_error",
                                             "ratio"});
    for (const auto& cell : table)
        io::csv_row(os, std::vector<std::string>{
                            std::to_string(cell.n), std::to_string(cell.b),
                            io::num(cell.variance), io::num(cell.std_error),
                            io::num(cell.ratio)});
    out.finish();
}

void run_stieltjes(const StieltjesArgs& args) {
    const std::size_t b = resolve_bandwidth(args.n, args.b, args.b_exp);
    const std::complex<double> z(args.re, args.im);
    const auto dist =
        bandstat::EntryDistribution::parse(args.ens.dist, args.ens.sigma2);
    const auto cmp = bandstat::stieltjes_compare(args.n, b, z, args.reps,
                                                 args.ens.seed, dist);

    json prov = base_config("stieltjes");
    prov.update(ensemble_config(args.ens));
    prov["n"] = args.n;
    prov["b"] = b;
    if (args.b_exp > 0) prov["b_exp"] = args.b_exp;
    prov["z_re"] = args.re;
    prov["z_im"] = args.im;
    prov["reps"] = args.reps;

    json doc;
    doc["config"] = prov;
    doc["mean_normalized_trace"] = {{"re", cmp.mean_normalized_trace.real()},
                                    {"im", cmp.mean_normalized_trace.imag()}};
    doc["f_value"] = {{"re", cmp.f_value.real()}, {"im", cmp.f_value.imag()}};
    doc["deviation"] = cmp.deviation;
    doc["std_error"] = cmp.std_error;
    doc["b_scale"] = cmp.b_scale;
    emit_json(args.out, doc);
}

// ---------------------------------------------------------------------------
// Config-file overlay: values from --config FILE are injected as "--key=value"
// tokens ahead of the explicit flags, so with a take-last policy the explicit
// flags win.  Unknown keys are rejected.

std::string config_token(const std::string& key, const json& value) {
    std::string text;
    if (value.is_string()) {
        text = value.get<std::string>();
    } else if (value.is_boolean()) {
        text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_unsigned()) {
        text = std::to_string(value.get<unsigned long long>());
    } else if (value.is_number_integer()) {
        text = std::to_string(value.get<long long>());
    } else if (value.is_number_float()) {
        text = io::num(value.get<double>());
    } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (value[i].is_structured())
                throw argument_error("config key '" + key +
                                     "': arrays must hold scalars");
            if (i) text += ',';
            const auto element = config_token(key, value[i]);
            text += element.substr(element.find('=') + 1);
        }
    } else {
        throw argument_error("config key '" + key + "' has unsupported type");
    }
    return "--" + key + "=" + text;
}

std::vector<std::string> apply_config_overlay(
    std::vector<std::string> args,
    const std::map<std::string, CLI::App*>& subcommands) {
    // Locate the subcommand token and a --config value after it.
    std::size_t sub_pos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_pos = i;
            break;
        }
    }
    if (sub_pos == args.size()) return args;
    const auto it = subcommands.find(args[sub_pos]);
    if (it == subcommands.end()) return args;  // CLI11 reports the usage error

    std::string config_path;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(std::string("--config=").size());
    }
    if (config_path.empty()) return args;

    json doc;
    try {
        doc = json::parse(io::read_text_file(config_path));
    } catch (const json::exception& e) {
        throw argument_error("config file " + config_path + ": " + e.what());
    }
    if (!doc.is_object())
        throw argument_error("config file must hold a JSON object");

    std::vector<std::string> injected;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config")
            throw argument_error("config key 'config' is not allowed");
        if (it->second->get_option_no_throw("--" + key) == nullptr)
            throw argument_error("unknown config key '" + key + "' for " +
                                 args[sub_pos]);
        injected.push_back(config_token(key, value));
    }

    std::vector<std::string> merged(args.begin(), args.begin() + sub_pos + 1);
    merged.insert(merged.end(), injected.begin(), injected.end());
    merged.insert(merged.end(), args.begin() + sub_pos + 1, args.end());
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear eigenvalue statistics of periodic random band "
                 "matrices: exact tables, limiting-variance quadrature, and "
                 "Monte Carlo ensembles."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bandstat::version));

    std::map<std::string, CLI::App*> subs;
    auto make_sub = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->option_defaults()->multi_option_policy(
            CLI::MultiOptionPolicy::TakeLast);
        subs[name] = sub;
        return sub;
    };

    GammaArgs gamma_args;
    auto* gamma_cmd = make_sub("gamma", "Exact gamma_k table as CSV");
    gamma_cmd->add_option("--max-k", gamma_args.max_k, "largest k in the table")
        ->check(CLI::PositiveNumber);
    add_common_options(gamma_cmd, gamma_args.out, gamma_args.config);

    DyckArgs dyck_args;
    auto* dyck_cmd =
        make_sub("dyck", "Dyck path counts by height after step l, as CSV");
    dyck_cmd->add_option("--l", dyck_args.l, "steps before the marked point")
        ->required()
        ->check(CLI::NonNegativeNumber);
    dyck_cmd->add_option("--m", dyck_args.m, "steps after the marked point")
        ->required()
        ->check(CLI::NonNegativeNumber);
    dyck_cmd->add_option("--k", dyck_args.k,
                         "single height (default: all heights)");
    add_common_options(dyck_cmd, dyck_args.out, dyck_args.config);

    ClmArgs clm_args;
    auto* clm_cmd =
        make_sub("clm", "Exact monomial coefficients C_{l,m} as CSV");
    clm_cmd->add_option("--l", clm_args.l, "single row: left exponent")
        ->check(CLI::NonNegativeNumber);
    clm_cmd->add_option("--m", clm_args.m, "single row: right exponent")
        ->check(CLI::NonNegativeNumber);
    clm_cmd->add_option("--max-l", clm_args.max_l,
                        "grid mode: all pairs up to this exponent")
        ->check(CLI::NonNegativeNumber);
    add_common_options(clm_cmd, clm_args.out, clm_args.config);

    InnerprodArgs inner_args;
    auto* inner_cmd = make_sub(
        "innerprod",
        "Chebyshev series for <f,g> (CSV); --empirical adds a Monte Carlo "
        "estimate (JSON)");
    inner_cmd->add_option("--f", inner_args.f, "first test function id")
        ->required();
    inner_cmd->add_option("--g", inner_args.g, "second test function id")
        ->required();
    inner_cmd->add_option("--K", inner_args.trunc, "series truncation")
        ->check(CLI::NonNegativeNumber);
    inner_cmd
        ->add_option("--quad-order", inner_args.quad_order,
                     "Gauss-Chebyshev nodes for the coefficients")
        ->check(CLI::PositiveNumber);
    inner_cmd->add_flag("--empirical", inner_args.empirical,
                        "also estimate <f,g>_n from sampled matrices");
    inner_cmd->add_option("--n", inner_args.n, "matrix dimension")
        ->check(CLI::PositiveNumber);
    inner_cmd->add_option("--b", inner_args.b, "bandwidth");
    inner_cmd->add_option("--b-exp", inner_args.b_exp,
                          "bandwidth exponent: b = round(n^a)");
    inner_cmd->add_option("--reps", inner_args.reps, "Monte Carlo samples")
        ->check(CLI::PositiveNumber);
    add_ensemble_options(inner_cmd, inner_args.ens);
    add_common_options(inner_cmd, inner_args.out, inner_args.config);

    KernelArgs kernel_args;
    auto* kernel_cmd = make_sub(
        "kernel", "Variance kernel F(x,y) on a grid, series and/or integral");
    kernel_cmd->add_option("--xmin", kernel_args.xmin, "grid start, x axis")
        ->required();
    kernel_cmd->add_option("--xmax", kernel_args.xmax, "grid end, x axis")
        ->required();
    kernel_cmd->add_option("--ymin", kernel_args.ymin, "grid start, y axis")
        ->required();
    kernel_cmd->add_option("--ymax", kernel_args.ymax, "grid end, y axis")
        ->required();
    kernel_cmd->add_option("--steps", kernel_args.steps, "points per axis")
        ->check(CLI::PositiveNumber);
    kernel_cmd->add_option("--method", kernel_args.method, "evaluation route")
        ->check(CLI::IsMember({"series", "integral", "both"}));
    kernel_cmd
        ->add_option("--series-k", kernel_args.series_k, "series truncation")
        ->check(CLI::PositiveNumber);
    kernel_cmd
        ->add_option("--s-max", kernel_args.s_max,
                     "direct integration range before the tail bound")
        ->check(CLI::PositiveNumber);
    kernel_cmd->add_option("--tol", kernel_args.tol, "panel tolerance")
        ->check(CLI::PositiveNumber);
    add_common_options(kernel_cmd, kernel_args.out, kernel_args.config);

    VarianceArgs variance_args;
    auto* variance_cmd = make_sub(
        "variance", "Limiting variance V(phi) breakdown as JSON");
    variance_cmd->add_option("--phi", variance_args.phi, "test function id")
        ->required();
    variance_cmd->add_option("--kappa4", variance_args.kappa4,
                             "excess fourth cumulant of the entries");
    variance_cmd->add_option("--sigma2", variance_args.sigma2,
                             "diagonal entry variance");
    variance_cmd
        ->add_option("--variant", variance_args.variant,
                     "kernel-term evaluation variant")
        ->check(CLI::IsMember({"printed", "symmetrized", "both"}));
    variance_cmd
        ->add_option("--quad-order", variance_args.quad_order,
                     "nodes for the kappa/sigma integrals")
        ->check(CLI::PositiveNumber);
    variance_cmd
        ->add_option("--outer-q", variance_args.orders.outer_q,
                     "outer lattice order (even)")
        ->check(CLI::PositiveNumber);
    variance_cmd
        ->add_option("--inner-mult", variance_args.orders.inner_mult,
                     "odd inner lattice refinement")
        ->check(CLI::PositiveNumber);
    variance_cmd
        ->add_option("--levels", variance_args.orders.levels,
                     "outer lattice doublings")
        ->check(CLI::PositiveNumber);
    variance_cmd
        ->add_option("--series-k", variance_args.orders.series_k,
                     "kernel series truncation")
        ->check(CLI::PositiveNumber);
    add_common_options(variance_cmd, variance_args.out, variance_args.config);

    SimulateArgs sim_args;
    auto* sim_cmd = make_sub(
        "simulate",
        "Monte Carlo ensemble run; writes records.jsonl and summary.json");
    sim_cmd->add_option("--n", sim_args.n, "matrix dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--b", sim_args.b, "bandwidth");
    sim_cmd->add_option("--b-exp", sim_args.b_exp,
                        "bandwidth exponent: b = round(n^a)");
    sim_cmd->add_option("--phi", sim_args.phi, "test function id");
    sim_cmd->add_option("--reps", sim_args.reps, "number of samples")
        ->required()
        ->check(CLI::PositiveNumber);
    auto* workers_opt =
        sim_cmd
            ->add_option("--workers", sim_args.workers,
                         "worker threads (default: BANDSTAT_WORKERS or 1)")
            ->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--timings,!--no-timings", sim_args.timings,
                      "record per-sample wall times (off: byte-stable files)");
    add_ensemble_options(sim_cmd, sim_args.ens);
    sim_cmd->add_option("--out", sim_args.out_dir, "output directory")
        ->required();
    sim_cmd->add_option("--config", sim_args.config,
                        "JSON config file; flat keys mirror long flag names "
                        "and command-line flags win");

    ReportArgs report_args;
    auto* report_cmd = make_sub(
        "report",
        "Recompute diagnostics from a simulate directory; verifies the "
        "stored summary");
    report_cmd->add_option("--dir", report_args.dir, "simulate output directory")
        ->required();
    report_cmd->add_option("--bins", report_args.bins, "histogram bins")
        ->check(CLI::PositiveNumber);
    report_cmd->add_option("--histogram", report_args.histogram,
                           "write a histogram CSV of the centered samples");
    report_cmd->add_option("--qq", report_args.qq,
                           "write a normal QQ table CSV");
    add_common_options(report_cmd, report_args.out, report_args.config);

    EsdArgs esd_args;
    auto* esd_cmd = make_sub(
        "esd",
        "One-sample eigenvalue histogram and KS distance to the semicircle");
    esd_cmd->add_option("--n", esd_args.n, "matrix dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    esd_cmd->add_option("--b", esd_args.b, "bandwidth");
    esd_cmd->add_option("--b-exp", esd_args.b_exp,
                        "bandwidth exponent: b = round(n^a)");
    esd_cmd->add_option("--bins", esd_args.bins, "histogram bins")
        ->check(CLI::PositiveNumber);
    esd_cmd->add_option("--histogram", esd_args.histogram,
                        "write the histogram CSV here");
    add_ensemble_options(esd_cmd, esd_args.ens);
    add_common_options(esd_cmd, esd_args.out, esd_args.config);

    ScanArgs scan_args;
    auto* scan_cmd = make_sub(
        "scan-resolvent",
        "Empirical Var(Tr G(z)) over an (n, b) grid, as CSV");
    scan_cmd
        ->add_option("--n", scan_args.n_list,
                     "comma-separated matrix dimensions")
        ->required();
    scan_cmd->add_option("--b", scan_args.b_list, "comma-separated bandwidths")
        ->required();
    scan_cmd->add_option("--re", scan_args.re, "Re z");
    scan_cmd->add_option("--im", scan_args.im, "Im z (nonzero)");
    scan_cmd->add_option("--reps", scan_args.reps, "samples per cell")
        ->check(CLI::PositiveNumber);
    add_ensemble_options(scan_cmd, scan_args.ens);
    add_common_options(scan_cmd, scan_args.out, scan_args.config);

    StieltjesArgs st_args;
    auto* st_cmd = make_sub(
        "stieltjes",
        "Mean normalized resolvent trace against the semicircle transform");
    st_cmd->add_option("--n", st_args.n, "matrix dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    st_cmd->add_option("--b", st_args.b, "bandwidth");
    st_cmd->add_option("--b-exp", st_args.b_exp,
                       "bandwidth exponent: b = round(n^a)");
    st_cmd->add_option("--re", st_args.re, "Re z");
    st_cmd->add_option("--im", st_args.im, "Im z (nonzero)");
    st_cmd->add_option("--reps", st_args.reps, "samples");
    add_ensemble_options(st_cmd, st_args.ens);
    add_common_options(st_cmd, st_args.out, st_args.config);

    std::vector<std::string> final_args;
    try {
        final_args = apply_config_overlay(
            std::vector<std::string>(argv + 1, argv + argc), subs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const auto& arg : final_args) cargv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return dynamic_cast<const CLI::Success*>(&e) != nullptr ? code : 1;
    }

    try {
        if (gamma_cmd->parsed()) run_gamma(gamma_args);
        if (dyck_cmd->parsed()) run_dyck(dyck_args);
        if (clm_cmd->parsed()) run_clm(clm_args);
        if (inner_cmd->parsed()) run_innerprod(inner_args);
        if (kernel_cmd->parsed()) run_kernel(kernel_args);
        if (variance_cmd->parsed()) run_variance(variance_args);
        if (sim_cmd->parsed()) run_simulate(sim_args, workers_opt->count() > 0);
        if (report_cmd->parsed()) run_report(report_args);
        if (esd_cmd->parsed()) run_esd(esd_args);
        if (scan_cmd->parsed()) run_scan(scan_args);
        if (st_cmd->parsed()) run_stieltjes(st_args);
    } catch (const argument_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
