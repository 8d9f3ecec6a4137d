#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <vector>

#include "bandstat/errors.hpp"
#include "bandstat/harness.hpp"
#include "bandstat/io.hpp"
#include "bandstat/quadrature.hpp"
#include "bandstat/stats.hpp"

using namespace bandstat;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("bandstat_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config() {
    RunConfig cfg;
    cfg.n = 60;
    cfg.b = 6;
    cfg.dist = EntryDistribution::make(DistKind::gaussian);
    cfg.phi = "identity";
    cfg.reps = 12;
    cfg.master_seed = 314159;
    cfg.include_timings = false;
    return cfg;
}

}  // namespace

TEST_CASE("RunConfig: validation and bandwidth resolution") {
    RunConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());

    cfg.reps = 1;
    CHECK_THROWS_AS(cfg.validate(), argument_error);
    cfg.reps = 12;

    cfg.phi = "resolvent:0,1";
    CHECK_THROWS_AS(cfg.validate(), argument_error);
    cfg.phi = "identity";

    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), argument_error);
    cfg.workers = 1;

    cfg.b = 0;
    cfg.b_exponent = 0.8;
    cfg.n = 2000;
    CHECK(cfg.resolved_b() == 437);  // round(2000^0.8)
    CHECK_NOTHROW(cfg.validate());

    cfg.b_exponent = 1.0;  // b = n violates 2b+1 <= n
    CHECK_THROWS_AS(cfg.validate(), argument_error);
}

TEST_CASE("io: round-trip number format and CSV rows") {
    for (double v : {0.1, 1.0 / 3.0, 2.2590588724166070, -1e-300, 437.0}) {
        CHECK(std::strtod(io::num(v).c_str(), nullptr) == v);
    }
    CHECK(io::num(0.5) == "0.5");
    CHECK(io::num(-2.0) == "-2");

    std::ostringstream os;
    io::csv_row(os, std::vector<std::string>{"k", "value"});
    io::csv_row(os, std::vector<std::string>{"2", "0.75"});
    CHECK(os.str() == "k,value\n2,0.75\n");
}

TEST_CASE("records jsonl: round trip, failed rows, stable timings-off bytes") {
    std::vector<SampleRecord> recs(3);
    recs[0] = {0, 1.25, 0.004, false};
    recs[1] = {1, -0.7071067811865476, 0.002, false};
    recs[2] = {2, std::nan(""), 0.0, true};

    fs::path dir = fresh_dir("records");
    fs::create_directories(dir);
    const fs::path path = dir / "records.jsonl";
    write_records_jsonl(path, recs, false);

    const std::string body = io::read_text_file(path);
    CHECK(body ==
          "{\"index\":0,\"stat\":1.25,\"ms\":0}\n"
          "{\"index\":1,\"stat\":-0.7071067811865476,\"ms\":0}\n"
          "{\"index\":2,\"failed\":true}\n");

    auto back = read_records_jsonl(path);
    REQUIRE(back.size() == 3);
    CHECK(back[0].raw_stat == 1.25);
    CHECK(back[1].raw_stat == -0.7071067811865476);
    CHECK_FALSE(back[1].failed);
    CHECK(back[2].failed);
    fs::remove_all(dir);
}

TEST_CASE("run_ensemble: forced-equal streams give zero variance") {
    RunConfig cfg = small_config();
    cfg.reps = 2;
    cfg.force_equal_streams = true;
    RunSummary s = run_ensemble(cfg);
    CHECK(s.count == 2);
    CHECK(s.records[0].raw_stat == s.records[1].raw_stat);
    CHECK(s.variance == 0.0);
    CHECK(s.mean == s.records[0].raw_stat);
    CHECK(s.centered_normalized[0] == 0.0);
    CHECK(s.centered_normalized[1] == 0.0);
}

TEST_CASE("run_ensemble: record files byte-identical across worker counts") {
    std::vector<std::string> bodies;
    for (std::size_t workers : {1ul, 4ul, 16ul}) {
        RunConfig cfg = small_config();
        cfg.workers = workers;
        cfg.output_dir = fresh_dir("workers_" + std::to_string(workers));
        RunSummary s = run_ensemble(cfg);
        CHECK(s.count == cfg.reps);
        CHECK(s.failures == 0);
        bodies.push_back(io::read_text_file(cfg.output_dir / "records.jsonl"));
        fs::remove_all(cfg.output_dir);
    }
    CHECK(bodies[0] == bodies[1]);
    CHECK(bodies[0] == bodies[2]);
    CHECK(std::count(bodies[0].begin(), bodies[0].end(), '\n') == 12);
}

TEST_CASE("run_ensemble: summary file embeds config, seed, version") {
    RunConfig cfg = small_config();
    cfg.output_dir = fresh_dir("summary");
    RunSummary s = run_ensemble(cfg);

    auto j = nlohmann::json::parse(
        io::read_text_file(cfg.output_dir / "summary.json"));
    CHECK(j.at("version").get<std::string>() == "1.0.0");
    CHECK(j.at("config").at("n").get<std::size_t>() == 60);
    CHECK(j.at("config").at("b").get<std::size_t>() == 6);
    CHECK(j.at("config").at("phi").get<std::string>() == "identity");
    CHECK(j.at("config").at("master_seed").get<std::uint64_t>() == 314159);
    CHECK(j.at("config").at("dist").get<std::string>() == "gaussian");
    CHECK(j.at("summary").at("count").get<std::size_t>() == 12);
    CHECK(j.at("summary").at("variance").get<double>() ==
          doctest::Approx(s.variance).epsilon(1e-15));
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("run_ensemble: locked output directory is refused") {
    RunConfig cfg = small_config();
    cfg.output_dir = fresh_dir("locked");
    fs::create_directories(cfg.output_dir);
    std::ofstream(cfg.output_dir / ".bandstat.lock") << "held";
    CHECK_THROWS_AS(run_ensemble(cfg), io_error);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("run_ensemble: normalized trace variance matches sigma^2") {
    // Var(sqrt(b/n) Tr M) = sigma^2 exactly for every n, b: the trace only
    // sees the n diagonal entries, each of variance sigma^2 / b.
    RunConfig cfg;
    cfg.n = 200;
    cfg.b = 14;
    cfg.dist = EntryDistribution::make(DistKind::gaussian);
    cfg.phi = "identity";
    cfg.reps = 400;
    cfg.master_seed = 271828;
    RunSummary s = run_ensemble(cfg);

    // 3 standard errors of a variance estimate over 400 Gaussian samples.
    const double se = std::sqrt(2.0 / (400.0 - 1.0));
    CHECK(std::abs(s.variance - 1.0) < 3.0 * se);

    // Gaussian entries + identity: the statistic is exactly Gaussian, so
    // the Jarque-Bera smoke test clears easily.
    NormalityReport rep = normality_report(s.centered_normalized);
    CHECK(rep.jarque_bera_pvalue > 0.001);
}

TEST_CASE("run_ensemble: two-pass moments from persisted records") {
    RunConfig cfg = small_config();
    cfg.reps = 50;
    cfg.output_dir = fresh_dir("twopass");
    RunSummary s = run_ensemble(cfg);

    auto recs = read_records_jsonl(cfg.output_dir / "records.jsonl");
    REQUIRE(recs.size() == 50);
    double mean = 0.0;
    for (const auto& r : recs) mean += r.raw_stat;
    mean /= 50.0;
    const double scale = std::sqrt(6.0 / 60.0);
    std::vector<double> centered;
    for (const auto& r : recs) centered.push_back(scale * (r.raw_stat - mean));
    MomentSummary two = moment_summary(centered);
    CHECK(std::abs(two.variance - s.variance) <= 1e-9 * s.variance);
    CHECK(std::abs(two.kurtosis_ratio - s.kurtosis_ratio) <=
          1e-9 * s.kurtosis_ratio);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("empirical_inner_products: constant pair is exactly two") {
    auto one = TestFunction::parse("poly:1");
    Estimate e = empirical_inner_product(one, one, 60, 6, 4, 5);
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(e.std_error < 1e-10);
    CHECK(e.reps == 4);
}

TEST_CASE("empirical_inner_products: symmetry and batch consistency") {
    auto id = TestFunction::parse("identity");
    auto sq = TestFunction::parse("poly:0,0,1");
    std::vector<std::pair<TestFunction, TestFunction>> pairs = {
        {id, sq}, {sq, id}, {id, id}};
    auto batch = empirical_inner_products(pairs, 80, 8, 6, 99);
    REQUIRE(batch.size() == 3);
    CHECK(batch[0].value == batch[1].value);  // sum F_ij G_ij is symmetric

    Estimate single = empirical_inner_product(id, sq, 80, 8, 6, 99);
    CHECK(single.value == batch[0].value);
    CHECK(single.std_error == batch[0].std_error);
}

TEST_CASE("empirical_inner_products: argument checks") {
    auto id = TestFunction::parse("identity");
    auto res = TestFunction::parse("resolvent:0,1");
    std::vector<std::pair<TestFunction, TestFunction>> bad = {{id, res}};
    CHECK_THROWS_AS(empirical_inner_products(bad, 60, 6, 4, 1), argument_error);
    std::vector<std::pair<TestFunction, TestFunction>> ok = {{id, id}};
    CHECK_THROWS_AS(empirical_inner_products(ok, 60, 6, 1, 1), argument_error);
    CHECK_THROWS_AS(empirical_inner_products(ok, 60, 40, 4, 1), argument_error);
    CHECK_THROWS_AS(empirical_inner_products({}, 60, 6, 4, 1), argument_error);
}

TEST_CASE("resolvent_variance_scan: scaling ratio stays bounded") {
    const std::size_t n_list[] = {120};
    const std::size_t b_list[] = {8, 16};
    auto table = resolvent_variance_scan(n_list, b_list, {0.0, 2.0}, 60, 7);
    REQUIRE(table.size() == 2);
    for (const auto& cell : table) {
        CHECK(cell.variance >= 0.0);
        CHECK(cell.ratio ==
              doctest::Approx(cell.variance * cell.b / cell.n).epsilon(1e-12));
    }
    // Doubling b must not grow the Var * b / n ratio beyond 2x.
    CHECK(table[1].ratio < 2.0 * table[0].ratio);
    // Var itself is nonincreasing in b within 2 SE.
    CHECK(table[1].variance <=
          table[0].variance + 2.0 * (table[0].std_error + table[1].std_error));
}

TEST_CASE("resolvent_variance_scan: argument checks") {
    const std::size_t n_ok[] = {120};
    const std::size_t b_ok[] = {8};
    CHECK_THROWS_AS(resolvent_variance_scan(n_ok, b_ok, {1.0, 0.0}, 30, 7),
                    argument_error);
    const std::size_t n_bad[] = {2};
    CHECK_THROWS_AS(resolvent_variance_scan(n_bad, b_ok, {0.0, 2.0}, 30, 7),
                    argument_error);
    CHECK_THROWS_AS(resolvent_variance_scan(n_ok, b_ok, {0.0, 2.0}, 1, 7),
                    argument_error);
}

TEST_CASE("stieltjes_compare: deviation scales as promised") {
    auto far = stieltjes_compare(400, 80, {0.0, 2.0}, 20, 11);
    CHECK(far.b_scale == doctest::Approx(1.0 / 80.0).epsilon(1e-15));
    CHECK(far.deviation < 5.0 * far.b_scale);
    CHECK(std::abs(far.f_value - quadrature::stieltjes_f({0.0, 2.0})) == 0.0);

    // Larger |Im z| shrinks the error (same n, b, seed).
    auto safer = stieltjes_compare(400, 80, {0.0, 10.0}, 20, 11);
    CHECK(safer.deviation < far.deviation);

    // Quadrupling b shrinks the deviation within 2 SE.
    auto coarse = stieltjes_compare(400, 20, {0.0, 2.0}, 20, 11);
    CHECK(far.deviation <
          coarse.deviation + 2.0 * (far.std_error + coarse.std_error));

    CHECK_THROWS_AS(stieltjes_compare(400, 80, {1.0, 0.0}, 20, 11),
                    argument_error);
}
