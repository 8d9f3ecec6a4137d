#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandstat/harness.hpp"
#include "bandstat/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("bandstat_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Runs the installed CLI through the shell, capturing stdout/stderr.  The
// optional prefix sets environment variables for the child only.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "bandstat_cli_io";
    fs::create_directories(dir);
    const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = env_prefix + std::string(BANDSTAT_CLI_PATH) + " " +
                            args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("gamma: golden CSV with provenance comment") {
    const auto r = run_cli("gamma --max-k 10");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find('\r') == std::string::npos);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 12);  // comment + header + 10 rows
    CHECK(lines[0].rfind("# {", 0) == 0);
    CHECK(lines[0].find("\"version\":\"1.0.0\"") != std::string::npos);
    CHECK(lines[1] == "k,numerator,denominator,value");
    CHECK(lines[2] == "1,1,1,1");
    CHECK(lines[3] == "2,3,4,0.75");
    CHECK(lines[4].rfind("3,2,3,0.666666666666666", 0) == 0);
}

TEST_CASE("gamma: --out writes the same document to a file") {
    const auto dir = fresh_dir("gamma_out");
    const auto path = (dir / "gamma.csv").string();
    const auto r = run_cli("gamma --max-k 3 --out " + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    const auto direct = run_cli("gamma --max-k 3");
    CHECK(slurp(path) == direct.out);
}

TEST_CASE("config overlay: file fills gaps, flags win, unknown keys rejected") {
    const auto dir = fresh_dir("config");
    const auto good = dir / "good.json";
    bandstat::io::write_text_file(good, "{\"max-k\": 4}\n");

    const auto from_file = run_cli("gamma --config " + good.string());
    REQUIRE(from_file.exit_code == 0);
    CHECK(lines_of(from_file.out).size() == 6);  // comment + header + 4 rows

    const auto overridden =
        run_cli("gamma --config " + good.string() + " --max-k 2");
    REQUIRE(overridden.exit_code == 0);
    CHECK(lines_of(overridden.out).size() == 4);

    const auto bad = dir / "bad.json";
    bandstat::io::write_text_file(bad, "{\"max-q\": 4}\n");
    const auto rejected = run_cli("gamma --config " + bad.string());
    CHECK(rejected.exit_code == 1);
    CHECK(rejected.err.find("unknown config key") != std::string::npos);

    const auto missing = run_cli("gamma --config " + (dir / "nope.json").string());
    CHECK(missing.exit_code == 1);

    const auto malformed = dir / "malformed.json";
    bandstat::io::write_text_file(malformed, "{\"max-k\": \n");
    CHECK(run_cli("gamma --config " + malformed.string()).exit_code == 1);
}

TEST_CASE("usage errors exit 1; help and version exit 0") {
    CHECK(run_cli("gamma --max-q 3").exit_code == 1);
    CHECK(run_cli("nosuchcmd").exit_code == 1);
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("dyck --l 1 --m 2").exit_code == 1);  // odd l+m
    CHECK(run_cli("simulate --n 50 --b 3 --b-exp 0.5 --reps 2 --out /tmp/x")
              .exit_code == 1);

    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    const auto version = run_cli("--version");
    CHECK(version.exit_code == 0);
    CHECK(version.out == "1.0.0\n");
}

TEST_CASE("dyck and clm emit exact tables") {
    const auto dyck = run_cli("dyck --l 2 --m 2");
    REQUIRE(dyck.exit_code == 0);
    const auto dl = lines_of(dyck.out);
    REQUIRE(dl.size() == 5);
    CHECK(dl[1] == "l,m,k,count");
    CHECK(dl[2] == "2,2,0,1");
    CHECK(dl[3] == "2,2,1,0");
    CHECK(dl[4] == "2,2,2,1");

    const auto clm = run_cli("clm --l 1 --m 1");
    REQUIRE(clm.exit_code == 0);
    const auto cl = lines_of(clm.out);
    REQUIRE(cl.size() == 3);
    CHECK(cl[2] == "1,1,3,4,0.75");

    const auto odd = run_cli("clm --l 1 --m 2");
    REQUIRE(odd.exit_code == 0);
    CHECK(lines_of(odd.out)[2] == "1,2,0,1,0");
}

TEST_CASE("variance: printed variant JSON carries the closed-form terms") {
    const auto r =
        run_cli("variance --phi identity --kappa4 0 --sigma2 1 --variant printed");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("sigma_term").get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(doc.at("kappa_term").get<double>() == 0.0);
    REQUIRE(doc.at("variants").size() == 1);
    CHECK(doc.at("variants")[0].at("name") == "printed");
    CHECK(doc.at("variants")[0].at("experimental") == false);
    CHECK(doc.at("config").at("version") == "1.0.0");

    const auto both = run_cli("variance --phi identity");
    REQUIRE(both.exit_code == 0);
    const json both_doc = json::parse(both.out);
    REQUIRE(both_doc.at("variants").size() == 2);
    CHECK(both_doc.at("variants")[1].at("name") == "symmetrized");
    CHECK(both_doc.at("variants")[1].at("experimental") == true);
}

TEST_CASE("simulate then report: summary reproduced within 1e-9") {
    const auto dir = fresh_dir("sim");
    const auto run_dir = (dir / "run").string();
    const auto sim = run_cli("simulate --n 120 --b 10 --reps 40 --seed 11 --out " +
                             run_dir + " --no-timings");
    REQUIRE(sim.exit_code == 0);
    const json summary = json::parse(sim.out);
    CHECK(summary.at("config").at("n") == 120);
    CHECK(summary.at("config").at("master_seed") == 11);
    CHECK(summary.at("version") == "1.0.0");
    CHECK(summary.at("summary").at("count") == 40);

    const auto hist = (dir / "hist.csv").string();
    const auto qq = (dir / "qq.csv").string();
    const auto rep = run_cli("report --dir " + run_dir + " --histogram " + hist +
                             " --qq " + qq);
    REQUIRE(rep.exit_code == 0);
    const json doc = json::parse(rep.out);
    CHECK(doc.at("max_abs_difference").get<double>() <= 1e-9);
    CHECK(doc.at("records").at("count") == 40);
    CHECK(doc.at("normality").at("jb_pvalue").get<double>() > 0.0);

    const auto hist_lines = lines_of(slurp(hist));
    REQUIRE(hist_lines.size() >= 3);
    CHECK(hist_lines[1] == "bin_left,bin_right,count,density");
    const auto qq_lines = lines_of(slurp(qq));
    CHECK(qq_lines[1] == "theoretical,sample");
    CHECK(qq_lines.size() == 2 + 40);
}

TEST_CASE("report: tampered records fail the summary invariant with exit 2") {
    const auto dir = fresh_dir("tamper");
    const auto run_dir = dir / "run";
    REQUIRE(run_cli("simulate --n 80 --b 6 --reps 20 --seed 3 --out " +
                    run_dir.string() + " --no-timings")
                .exit_code == 0);
    auto records = bandstat::read_records_jsonl(run_dir / "records.jsonl");
    records[0].raw_stat += 0.5;
    bandstat::write_records_jsonl(run_dir / "records.jsonl", records, false);
    const auto rep = run_cli("report --dir " + run_dir.string());
    CHECK(rep.exit_code == 2);
    CHECK(rep.err.find("deviates") != std::string::npos);

    CHECK(run_cli("report --dir " + (dir / "nowhere").string()).exit_code == 2);
}

TEST_CASE("simulate: BANDSTAT_WORKERS sets the default worker count") {
    const auto dir = fresh_dir("envworkers");
    const auto r = run_cli("simulate --n 60 --b 5 --reps 8 --seed 2 --out " +
                               (dir / "a").string() + " --no-timings",
                           "BANDSTAT_WORKERS=3 ");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out).at("config").at("workers") == 3);

    // An explicit flag wins over the environment.
    const auto flagged =
        run_cli("simulate --n 60 --b 5 --reps 8 --seed 2 --workers 2 --out " +
                    (dir / "b").string() + " --no-timings",
                "BANDSTAT_WORKERS=3 ");
    REQUIRE(flagged.exit_code == 0);
    CHECK(json::parse(flagged.out).at("config").at("workers") == 2);

    const auto garbage = run_cli("simulate --n 60 --b 5 --reps 8 --out " +
                                     (dir / "c").string(),
                                 "BANDSTAT_WORKERS=soon ");
    CHECK(garbage.exit_code == 1);
}

TEST_CASE("esd: JSON document plus histogram CSV") {
    const auto dir = fresh_dir("esd");
    const auto hist = (dir / "esd.csv").string();
    const auto r = run_cli("esd --n 300 --b-exp 0.8 --seed 4 --bins 24 --histogram " +
                           hist);
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("config").at("b") == 96);  // round(300^0.8)
    CHECK(doc.at("ks_distance").get<double>() < 0.2);
    const auto hl = lines_of(slurp(hist));
    CHECK(hl[1] == "bin_left,bin_right,density");
    CHECK(hl.size() == 2 + 24);
}

TEST_CASE("scan-resolvent and stieltjes smoke through the CLI") {
    const auto scan = run_cli("scan-resolvent --n 80 --b 6,12 --im 2 --reps 12 --seed 9");
    REQUIRE(scan.exit_code == 0);
    const auto sl = lines_of(scan.out);
    REQUIRE(sl.size() == 4);
    CHECK(sl[1] == "n,b,variance,std_error,ratio");
    CHECK(sl[2].rfind("80,6,", 0) == 0);
    CHECK(sl[3].rfind("80,12,", 0) == 0);

    CHECK(run_cli("scan-resolvent --n 80 --b 6 --im 0 --reps 4").exit_code == 1);
    CHECK(run_cli("scan-resolvent --n 80 --b 6,abc --reps 4").exit_code == 1);

    const auto st = run_cli("stieltjes --n 100 --b 20 --im 2 --reps 8 --seed 9");
    REQUIRE(st.exit_code == 0);
    const json doc = json::parse(st.out);
    CHECK(doc.at("b_scale").get<double>() == 0.05);
    CHECK(doc.at("deviation").get<double>() < 0.5);
}

TEST_CASE("innerprod: series CSV and empirical JSON") {
    const auto series = run_cli("innerprod --f poly:0,1 --g poly:0,1 --K 8");
    REQUIRE(series.exit_code == 0);
    const auto sl = lines_of(series.out);
    REQUIRE(sl.size() == 2 + 9);
    // <x,x> = 3: the cumulative column converges to it immediately.
    CHECK(sl.back().find(",3.000000000000") != std::string::npos);

    const auto emp = run_cli(
        "innerprod --f poly:1 --g poly:1 --empirical --n 60 --b 5 --reps 4 --seed 1");
    REQUIRE(emp.exit_code == 0);
    const json doc = json::parse(emp.out);
    CHECK(doc.at("theoretical").at("re").get<double>() ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(doc.at("empirical").at("value").get<double>() ==
          doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("kernel: grid CSV marks the divergent diagonal as nan") {
    const auto r = run_cli(
        "kernel --xmin -1 --xmax 1 --ymin -1 --ymax 1 --steps 2 --method series "
        "--series-k 60");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 2 + 4);
    CHECK(lines[1] == "x,y,F,err,method");
    // (-1,-1) and (1,1) sit on the diagonal where the series diverges.
    CHECK(lines[2].find("nan") != std::string::npos);
    CHECK(lines[5].find("nan") != std::string::npos);
    CHECK(lines[3].find("nan") == std::string::npos);
}
