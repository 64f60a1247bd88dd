// End-to-end checks of the command-line front end: exit codes, artifact
// files, summary JSON shape, configuration precedence, and determinism. The
// binary under test is injected at compile time as LRR_CLI_PATH.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "core/bench.hpp"
#include "core/dense.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

/// Runs the CLI with the given arguments; returns the exit code and captures
/// stdout when requested.
int run_cli(const std::string& args, std::string* out = nullptr) {
    const std::string cmd = std::string(LRR_CLI_PATH) + " " + args +
                            " > cli_stdout.tmp 2> cli_stderr.tmp";
    const int rc = std::system(cmd.c_str());
    if (out != nullptr) *out = slurp("cli_stdout.tmp");
    if (!WIFEXITED(rc)) return -1;
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("--version exits cleanly") {
    std::string out;
    CHECK(run_cli("--version", &out) == 0);
    CHECK(!out.empty());
}

TEST_CASE("solve on a generated instance writes all requested artifacts") {
    const int rc = run_cli(
        "solve --solver fpca --m 40 --n 40 --p 320 --true-rank 2 --seed 1 "
        "--summary cli_s.json --trace cli_t.csv --out cli_x.txt --plot cli_p.csv");
    REQUIRE(rc == 0);

    json summary = json::parse(slurp("cli_s.json"));
    CHECK(summary["solver"] == "fpca");
    CHECK(summary["converged"] == true);
    CHECK(summary["iterations"].get<std::int64_t>() >= 1);
    CHECK(summary["rel_err"].get<double>() < 1e-3);
    CHECK(summary["final_residual"].get<double>() >= 0.0);
    CHECK(summary["wall_seconds"].get<double>() >= 0.0);
    CHECK(summary["warnings"].is_array());

    // The summary echoes the configuration in effect, defaults included.
    CHECK(summary["config"]["xtol"].get<double>() == 1e-6);
    CHECK(summary["config"]["mu_bar"].get<double>() == 1e-8);
    CHECK(summary["config"]["eta_mu"].get<double>() == 0.25);
    CHECK(summary["config"]["svd_mode"] == "sketch");

    std::istringstream trace(slurp("cli_t.csv"));
    std::string header;
    REQUIRE(std::getline(trace, header));
    CHECK(header == "iter,mu,rank,residual,step,rel_err");

    lrr::Matrix x = lrr::read_matrix_text("cli_x.txt");
    CHECK(x.rows() == 40);
    CHECK(x.cols() == 40);

    std::istringstream plot(slurp("cli_p.csv"));
    REQUIRE(std::getline(plot, header));
    CHECK(header == "iter,log10_abs_err");
}

TEST_CASE("solve is deterministic for a fixed seed") {
    const std::string cmd =
        "solve --solver ihtr --rank 2 --m 24 --n 24 --p 180 --true-rank 2 --seed 9 ";
    REQUIRE(run_cli(cmd + "--summary cli_a.json --trace cli_a.csv") == 0);
    REQUIRE(run_cli(cmd + "--summary cli_b.json --trace cli_b.csv") == 0);
    CHECK(slurp("cli_a.csv") == slurp("cli_b.csv"));

    json a = json::parse(slurp("cli_a.json"));
    json b = json::parse(slurp("cli_b.json"));
    a.erase("wall_seconds");
    b.erase("wall_seconds");
    CHECK(a == b);
}

TEST_CASE("solve accepts operator and measurement files") {
    lrr::ProblemInstance inst = lrr::generate_instance(12, 10, 70, 2, 123);
    spit("cli_map.json", inst.map.to_json());
    lrr::write_matrix_text(lrr::Matrix(inst.b), "cli_b.txt");
    lrr::write_matrix_text(inst.truth, "cli_truth.txt");

    const int rc = run_cli(
        "solve --solver ihtr --rank 2 --map cli_map.json --b cli_b.txt "
        "--truth cli_truth.txt --svd exact --summary cli_fs.json --out cli_fx.txt");
    REQUIRE(rc == 0);

    json summary = json::parse(slurp("cli_fs.json"));
    const double reported = summary["rel_err"].get<double>();
    CHECK(reported < 1e-3);

    lrr::Matrix x = lrr::read_matrix_text("cli_fx.txt");
    CHECK(lrr::rel_err(x, inst.truth) == doctest::Approx(reported).epsilon(1e-9));

    // Without --truth the relative error is null and --plot is refused.
    REQUIRE(run_cli("solve --solver ihtr --rank 2 --map cli_map.json --b cli_b.txt "
                    "--svd exact --summary cli_nt.json") == 0);
    CHECK(json::parse(slurp("cli_nt.json"))["rel_err"].is_null());
    CHECK(run_cli("solve --solver ihtr --rank 2 --map cli_map.json --b cli_b.txt "
                  "--svd exact --plot cli_np.csv") == 2);
}

TEST_CASE("a capped solve exits 3 but still writes its artifacts") {
    std::remove("cli_c.json");
    std::remove("cli_cx.txt");
    const int rc = run_cli(
        "solve --solver fpca --m 20 --n 20 --p 120 --true-rank 2 --seed 3 "
        "--max-iters 3 --summary cli_c.json --out cli_cx.txt");
    CHECK(rc == 3);
    json summary = json::parse(slurp("cli_c.json"));
    CHECK(summary["converged"] == false);
    CHECK(summary["iterations"].get<std::int64_t>() == 3);
    CHECK(!summary["warnings"].empty());
    CHECK(lrr::read_matrix_text("cli_cx.txt").rows() == 20);
}

TEST_CASE("config files set solver knobs and explicit flags win") {
    spit("cli_cfg.json", R"({"xtol": 1e-4, "svd_mode": "exact"})");
    REQUIRE(run_cli("solve --solver fpca --m 16 --n 16 --p 100 --true-rank 1 "
                    "--config cli_cfg.json --summary cli_cs.json") == 0);
    json s1 = json::parse(slurp("cli_cs.json"));
    CHECK(s1["config"]["xtol"].get<double>() == 1e-4);
    CHECK(s1["config"]["svd_mode"] == "exact");

    REQUIRE(run_cli("solve --solver fpca --m 16 --n 16 --p 100 --true-rank 1 "
                    "--config cli_cfg.json --xtol 2e-5 --summary cli_cs2.json") == 0);
    json s2 = json::parse(slurp("cli_cs2.json"));
    CHECK(s2["config"]["xtol"].get<double>() == 2e-5);
    CHECK(s2["config"]["svd_mode"] == "exact");

    spit("cli_bad.json", R"({"frobnicate": 1})");
    CHECK(run_cli("solve --solver fpca --m 16 --n 16 --p 100 --true-rank 1 "
                  "--config cli_bad.json") == 2);
}

TEST_CASE("usage errors exit 2, I/O failures exit 1") {
    CHECK(run_cli("solve --solver ihtr --m 10 --n 10 --p 40 --true-rank 1") == 2);
    CHECK(run_cli("solve --solver warp --m 10 --n 10 --p 40 --true-rank 1") == 2);
    CHECK(run_cli("solve --solver fpca") == 2);          // no instance source
    CHECK(run_cli("solve --map cli_map.json") == 2);     // --map without --b
    CHECK(run_cli("frobnicate") == 2);                   // unknown subcommand
    CHECK(run_cli("solve --frobnicate 1") == 2);         // unknown flag
    CHECK(run_cli("bench") == 2);                        // no cells
    CHECK(run_cli("bench --cell 1,2,3") == 2);           // malformed cell
    CHECK(run_cli("wrong-rank --ranks x") == 2);         // malformed rank list
    CHECK(run_cli("svd --m 6 --n 6 --rank 1") == 2);     // missing --cs/--ks

    CHECK(run_cli("solve --solver ihtr --rank 1 --map missing.json --b cli_b.txt") ==
          1);
}

TEST_CASE("bench runs explicit cells and writes a CSV report") {
    REQUIRE(run_cli("bench --cell 14,14,80,1 --solvers ihtr --instances 2 "
                    "--svd exact --seed 5 --csv cli_bench.csv") == 0);
    std::istringstream csv(slurp("cli_bench.csv"));
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "solver,m,n,p,r,SR,FR,NS,avg_time_s,avg_rel_err");
    REQUIRE(std::getline(csv, line));
    CHECK(line.rfind("ihtr,14,14,80,1,", 0) == 0);

    // Without --csv/--text the text report lands on stdout.
    std::string out;
    REQUIRE(run_cli("bench --cell 12,12,60,1 --solvers ihtr --instances 1 "
                    "--svd exact", &out) == 0);
    CHECK(out.find("solver") != std::string::npos);
    CHECK(out.find("ihtr") != std::string::npos);
}

TEST_CASE("wrong-rank reports adaptive and fixed rows") {
    REQUIRE(run_cli("wrong-rank --m 12 --n 12 --p 70 --true-rank 1 --ranks 1,2 "
                    "--solvers ihtr,fpca --instances 2 --svd exact --seed 4 "
                    "--csv cli_wr.csv") == 0);
    const std::string csv = slurp("cli_wr.csv");
    CHECK(csv.rfind("solver,m,n,p,true_r,given_r,NS,avg_time_s,avg_rel_err\n", 0) ==
          0);
    CHECK(csv.find("adaptive") != std::string::npos);
    CHECK(csv.find("ihtr,12,12,70,1,1,") != std::string::npos);
}

TEST_CASE("rip reports distortion estimates as JSON") {
    REQUIRE(run_cli("rip --kind identity --m 6 --n 6 --r 2 --trials 20 "
                    "--out cli_rip.json") == 0);
    json doc = json::parse(slurp("cli_rip.json"));
    CHECK(doc["delta_lower"].get<double>() < 1e-12);
    CHECK(doc["delta_upper"].get<double>() == 0.0);
    CHECK(doc["lambda_max"].get<double>() == 1.0);
    CHECK(doc["map"]["p"].get<std::int64_t>() == 36);

    REQUIRE(run_cli("rip --kind gaussian --m 8 --n 8 --p 20 --map-seed 3 --r 1 "
                    "--trials 20 --props --out cli_rip2.json") == 0);
    json doc2 = json::parse(slurp("cli_rip2.json"));
    CHECK(doc2["delta_lower"].get<double>() > 0.0);
    CHECK(doc2["propositions"]["violations"].get<std::int64_t>() == 0);

    CHECK(run_cli("rip --kind warp") == 2);
}

TEST_CASE("svd sketches generated and file inputs") {
    std::string out;
    REQUIRE(run_cli("svd --m 10 --n 8 --rank 2 --cs 8 --ks 2 --seed 6", &out) == 0);
    json doc = json::parse(out);
    CHECK(doc["m"].get<std::int64_t>() == 10);
    CHECK(doc["k_eff"].get<std::int64_t>() >= 1);
    CHECK(doc["k_eff"].get<std::int64_t>() <= 2);
    CHECK(doc["columns"].size() == 8);
    CHECK(doc["sigma"].size() == std::size_t(doc["k_eff"].get<std::int64_t>()));
    CHECK(doc["reconstruction_rel_err"].get<double>() < 1.0);

    lrr::GaussianStream s(3);
    lrr::write_matrix_text(lrr::gaussian_matrix(6, 5, s), "cli_in.txt");
    REQUIRE(run_cli("svd --in cli_in.txt --cs 5 --ks 2 --out cli_svd.json") == 0);
    json doc2 = json::parse(slurp("cli_svd.json"));
    CHECK(doc2["n"].get<std::int64_t>() == 5);
}
