// CLI conformance checks, driven through the real binary:
//   ./rocp_cli_tests --cli /path/to/rocp

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "rocp/csv_io.hpp"
#include "rocp/synthetic.hpp"

namespace {

namespace fs = std::filesystem;

int g_failures = 0;
std::string g_cli;
fs::path g_dir;

void check(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& args, const std::string& tag) {
    const std::string cmd = g_cli + " " + args + " >" + (g_dir / (tag + ".out")).string() +
                            " 2>" + (g_dir / (tag + ".err")).string();
    const int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

void test_scheme_equivalence() {
    // `full` must coincide with `rolling:M` when M covers every score
    const auto in = (g_dir / "series.csv").string();
    const auto scores_path = g_dir / "full.scores.csv";
    int rc = run("predict --input " + in + " --model ar:4 --h 1 --alpha 0.1 --scheme full --out " +
                     (g_dir / "full.json").string() + " --scores-out " + scores_path.string(),
                 "predict_full");
    check(rc == 0, "predict full exits 0");
    const auto n_scores = rocp::read_scores_csv(scores_path.string()).size();
    rc = run("predict --input " + in + " --model ar:4 --h 1 --alpha 0.1 --scheme rolling:" +
                 std::to_string(n_scores) + " --out " + (g_dir / "rolln.json").string(),
             "predict_rolln");
    check(rc == 0, "predict rolling:n exits 0");
    const auto a = nlohmann::json::parse(slurp(g_dir / "full.json"));
    const auto b = nlohmann::json::parse(slurp(g_dir / "rolln.json"));
    check(a["lower"] == b["lower"] && a["upper"] == b["upper"] && a["center"] == b["center"],
          "full scheme equals rolling with m = all scores");
    check(a["m_used"] == n_scores, "full scheme reports m_used = score count");
}

void test_vs_fallback() {
    // a model without a volatility component falls back to plain rolling
    const auto in = (g_dir / "series.csv").string();
    const int rc = run("predict --input " + in +
                           " --model ar:4 --h 1 --alpha 0.1 --scheme vs:auto --out " +
                           (g_dir / "vs.json").string(),
                       "predict_vs");
    check(rc == 0, "vs:auto with an AR model still succeeds");
    const auto j = nlohmann::json::parse(slurp(g_dir / "vs.json"));
    check(j["scheme"] == "rolling:auto" && j.value("fallback_from_vs", false),
          "fallback to the rolling scheme is reported");
    check(slurp(g_dir / "predict_vs.err").find("falling back") != std::string::npos,
          "fallback warning printed to stderr");
}

void test_evaluate() {
    // evaluate on a score CSV mirrors the metric definitions
    write(g_dir / "scores.csv",
          "origin,horizon,score,sigma\n"
          "1,1,1.0,\n2,1,1.0,\n3,1,1.0,\n4,1,1.0,\n5,1,1.0,\n6,1,5.0,\n");
    int rc = run("evaluate --input " + (g_dir / "scores.csv").string() +
                     " --scheme rolling:4 --alpha 0.1 --window 2 --out " +
                     (g_dir / "eval.csv").string(),
                 "evaluate");
    check(rc == 0, "evaluate exits 0");
    // two evaluated origins: score 1 (covered, q=1) and score 5 (breach 4)
    // winkler: 2*1 and 2*1 + 20*4 = 82 -> mean 42; coverage 0.5
    const auto csv = slurp(g_dir / "eval.csv");
    check(csv.find("rolling,4,1,") != std::string::npos, "eval row names the scheme");
    check(csv.find(",0.5,") != std::string::npos, "coverage 0.5");
    check(csv.find(",42,") != std::string::npos, "mean Winkler 42");

    // predictions mode: y,lower,upper rows
    write(g_dir / "preds.csv", "y,lower,upper\n0.0,-1.0,1.0\n2.0,-1.0,1.0\n");
    rc = run("evaluate --input " + (g_dir / "preds.csv").string() + " --alpha 0.1 --out " +
                 (g_dir / "eval2.csv").string(),
             "evaluate2");
    check(rc == 0, "evaluate predictions exits 0");
    const auto csv2 = slurp(g_dir / "eval2.csv");
    check(csv2.find(",0.5,") != std::string::npos && csv2.find(",12,") != std::string::npos,
          "prediction metrics: coverage 0.5, mean Winkler 12");
}

void test_select() {
    std::string rows = "origin,horizon,score,sigma\n";
    rocp::Rng rng(12);
    for (int i = 0; i < 600; ++i)
        rows += std::to_string(i + 1) + ",1," + rocp::detail::fmt_double(std::fabs(rng.normal())) +
                ",\n";
    write(g_dir / "sel_scores.csv", rows);
    int rc = run("select --input " + (g_dir / "sel_scores.csv").string() +
                     " --alpha 0.1 --T 620 --out " + (g_dir / "sel.csv").string(),
                 "select");
    check(rc == 0, "select exits 0");
    const auto csv = slurp(g_dir / "sel.csv");
    check(csv.rfind("m,mean_winkler\n", 0) == 0, "selection CSV header");
    check(csv.find("# m_hat=") != std::string::npos, "selection summary line");

    // boundary-policy error: constant scores tie everywhere, the smallest
    // candidate wins, and that sits on the grid's lower edge
    std::string flat = "origin,horizon,score,sigma\n";
    for (int i = 0; i < 200; ++i) flat += std::to_string(i + 1) + ",1,1.0,\n";
    write(g_dir / "flat_scores.csv", flat);
    rc = run("select --input " + (g_dir / "flat_scores.csv").string() +
                 " --alpha 0.1 --T 230 --boundary-policy error",
             "select_boundary");
    check(rc == 2, "boundary-policy error exits 2");
}

void test_bound() {
    const int rc = run(
        "bound --T 2000 --beta 1 --gamma 1 --L 0.5 --f-bar 1 --f-under 0.5 --a-inf 0.2 --out " +
            (g_dir / "bound.csv").string(),
        "bound");
    check(rc == 0, "bound exits 0");
    const auto csv = slurp(g_dir / "bound.csv");
    check(csv.rfind("m,tradeoff,coverage_bound\n", 0) == 0, "bound CSV header");
    check(csv.find("# tradeoff_minimizer=") != std::string::npos, "minimiser summary line");
}

void test_hand_scores() {
    // naive forecaster on 1..5 at h=1: scores 1,1,1,1
    write(g_dir / "five.csv", "value\n1\n2\n3\n4\n5\n");
    const int rc = run("scores --input " + (g_dir / "five.csv").string() +
                           " --model naive --h 1 --min-train 1 --out " +
                           (g_dir / "five_scores.csv").string(),
                       "five");
    check(rc == 0, "hand-case scores exit 0");
    const auto scores = rocp::read_scores_csv((g_dir / "five_scores.csv").string());
    bool ok = scores.size() == 4;
    for (const auto& r : scores) ok = ok && r.score == 1.0;
    check(ok, "naive scores on 1..5 are 1,1,1,1");
}

void test_experiment_cmd() {
    // planted law at cube lengths: regression slope is exactly 2/3
    write(g_dir / "planted.json",
          R"({"process": {"kind": "planted"}, "T_grid": [27, 125, 343, 729], "n_reps": 2})");
    int rc = run("experiment --config " + (g_dir / "planted.json").string() + " --out-dir " +
                     (g_dir / "planted_out").string(),
                 "planted");
    check(rc == 0, "planted experiment exits 0");
    const auto reg = nlohmann::json::parse(slurp(g_dir / "planted_out" / "regression.json"));
    check(std::fabs(reg["slope"].get<double>() - 2.0 / 3.0) < 1e-9,
          "planted regression slope is 2/3");

    // ROCP_SEED drives the run when no seed is given anywhere
    write(g_dir / "noseed.json",
          R"({"process": {"kind": "ar1", "phi": 0.3}, "model": {"kind": "naive"},
              "T_grid": [120, 240], "n_reps": 4, "min_train": 10, "exclude_boundary": false})");
    setenv("ROCP_SEED", "777", 1);
    rc = run("experiment --config " + (g_dir / "noseed.json").string() + " --out-dir " +
                 (g_dir / "env_out").string(),
             "envseed");
    unsetenv("ROCP_SEED");
    check(rc == 0, "experiment with env seed exits 0");
    const auto cfg = nlohmann::json::parse(slurp(g_dir / "env_out" / "config.json"));
    check(cfg["seed"] == 777, "ROCP_SEED is the seed fallback");

    write(g_dir / "empty.json", R"({"process": {"kind": "planted"}, "T_grid": []})");
    rc = run("experiment --config " + (g_dir / "empty.json").string() + " --out-dir " +
                 (g_dir / "empty_out").string(),
             "emptygrid");
    check(rc == 2, "empty T grid exits 2");
}

void test_exit_codes() {
    check(run("scores --input " + (g_dir / "nope.csv").string() + " --model naive", "miss") == 2,
          "missing input exits 2");
    check(run("scores --input " + (g_dir / "series.csv").string() + " --model prophet", "badmodel") ==
              2,
          "unknown model exits 2");
    // constant series with an AR model: every fit is singular -> runtime error
    std::string flat = "value\n";
    for (int i = 0; i < 80; ++i) flat += "2.0\n";
    write(g_dir / "const.csv", flat);
    check(run("scores --input " + (g_dir / "const.csv").string() + " --model ar:3", "singular") == 3,
          "degenerate run exits 3");
    // long-format file with several ids is rejected for single-series commands
    write(g_dir / "multi.csv", "id,value\na,1\nb,2\na,3\nb,4\n");
    check(run("scores --input " + (g_dir / "multi.csv").string() + " --model naive", "multi") == 2,
          "multi-series input exits 2");
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: rocp_cli_tests --cli /path/to/rocp\n");
        return 2;
    }
    g_dir = fs::temp_directory_path() / ("rocp_cli_tests_" + std::to_string(::getpid()));
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    // shared input series
    rocp::ProcessSpec pspec;
    pspec.kind = rocp::Ar1Process{0.4, 1.0};
    pspec.length = 300;
    pspec.seed = 3;
    std::string csv = "value\n";
    for (double v : rocp::generate(pspec).values) csv += rocp::detail::fmt_double(v) + "\n";
    write(g_dir / "series.csv", csv);

    test_scheme_equivalence();
    test_vs_fallback();
    test_evaluate();
    test_select();
    test_bound();
    test_hand_scores();
    test_experiment_cmd();
    test_exit_codes();

    if (g_failures == 0) {
        fs::remove_all(g_dir);
        std::printf("all CLI checks passed\n");
        return 0;
    }
    std::printf("%d CLI check(s) failed (artifacts in %s)\n", g_failures, g_dir.string().c_str());
    return 1;
}
