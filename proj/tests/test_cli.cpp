#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rcsvd/io/matrix_market.hpp"
#include "rcsvd/io/pgm.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out; // stdout and stderr, interleaved
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + RCSVD_CLI_PATH + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(RCSVD_TEST_TMPDIR) / "cli";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Cli, GenMatrixThenDecompose) {
    const fs::path mtx = scratch("product.mtx");
    RunResult g = run("gen-matrix --kind product --m 60 --n 50 --r1 8 --seed 3 --out " + mtx.string());
    ASSERT_EQ(g.code, 0) << g.out;
    EXPECT_NE(g.out.find("seed: 3"), std::string::npos);
    EXPECT_EQ(rcsvd::io::read_matrix_market(mtx).rows(), 60u);

    const std::string prefix = scratch("product").string();
    RunResult d = run("decompose --in " + mtx.string() + " --algo rcsvd-qr --k 5 --p 5 --t 5 --seed 9 --out-prefix " + prefix);
    ASSERT_EQ(d.code, 0) << d.out;
    for (const char* suffix : {"_L.mtx", "_D.mtx", "_R.mtx", "_summary.jsonl"})
        EXPECT_TRUE(fs::exists(prefix + suffix)) << suffix;
    std::ifstream in(prefix + "_summary.jsonl");
    std::string line;
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["seed"], 9);
    EXPECT_EQ(j["diag_d"].size(), 10u);
    EXPECT_LT(j["residual_rel"].get<double>(), 1e-8);
}

TEST(Cli, SeedFromEnvironmentIsPrinted) {
    const fs::path mtx = scratch("env.mtx");
    RunResult r = run("gen-matrix --kind decaying --n 10 --out " + mtx.string(), "RCSVD_SEED=1234");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("seed: 1234"), std::string::npos) << r.out;
    RunResult flag = run("gen-matrix --kind decaying --n 10 --seed 5 --out " + mtx.string(), "RCSVD_SEED=1234");
    EXPECT_NE(flag.out.find("seed: 5"), std::string::npos) << flag.out;
    RunResult bad = run("gen-matrix --kind decaying --n 10 --out " + mtx.string(), "RCSVD_SEED=abc");
    EXPECT_EQ(bad.code, 1);
}

TEST(Cli, SameSeedSameOutput) {
    const fs::path a = scratch("a.mtx"), b = scratch("b.mtx");
    ASSERT_EQ(run("gen-matrix --kind noisy --n 20 --k 4 --seed 8 --out " + a.string()).code, 0);
    ASSERT_EQ(run("gen-matrix --kind noisy --n 20 --k 4 --seed 8 --out " + b.string()).code, 0);
    EXPECT_EQ(rcsvd::io::read_matrix_market(a), rcsvd::io::read_matrix_market(b));
}

TEST(Cli, ValidationErrorsExitOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("gen-matrix --kind product --n 10 --r1 2 --bogus 1 --out x.mtx").code, 1);
    EXPECT_EQ(run("gen-matrix --kind weird --n 10 --out x.mtx").code, 1);
    RunResult missing = run("decompose --in /nonexistent/file.mtx --out-prefix " + scratch("m").string());
    EXPECT_EQ(missing.code, 1);
    EXPECT_NE(missing.out.find("/nonexistent/file.mtx"), std::string::npos) << missing.out;

    const fs::path mtx = scratch("small.mtx");
    ASSERT_EQ(run("gen-matrix --kind decaying --n 8 --out " + mtx.string()).code, 0);
    EXPECT_EQ(run("decompose --in " + mtx.string() + " --k 5 --p 5 --out-prefix " + scratch("s").string()).code, 1);
}

TEST(Cli, MalformedMatrixExitsOneWithLine) {
    const fs::path mtx = scratch("bad.mtx");
    std::ofstream(mtx) << "%%MatrixMarket matrix array real general\n2 2\n1\n2\n";
    RunResult r = run("decompose --in " + mtx.string() + " --algo svd --k 1 --out-prefix " + scratch("bad").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;
}

TEST(Cli, VerifyBoundsPassAndViolation) {
    RunResult ok = run("verify-bounds --check thm2 --trials 3 --seed 1");
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_NE(ok.out.find("check,measured,bound,slack,trials,sample_mean,sample_stddev,holds"), std::string::npos);

    RunResult p2 = run("verify-bounds --check prop2 --k 4 --p 3 --trials 1000 --seed 2");
    EXPECT_EQ(p2.code, 0) << p2.out;

    // A 0.1% band cannot contain a Monte Carlo mean from 500 draws.
    RunResult tight = run("verify-bounds --check prop2 --k 4 --p 3 --trials 500 --rel-tol 0.001 --seed 2");
    EXPECT_EQ(tight.code, 3) << tight.out;
}

TEST(Cli, TraceConvergenceWritesCsv) {
    const fs::path csv = scratch("trace.csv");
    RunResult r = run("trace-convergence --m 40 --n 40 --r 20 --r1 15 --tmax 4 --seed 2 --out " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "iteration,relative_error");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Cli, BenchWritesCsv) {
    const fs::path csv = scratch("bench.csv");
    RunResult r = run("bench --sizes 30,40 --algos svd,rcsvd-qr --rank 20 --k 5 --p 5 --repeats 1 --seed 1 --out " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(csv));
    EXPECT_EQ(run("bench --sizes 30 --algos lanczos").code, 1);
}

TEST(Cli, CompressImageRoundTrip) {
    const fs::path img = scratch("in.pgm"), out = scratch("out.pgm");
    ASSERT_EQ(run("gen-image --width 64 --height 48 --seed 4 --out " + img.string()).code, 0);
    RunResult r = run("compress-image --in " + img.string() + " --k 10 --algo rcsvd-qr --t 5 --seed 1 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("psnr_db"), std::string::npos);
    const rcsvd::GrayImage back = rcsvd::io::read_pgm(out);
    EXPECT_EQ(back.width, 64u);
    EXPECT_EQ(back.height, 48u);
}

TEST(Cli, HelpExitsZero) {
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("decompose --help").code, 0);
}
