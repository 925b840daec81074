// End-to-end tests that drive the installed command-line binary through
// std::system, checking exit codes, output formats, determinism across
// thread counts, and the config-file path.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#ifndef STRUCTEMBED_BIN
#error "STRUCTEMBED_BIN must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

const fs::path kDir = "cli_tmp";

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

RunResult run(const std::string& args) {
    fs::create_directories(kDir);
    const fs::path out = kDir / "stdout.txt";
    const fs::path err = kDir / "stderr.txt";
    const std::string cmd = std::string("\"") + STRUCTEMBED_BIN + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_dataset() {
    fs::create_directories(kDir);
    const fs::path p = kDir / "data.txt";
    spit(p,
         "# four vectors in R^6\n"
         "0.9 0.1 0.2 -0.3 0.1 0.2\n"
         "0.1, 0.8, -0.1, 0.2, 0.3, -0.2\n"
         "-0.4 0.2 0.7 0.1 -0.1 0.3\n"
         "0.2 -0.3 0.1 0.6 0.2 -0.1\n");
    return p;
}

}  // namespace

TEST_CASE("diagnose reports stats and echoes the padded dimension") {
    const RunResult r = run("diagnose --family circulant --n 5 --m 2 --exact");
    CHECK(r.code == 0);
    CHECK(r.out.find("requested_n=5") != std::string::npos);
    CHECK(r.out.find("n=8") != std::string::npos);
    CHECK(r.out.find("chi=") != std::string::npos);
    CHECK(r.out.find("mu_tilde=0") != std::string::npos);
    CHECK(r.out.find("normalized=1") != std::string::npos);
    CHECK(r.out.find("orthogonal=1") != std::string::npos);
}

TEST_CASE("diagnose exports the coherence graph in pair format") {
    const RunResult r =
        run("diagnose --family circulant --n 8 --m 2 --export-graph 0,1");
    CHECK(r.code == 0);
    CHECK(r.out.find("graph_vertices=8") != std::string::npos);
    CHECK(r.out.find("graph_edges=8") != std::string::npos);
    CHECK(r.out.find("0,1 — 1,2") != std::string::npos);  // em-dash separator
}

TEST_CASE("estimate writes the documented CSV") {
    const fs::path data = write_dataset();
    const RunResult r = run("estimate --dataset \"" + data.string() +
                            "\" --family circulant --m 8 --f identity --seed 7");
    CHECK(r.code == 0);
    CHECK(r.out.find("# n=8 (requested 6)\n") != std::string::npos);
    CHECK(r.out.find("m,family,f,pair_id,estimate,exact,abs_error,seed\n") !=
          std::string::npos);
    // 4 vectors -> 6 pairs -> comment + header + 6 rows
    std::size_t lines = 0;
    for (char c : r.out)
        if (c == '\n') ++lines;
    CHECK(lines == 8);
    CHECK(r.out.find("8,circulant,identity,0-1,") != std::string::npos);
    CHECK(r.out.find("3-") == std::string::npos);  // last first index is 2
}

TEST_CASE("estimate adds oracle columns on request") {
    const fs::path data = write_dataset();
    const RunResult r = run("estimate --dataset \"" + data.string() +
                            "\" --m 8 --f heaviside --oracle 500 --seed 7");
    CHECK(r.code == 0);
    CHECK(r.out.find("m,family,f,pair_id,estimate,exact,abs_error,seed,oracle_mean,"
                     "oracle_stderr\n") != std::string::npos);
}

TEST_CASE("estimate leaves exact blank when no closed form exists") {
    const fs::path data = write_dataset();
    const RunResult r =
        run("estimate --dataset \"" + data.string() + "\" --m 8 --f sine --seed 7");
    CHECK(r.code == 0);
    // estimate,exact,abs_error,seed with empty middle fields
    CHECK(r.out.find(",,,7\n") != std::string::npos);
}

TEST_CASE("malformed data reports the line number and exits 4") {
    fs::create_directories(kDir);
    const fs::path p = kDir / "bad.txt";
    spit(p, "1 2\n3 4\nfoo bar\n");
    const RunResult r = run("estimate --dataset \"" + p.string() + "\" --m 4");
    CHECK(r.code == 4);
    CHECK(r.err.find("line 3") != std::string::npos);

    const fs::path q = kDir / "ragged.txt";
    spit(q, "1 2\n1 2 3\n");
    const RunResult r2 = run("estimate --dataset \"" + q.string() + "\" --m 4");
    CHECK(r2.code == 4);
    CHECK(r2.err.find("line 2") != std::string::npos);

    const RunResult r3 = run("estimate --dataset \"" + (kDir / "missing.txt").string() +
                             "\" --m 4");
    CHECK(r3.code == 4);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("").code == 2);                                        // no subcommand
    CHECK(run("diagnose --family nonsense --n 8 --m 2").code == 2);  // bad family
    CHECK(run("diagnose --no-such-flag").code == 2);                 // unknown option
    CHECK(run("diagnose --family circulant --m 2").code == 2);       // missing --n
    CHECK(run("sweep --m-values 4").code == 2);                      // missing dataset
    const fs::path data = write_dataset();
    CHECK(run("sweep --dataset \"" + data.string() + "\"").code == 2);  // missing m-values
    CHECK(run("estimate --dataset \"" + data.string() + "\" --m 8 --f sine --tau 0.7 ")
              .code == 0);  // tau unused by estimate
    CHECK(run("sweep --dataset \"" + data.string() +
              "\" --m-values 4 --tau 0.7").code == 2);  // tau out of range
}

TEST_CASE("resource caps exit 3") {
    const RunResult r = run("diagnose --family circulant --n 1024 --m 2");
    CHECK(r.code == 3);
    CHECK(r.err.find("resource limit") != std::string::npos);
}

TEST_CASE("sweep emits error rows with concentration thresholds") {
    const fs::path data = write_dataset();
    const RunResult r = run("sweep --dataset \"" + data.string() +
                            "\" --family toeplitz --f identity --m-values 2,4,8 --reps 2 "
                            "--tau 0.25 --seed 3");
    CHECK(r.code == 0);
    CHECK(r.out.find("m,family,f,pair_count,reps,rmse,max_abs_error,cor1_threshold,"
                     "cor1_tail,cor2_threshold,cor2_tail,seed\n") != std::string::npos);
    CHECK(r.out.find("2,toeplitz,identity,6,2,") != std::string::npos);
    CHECK(r.out.find("8,toeplitz,identity,6,2,") != std::string::npos);
}

TEST_CASE("identical command and seed give byte-identical CSV at any thread count") {
    const fs::path data = write_dataset();
    const std::string base = "estimate --dataset \"" + data.string() +
                             "\" --family toeplitz --m 8 --f relu --oracle 500 --seed 11 ";
    const RunResult t1 = run(base + "--threads 1");
    const RunResult t4 = run(base + "--threads 4");
    CHECK(t1.code == 0);
    CHECK(t4.code == 0);
    CHECK(t1.out == t4.out);

    const std::string sweep_base = "sweep --dataset \"" + data.string() +
                                   "\" --family circulant --f identity --m-values 4,8 "
                                   "--reps 3 --seed 11 ";
    const RunResult s1 = run(sweep_base + "--threads 1");
    const RunResult s4 = run(sweep_base + "--threads 4");
    CHECK(s1.code == 0);
    CHECK(s1.out == s4.out);
}

TEST_CASE("config file values apply and command-line flags win") {
    const fs::path data = write_dataset();
    fs::create_directories(kDir);
    const fs::path cfg = kDir / "run.cfg";
    spit(cfg, "family=toeplitz\nm=8\nseed=99\nf=relu\n");
    const RunResult from_cfg = run("estimate --dataset \"" + data.string() +
                                   "\" --config \"" + cfg.string() + "\"");
    const RunResult from_flags = run("estimate --dataset \"" + data.string() +
                                     "\" --family toeplitz --m 8 --seed 99 --f relu");
    CHECK(from_cfg.code == 0);
    CHECK(from_cfg.out == from_flags.out);

    const RunResult overridden = run("estimate --dataset \"" + data.string() +
                                     "\" --config \"" + cfg.string() + "\" --m 4");
    CHECK(overridden.code == 0);
    CHECK(overridden.out.find("4,toeplitz,relu,0-1,") != std::string::npos);
}

TEST_CASE("verify runs a single criterion and the negative control trips it") {
    const RunResult ok = run("verify --only balancedness");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("[PASS] balancedness") != std::string::npos);

    const RunResult bad = run("verify --only sigma-closed-forms --corrupt-sigma");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("[FAIL] sigma-closed-forms") != std::string::npos);

    CHECK(run("verify --only no-such-criterion").code == 2);
}

TEST_CASE("bench prints medians for several families and the serial baseline") {
    const RunResult r = run("bench --family circulant,toeplitz,hankel --n 256 --reps 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("benchmark,family,n,m,reps,median_seconds,baseline_median_seconds,"
                     "speedup\n") != std::string::npos);
    CHECK(r.out.find("matvec_structured_vs_dense,circulant,256,256,2,") != std::string::npos);
    CHECK(r.out.find("matvec_structured_vs_dense,toeplitz,") != std::string::npos);
    CHECK(r.out.find("matvec_structured_vs_dense,hankel,") != std::string::npos);
    CHECK(r.out.find("dense_omp_vs_serial,dense,256,256,2,") != std::string::npos);
}

TEST_CASE("output lands in the requested file") {
    const fs::path data = write_dataset();
    const fs::path out = kDir / "result.csv";
    std::error_code ec;
    fs::remove(out, ec);
    const RunResult r = run("estimate --dataset \"" + data.string() + "\" --m 4 --output \"" +
                            out.string() + "\"");
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const std::string text = slurp(out);
    CHECK(text.find("m,family,f,pair_id,") != std::string::npos);
}
