// End-to-end checks of the command-line tool: exit codes, report
// stability across reruns and thread counts, config-file handling,
// and the simulate -> detect round trip. argv[1] is the binary path.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int g_failures = 0;

void check(bool ok, const std::string& name) {
    std::cout << (ok ? "ok   - " : "FAIL - ") << name << "\n";
    if (!ok) ++g_failures;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& exe, const std::string& args) {
    const std::string out_path = "clitest_stdout.tmp";
    const std::string err_path = "clitest_stderr.tmp";
    const std::string cmd =
        "\"" + exe + "\" " + args + " >" + out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

// Value of a "key = value" report line, or "" if absent.
std::string report_key(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    const std::string prefix = key + " = ";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return "";
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <splitsim-binary>\n";
        return 1;
    }
    const std::string exe = argv[1];

    {
        const RunResult r = run(exe, "--version");
        check(r.code == 0 && !r.out.empty(), "--version exits 0 and prints a version");
    }
    {
        const RunResult r = run(exe, "simulate --no-such-flag");
        check(r.code == 2, "an unknown flag exits 2");
    }
    {
        const RunResult r = run(exe, "detect");
        check(r.code == 2, "a missing required option exits 2");
    }
    {
        const RunResult r = run(exe, "");
        check(r.code == 2, "a missing subcommand exits 2");
    }

    // Fixtures shared below: a small null table and a simulated null path.
    const RunResult mk_table = run(
        exe, "critvals --alpha 0.25 --grid 256 --reps 1000 --seed 5 "
             "--out-table clitest_table.tmp --out clitest_cv1.txt");
    check(mk_table.code == 0, "critvals builds a table and exits 0");

    const RunResult mk_series = run(
        exe, "simulate --process ar1 --phi 0.4 --n 400 --seed 11 "
             "--out-series clitest_series.tmp");
    check(mk_series.code == 0, "simulate writes a series and exits 0");
    check(report_key(mk_series.out, "n") == "400", "simulate echoes the path length");

    {
        const RunResult r = run(
            exe, "detect --series clitest_series.tmp --table clitest_table.tmp "
                 "--alpha 0.6");
        check(r.code == 2, "detect with alpha 0.6 exits 2");
        check(r.err.find("alpha") != std::string::npos &&
                  r.err.find("1/2") != std::string::npos,
              "the alpha error names the open upper bound 1/2");
    }
    {
        const RunResult r = run(
            exe, "detect --series clitest_missing.tmp --table clitest_table.tmp");
        check(r.code == 3, "a missing series file exits 3");
    }
    {
        write_file("clitest_bad_series.tmp", "header\n1.0\nnot-a-number\n2.0\n");
        const RunResult r = run(
            exe, "detect --series clitest_bad_series.tmp --table clitest_table.tmp");
        check(r.code == 3, "a malformed series file exits 3");
    }
    {
        const RunResult r = run(
            exe, "detect --series clitest_series.tmp --table clitest_table.tmp");
        check(r.code == 0, "detect on a null path exits 0");
        const std::string p = report_key(r.out, "p-value");
        check(!p.empty() && std::stod(p) > 0.0 && std::stod(p) <= 1.0,
              "the null-path p-value lies in (0, 1]");
        check(report_key(r.out, "sigma-hat") != "", "detect reports the scale estimate");
    }
    {
        const RunResult r = run(
            exe, "simulate --process ar1 --phi 0.4 --n 400 --seed 11 "
                 "--inject-m1 150 --inject-m2 300 --inject-delta 3 "
                 "--out-series clitest_shifted.tmp");
        check(r.code == 0, "simulate with an injected segment exits 0");
        const RunResult d = run(
            exe, "detect --series clitest_shifted.tmp --table clitest_table.tmp");
        check(d.code == 0 && report_key(d.out, "reject") == "true",
              "a large injected shift is rejected");
    }

    // Byte-identical reruns: same table build twice, and across thread counts.
    {
        const std::string table_before = slurp("clitest_table.tmp");
        const RunResult again = run(
            exe, "critvals --alpha 0.25 --grid 256 --reps 1000 --seed 5 "
                 "--out-table clitest_table.tmp --out clitest_cv2.txt");
        check(again.code == 0 && slurp("clitest_cv1.txt") == slurp("clitest_cv2.txt"),
              "rerunning critvals reproduces the report byte for byte");
        check(table_before == slurp("clitest_table.tmp"),
              "rerunning critvals reproduces the table file byte for byte");
    }
    {
        const RunResult t1 = run(
            exe, "--threads 1 critvals --alpha 0 --grid 300 --reps 2000 --seed 3 "
                 "--out clitest_t1.txt");
        const RunResult t8 = run(
            exe, "--threads 8 critvals --alpha 0 --grid 300 --reps 2000 --seed 3 "
                 "--out clitest_t8.txt");
        check(t1.code == 0 && t8.code == 0 &&
                  slurp("clitest_t1.txt") == slurp("clitest_t8.txt"),
              "reports are identical at 1 and 8 worker threads");
        check(report_key(t1.out, "q0.9-range-asymptote") != "",
              "the unweighted table reports its range asymptote");
    }

    // Config file: values come from the section, flags override them.
    {
        write_file("clitest_cfg.ini",
                   "[simulate]\n"
                   "process=ar1\n"
                   "phi=0.4\n"
                   "n=50\n"
                   "seed=9\n"
                   "out-series=clitest_cfg_series.tmp\n");
        const RunResult r = run(exe, "--config clitest_cfg.ini simulate");
        check(r.code == 0 && report_key(r.out, "n") == "50",
              "a config file supplies subcommand options");
        const RunResult o = run(exe, "--config clitest_cfg.ini simulate --n 60");
        check(o.code == 0 && report_key(o.out, "n") == "60",
              "a flag overrides the config file");
        std::ifstream in("clitest_cfg_series.tmp");
        int lines = 0;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++lines;
        check(lines == 60, "the series file reflects the overriding flag");
    }

    // Data mode of the increment command reads the simulated series back.
    {
        const RunResult r = run(
            exe, "increments --series clitest_series.tmp --rule power --rho 0.6");
        check(r.code == 0, "increments reads a series file and exits 0");
        const std::string s = report_key(r.out, "statistic");
        check(!s.empty() && std::stod(s) > 0.0, "the increment statistic is positive");
    }

    // Remaining subcommands, exercised end to end once each.
    {
        const RunResult r = run(
            exe, "depcheck --process linear --coeff exponential --decay 0.5 "
                 "--two-sided --m 2 --m 4 --m 8 --p 2 --reps 2000 --seed 1");
        check(r.code == 0 && report_key(r.out, "fit-kind") == "exponential",
              "depcheck fits the exponential decay of the coupling curve");
    }
    {
        const RunResult r = run(exe, "blocks --n 100000 --mode poly");
        check(r.code == 0, "blocks tiles a range and exits 0");
        check(report_key(r.out, "alpha") != "" && report_key(r.out, "gamma") != "",
              "blocks echoes the derived exponents");
    }
    {
        const RunResult r = run(
            exe, "power --process mdep --m0 0 --weights 1 --n 300 --l 60 "
                 "--deltas 0 2 --reps 200 --seed 4 --table clitest_table.tmp");
        check(r.code == 0, "power sweeps shift sizes and exits 0");
    }
    {
        const RunResult r = run(exe, "critvals --load clitest_table.tmp");
        check(r.code == 0 && report_key(r.out, "grid") == "256",
              "critvals reloads a saved table");
        write_file("clitest_trunc.tmp", "alpha=0.25 grid=256\n1.0\n");
        const RunResult bad = run(exe, "critvals --load clitest_trunc.tmp");
        check(bad.code == 3, "a corrupt table file exits 3");
    }

    const char* junk[] = {"clitest_stdout.tmp", "clitest_stderr.tmp",
                          "clitest_table.tmp",  
                          "clitest_cv1.txt",    "clitest_cv2.txt",
                          "clitest_series.tmp", "clitest_shifted.tmp",
                          "clitest_bad_series.tmp", "clitest_cfg.ini",
                          "clitest_cfg_series.tmp", "clitest_t1.txt",
                          "clitest_t8.txt"};
    for (const char* f : junk) std::remove(f);

    if (g_failures == 0) {
        std::cout << "all command-line checks passed\n";
        return 0;
    }
    std::cout << g_failures << " command-line check(s) failed\n";
    return 1;
}
