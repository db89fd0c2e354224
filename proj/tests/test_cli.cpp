// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command line tool. The harness passes the binary
// and the shipped config directory through SGNS_CLI and SGNS_CONFIG_DIR;
// everything else runs against small throwaway configs in the temp dir.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string env_or_fail(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v)
        throw std::runtime_error(std::string(name) + " is not set; run through ctest");
    return v;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) return {};
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

std::size_t data_rows(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') ++n;
    return n > 0 ? n - 1 : 0; // minus the column header
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_root() {
    const fs::path root = fs::temp_directory_path() / "sgns_cli_tests";
    fs::create_directories(root);
    return root;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path root = work_root();
    const fs::path out = root / ("io_" + std::to_string(++counter) + ".out");
    const fs::path err = root / ("io_" + std::to_string(counter) + ".err");
    const std::string cmd = env_or_fail("SGNS_CLI") + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

// Fresh directory under the workspace root, wiped from any previous run.
fs::path fresh_dir(const std::string& name) {
    const fs::path p = work_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_config(const std::string& name, const std::string& body) {
    const fs::path p = work_root() / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << body;
    os.close();
    return p.string();
}

std::string base_config(const std::string& noise, const std::string& experiment,
                        const std::string& integrator_extra = "") {
    return "[truncation]\n"
           "n_max = 2\n"
           "[integrator]\n"
           "dt = 1e-3\n"
           "t_end = 0.05\n"
           "scheme = exponential_em\n"
           "seed = 42\n" +
           integrator_extra +
           "[noise]\n" + noise +
           "gamma = 1.5\n"
           "[experiment]\n" + experiment +
           "fit_samples = 500\n"
           "certify_samples = 200\n"
           "[output]\n"
           "dir = " + (work_root() / "unused_out").string() + "\n";
}

const std::string kPassNoise = "alpha = auto 2\n";
const std::string kMomentsExp = "estimator = moments\n"
                                "paths = 6\n"
                                "threads = 1\n"
                                "p = 0.5\n"
                                "s = 0.5\n"
                                "x0 = random 0.3\n";

} // namespace

TEST_CASE("malformed invocations and configs exit with the usage code", "[cli]") {
    REQUIRE(run_cli("").code == 2);
    REQUIRE(run_cli("frobnicate").code == 2);
    REQUIRE(run_cli("certify").code == 2);
    REQUIRE(run_cli("certify --config /nonexistent.ini").code == 2);

    const std::string bad_gamma = write_config(
        "bad_gamma.ini", base_config("alpha = auto 2\ngamma = banana\n", kMomentsExp));
    const CliResult r = run_cli("certify --config " + bad_gamma);
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("gamma") != std::string::npos);

    const std::string bad_est = write_config(
        "bad_est.ini", base_config(kPassNoise, "estimator = banana\nx0 = zero\n"));
    REQUIRE(run_cli("certify --config " + bad_est).code == 2);

    const std::string ok = write_config("ok.ini", base_config(kPassNoise, kMomentsExp));
    REQUIRE(run_cli("estimate --config " + ok + " --estimator banana").code == 2);
}

TEST_CASE("version and help respond on stdout", "[cli]") {
    const CliResult v = run_cli("--version");
    REQUIRE(v.code == 0);
    REQUIRE(v.out.find("sgns") != std::string::npos);
    const CliResult h = run_cli("--help");
    REQUIRE(h.code == 0);
    REQUIRE(h.out.find("certify") != std::string::npos);
    REQUIRE(h.out.find("simulate") != std::string::npos);
    REQUIRE(h.out.find("estimate") != std::string::npos);
}

TEST_CASE("certify passes on an admissible configuration", "[cli]") {
    const std::string cfg = write_config("pass.ini", base_config(kPassNoise, kMomentsExp));
    const fs::path out = fresh_dir("certify_pass");
    const CliResult r = run_cli("certify --config " + cfg + " --out " + out.string());
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    REQUIRE(count_of(r.out, " PASS") == 8); // BES1 BES2 B-1 Hsigma1 Hsigma2 Hg2 Hg2* Hg3
    REQUIRE(r.out.find("certificates: all passed") != std::string::npos);
    const std::string json = read_file(out / "certificates.json");
    REQUIRE(json.find("\"all_passed\": true") != std::string::npos);
    REQUIRE(json.find("Hg2*") != std::string::npos);
    REQUIRE(json.find("\"admissible\": true") != std::string::npos);
}

TEST_CASE("certify reports failing hypotheses with a nonzero exit", "[cli]") {
    const std::string dir = env_or_fail("SGNS_CONFIG_DIR");
    {
        const fs::path out = fresh_dir("certify_rho_zero");
        const CliResult r =
            run_cli("certify --config " + dir + "/rho_zero.ini --out " + out.string());
        REQUIRE(r.code == 1);
        REQUIRE(r.out.find("Hg2*") != std::string::npos);
        REQUIRE(r.out.find("FAIL") != std::string::npos);
        REQUIRE(read_file(out / "certificates.json").find("\"all_passed\": false") !=
                std::string::npos);
    }
    {
        const fs::path out = fresh_dir("certify_n0");
        const CliResult r =
            run_cli("certify --config " + dir + "/n0_too_big.ini --out " + out.string());
        REQUIRE(r.code == 1);
        REQUIRE(r.err.find("N0") != std::string::npos);
        REQUIRE(r.out.find("Hsigma2 FAIL") != std::string::npos);
        REQUIRE(read_file(out / "certificates.json").find("Hsigma2") != std::string::npos);
    }
}

TEST_CASE("simulate is gated on a passing certificate report", "[cli]") {
    const std::string dir = env_or_fail("SGNS_CONFIG_DIR");
    const fs::path out = fresh_dir("simulate_gate");
    const CliResult refused =
        run_cli("simulate --config " + dir + "/rho_zero.ini --out " + out.string());
    REQUIRE(refused.code == 1);
    REQUIRE(refused.err.find("certificates not passed") != std::string::npos);
    REQUIRE_FALSE(fs::exists(out / "trajectory.csv"));

    const CliResult allowed = run_cli("simulate --config " + dir + "/rho_zero.ini --out " +
                                      out.string() + " --allow-uncertified");
    REQUIRE(allowed.code == 0);
    REQUIRE(allowed.out.find("(uncertified)") != std::string::npos);
    REQUIRE(fs::exists(out / "trajectory.csv"));
    REQUIRE(fs::exists(out / "final.snap"));
}

TEST_CASE("simulate writes the trajectory table and reruns byte-identically", "[cli]") {
    const std::string cfg = write_config("sim.ini", base_config(kPassNoise, kMomentsExp));
    const fs::path a = fresh_dir("simulate_a");
    const fs::path b = fresh_dir("simulate_b");
    const CliResult ra = run_cli("simulate --config " + cfg + " --out " + a.string());
    CAPTURE(ra.out, ra.err);
    REQUIRE(ra.code == 0);
    const CliResult rb = run_cli("simulate --config " + cfg + " --out " + b.string());
    REQUIRE(rb.code == 0);
    const std::string csv_a = read_file(a / "trajectory.csv");
    REQUIRE(data_rows(csv_a) == 51); // t = 0 plus 50 steps
    REQUIRE(csv_a.find("# certificates: fnv1a64:") != std::string::npos);
    REQUIRE(csv_a == read_file(b / "trajectory.csv"));
    REQUIRE(read_file(a / "certificates.json") == read_file(b / "certificates.json"));
    REQUIRE(read_file(a / "final.snap") == read_file(b / "final.snap"));
}

TEST_CASE("simulate records an immediate stop past the radius", "[cli]") {
    const std::string cfg = write_config(
        "sim_stop.ini",
        base_config(kPassNoise,
                    "estimator = moments\npaths = 6\nthreads = 1\nx0 = random 0.8\n",
                    "r_threshold = 0.4\n"));
    const fs::path out = fresh_dir("simulate_stop");
    const CliResult r = run_cli("simulate --config " + cfg + " --out " + out.string());
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("stopped at t = 0 (h_half_radius)") != std::string::npos);
    REQUIRE(data_rows(read_file(out / "trajectory.csv")) == 1);
}

TEST_CASE("simulate surfaces integrator faults with the fault exit code", "[cli]") {
    const std::string cfg = write_config(
        "sim_fault.ini",
        "[truncation]\n"
        "n_max = 2\n"
        "[integrator]\n"
        "dt = 0.5\n"
        "t_end = 50.0\n"
        "scheme = exponential_em\n"
        "seed = 42\n"
        "[noise]\n"
        "alpha = 4 4 4 4\n"
        "gamma = 1.5\n"
        "[experiment]\n"
        "estimator = moments\n"
        "paths = 4\n"
        "fit_samples = 500\n"
        "certify_samples = 200\n"
        "x0 = random 4.0\n"
        "[output]\n"
        "dir = " + (work_root() / "unused_out").string() + "\n");
    const fs::path out = fresh_dir("simulate_fault");
    const CliResult r = run_cli("simulate --config " + cfg + " --out " + out.string() +
                                " --allow-uncertified");
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 3);
    REQUIRE(r.err.find("integrator fault") != std::string::npos);
    REQUIRE(fs::exists(out / "fault.snap"));
    REQUIRE(fs::exists(out / "trajectory.csv")); // partial record is still written
}

TEST_CASE("estimate runs the moment estimator and honours overrides", "[cli]") {
    const std::string cfg = write_config("est.ini", base_config(kPassNoise, kMomentsExp));
    const fs::path a = fresh_dir("estimate_a");
    const CliResult r =
        run_cli("estimate --config " + cfg + " --out " + a.string() + " --paths 4");
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("moments: sup mean") != std::string::npos);
    REQUIRE(r.out.find("4 paths") != std::string::npos);
    const std::string json = read_file(a / "moments.json");
    REQUIRE(json.find("\"covered\": true") != std::string::npos);
    REQUIRE(data_rows(read_file(a / "moments.csv")) == 51);

    // A different master seed must change the sampled curve.
    const fs::path b = fresh_dir("estimate_b");
    const fs::path c = fresh_dir("estimate_c");
    const CliResult rb =
        run_cli("estimate --config " + cfg + " --out " + b.string() + " --seed 1");
    const CliResult rc =
        run_cli("estimate --config " + cfg + " --out " + c.string() + " --seed 2");
    REQUIRE(rb.code == 0);
    REQUIRE(rc.code == 0);
    REQUIRE(read_file(b / "moments.csv") != read_file(c / "moments.csv"));
}

TEST_CASE("estimate dispatches the occupation estimator from the zero state", "[cli]") {
    const std::string cfg = write_config(
        "occ.ini", base_config(kPassNoise,
                               "estimator = moments\npaths = 4\nthreads = 1\n"
                               "horizons = 0.02 0.04\nx0 = zero\n"));
    const fs::path out = fresh_dir("estimate_occ");
    const CliResult r = run_cli("estimate --config " + cfg + " --out " + out.string() +
                                " --estimator occupation");
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("occupation: functional bounded across 2 horizons") !=
            std::string::npos);
    REQUIRE(fs::exists(out / "occupation.csv"));
    REQUIRE(read_file(out / "occupation.json").find("\"bounded\": true") != std::string::npos);

    // The Krylov-Bogoliubov construction starts from zero; anything else is
    // a config error.
    const std::string bad = write_config(
        "occ_bad.ini", base_config(kPassNoise,
                                   "estimator = occupation\npaths = 4\n"
                                   "horizons = 0.02\nx0 = random 0.3\n"));
    REQUIRE(run_cli("estimate --config " + bad + " --out " + out.string()).code == 2);
}

TEST_CASE("estimate validates estimator-specific windows", "[cli]") {
    const std::string eps_bad = write_config(
        "eps_bad.ini", base_config(kPassNoise,
                                   "estimator = bootstrap\npaths = 4\neps = 0.2\nx0 = zero\n"));
    const fs::path out = fresh_dir("estimate_eps");
    const CliResult r = run_cli("estimate --config " + eps_bad + " --out " + out.string());
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("eps") != std::string::npos);
}

TEST_CASE("estimate refuses a stopping-dominated ensemble as a fault", "[cli]") {
    const std::string cfg = write_config(
        "refuse.ini",
        base_config(kPassNoise,
                    "estimator = moments\npaths = 4\nthreads = 1\nx0 = random 0.8\n",
                    "r_threshold = 0.1\n"));
    const fs::path out = fresh_dir("estimate_refuse");
    const CliResult r = run_cli("estimate --config " + cfg + " --out " + out.string());
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 3);
    REQUIRE(r.err.find("estimator refused") != std::string::npos);
}

TEST_CASE("uncertified estimates are marked not covered", "[cli]") {
    const std::string cfg = write_config(
        "decay_uncov.ini",
        "[truncation]\n"
        "n_max = 2\n"
        "[integrator]\n"
        "dt = 1e-3\n"
        "t_end = 0.05\n"
        "scheme = exponential_em\n"
        "seed = 42\n"
        "[noise]\n"
        "alpha = 0 0\n"
        "gamma = 1.5\n"
        "[experiment]\n"
        "estimator = decay\n"
        "paths = 4\n"
        "threads = 1\n"
        "check_times = 0.02 0.04\n"
        "fit_samples = 500\n"
        "certify_samples = 200\n"
        "x0 = zero\n"
        "[output]\n"
        "dir = " + (work_root() / "unused_out").string() + "\n");
    const fs::path out = fresh_dir("estimate_uncov");
    REQUIRE(run_cli("estimate --config " + cfg + " --out " + out.string()).code == 1);
    const CliResult r =
        run_cli("estimate --config " + cfg + " --out " + out.string() + " --allow-uncertified");
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("(not covered)") != std::string::npos);
    REQUIRE(read_file(out / "decay.json").find("\"covered\": false") != std::string::npos);
}

TEST_CASE("shipped default configuration certifies cleanly", "[cli]") {
    const std::string dir = env_or_fail("SGNS_CONFIG_DIR");
    const fs::path out = fresh_dir("certify_shipped");
    const CliResult r =
        run_cli("certify --config " + dir + "/default.ini --out " + out.string());
    CAPTURE(r.out, r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("certificates: all passed") != std::string::npos);
}
