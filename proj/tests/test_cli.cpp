// Command-line front end: exit codes, frozen numeric output, formats,
// determinism. Everything runs in-process through cli::run.
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "sphkep/cli.hpp"

namespace {

struct CliResult {
    int code{0};
    std::string out;
    std::string err;
};

CliResult run_cli(std::initializer_list<const char*> args)
{
    std::vector<const char*> argv{"sphkep"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    CliResult r;
    r.code = sphkep::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

bool contains(const std::string& hay, const std::string& needle)
{
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("period: frozen value at zero energy")
{
    const CliResult r = run_cli({"period", "--energy", "0"});
    CHECK(r.code == 0);
    CHECK(r.out == "3.1415926535897931\n");
    CHECK(r.err.empty());

    // The same period reached through the circular member (a = 1, e = 0).
    const CliResult b = run_cli({"period", "--a", "1", "--e", "0"});
    CHECK(b.code == 0);
    CHECK(b.out == "3.1415926535897931\n");
}

TEST_CASE("scalar commands print seventeen significant digits")
{
    CHECK(run_cli({"energy", "--a", "2", "--e", "0.9"}).out == "-0.060000000000000053\n");
    CHECK(run_cli({"theta-a", "--energy", "0"}).out == "1.5707963267948966\n");
    CHECK(run_cli({"tof-flat", "--a", "1", "--e", "0", "--u1", "0", "--u2",
                   "3.141592653589793"})
              .out
          == "3.1415926535897931\n");
    CHECK(run_cli({"tof-sphere", "--a", "1", "--e", "0", "--u1", "0", "--u2", "1"}).out
          == "0.5\n");
}

TEST_CASE("json output carries the schema marker")
{
    const CliResult r = run_cli({"period", "--energy", "0", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "\"schema\": \"v1\""));
    CHECK(contains(r.out, "\"command\": \"period\""));
    CHECK(contains(r.out, "3.1415926535897931"));

    const CliResult e = run_cli({"energy", "--a", "1", "--e", "0.5", "--format", "json"});
    CHECK(contains(e.out, "\"energy\": -0.125"));
}

TEST_CASE("usage errors exit 1 with a single-line message")
{
    // Missing required option.
    CliResult r = run_cli({"period"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "error"));

    // Mutually exclusive options.
    r = run_cli({"period", "--energy", "0", "--a", "1"});
    CHECK(r.code == 1);

    // Unknown flag, unknown subcommand, no subcommand.
    CHECK(run_cli({"period", "--energy", "0", "--frobnicate"}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({}).code == 1);

    // csv makes no sense for scalar results.
    r = run_cli({"energy", "--a", "1", "--e", "0", "--format", "csv"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "csv"));

    // Domain validation surfaces as a usage error, not a crash.
    CHECK(run_cli({"tof-flat", "--a", "-1", "--e", "0", "--u1", "0", "--u2", "1"}).code == 1);
    CHECK(run_cli({"energy", "--a", "1", "--e", "1.5"}).code == 1);
}

TEST_CASE("help exits zero")
{
    const CliResult top = run_cli({"--help"});
    CHECK(top.code == 0);
    CHECK(contains(top.out, "period"));
    CHECK(contains(top.out, "scan"));

    const CliResult sub = run_cli({"period", "--help"});
    CHECK(sub.code == 0);
    CHECK(contains(sub.out, "--energy"));
}

TEST_CASE("lambert: branches, csv layout, infeasible geometry")
{
    const CliResult r = run_cli({"lambert", "--sum", "2", "--chord", "2", "--a", "1"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "transit=3.1415926535897931"));

    const CliResult csv = run_cli({"lambert", "--sum", "2", "--chord", "2", "--a", "1",
                                   "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out.rfind("phi,psi,transit,chord_sign,revolutions\n", 0) == 0);

    // Geometry no ellipse of this a can satisfy: numerical failure, exit 2.
    const CliResult bad = run_cli({"lambert", "--sum", "10", "--chord", "1", "--a", "1"});
    CHECK(bad.code == 2);
    CHECK(contains(bad.err, "error"));
}

TEST_CASE("verify runs clean and reports per-check lines")
{
    const CliResult r = run_cli({"verify"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "checks passed"));
    CHECK(contains(r.out, "PASS"));
    CHECK(!contains(r.out, "FAIL"));

    const CliResult j = run_cli({"verify", "--format", "json"});
    CHECK(j.code == 0);
    CHECK(contains(j.out, "\"all_passed\": true"));
}

TEST_CASE("orbit-sim: summary fields and csv dump")
{
    const CliResult j = run_cli({"orbit-sim", "--a", "1.2", "--e", "0.3", "--revolutions",
                                 "0.25", "--format", "json"});
    CHECK(j.code == 0);
    CHECK(contains(j.out, "\"energy_drift\": "));
    CHECK(contains(j.out, "\"kepler_residual\": "));
    CHECK(!contains(j.out, "null"));

    // A zero-length run cannot report a residual.
    const CliResult z = run_cli({"orbit-sim", "--a", "1", "--t-end", "0", "--dt-max", "1",
                                 "--format", "json"});
    CHECK(z.code == 0);
    CHECK(contains(z.out, "\"samples\": 1"));
    CHECK(contains(z.out, "\"kepler_residual\": null"));

    const std::string path = "/tmp/sphkep_test_orbit.csv";
    const CliResult c = run_cli({"orbit-sim", "--a", "1", "--e", "0.2", "--revolutions",
                                 "0.1", "--out", path.c_str()});
    CHECK(c.code == 0);
    CHECK(contains(c.out, "samples="));
    std::ifstream file(path);
    std::string header;
    std::getline(file, header);
    CHECK(header == "t,tau,qx,qy,qz,Qx,Qy");
    std::remove(path.c_str());
}

TEST_CASE("scan: deterministic reports in every format")
{
    const CliResult a = run_cli({"scan", "--energy", "0", "--samples", "25", "--seed", "3",
                                 "--candidate", "theta-sum"});
    CHECK(a.code == 0);
    CHECK(contains(a.out, "energy=0 candidate=theta-sum"));
    CHECK(contains(a.out, "bins="));

    const CliResult b = run_cli({"scan", "--energy", "0", "--samples", "25", "--seed", "3",
                                 "--candidate", "theta-sum"});
    CHECK(a.out == b.out);

    const CliResult j = run_cli({"scan", "--energy", "0", "--energy", "1", "--samples", "20",
                                 "--seed", "3", "--candidate", "theta-sum", "--format",
                                 "json"});
    CHECK(j.code == 0);
    CHECK(contains(j.out, "\"reports\": ["));
    CHECK(contains(j.out, "\"planted_partners\": true"));
    CHECK(contains(j.out, "\"classification\": "));

    const CliResult c = run_cli({"scan", "--energy", "0", "--samples", "20", "--seed", "3",
                                 "--candidate", "cosine-sum", "--format", "csv"});
    CHECK(c.code == 0);
    CHECK(c.out.rfind("energy,candidate,samples,bins,max_spread,classification\n", 0) == 0);
}

TEST_CASE("scan: custom expression candidates and input validation")
{
    const CliResult r = run_cli({"scan", "--energy", "0", "--samples", "15", "--seed", "5",
                                 "--f", "t1+t2", "--g", "t12", "--name", "custom"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "candidate=custom"));

    CHECK(run_cli({"scan", "--energy", "0", "--candidate", "nope"}).code == 1);
    // Malformed expression is a usage error.
    CHECK(run_cli({"scan", "--energy", "0", "--f", "tan(", "--g", "t12", "--name", "x"}).code
          == 1);
    // Asymmetric expression rejected unless explicitly allowed.
    CHECK(run_cli({"scan", "--energy", "0", "--samples", "15", "--f", "t1", "--g", "t12",
                   "--name", "x"})
              .code
          == 1);
    CHECK(run_cli({"scan", "--energy", "0", "--samples", "15", "--f", "t1", "--g", "t12",
                   "--name", "x", "--allow-asymmetric"})
              .code
          == 0);

    // Sparse purely random sampling produces no shared bins: numerical
    // failure rather than a made-up report.
    CHECK(run_cli({"scan", "--energy", "0", "--samples", "10", "--seed", "1", "--raw",
                   "--candidate", "theta-sum"})
              .code
          == 2);

    // csv dump wants exactly one (energy, candidate) pair.
    CHECK(run_cli({"scan", "--energy", "0", "--energy", "1", "--candidate", "theta-sum",
                   "--csv", "/tmp/sphkep_scan.csv"})
              .code
          == 1);
}
