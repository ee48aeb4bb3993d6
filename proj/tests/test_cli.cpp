#include "lapeig/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "lapeig_test_cli";

int run(const std::string& args)
{
    const std::string cmd = std::string(LAPEIG_CLI_PATH) + " " + args + " >" + (work / "stdout.txt").string() +
                            " 2>" + (work / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Fresh {
    Fresh()
    {
        fs::remove_all(work);
        fs::create_directories(work);
    }
};

} // namespace

TEST_CASE_FIXTURE(Fresh, "eigs of a constant coefficient")
{
    REQUIRE(run("eigs --coeff constant:2 --cells 4 --out " + (work / "e").string()) == 0);
    const auto t = lapeig::io::read_csv((work / "e" / "eigenvalues.csv").string());
    const auto l = t.values("lambda");
    CHECK(l.size() == 9);
    for (double v : l)
        CHECK(v == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE_FIXTURE(Fresh, "pair with audit on p4")
{
    REQUIRE(run("pair --coeff p4 --cells 10 --audit --out " + (work / "p").string()) == 0);
    const auto t = lapeig::io::read_csv((work / "p" / "violations.csv").string());
    CHECK_FALSE(t.rows.empty());
    CHECK(fs::exists(work / "p" / "pairing.csv"));
}

TEST_CASE_FIXTURE(Fresh, "validation errors exit with 1")
{
    CHECK(run("eigs --bogus") == 1);
    CHECK(run("eigs --cells 0") == 1);
    CHECK(run("eigs --coeff nope") == 1);
    CHECK(run("pair --eps 1.5") == 1);
    CHECK(run("report no-such-scenario") == 1);
    CHECK(run("") == 1);
    CHECK(slurp(work / "stderr.txt").size() > 0);
}

TEST_CASE_FIXTURE(Fresh, "numerical failures exit with 2")
{
    std::ofstream(work / "neg.csv") << "0,1\n1,-1\n";
    // a coefficient that is not positive is rejected on input
    CHECK(run("eigs --cells 1 --coeff csv:" + (work / "neg.csv").string()) == 1);
    // finite coefficients whose stiffness entries overflow
    std::ofstream big(work / "big.csv");
    for (int t = 0; t < 32; ++t)
        big << t << "," << (t % 2 ? "1e308" : "1") << "\n";
    big.close();
    CHECK(run("eigs --cells 4 --coeff csv:" + (work / "big.csv").string()) == 2);
    CHECK(slurp(work / "stderr.txt").find("numerical failure") != std::string::npos);
}

TEST_CASE_FIXTURE(Fresh, "help lists flags and defaults")
{
    for (const char* sub : {"mesh", "assemble", "eigs", "pair", "bounds", "pcg", "report", "check"}) {
        CHECK(run(std::string(sub) + " --help") == 0);
        const std::string out = slurp(work / "stdout.txt");
        CHECK(out.find("--") != std::string::npos);
    }
    run("pcg --help");
    const std::string h = slurp(work / "stdout.txt");
    CHECK(h.find("--tau") != std::string::npos);
    CHECK(h.find("0.01") != std::string::npos);
    CHECK(h.find("--max-iter") != std::string::npos);
}

TEST_CASE_FIXTURE(Fresh, "mesh, assemble, bounds and pcg outputs")
{
    const std::string out = " --out " + (work / "o").string();
    CHECK(run("mesh --cells 3" + out) == 0);
    CHECK(slurp(work / "o" / "mesh.txt").rfind("nodes 16 triangles 18 boundary 12", 0) == 0);
    CHECK(run("assemble --coeff p1 --cells 4" + out) == 0);
    CHECK(fs::exists(work / "o" / "A.mtx"));
    CHECK(fs::exists(work / "o" / "L.mtx"));
    CHECK(fs::exists(work / "o" / "b.txt"));
    CHECK(run("bounds --coeff p2 --cells 6" + out) == 0);
    CHECK(lapeig::io::read_csv((work / "o" / "bounds.csv").string()).rows.size() == 25);
    CHECK(run("pcg --coeff quadrant --cells 8" + out) == 0);
    CHECK(fs::exists(work / "o" / "trace_laplace.csv"));
    CHECK(fs::exists(work / "o" / "distribution_ichol.csv"));
    CHECK(fs::exists(work / "o" / "ritz_laplace.csv"));
}

TEST_CASE_FIXTURE(Fresh, "report and output directory from the environment")
{
    const std::string env = "LAPEIG_OUT=" + (work / "env").string() + " ";
    const std::string cmd = env + std::string(LAPEIG_CLI_PATH) + " report quadrant-cg --cells 8 --no-plots >/dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    const std::string report = slurp(work / "env" / "quadrant-cg" / "report.json");
    CHECK(report.find("lapeig.report/1") != std::string::npos);
}

TEST_CASE_FIXTURE(Fresh, "same seed, same output")
{
    REQUIRE(run("pair --coeff random --seed 4 --cells 5 --out " + (work / "a").string()) == 0);
    REQUIRE(run("pair --coeff random --seed 4 --cells 5 --out " + (work / "b").string()) == 0);
    CHECK(slurp(work / "a" / "pairing.csv") == slurp(work / "b" / "pairing.csv"));
}
