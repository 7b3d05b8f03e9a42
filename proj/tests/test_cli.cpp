#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "entlab/io.hpp"

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(ENTLAB_CLI_PATH) + " " + args +
                            " > /tmp/entlab_cli_stdout.txt 2>/tmp/entlab_cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("examples list exits cleanly and names the families") {
    CHECK(run("examples list") == 0);
    const std::string out = slurp("/tmp/entlab_cli_stdout.txt");
    CHECK(out.find("bpsv") != std::string::npos);
    CHECK(out.find("ou_t_eps") != std::string::npos);
}

TEST_CASE("simulate writes an ensemble and a report") {
    CHECK(run("simulate --example ou --s -5 --t 0 --paths 500 --step 0.01 "
              "--seed 3 --out /tmp/entlab_cli_sim") == 0);
    const std::string rep = slurp("/tmp/entlab_cli_sim/report.txt");
    CHECK(rep.find("second_moment") != std::string::npos);
    const std::string csv = slurp("/tmp/entlab_cli_sim/ensemble.csv");
    CHECK(csv.find("path_index,x0") != std::string::npos);
}

TEST_CASE("replay determinism of artifacts") {
    CHECK(run("simulate --example bpsv --s -2 --t 0 --paths 200 --step 0.01 "
              "--seed 7 --out /tmp/entlab_cli_rep1") == 0);
    CHECK(run("simulate --example bpsv --s -2 --t 0 --paths 200 --step 0.01 "
              "--seed 7 --out /tmp/entlab_cli_rep2") == 0);
    CHECK(slurp("/tmp/entlab_cli_rep1/ensemble.csv") ==
          slurp("/tmp/entlab_cli_rep2/ensemble.csv"));
}

TEST_CASE("contract subcommand produces a certificate report") {
    {
        std::ofstream out("/tmp/entlab_cli_schedule.csv");
        out << "t_hi,t_lo,gamma,K,eta\n";
        for (int i = 1; i <= 12; ++i)
            out << -(i - 1) << "," << -i << ",0.9,1.0,0.5\n";
    }
    CHECK(run("contract --schedule /tmp/entlab_cli_schedule.csv --delta 0.2 "
              "--R 30 --varpi 0.9 --gamma-star 0.92 --out /tmp/entlab_cli_con") == 0);
    const std::string rep = slurp("/tmp/entlab_cli_con/report.txt");
    CHECK(rep.find("[PASS] theorem conditions") != std::string::npos);
    CHECK(rep.find("r = ") != std::string::npos);
}

TEST_CASE("malformed configuration exits with status 2") {
    CHECK(run("quasi --c1 1 --c2 1") == 2);  // missing periods
    CHECK(run("simulate --no-such-flag 1") == 2);
    CHECK(run("simulate --drift \"x -\" --sigma 1") == 2);  // parse error
    CHECK(run("contract --schedule /tmp/entlab_missing.csv") != 0);
}

TEST_CASE("symbolic coefficients drive the simulator") {
    CHECK(run("simulate --drift \"-x\" --sigma 1 --alpha \"-1\" --s -4 --t 0 "
              "--paths 2000 --step 0.01 --seed 5 --out /tmp/entlab_cli_sym") == 0);
    const std::string rep = slurp("/tmp/entlab_cli_sym/report.txt");
    CHECK(rep.find("second_moment") != std::string::npos);
}
