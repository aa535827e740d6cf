#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qlat/errors.hpp"
#include "qlat/harness.hpp"
#include "qlat/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace qlat;

namespace {

const std::string FX = QLAT_FIXTURES;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, const std::string& out_file) {
    std::string cmd = "./qlat " + args + " >" + out_file + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("lattice and point loaders") {
    auto lat = load_lattice(FX + "/l5.lat");
    CHECK(lat.rank() == 5);
    CHECK(lat.det() == 2);
    CHECK(lat.signature() == std::pair<int, int>{3, 2});
    auto pt = load_period_point(lat, FX + "/l5.pt");
    CHECK(lat.quad(pt.u()) == doctest::Approx(-1.0).epsilon(1e-12));

    auto u6 = load_lattice(FX + "/u6.lat");
    CHECK(u6.det() == -1);
    CHECK_THROWS_AS(load_lattice(FX + "/nonexistent.lat"), input_error);
}

TEST_CASE("config parsing") {
    std::string path = "test_config_tmp.cfg";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "lattice = " << FX << "/l5.lat\n";
        out << "point = " << FX << "/l5.pt\n";
        out << "chains = a.cm, b.cm\n";
        out << "D = 2\n";
        out << "jmax = 9   # trailing comment\n";
        out << "kappa = 0.25\n";
    }
    auto cfg = ExperimentConfig::from_file(path);
    CHECK(cfg.D == 2);
    CHECK(cfg.jmax == 9);
    CHECK(cfg.kappa == 0.25);
    REQUIRE(cfg.chain_paths.size() == 2);
    CHECK(cfg.chain_paths[1] == "b.cm");
    std::remove(path.c_str());
}

TEST_CASE("real formatting is 12 significant digits") {
    CHECK(format_real(368.49999999) == "368.49999999");
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(-1.0 / 3.0) == "-0.333333333333");
}

TEST_CASE("csv writer stamps a config hash and enforces width") {
    std::ostringstream os;
    CsvWriter csv(os, "some config", {"a", "b"});
    csv.row({"1", "2"});
    std::string out = os.str();
    CHECK(out.find("# config ") == 0);
    CHECK(out.find("a,b\n1,2\n") != std::string::npos);
    CHECK_THROWS_AS(csv.row({"only-one"}), error);
}

TEST_CASE("cli: density exact rational output") {
    int rc = run_cli("density --lattice " + FX + "/l5.lat --p 3 --m 1 --n 1",
                     "cli_out1.txt");
    CHECK(rc == 0);
    CHECK(slurp("cli_out1.txt") == "10/9\n");
    std::remove("cli_out1.txt");
}

TEST_CASE("cli: brute and recursion methods agree") {
    run_cli("density --lattice " + FX + "/l5.lat --p 2 --m 6 --n 3 --method brute",
            "cli_b.txt");
    run_cli("density --lattice " + FX + "/l5.lat --p 2 --m 6 --n 3", "cli_r.txt");
    CHECK(slurp("cli_b.txt") == slurp("cli_r.txt"));
    std::remove("cli_b.txt");
    std::remove("cli_r.txt");
}

TEST_CASE("cli: density verify emits matching rows") {
    int rc = run_cli("density verify --lattice " + FX + "/u6.lat --pmax 3 --mmax 4",
                     "cli_v.txt");
    CHECK(rc == 0);
    std::string out = slurp("cli_v.txt");
    CHECK(out.find("p,m,n,mu_num,mu_den,brute_match,deviation") != std::string::npos);
    CHECK(out.find(",0,") != std::string::npos);    // n = 0 rows exist
    // no mismatches anywhere
    std::istringstream is(out);
    std::string line;
    std::getline(is, line);   // comment
    std::getline(is, line);   // header
    while (std::getline(is, line)) {
        auto pos = line.rfind(",0\n");
        CHECK(line.find(",0,0") == std::string::npos);  // brute_match never 0
    }
    std::remove("cli_v.txt");
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli("density --lattice /does/not/exist --p 3 --m 1 --n 1",
                  "cli_e.txt") == 2);
    // budget exceeded -> 3
    CHECK(run_cli("count --lattice " + FX + "/l5.lat --point " + FX
                      + "/l5.pt --m 100000000 --T 3",
                  "cli_e.txt") == 3);
    std::remove("cli_e.txt");
}

TEST_CASE("cli: green row has the documented columns") {
    int rc = run_cli("green --lattice " + FX + "/l5.lat --point " + FX
                         + "/l5.pt --m 9 --D 1 --shellmax 8",
                     "cli_g.txt");
    CHECK(rc == 0);
    std::string out = slurp("cli_g.txt");
    CHECK(out.find("m,count,A,A_mt,A_er,phi_tilde,R_x,Phi,uncertainty")
          != std::string::npos);
    std::remove("cli_g.txt");
}

TEST_CASE("cli: chain emits per-level rows and the intersection number") {
    int rc = run_cli("chain --model " + FX + "/chain_zero.cm --m 1", "cli_c.txt");
    CHECK(rc == 0);
    std::string out = slurp("cli_c.txt");
    CHECK(out.find("n,mu_1,mu_2,mu_3,mu_4,mu_5,a_r,count") != std::string::npos);
    CHECK(out.find("# local_intersection 10/1") != std::string::npos);
    std::remove("cli_c.txt");
}

TEST_CASE("ledger: byte-identical reruns and residual bookkeeping") {
    ExperimentConfig cfg;
    cfg.lattice_path = FX + "/l5.lat";
    cfg.point_path = FX + "/l5.pt";
    cfg.chain_paths = {FX + "/chain_zero.cm"};
    cfg.jmin = 3;
    cfg.jmax = 6;
    cfg.shellmax = 6;
    cfg.P_trunc = 100;
    std::ostringstream a, b;
    auto ra = run_ledger(cfg, &a);
    auto rb = run_ledger(cfg, &b);
    CHECK(a.str() == b.str());
    REQUIRE(ra.rows.size() == 4);
    for (const auto& row : ra.rows) {
        CHECK(row.residual
              == doctest::Approx(row.archimedean_sum + row.finite_sum
                                 - row.height_estimate).epsilon(1e-12));
    }
    CHECK(!ra.windows.empty());
    // empty range: header-only output
    cfg.jmin = 5;
    cfg.jmax = 4;
    std::ostringstream c;
    auto rc = run_ledger(cfg, &c);
    CHECK(rc.rows.empty());
    std::string text = c.str();
    int lines = 0;
    for (char ch : text) lines += (ch == '\n');
    CHECK(lines == 2);   // comment + header
}
