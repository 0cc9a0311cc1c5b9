#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qoc/config.hpp"
#include "qoc/io.hpp"

using namespace qoc;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "qoc_cli_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(QOCTL_BINARY) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli rejects missing config and unknown subcommands", "[cli]") {
    CHECK(run_cli("eigen --config /nonexistent.ini") != 0);
    CHECK(run_cli("frobnicate") != 0);
    CHECK(run_cli("") != 0);  // a subcommand is required
}

TEST_CASE("cli eigen writes energy and dipole tables", "[cli]") {
    const fs::path d = work_dir("eigen");
    write_file(d / "run.ini",
               "[system]\n"
               "type = grid\n"
               "x_max = 10.0\n"
               "n_points = 64\n"
               "n_states = 3\n"
               "potential = harmonic\n"
               "omega = 1.0\n");
    REQUIRE(run_cli("eigen --config " + (d / "run.ini").string() + " --out " +
                    d.string()) == 0);

    const RMatrix en = read_matrix((d / "energies.tsv").string());
    REQUIRE(en.rows() == 3);
    // Harmonic oracle: uniform unit gaps.
    CHECK(en(0, 1) == Approx(0.5).margin(1e-4));
    CHECK(en(1, 2) == Approx(1.0).margin(1e-4));
    CHECK(en(2, 2) == Approx(2.0).margin(1e-4));

    const RMatrix mu = read_matrix((d / "dipoles.tsv").string());
    REQUIRE(mu.rows() == 6);  // upper triangle of a 3x3 table
    // <0|x|1> = 1/sqrt(2) for the harmonic oscillator; <0|x|0> = 0.
    bool saw01 = false;
    for (int r = 0; r < mu.rows(); ++r) {
        if (mu(r, 0) == 0 && mu(r, 1) == 1) {
            CHECK(std::abs(mu(r, 2)) == Approx(1.0 / std::sqrt(2.0)).margin(1e-4));
            saw01 = true;
        }
        if (mu(r, 0) == 0 && mu(r, 1) == 0)
            CHECK(mu(r, 2) == Approx(0.0).margin(1e-6));
    }
    CHECK(saw01);

    // Header carries the config hash of the echoed effective config.
    const RunConfig eff =
        RunConfig::parse_file((d / "config_effective.ini").string());
    const std::string head = slurp(d / "energies.tsv").substr(0, 64);
    CHECK(head.find(fnv1a_hex(eff.serialize())) != std::string::npos);
}

TEST_CASE("cli optimize runs a two-level inversion deterministically", "[cli]") {
    const fs::path d = work_dir("optimize");
    write_file(d / "run.ini",
               "[system]\n"
               "type = twolevel\n"
               "omega_a = 0.0\n"
               "omega_b = 0.1568\n"
               "mu = 0.3921\n"
               "t_final = 400.0\n"
               "dt = 0.1\n"
               "[target]\n"
               "initial_state = 0\n"
               "target_state = 1\n"
               "[optimizer]\n"
               "scheme = rapid\n"
               "alpha = 1.0\n"
               "guess = 0.05\n"
               "max_iterations = 5\n"
               "delta_J = 0\n"
               "[output]\n"
               "j1_floor = 0.9\n"
               "dump_stride = 400\n");
    const std::string base = " --config " + (d / "run.ini").string();
    REQUIRE(run_cli("optimize" + base + " --out " + (d / "a").string()) == 0);
    REQUIRE(run_cli("optimize" + base + " --out " + (d / "b").string()) == 0);

    for (const char* f :
         {"field.tsv", "spectrum.tsv", "convergence.tsv", "occupations.tsv",
          "summary.txt", "config_effective.ini"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(d / "a" / f));
        // Byte-identical across reruns: the pipeline is deterministic.
        // (Only the wall-clock line in the summary may differ.)
        auto strip_timing = [](std::string text) {
            const auto pos = text.find("wall_seconds");
            if (pos != std::string::npos) {
                const auto end = text.find('\n', pos);
                text.erase(pos, end == std::string::npos ? std::string::npos
                                                         : end - pos + 1);
            }
            return text;
        };
        CHECK(strip_timing(slurp(d / "a" / f)) ==
              strip_timing(slurp(d / "b" / f)));
    }

    const RMatrix conv = read_matrix((d / "a" / "convergence.tsv").string());
    REQUIRE(conv.rows() >= 5);
    REQUIRE(conv.cols() == 7);  // iteration J1 J2 J3 J fluence alpha
    CHECK(conv(conv.rows() - 1, 1) > 0.9);  // J1 column
    const RMatrix occ = read_matrix((d / "a" / "occupations.tsv").string());
    REQUIRE(occ.cols() == 3);  // t p0 p1
    // Populations are conserved along the stored trajectory.
    for (int r = 0; r < occ.rows(); ++r)
        CHECK(occ(r, 1) + occ(r, 2) == Approx(1.0).margin(1e-8));

    // The exit code reflects the yield floor.
    write_file(d / "hard.ini", slurp(d / "run.ini") + "\n[output]\nj1_floor = 0.99999999\n");
    CHECK(run_cli("optimize --config " + (d / "hard.ini").string() + " --out " +
                  (d / "c").string()) == 1);
}

TEST_CASE("cli twolevel emits the comparison table", "[cli]") {
    const fs::path d = work_dir("twolevel");
    write_file(d / "run.ini",
               "[twolevel]\n"
               "omega_b = 0.1568\n"
               "mu = 0.3921\n"
               "T_list = 400, 40\n"
               "dt = 0.01\n"
               "oct = false\n");
    REQUIRE(run_cli("twolevel --config " + (d / "run.ini").string() +
                    " --out " + d.string()) == 0);
    const RMatrix tab = read_matrix((d / "twolevel.tsv").string());
    REQUIRE(tab.rows() == 2);
    REQUIRE(tab.cols() == 5);
    CHECK(tab(0, 0) == 400.0);
    CHECK(tab(0, 1) == Approx(0.9986).margin(5e-3));  // P_RWA
    CHECK(tab(1, 1) == Approx(0.8567).margin(5e-3));
    // OCT columns are nan when disabled.
    CHECK(std::isnan(tab(0, 2)));

    // An empty T list still produces a valid header-only table, exit 0.
    write_file(d / "empty.ini",
               "[twolevel]\n"
               "omega_b = 0.1568\n"
               "mu = 0.3921\n"
               "T_list =\n"
               "oct = false\n");
    REQUIRE(run_cli("twolevel --config " + (d / "empty.ini").string() +
                    " --out " + (d / "empty").string()) == 0);
    const std::string text = slurp(d / "empty" / "twolevel.tsv");
    CHECK(text.find("P_RWA") != std::string::npos);
    CHECK_THROWS_AS(read_matrix((d / "empty" / "twolevel.tsv").string()),
                    Error);  // no numeric rows
}

TEST_CASE("cli controllability reports rank and verdict", "[cli]") {
    const fs::path d = work_dir("controllability");
    write_file(d / "ctrl.ini",
               "[system]\n"
               "h0 = 0 0; 0 0.1568\n"
               "dipole = 0 0.3921; 0.3921 0\n");
    REQUIRE(run_cli("controllability --config " + (d / "ctrl.ini").string() +
                    " --out " + d.string()) == 0);
    const std::string verdict = slurp(d / "controllability.txt");
    CHECK(verdict.find("rank 4 of 4") != std::string::npos);
    CHECK(verdict.find("completely controllable") != std::string::npos);

    write_file(d / "traceless.ini",
               "[system]\n"
               "h0 = -0.0784 0; 0 0.0784\n"
               "dipole = 0 0.3921; 0.3921 0\n");
    REQUIRE(run_cli("controllability --config " +
                    (d / "traceless.ini").string() + " --out " +
                    (d / "t").string()) == 0);
    const std::string v2 = slurp(d / "t" / "controllability.txt");
    CHECK(v2.find("rank 3 of 4") != std::string::npos);
    CHECK(v2.find("not completely controllable") != std::string::npos);
}

TEST_CASE("cli recipes parse cleanly", "[cli]") {
    // Every shipped recipe must at least parse and name a scheme the CLI
    // understands; running them is the acceptance suite's job.
    for (const auto& entry : fs::directory_iterator(QOC_RECIPE_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(RunConfig::parse_file(entry.path().string()));
    }
}
