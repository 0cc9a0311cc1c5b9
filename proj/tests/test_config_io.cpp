#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qoc/config.hpp"
#include "qoc/field.hpp"
#include "qoc/io.hpp"

using namespace qoc;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path d = fs::temp_directory_path() / "qoc_io_tests";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("config parsing basics", "[config]") {
    const RunConfig cfg = RunConfig::parse_string(
        "# a comment\n"
        "[system]\n"
        "t_final = 400.0   ; trailing comment\n"
        "  n_points=512\n"
        "flag = true\n"
        "freqs = 0.15, 0.54 , 0.70\n"
        "\n"
        "[target]\n"
        "kind = projection\n");
    CHECK(cfg.get("system", "t_final") == "400.0");
    CHECK(cfg.get_double("system", "t_final") == Approx(400.0));
    CHECK(cfg.get_int("system", "n_points") == 512);
    CHECK(cfg.get_bool("system", "flag", false));
    const auto freqs = cfg.get_list("system", "freqs");
    REQUIRE(freqs.size() == 3);
    CHECK(freqs[1] == Approx(0.54));
    CHECK(cfg.has("target", "kind"));
    CHECK_FALSE(cfg.has("target", "missing"));
    CHECK(cfg.get("target", "missing", "fallback") == "fallback");
    CHECK(cfg.get_double("target", "missing", 7.5) == 7.5);
}

TEST_CASE("config parse errors carry origin and line", "[config]") {
    try {
        RunConfig::parse_string("[system]\nbroken line without equals\n", "x.ini");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("x.ini:2") != std::string::npos);
    }
    CHECK_THROWS_AS(RunConfig::parse_string("key = before section\n"), Error);
    CHECK_THROWS_AS(RunConfig::parse_string("[system\n"), Error);
    const RunConfig cfg =
        RunConfig::parse_string("[a]\nx = nan-ish garbage\nn = 1.5\n");
    CHECK_THROWS_AS(cfg.get_double("a", "x"), Error);
    CHECK_THROWS_AS(cfg.get_int("a", "n"), Error);
    CHECK_THROWS_AS(cfg.get("a", "missing"), Error);
    const RunConfig b = RunConfig::parse_string("[a]\nflag = maybe\n");
    CHECK_THROWS_AS(b.get_bool("a", "flag", true), Error);
}

TEST_CASE("config serialization round-trips", "[config]") {
    RunConfig cfg = RunConfig::parse_string(
        "[zeta]\nb = 2\na = 1\n[alpha]\nk = v\n");
    const std::string text = cfg.serialize();
    const RunConfig again = RunConfig::parse_string(text);
    CHECK(again == cfg);
    // Canonical form sorts sections and keys, so the hash is stable.
    CHECK(fnv1a_hex(text) == fnv1a_hex(again.serialize()));
    cfg.set("alpha", "k2", "v2");
    CHECK_FALSE(again == cfg);
    CHECK(fnv1a_hex(text) != fnv1a_hex(cfg.serialize()));
}

TEST_CASE("fnv1a hash has the reference value", "[config]") {
    // Known FNV-1a 64-bit test vectors.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("tsv writer emits headers and lossless floats", "[io]") {
    const fs::path p = temp_dir() / "writer.tsv";
    {
        TsvWriter w(p.string(), "deadbeef01234567", {"t", "value"});
        w.row({1.0, 0.1234567890123456789});
        w.row(std::vector<double>{2.0, 1e-300});
    }
    std::ifstream in(p);
    std::string l1, l2, l3, l4;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    std::getline(in, l4);
    CHECK(l1 == "# config deadbeef01234567");
    CHECK(l2 == "#\tt\tvalue");
    double t = 0.0, v = 0.0;
    CHECK(std::sscanf(l3.c_str(), "%lg%lg", &t, &v) == 2);
    CHECK(v == 0.1234567890123456789);  // 17 significant digits round-trip
    CHECK(std::sscanf(l4.c_str(), "%lg%lg", &t, &v) == 2);
    CHECK(v == 1e-300);
}

TEST_CASE("field and spectrum writers produce readable tables", "[io]") {
    TimeGrid tg(8.0, 0.5);
    ControlField f = ControlField::from_function(
        tg, [](double t) { return std::sin(t); });
    const fs::path pf = temp_dir() / "field.tsv";
    const fs::path ps = temp_dir() / "spectrum.tsv";
    write_field_tsv(pf.string(), "0", f);
    write_spectrum_tsv(ps.string(), "0", spectrum(f));

    const RMatrix field_tab = read_matrix(pf.string());
    REQUIRE(field_tab.rows() == tg.n_steps);
    REQUIRE(field_tab.cols() == 2);
    CHECK(field_tab(3, 0) == Approx(1.5));
    CHECK(field_tab(3, 1) == Approx(std::sin(1.5)));

    const RMatrix spec_tab = read_matrix(ps.string());
    REQUIRE(spec_tab.rows() == tg.n_steps);
    REQUIRE(spec_tab.cols() == 4);
    // Frequencies ascend and |.|^2 column is consistent.
    for (int r = 1; r < spec_tab.rows(); ++r)
        CHECK(spec_tab(r, 0) > spec_tab(r - 1, 0));
    for (int r = 0; r < spec_tab.rows(); ++r)
        CHECK(spec_tab(r, 3) ==
              Approx(spec_tab(r, 1) * spec_tab(r, 1) +
                     spec_tab(r, 2) * spec_tab(r, 2))
                  .margin(1e-12));
}

TEST_CASE("matrix reader and literal parser", "[io]") {
    const fs::path p = temp_dir() / "matrix.txt";
    {
        std::ofstream out(p);
        out << "# two-level dipole\n";
        out << "0 0.3921\n";
        out << "0.3921 0  # trailing comment\n";
    }
    const RMatrix m = read_matrix(p.string());
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    CHECK(m(0, 1) == Approx(0.3921));

    const RMatrix lit = parse_matrix("0 0.5; 0.5 0");
    CHECK(lit(1, 0) == Approx(0.5));
    CHECK_THROWS_AS(parse_matrix("1 2; 3"), Error);
    CHECK_THROWS_AS(parse_matrix(""), Error);
    CHECK_THROWS_AS(read_matrix((temp_dir() / "nope.txt").string()), Error);
    {
        std::ofstream out(p);
        out << "1 2\n3\n";
    }
    CHECK_THROWS_AS(read_matrix(p.string()), Error);
}
