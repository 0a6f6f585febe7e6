#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fgml/fgm_library.hpp"
#include "fgml/rng.hpp"
#include "helpers.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace fgml;
using namespace fgml::fgm;
using fgml_test::bundled_mech;
using fgml_test::methane_air_bc;

namespace {

FlameletLibrary table4_library() {
    static FlameletLibrary lib = [] {
        const auto& m = bundled_mech();
        auto bc = methane_air_bc(m);
        double z_st = flamelet::stoichiometric_mixture_fraction(m, bc);
        auto grid = flamelet::Grid::clustered(30, z_st, 4.0);
        return tabulate(m, bc, grid, {0.01, 5.5, 10.0, 14.5, 20.5, 25.0, 29.5}, {});
    }();
    return lib;
}

Dataset random_dataset(std::size_t rows, std::size_t targets, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.input_names = {"Z", "chi"};
    for (std::size_t t = 0; t < targets; ++t) ds.target_names.push_back("t" + std::to_string(t));
    for (std::size_t r = 0; r < rows; ++r) {
        ds.inputs.push_back({rng.uniform(-10, 10), rng.uniform(-1e6, 1e6)});
        std::vector<double> row(targets);
        for (auto& v : row) v = rng.uniform(-1e9, 1e9) * std::pow(10.0, rng.uniform(-12, 12));
        ds.targets.push_back(std::move(row));
    }
    return ds;
}

} // namespace

TEST_CASE("tabulate: the default seven-chi sweep gives 7 entries, 30 points, 210 rows") {
    auto lib = table4_library();
    CHECK(lib.entries.size() == 7);
    CHECK(lib.grid.size() == 30);
    auto ds = flatten(lib);
    CHECK(ds.size() == 210);
    CHECK(ds.target_names.size() == 8); // T + 7 species
    CHECK(ds.target_names[0] == "T");
    CHECK(ds.target_names[1] == "CH4");
    CHECK(ds.target_names.back() == "N2");
}

TEST_CASE("tabulate: single chi gives a single-entry library") {
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    auto grid = flamelet::Grid::clustered(30, flamelet::stoichiometric_mixture_fraction(m, bc), 4.0);
    auto lib = tabulate(m, bc, grid, {5.0}, {});
    CHECK(lib.entries.size() == 1);
    CHECK(lib.entries[0].chi_st == 5.0);
}

TEST_CASE("tabulate input validation") {
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    auto grid = flamelet::Grid::uniform(10);
    CHECK_THROWS_AS(tabulate(m, bc, grid, {}, {}), LibraryError);
    CHECK_THROWS_AS(tabulate(m, bc, grid, {5.0, 4.0}, {}), LibraryError);
    CHECK_THROWS_AS(tabulate(m, bc, grid, {-1.0}, {}), LibraryError);
}

TEST_CASE("flatten is a bijection in (chi, Z) order") {
    auto lib = table4_library();
    auto ds = flatten(lib);
    std::set<std::pair<double, double>> seen;
    double prev_chi = -1.0;
    std::size_t i = 0;
    for (const auto& in : ds.inputs) {
        seen.insert({in[1], in[0]});
        CHECK(in[1] >= prev_chi); // ascending chi blocks
        if (i % lib.grid.size() == 0) prev_chi = in[1];
        ++i;
    }
    CHECK(seen.size() == ds.size()); // no duplicates
}

TEST_CASE("flatten of a frozen-chemistry entry keeps T linear in Z") {
    auto m = bundled_mech();
    m.reactions.clear();
    auto bc = methane_air_bc(m);
    auto grid = flamelet::Grid::uniform(20);
    auto lib = tabulate(m, bc, grid, {2.0}, {});
    auto ds = flatten(lib);
    for (std::size_t r = 0; r < ds.size(); ++r) {
        double z = ds.inputs[r][0];
        CHECK(ds.targets[r][0] ==
              doctest::Approx((1.0 - z) * bc.t_ox + z * bc.t_fuel).epsilon(1e-6));
    }
}

TEST_CASE("CSV round trip is bit-exact") {
    SUBCASE("tabulated data") {
        auto ds = flatten(table4_library());
        std::ostringstream out;
        write_csv(ds, out);
        std::istringstream in(out.str());
        auto back = read_csv(in);
        CHECK(back == ds);
    }
    SUBCASE("10000 random rows") {
        auto ds = random_dataset(10000, 6, 99);
        std::ostringstream out;
        write_csv(ds, out);
        std::istringstream in(out.str());
        auto back = read_csv(in);
        CHECK(back == ds);
        // and the serialization itself is stable
        std::ostringstream out2;
        write_csv(back, out2);
        CHECK(out.str() == out2.str());
    }
}

TEST_CASE("CSV headers and row count") {
    auto ds = random_dataset(0, 2, 1);
    std::ostringstream out;
    write_csv(ds, out);
    CHECK(out.str() == "Z,chi,t0,t1\n"); // header-only file
    auto full = random_dataset(210, 2, 2);
    std::ostringstream out2;
    write_csv(full, out2);
    std::size_t lines = 0;
    for (char c : out2.str())
        if (c == '\n') ++lines;
    CHECK(lines == 211);
}

TEST_CASE("CSV errors") {
    SUBCASE("non-numeric cell names row and column") {
        std::istringstream in("Z,chi,T\n0.5,1.0,bad\n");
        CHECK_THROWS_AS(read_csv(in), ParseError);
        std::istringstream in2("Z,chi,T\n0,1,300\n0.5,oops,300\n");
        try {
            read_csv(in2);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row == 2);
            CHECK(e.col == 2);
        }
    }
    SUBCASE("schema violations") {
        std::istringstream missing("Z,chi\n");
        CHECK_THROWS_AS(read_csv(missing), SchemaError);
        std::istringstream wrong("chi,Z,T\n");
        CHECK_THROWS_AS(read_csv(wrong), SchemaError);
        std::istringstream dup("Z,chi,T,T\n");
        CHECK_THROWS_AS(read_csv(dup), SchemaError);
        std::istringstream ragged("Z,chi,T\n1,2\n");
        CHECK_THROWS_AS(read_csv(ragged), ParseError);
    }
}

TEST_CASE("library container round trip is bit-exact") {
    auto lib = table4_library();
    std::ostringstream out;
    write_library(lib, out);
    std::istringstream in(out.str());
    auto back = read_library(in);
    CHECK(back == lib);
    std::ostringstream out2;
    write_library(back, out2);
    CHECK(out.str() == out2.str());

    SUBCASE("corruption is detected") {
        std::string text = out.str();
        auto pos = text.find("0.01");
        text.replace(pos, 4, "0.02");
        std::istringstream bad(text);
        CHECK_THROWS_AS(read_library(bad), IoError);
    }
}

TEST_CASE("lookup") {
    auto lib = table4_library();
    SUBCASE("stored nodes are returned exactly") {
        for (std::size_t e : {std::size_t(0), std::size_t(3), std::size_t(6)}) {
            for (std::size_t j : {std::size_t(0), std::size_t(7), std::size_t(29)}) {
                auto r = lookup(lib, lib.grid.z[j], lib.entries[e].chi_st);
                CHECK(r.temperature == lib.entries[e].temperature[j]);
                CHECK(r.mass_fractions == lib.entries[e].mass_fractions[j]);
            }
        }
    }
    SUBCASE("fuel-side boundary temperature is pinned at 300.15") {
        for (double chi : lib.chis()) {
            auto r = lookup(lib, 1.0, chi);
            CHECK(r.temperature == doctest::Approx(300.15).epsilon(1e-12));
        }
    }
    SUBCASE("chi midway between identical profiles reproduces the profile") {
        FlameletLibrary twin = lib;
        twin.entries.resize(2);
        twin.entries[1] = twin.entries[0];
        twin.entries[1].chi_st = twin.entries[0].chi_st * 3.0;
        double mid = 2.0 * twin.entries[0].chi_st;
        for (std::size_t j = 0; j < twin.grid.size(); ++j) {
            auto r = lookup(twin, twin.grid.z[j], mid);
            CHECK(r.temperature == doctest::Approx(twin.entries[0].temperature[j]).epsilon(1e-12));
        }
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(lookup(lib, 0.5, 0.001), OutOfRange);
        CHECK_THROWS_AS(lookup(lib, 0.5, 100.0), OutOfRange);
        CHECK_THROWS_AS(lookup(lib, -0.1, 5.0), OutOfRange);
    }
}

TEST_CASE("subset study") {
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    double z_st = flamelet::stoichiometric_mixture_fraction(m, bc);
    auto grid = flamelet::Grid::clustered(30, z_st, 4.0);
    std::vector<double> pool_chis;
    for (int i = 0; i < 9; ++i)
        pool_chis.push_back(0.01 * std::pow(29.5 / 0.01, i / 8.0));
    auto pool = tabulate(m, bc, grid, pool_chis, {});

    SUBCASE("errors shrink from k=3 to the full pool") {
        auto rows = subset_study(m, pool, {3, 9}, {});
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].count == 3);
        CHECK(rows[1].count == 9);
        for (const auto& r : rows) {
            CHECK(r.temperature.max_pct >= r.temperature.mean_pct);
            CHECK(r.temperature.mean_pct >= r.temperature.min_pct);
            CHECK(r.temperature.min_pct >= 0.0);
        }
        CHECK(rows[0].temperature.mean_pct > rows[1].temperature.mean_pct);
    }
    SUBCASE("insufficient pool") {
        CHECK_THROWS_AS(subset_study(m, pool, {10}, {}), InsufficientPool);
        CHECK_THROWS_AS(subset_study(m, pool, {0}, {}), InsufficientPool);
    }
    SUBCASE("mechanism fingerprint is enforced") {
        auto other = m;
        other.reactions.clear();
        CHECK_THROWS_AS(subset_study(other, pool, {3}, {}), MechanismMismatch);
    }
}

TEST_CASE("tabulate is deterministic across worker counts") {
    const auto& m = bundled_mech();
    auto bc = methane_air_bc(m);
    auto grid = flamelet::Grid::clustered(30, flamelet::stoichiometric_mixture_fraction(m, bc), 4.0);
    TabulateOptions one;
    one.workers = 1;
    TabulateOptions many;
    many.workers = 4;
    auto a = tabulate(m, bc, grid, {0.01, 5.0, 20.0}, one);
    auto b = tabulate(m, bc, grid, {0.01, 5.0, 20.0}, many);
    CHECK(a == b);
}
