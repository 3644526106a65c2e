#include "doctest.h"

#include "rdlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace rdlab;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("rdlab_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};
} // namespace

TEST_CASE("manifest round trip preserves order and precision") {
    TempDir td;
    io::Manifest m;
    m.set("reaction", std::string("cubic(0.3)"));
    m.set("c", 0.28284271247461901);
    m.set("pass", true);
    m.set("n", 1680.0);
    m.save(td.path / "run.kv");

    auto r = io::Manifest::load(td.path / "run.kv");
    CHECK(r.get("reaction") == "cubic(0.3)");
    CHECK(r.get_double("c") == 0.28284271247461901);
    CHECK(r.get_bool("pass"));
    CHECK(r.entries()[0].first == "reaction"); // order kept
    CHECK_THROWS(r.get("missing"));
}

TEST_CASE("snapshot binary round trip is exact") {
    TempDir td;
    Trajectory t;
    for (int k = 0; k < 3; ++k) {
        GridField g;
        g.t = 0.25 * k;
        g.x0 = -2.0;
        g.dx = 0.5;
        g.u = {0.1 * k, 0.5, 1.0 / 3.0, 0.9999999999999};
        t.snaps.push_back(g);
    }
    io::write_snapshots(td.path / "run.snap", t);
    auto r = io::read_snapshots(td.path / "run.snap");
    REQUIRE(r.snaps.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(r.snaps[k].t == t.snaps[k].t);
        CHECK(r.snaps[k].x0 == t.snaps[k].x0);
        CHECK(r.snaps[k].dx == t.snaps[k].dx);
        CHECK(r.snaps[k].u == t.snaps[k].u);
    }
}

TEST_CASE("17 significant digits in numeric text") {
    CHECK(io::fmt(1.0 / 3.0) == "0.33333333333333331");
    CHECK(io::fmt(2.0) == "2");
    // round trip through text is exact
    double v = 0.1234567890123456789;
    CHECK(std::stod(io::fmt(v)) == v);
}
