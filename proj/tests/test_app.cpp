#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "app/config.hpp"
#include "app/output.hpp"
#include "app/runners.hpp"
#include "polylab/error.hpp"

using namespace polylab;
using namespace polylab::app;
namespace fs = std::filesystem;

TEST_CASE("format_double round-trips and caps at 12 digits") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(format_double(HUGE_VAL) == "inf");
    CHECK(std::stod(format_double(0.1)) == 0.1);
    for (double v : {1e-300, 6.02214076e23, 0.255059937}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("table serialisation") {
    Table t{{"x", "y"}, {}};
    t.add({1.0, 0.25});
    t.add({2.0, HUGE_VAL});
    CHECK(t.to_csv() == "x,y\n1,0.25\n2,inf\n");
    const auto j = t.to_json();
    CHECK(j.size() == 2);
    CHECK(dump_json(nlohmann::json{{"a", 0.1}}).find("0.1") != std::string::npos);
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("grid parsing") {
    const auto g = Grid::parse("0.5:2:4");
    CHECK(g.values() == std::vector<double>{0.5, 1.0, 1.5, 2.0});
    CHECK(Grid::parse("3:3:1").values() == std::vector<double>{3.0});
    CHECK_THROWS_AS(Grid::parse("1:2"), ConfigError);
    CHECK_THROWS_AS(Grid::parse("a:b:c"), ConfigError);
    CHECK_THROWS_AS(Grid::parse("1:2:0").validate("g"), ConfigError);
}

TEST_CASE("config round-trip and strictness") {
    auto cfg = default_config("homopin");
    apply_param(cfg, "mode", "wetting");
    apply_grid(cfg, "zeta", "0:1:11");
    const auto back = config_from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.text("mode") == "wetting");

    auto j = cfg.to_json();
    j["colour"] = "blue";
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = cfg.to_json();
    j["params"]["zeeta"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = cfg.to_json();
    j["grids"]["zeta"]["step"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);

    CHECK_THROWS_AS(default_config("nope"), ConfigError);
    CHECK_THROWS_AS(apply_param(cfg, "mode", "sideways"), ConfigError);
    CHECK_THROWS_AS(apply_param(cfg, "n_head", "ten"), ConfigError);
}

TEST_CASE("homopin default run has one row per grid point") {
    auto cfg = default_config("homopin");
    const auto out = run_model(cfg);
    REQUIRE(!out.files.empty());
    const auto& csv = out.files[0].bytes;
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 501);
}

TEST_CASE("outputs are identical across thread counts") {
    auto base = default_config("randpin");
    apply_param(base, "n", "2000");
    apply_param(base, "replicas", "16");
    apply_grid(base, "h", "0:0.5:3");
    auto cfg1 = base, cfg4 = base;
    cfg1.threads = 1;
    cfg4.threads = 4;
    const auto a = run_model(cfg1), b = run_model(cfg4);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].bytes == b.files[i].bytes);
}

TEST_CASE("manifest lists checksums and detects tampering") {
    const auto dir = fs::temp_directory_path() / "polylab_test_manifest";
    fs::remove_all(dir);
    auto cfg = default_config("collapse");
    cfg.out_dir = dir.string();
    const auto out = run_model(cfg);
    const auto m = write_outputs(cfg, out, 0.0);
    CHECK(m["outputs"].size() == out.files.size());
    const auto mpath = (dir / "manifest.json").string();
    CHECK(verify_manifest(mpath).empty());
    {
        std::ofstream f(dir / out.files[0].name, std::ios::app);
        f << "x";
    }
    CHECK(verify_manifest(mpath).size() == 1);
    fs::remove_all(dir);
}
