#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rideq/config_io.hpp"
#include "rideq/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace rideq;
namespace fs = std::filesystem;

namespace {

const std::string kCli = RIDEQ_CLI_PATH;
const std::string kConfigs = RIDEQ_CONFIG_DIR;

int run(const std::string& args) {
    std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path write_temp(const char* name, const std::string& body) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

const char* kValidConfig = R"({
  "demand": {"type": "exponential", "q_bar": 1e5, "alpha": 0.013},
  "matching": {"A": 5.0, "kappa": 0.5},
  "beta": 120.0, "c": 50.0, "T": 0.4, "tau": 0.0,
  "platforms": [{"fleet": 500.0, "fare": 70.0}, {"fleet": 300.0, "fare": null}]
})";

} // namespace

TEST_CASE("config parsing: schema and field paths") {
    MarketConfig cfg = parse_config(kValidConfig);
    CHECK(cfg.demand.potential() == 1e5);
    CHECK(cfg.matching.A == 5.0);
    CHECK(cfg.platforms.size() == 2);
    CHECK(cfg.platforms[0].fare.has_value());
    CHECK_FALSE(cfg.platforms[1].fare.has_value());

    auto message_of = [](const std::string& body) {
        try {
            parse_config(body);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    CHECK(message_of(R"({"demand": {"type": "exponential", "q_bar": 1e5, "alpha": 0.013},
        "matching": {"A": 5.0, "kappa": 0.5}, "c": 50.0, "T": 0.4, "tau": 0.0,
        "platforms": [{"fleet": 500.0}]})")
              .find("config.beta") != std::string::npos);
    CHECK(message_of(R"({"demand": {"type": "exponential", "q_bar": 1e5, "alpha": 0.013},
        "matching": {"A": 5.0, "kappa": 0.5}, "beta": 120.0, "c": 50.0, "T": 0.4,
        "tau": 0.0, "surge": true, "platforms": [{"fleet": 500.0}]})")
              .find("surge") != std::string::npos);
    CHECK(message_of(R"({"demand": {"type": "exponential", "q_bar": 1e5, "alpha": 0.013},
        "matching": {"A": 5.0, "kappa": 0.5}, "beta": 120.0, "c": 50.0, "T": 0.4,
        "tau": 0.0, "platforms": [{"fleet": 500.0, "fare": "cheap"}]})")
              .find("platforms[0].fare") != std::string::npos);
    CHECK_THROWS_AS(parse_config("{not json"), ParseError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("config hash tracks parameter changes") {
    MarketConfig a = parse_config(kValidConfig);
    MarketConfig b = parse_config(kValidConfig);
    CHECK(config_hash(a) == config_hash(b));
    b.platforms[0].fleet += 1.0;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("solve: all regimes on the shipped configs") {
    CHECK(run("solve --config " + kConfigs + "/baseline.json --regime fragmented-ne") == 0);
    CHECK(run("solve --config " + kConfigs + "/fleet_base.json --regime fragmented-so") == 0);
    CHECK(run("solve --config " + kConfigs + "/fleet_base.json --regime integrated-ne "
              "--tau 5") == 0);
    CHECK(run("solve --config " + kConfigs + "/fleet_base.json --regime integrated-so") == 0);
    CHECK(run("solve --config " + kConfigs + "/commission.json --regime mixed") == 0);
}

TEST_CASE("solve: json output document") {
    fs::path out = fs::temp_directory_path() / "rideq_solution.json";
    CHECK(run("solve --config " + kConfigs + "/baseline.json --regime fragmented-ne --out " +
              out.string()) == 0);
    std::string body = slurp(out);
    CHECK(body.find("\"Q\"") != std::string::npos);
    CHECK(body.find("\"residuals\"") != std::string::npos);
    CHECK(body.find("17913.52") != std::string::npos);
    fs::remove(out);
}

TEST_CASE("validation failures exit with code 2") {
    CHECK(run("solve --config " + kConfigs + "/baseline.json --regime warp-drive") == 2);
    CHECK(run("solve --config /nonexistent.json --regime fragmented-ne") == 2);
    CHECK(run("solve --regime fragmented-ne") == 2); // missing --config
    CHECK(run("") == 2);                             // missing subcommand

    fs::path bad_json = write_temp("rideq_bad.json", "{not json");
    CHECK(run("solve --config " + bad_json.string() + " --regime fragmented-ne") == 2);

    fs::path unknown_key = write_temp("rideq_unknown.json", R"({
      "demand": {"type": "exponential", "q_bar": 1e5, "alpha": 0.013},
      "matching": {"A": 5.0, "kappa": 0.5},
      "beta": 120.0, "c": 50.0, "T": 0.4, "tau": 0.0, "surge_pricing": 2.0,
      "platforms": [{"fleet": 500.0}]})");
    CHECK(run("solve --config " + unknown_key.string() + " --regime fragmented-ne") == 2);

    // Mixed regime requires a fare on every platform.
    CHECK(run("solve --config " + kConfigs + "/fleet_base.json --regime mixed") == 2);
    fs::remove(bad_json);
    fs::remove(unknown_key);
}

TEST_CASE("solver failures exit with code 3") {
    // A prohibitive commission leaves the pooled first-order system rootless.
    CHECK(run("solve --config " + kConfigs + "/fleet_base.json --regime integrated-ne "
              "--tau 1e6") == 3);
}

TEST_CASE("sweep: csv output is byte-identical across runs") {
    fs::path dir_a = fs::temp_directory_path() / "rideq_sweep_run_a";
    fs::path dir_b = fs::temp_directory_path() / "rideq_sweep_run_b";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);
    std::string common =
        "sweep platforms --config " + kConfigs + "/baseline.json --steps 3 --out ";
    CHECK(run(common + dir_a.string()) == 0);
    CHECK(run(common + dir_b.string()) == 0);
    std::string a = slurp(dir_a / "platform_count.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(dir_b / "platform_count.csv"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("sweep: plotdata format and argument validation") {
    fs::path dir = fs::temp_directory_path() / "rideq_sweep_plot";
    fs::create_directories(dir);
    CHECK(run("sweep platforms --config " + kConfigs +
              "/baseline.json --steps 2 --format plotdata --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "platform_count.plotdata"));
    CHECK(run("sweep platforms --config " + kConfigs +
              "/baseline.json --format yaml --out " + dir.string()) == 2);
    CHECK(run("sweep teleport --config " + kConfigs + "/baseline.json --out " +
              dir.string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("verify runs the oracle suite") {
    CHECK(run("verify --config " + kConfigs + "/fleet_base.json") == 0);
    CHECK(run("verify --config " + kConfigs + "/commission.json") == 0);
}
