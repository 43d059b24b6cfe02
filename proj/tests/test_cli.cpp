#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string output;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(HYPLQR_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (const auto n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hyplqr_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

const std::string traffic_config = "--config " + std::string(HYPLQR_CONFIG_DIR) + "/demo-traffic.json";

}  // namespace

TEST_CASE("argument and configuration errors exit with 1") {
    CHECK(run("lqr --config /nonexistent.json").code == 1);
    CHECK(run("lqr --model traffic --n-cells 33 --out " + scratch("n33").string()).code == 1);
    CHECK(run("lqr --model boat").code != 0);
    CHECK(run("").code != 0);

    const fs::path bad = fs::temp_directory_path() / "hyplqr_bad.json";
    std::ofstream(bad) << R"({"simulation": {"speed": 1}})";
    CHECK(run("lqr --config " + bad.string() + " --out " + scratch("bad").string()).code == 1);
}

TEST_CASE("an oversized step exits with 4") {
    const auto r = run("simulate --model traffic --dt 1.0 --out " + scratch("cfl").string());
    CHECK(r.code == 4);
    CHECK(r.output.find("CFL") != std::string::npos);
}

TEST_CASE("lqr prints the least stable eigenvalue and writes a manifest") {
    const fs::path dir = scratch("lqr");
    const auto r = run("lqr " + traffic_config + " --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.output.find("least stable closed-loop eigenvalue") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "lqr");
    CHECK(manifest["model"] == "traffic");
    for (const auto& a : manifest["artifacts"]) CHECK(fs::exists(dir / a.get<std::string>()));
    bool has_gain = false;
    for (const auto& a : manifest["artifacts"]) has_gain |= a == "K.csv";
    CHECK(has_gain);
}

TEST_CASE("runs with the same seed are byte-identical") {
    const fs::path a = scratch("seed_a"), b = scratch("seed_b");
    for (const auto& dir : {a, b}) {
        REQUIRE(run("lqr --model traffic --seed 7 --out " + dir.string()).code == 0);
        REQUIRE(run("simulate --model traffic --seed 7 --out " + (dir / "sim").string()).code == 0);
    }
    for (const char* f : {"K.csv", "P.csv", "spectrum.csv", "kernel.csv", "sim/trajectory.csv", "sim/controls.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }
}
