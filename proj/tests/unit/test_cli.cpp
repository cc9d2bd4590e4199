#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"

#include "colwave/report.hpp"
#include "colwave/scenario.hpp"

namespace fs = std::filesystem;
using namespace colwave;

namespace {

const char* kMinimal = R"(# constant-speed wave
id = tiny
problem = wave_x
coefficient.variable = space
coefficient.values = 1, 2
coefficient.jump_at = 0
data.u0 = gaussian:-1,0.3
ladder.eps0 = 0.1
ladder.ratio = 0.7
ladder.count = 4
grid.x_min = -3
grid.x_max = 3
grid.t_end = 1
output.dt = 0.25
)";

std::string replace_line(const std::string& text, const std::string& key, const std::string& line) {
    std::istringstream is(text);
    std::string out, l;
    while (std::getline(is, l)) out += (l.rfind(key, 0) == 0 ? line : l) + "\n";
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("colwave_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(COLWAVE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("scenario parsing") {
    const auto sc = parse_scenario(kMinimal);
    CHECK(sc.id == "tiny");
    CHECK(sc.problem == Problem::wave_x);
    CHECK(sc.ladder.count == 4);
    CHECK(sc.u0.kind == "gaussian");
    CHECK(sc.u0.args.size() == 2);
    CHECK_NOTHROW(validate_scenario(sc));
}

TEST_CASE("malformed input names the line and field") {
    try {
        parse_scenario(replace_line(kMinimal, "ladder.ratio", "ladder.ratio = seven"));
        FAIL("no error");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 9);
        CHECK(e.field() == "ladder.ratio");
        CHECK(std::string(e.what()).find("line 9") != std::string::npos);
    }
    try {
        parse_scenario(replace_line(kMinimal, "problem", "problem = heat"));
        FAIL("no error");
    } catch (const ScenarioError& e) {
        CHECK(e.field() == "problem");
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_scenario(replace_line(kMinimal, "grid.t_end", "grid.t_end")), ScenarioError);
}

TEST_CASE("resolution contract") {
    auto text = replace_line(kMinimal, "output.dt", "grid.nx = 40\noutput.dt = 0.25");
    const auto sc = parse_scenario(text);
    try {
        validate_scenario(sc);
        FAIL("no error");
    } catch (const ResolutionError& e) {
        CHECK(std::string(e.what()).find("resolution contract violated") != std::string::npos);
    }
}

TEST_CASE("bundled scenarios load and validate") {
    std::set<std::string> ids;
    for (const auto& p : bundled_scenarios()) {
        const auto sc = load_scenario(p);
        CHECK(p.stem().string() == sc.id);
        CHECK_NOTHROW(validate_scenario(sc));
        ids.insert(sc.id);
    }
    for (const char* id : {"thm41", "thm42", "prop42", "thm43a", "thm43b", "prop44_slow", "thm45_d3", "ex2_tanh",
                           "ex3_tanh", "corner36", "energy_cons", "appendix_assoc", "abel_even"})
        CHECK(ids.count(id) == 1);
}

TEST_CASE("identical runs write identical reports") {
    auto sc = parse_scenario(kMinimal);
    sc.analyses.energy = true;
    const auto a = scratch("a"), b = scratch("b");
    ReportOptions ro;
    ro.write_fields = false;
    write_report(run_scenario(sc, {1, std::nullopt}), a, ro);
    write_report(run_scenario(sc, {1, std::nullopt}), b, ro);
    for (const char* f : {"metrics.csv", "verdict.txt", "energy.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("exit codes") {
    CHECK(cli("list") == 0);
    CHECK(cli("validate thm41 corner36") == 0);
    CHECK(cli("validate no_such_scenario") == 2);
    CHECK(cli("validate thm41 --ladder-override 0.1,1.5,4") == 2);
    CHECK(cli("frobnicate") == 2);

    const auto dir = scratch("run");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "bad.scn");
        f << replace_line(kMinimal, "output.dt", "grid.nx = 40\noutput.dt = 0.25");
    }
    CHECK(cli("validate " + (dir / "bad.scn").string()) == 2);
    CHECK(cli("run corner36 --no-fields --ladder-override 0.1,0.7,4 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "corner36" / "metrics.csv"));
    fs::remove_all(dir);
}

}  // TEST_SUITE
