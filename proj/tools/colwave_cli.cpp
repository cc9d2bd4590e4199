// colwave: run, validate and list wave-propagation scenarios.
//
//   colwave list
//   colwave validate thm41 scenarios/thm42.scn
//   colwave run thm41 --out results --threads 4 --ladder-override "0.1,0.7,6"
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colwave/report.hpp"
#include "colwave/scenario.hpp"

namespace fs = std::filesystem;
using namespace colwave;

namespace {

constexpr int kValidation = 2;
constexpr int kNumerical = 3;

/// A path to an existing file, or the id of a bundled scenario.
fs::path resolve(const std::string& arg) {
    if (fs::is_regular_file(arg)) return arg;
    const fs::path bundled = scenario_dir() / (arg + ".scn");
    if (fs::is_regular_file(bundled)) return bundled;
    throw ScenarioError(0, "", "no scenario file or bundled scenario named '" + arg + "'");
}

EpsilonLadder parse_override(const std::string& s) {
    EpsilonLadder l;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> l.eps0 >> c1 >> l.ratio >> c2 >> l.count) || c1 != ',' || c2 != ',' || !is.eof())
        throw ScenarioError(0, "--ladder-override", "expected \"eps0,ratio,count\"");
    try {
        l.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(0, "--ladder-override", e.what());
    }
    return l;
}

/// Runs f and maps exceptions onto exit codes with a diagnostic on stderr.
template <class F>
int guarded(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const ScenarioError& e) {
        std::cerr << what << ": validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const ResolutionError& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kValidation;
    } catch (const UnsupportedScenario& e) {
        std::cerr << what << ": unsupported: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalFailure& e) {
        std::cerr << what << ": numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << what << ": error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"colwave: wave propagation through regularized jump coefficients"};
    app.require_subcommand(1);

    std::string out_dir = "colwave_out";
    int threads = 0;
    std::string ladder;
    bool no_fields = false;
    std::vector<std::string> targets;

    auto* run = app.add_subcommand("run", "Solve a scenario and write its reports");
    run->add_option("scenario", targets, "Scenario file or bundled id")->required();
    run->add_option("--out", out_dir, "Output root; reports go to OUT/<scenario id>");
    run->add_option("--threads", threads, "Worker threads (default: COLWAVE_THREADS, then all cores)");
    run->add_option("--ladder-override", ladder, "Replace the ladder: \"eps0,ratio,count\"");
    run->add_flag("--no-fields", no_fields, "Skip the binary field dump");

    auto* validate = app.add_subcommand("validate", "Run the static checks without solving");
    validate->add_option("scenario", targets, "Scenario files or bundled ids")->required();
    validate->add_option("--ladder-override", ladder, "Replace the ladder: \"eps0,ratio,count\"");

    app.add_subcommand("list", "List bundled scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kValidation;
    }

    if (app.got_subcommand("list")) {
        for (const auto& p : bundled_scenarios()) {
            const int rc = guarded(p.filename().string(), [&] {
                const auto sc = load_scenario(p);
                std::cout << sc.id << "\t" << to_string(sc.problem) << "\t" << p.string() << "\n";
                return 0;
            });
            if (rc) return rc;
        }
        return 0;
    }

    if (app.got_subcommand("validate")) {
        int worst = 0;
        for (const auto& t : targets) {
            const int rc = guarded(t, [&] {
                auto sc = load_scenario(resolve(t));
                if (!ladder.empty()) sc.ladder = parse_override(ladder);
                validate_scenario(sc);
                std::cout << sc.id << ": ok\n";
                return 0;
            });
            worst = std::max(worst, rc);
        }
        return worst;
    }

    int worst = 0;
    for (const auto& t : targets) {
        const int rc = guarded(t, [&] {
            const auto sc = load_scenario(resolve(t));
            RunOptions opt;
            opt.threads = threads;
            if (!ladder.empty()) opt.ladder_override = parse_override(ladder);
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = run_scenario(sc, opt);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const fs::path dir = fs::path(out_dir) / sc.id;
            ReportOptions ro;
            ro.write_fields = !no_fields;
            write_report(res, dir, ro);
            std::cout << verdict_text(res);
            std::cout << "wrote " << dir.string() << " (" << secs << " s)\n";
            return 0;
        });
        worst = std::max(worst, rc);
    }
    return worst;
}
