#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "colwave/coefficients.hpp"
#include "colwave/detector.hpp"
#include "colwave/energy.hpp"
#include "colwave/family.hpp"
#include "colwave/mollifier.hpp"
#include "colwave/oracle.hpp"
#include "colwave/solvers.hpp"

namespace colwave {

/// Parse or validation problem; line is 0 when not tied to a line.
class ScenarioError : public std::invalid_argument {
public:
    ScenarioError(int line, std::string field, const std::string& msg);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

enum class Problem {
    transport,
    wave_x,
    wave_t,
    system,
    radial_odd,
    radial_even_abel,
    tanh_example_2,
    tanh_example_3,
    corner_3_6
};

std::string to_string(Problem p);

/// Initial profile description: zero, delta:x0, delta_prime:x0,scale, step:x0,
/// gaussian:x0,width[,amp], polynomial:a0,a1,..., odd_gaussian, linear.
struct DataSpec {
    std::string kind = "zero";
    std::vector<double> args;

    bool eps_scaled() const { return kind == "delta" || kind == "delta_prime" || kind == "step"; }
    std::string describe() const;
    /// Profile at regularization length eps.
    Profile build(const Mollifier& m, double eps) const;
};

struct Analyses {
    bool detect = false;
    bool energy = false;
    bool associate = false;
    bool oracle_compare = false;
};

struct Scenario {
    std::string id;
    Problem problem = Problem::wave_x;
    WaveForm form = WaveForm::nonconservative;
    PiecewiseConstantCoeff coefficient = PiecewiseConstantCoeff::constant(1.0);
    Mollifier mollifier = Mollifier::polynomial(2);
    Mollifier data_mollifier = Mollifier::polynomial(2);
    ScaleFn scale = ScaleFn::standard();
    DataSpec u0, u1;
    EpsilonLadder ladder;
    Grid1D grid;
    /// dx = ell(eps)/cells_per_ell per ladder member when grid.nx is not given.
    double cells_per_ell = 16.0;
    bool fixed_nx = false;
    double output_dt = 0.05;
    int dimension = 3;
    Analyses analyses;
    DetectorConfig detect;
    bool rho_tube_set = false;
    bool right_moving = true, left_moving = true;
    std::vector<TestFunction> psis;
    /// Times for the corner scenario.
    std::vector<double> corner_times{0.25, 0.5, 1.0};

    /// Regularization length: min of the data scale (eps for eps-scaled data)
    /// and the coefficient scale h(eps).
    double ell(double eps) const;
    /// Grid used for one ladder member.
    Grid1D grid_for(double eps) const;
    std::vector<double> output_times() const;
    GeometryInput geometry() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& file);

/// Static checks without solving; throws ScenarioError or ResolutionError.
void validate_scenario(const Scenario& sc);

/// Scenario files shipped in the scenarios directory, sorted by name.
std::vector<std::filesystem::path> bundled_scenarios();
std::filesystem::path scenario_dir();

struct RunOptions {
    int threads = 0;
    std::optional<EpsilonLadder> ladder_override;
};

struct RunResult {
    Scenario scenario;
    SolutionFamily family;
    std::vector<RaySegment> rays;
    std::optional<SingSuppReport> detection;
    std::vector<EnergyTrace> energy;
    std::vector<AssociationResult> association;
    std::vector<double> oracle_pairings;
    /// Named scalar results in insertion order.
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notes;

    double metric(const std::string& name) const;
    bool has_metric(const std::string& name) const;
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {});

/// Solves one ladder member.
SolutionRecord solve_member(const Scenario& sc, double eps);

}  // namespace colwave
