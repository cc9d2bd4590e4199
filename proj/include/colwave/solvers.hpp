#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "colwave/characteristics.hpp"
#include "colwave/coefficients.hpp"
#include "colwave/family.hpp"

namespace colwave {

/// CFL violation, overflow or another failure of a numerical run.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid does not resolve the regularization length.
class ResolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// nonconservative: u_tt = c^2 u_xx.  conservative: u_tt = (c^2 u_x)_x.
enum class WaveForm { nonconservative, conservative };

struct SolveOptions {
    /// Snapshot times; time-stepping solvers store the step nearest to each.
    std::vector<double> output_times;
    WaveForm form = WaveForm::nonconservative;
    /// <u, psi> accumulated at every solver step.
    std::vector<TestFunction> pairings;
    /// Finest regularization length; 0 means h(eps) of the coefficient.
    double ell = 0.0;
    /// Require dx <= ell/16.
    bool enforce_resolution = true;
};

/// u(t,x) = u0(gamma(t,x,0)); fields u, ut, ux evaluated in closed form.
SolutionRecord solve_transport(const CharCurve& cc, const Profile& u0, const Grid1D& grid,
                               const SolveOptions& opt);

/// Diagonal system (d_t + s_i c_i(x) d_x) q_i = sum_j a_ij(t,x) q_j.
struct SystemSpec {
    std::vector<std::shared_ptr<const RegularizedCoeff>> speeds;
    std::vector<double> directions;  ///< +1 or -1 per component
    /// Fills a (m*m, row-major) at (t, x).
    std::function<void(double, double, double*)> coupling;
    std::vector<Profile> data;

    std::size_t size() const { return speeds.size(); }
};

/// Second-order upwind differences with Heun time stepping. Fields q0..q{m-1}.
SolutionRecord solve_system(const SystemSpec& spec, const Grid1D& grid, const SolveOptions& opt);

/// V/W form of the x-dependent wave equation. Transport is exact on a grid
/// uniform in travel time C_eps(x); coupling is integrated by the trapezoidal
/// rule along characteristics. Fields u, ut, ux on the uniform output grid; v and w
/// follow as ut -/+ c ux.
SolutionRecord solve_wave_x(std::shared_ptr<const RegularizedCoeff> coeff, const Profile& u0,
                            const Profile& u1, const Grid1D& grid, const SolveOptions& opt);

/// V/W form of u_tt = c(t)^2 u_xx. Time steps satisfy T(t_{n+1}) - T(t_n) = dx,
/// so characteristics move exactly one cell; coupling mu = c'/(2c) enters
/// through the integrating factor sqrt(c). Fields u, ut, ux.
SolutionRecord solve_wave_t(std::shared_ptr<const RegularizedCoeff> coeff, const Profile& u0,
                            const Profile& u1, const Grid1D& grid, const SolveOptions& opt);

/// Sweeps a job over eps values in parallel and collects records in ladder order.
SolutionFamily run_ladder(const std::vector<double>& eps, int threads,
                          const std::function<SolutionRecord(double)>& job,
                          const std::string& scenario_id, const std::string& solver_id);

}  // namespace colwave
