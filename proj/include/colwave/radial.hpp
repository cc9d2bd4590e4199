#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "colwave/family.hpp"
#include "colwave/solvers.hpp"

namespace colwave {

/// Even radial profile tabulated at r_i = i*dr with values and slopes;
/// cubic Hermite in between, even extension for r < 0. Beyond r_max the
/// profile is zero, or f(r_max) (r_max/r)^tail_power when tail_power > 0.
struct RadialProfile {
    double dr = 0.0;
    std::vector<double> f;
    std::vector<double> df;
    double tail_power = 0.0;

    double r_max() const { return dr * (f.empty() ? 0.0 : static_cast<double>(f.size() - 1)); }
    double eval(double r) const;
    double deriv(double r) const;
};

/// v(r) = integral over [0,1] of w(r rho)/sqrt(1 - rho^2) d rho, computed with
/// rho = sin(theta) and Gauss-Legendre panels; the theta range is split where
/// r sin(theta) leaves [0, support].
double abel_forward(const std::function<double(double)>& w, double r,
                    double support = std::numeric_limits<double>::infinity(), int panels = 8);

/// w(r) = (1/pi) d/dr of integral over [0,1] of 2 r rho v(r rho)/sqrt(1 - rho^2) d rho,
/// sampled at r_i = i*dr, i = 0..n. The outer derivative is a fourth-order
/// centered difference with step fd_step.
RadialProfile abel_invert(const std::function<double(double)>& v, double support, double dr, int n,
                          double fd_step, int panels = 8);

/// psi_k(r) = integral from r to support of s psi_{k-1}(s) ds with psi_0 = g;
/// (-1/r) d/dr psi_k = psi_{k-1}. Tabulated on [0, support] with n intervals.
RadialProfile iterated_radial_data(const std::function<double(double)>& g, double support, int k, int n);

/// Radial wave u_tt = c(t)^2 (u_rr + (d-1)/r u_r) for odd d = 2k+1 with
/// u(0) = 0, u_t(0) = g(|x|). Solved as [(-1/r) d/dr]^k v with v the 1D
/// solution for data psi_k. The grid must be symmetric about r = 0.
/// Fields: u (d-dimensional solution) and v (the 1D auxiliary solution).
SolutionRecord solve_radial_odd(std::shared_ptr<const RegularizedCoeff> coeff, int d,
                                const std::function<double(double)>& g, double support,
                                const Grid1D& grid, const SolveOptions& opt);

/// Even d = 2: the 1D solution w for data abel_invert(g), then
/// u(t, r) = abel_forward(w(t, .), r). Data outside [0, support] vanish but the
/// inverted data have an algebraic tail, so the window must contain the
/// domain of dependence of the region of interest. Fields: u, w.
SolutionRecord solve_radial_even(std::shared_ptr<const RegularizedCoeff> coeff, int d,
                                 const std::function<double(double)>& g, double support,
                                 const Grid1D& grid, const SolveOptions& opt);

/// Applies (-1/r) d/dr to an even gridded field on a grid symmetric about 0;
/// at r = 0 the limit -f''(0) is used. Fourth-order differences; the two
/// outermost nodes on each side are set to zero.
std::vector<double> radial_lowering(const std::vector<double>& f, const Grid1D& grid);

}  // namespace colwave
