#pragma once

#include <vector>

#include "colwave/coefficients.hpp"
#include "colwave/family.hpp"

namespace colwave {

/// conservative_x: u_tt = (c^2 u_x)_x, E = int u_t^2 + c(x)^2 u_x^2 (conserved).
/// nonconservative_x: u_tt = c^2 u_xx, E = int u_t^2/c(x)^2 + u_x^2 (conserved).
/// nonconservative_t: u_tt = c(t)^2 u_xx, E = int u_t^2 + c(t)^2 u_x^2 (Gronwall).
enum class EnergyForm { conservative_x, nonconservative_x, nonconservative_t };

struct EnergyTrace {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<double> E;

    /// max over t of |E(t) - E(0)| / E(0); 0 for the zero solution.
    double max_relative_drift() const;
};

/// Trapezoidal sums over the output grid at every stored time. Needs the
/// record's coefficient and fields ut, ux.
EnergyTrace energy_trace(const SolutionRecord& rec, EnergyForm form);
std::vector<EnergyTrace> energy_traces(const SolutionFamily& fam, EnergyForm form);

/// exp(integral from 0 to t of |a'|/a) with a = c(t)^2: the Gronwall factor
/// of dE/dt = a' int u_x^2.
double gronwall_factor(const RegularizedCoeff& c, double t);
/// exp(TV(a)/min a) with a = c^2 over the whole line; independent of eps.
double gronwall_factor_uniform(const RegularizedCoeff& c);
/// exp(T max|c'|), the growth factor of the naive energy estimate for the
/// nonconservative x-form. Report only.
double naive_growth_factor(const RegularizedCoeff& c, double T);

}  // namespace colwave
