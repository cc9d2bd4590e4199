#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "colwave/coefficients.hpp"
#include "colwave/mollifier.hpp"

namespace colwave {

/// Uniform output grid x_i = x_min + i*dx, i = 0..nx, over [0, t_end].
struct Grid1D {
    double x_min = -1.0;
    double x_max = 1.0;
    int nx = 100;
    double t_end = 1.0;
    double cfl = 0.5;

    double dx() const { return (x_max - x_min) / nx; }
    double x(int i) const { return x_min + i * dx(); }
    int nodes() const { return nx + 1; }
    void validate() const;
    /// Same window with nx scaled so that dx becomes (approximately) target.
    Grid1D with_spacing(double target) const;
};

/// Initial profile with its derivative; support bounds are advisory.
struct Profile {
    std::function<double(double)> f;
    std::function<double(double)> df;
    double support_lo = -std::numeric_limits<double>::infinity();
    double support_hi = std::numeric_limits<double>::infinity();
    std::string label;

    double operator()(double x) const { return f(x); }

    static Profile zero();
    /// phi_h(x - x0).
    static Profile delta_like(const Mollifier& m, double h, double x0);
    /// Phi((x - x0)/h), the regularized Heaviside step.
    static Profile step(const Mollifier& m, double h, double x0);
    /// sum coeffs[k] x^k.
    static Profile polynomial(std::vector<double> coeffs);
    /// amplitude * exp(-((x - x0)/width)^2).
    static Profile gaussian(double x0, double width, double amplitude = 1.0);
    /// x * exp(-x^2): smooth, u0'(0) = 1.
    static Profile odd_gaussian();
};

/// Bump test function psi(t,x) = phi((t-tc)/rt) * phi((x-xc)/rx), phi = polynomial(4).
struct TestFunction {
    double tc = 1.0, xc = 0.0, rt = 0.5, rx = 0.5;
    int id = 0;

    double t_factor(double t) const;
    double x_factor(double x) const;
    /// Integral of x_factor from -infinity to x, exact.
    double x_factor_antideriv(double x) const;
    double operator()(double t, double x) const { return t_factor(t) * x_factor(x); }
    double l1_norm() const { return rt * rx; }
    double t_lo() const { return tc - rt; }
    double t_hi() const { return tc + rt; }
    double x_lo() const { return xc - rx; }
    double x_hi() const { return xc + rx; }
};

struct Snapshot {
    double t = 0.0;
    std::vector<std::vector<double>> fields;  ///< one array per field name, length nx+1
};

/// One ladder member: fields on a uniform grid at stored times.
struct SolutionRecord {
    double eps = 0.0;
    double h = 0.0;    ///< coefficient regularization scale h(eps)
    double ell = 0.0;  ///< finest regularization length (min of data and coefficient scales)
    Grid1D grid;
    std::vector<std::string> field_names;
    std::vector<Snapshot> snaps;
    std::shared_ptr<const RegularizedCoeff> coeff;  ///< not serialized
    std::vector<double> pairings;                   ///< solver-accumulated <u, psi_j>

    int field_index(const std::string& name) const;  ///< -1 if absent
    bool has(const std::string& name) const { return field_index(name) >= 0; }
    const std::vector<double>& field(std::size_t snap, const std::string& name) const;
    /// Index of the snapshot closest to t.
    std::size_t snapshot_near(double t) const;
    std::vector<double> times() const;
};

struct SolutionFamily {
    std::string scenario_id;
    std::string solver_id;
    std::vector<SolutionRecord> records;

    std::vector<double> eps_values() const;
};

/// Writes manifest.txt plus one little-endian float64 file per (record, field),
/// row-major time x space.
void write_family(const SolutionFamily& fam, const std::filesystem::path& dir);
SolutionFamily read_family(const std::filesystem::path& dir);

}  // namespace colwave
