#pragma once

// Independent reference tools for the unit tests: Boost quadrature and a
// plain RK4 integrator. Nothing here calls into the library's own quadrature.

#include <cmath>
#include <functional>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ref {

/// Adaptive Gauss-Kronrod on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol);
}

/// Same, split into n equal pieces (for integrands with narrow features).
inline double integrate_split(const std::function<double(double)>& f, double a, double b, int n, double tol = 1e-13) {
    double s = 0.0;
    const double w = (b - a) / n;
    for (int i = 0; i < n; ++i) s += integrate(f, a + i * w, a + (i + 1) * w, tol);
    return s;
}

/// Classical RK4 for x' = f(x) from x0 over [0, T] with n steps.
inline double rk4(const std::function<double(double)>& f, double x0, double T, int n) {
    const double h = T / n;
    double x = x0;
    for (int i = 0; i < n; ++i) {
        const double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
}

/// Fourth-order centered first derivative.
inline double d1(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

inline std::mt19937_64 rng(unsigned seed = 20240611u) { return std::mt19937_64(seed); }

inline double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace ref
