#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "colwave/detector.hpp"
#include "colwave/family.hpp"

namespace colwave {

/// Exact rational arithmetic for the interface identities.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static constexpr std::int64_t gcd(std::int64_t a, std::int64_t b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const std::int64_t t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
    static constexpr Rational make(std::int64_t n, std::int64_t d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const std::int64_t g = gcd(n, d);
        return {n / g, d / g};
    }
    friend constexpr Rational operator+(Rational a, Rational b) { return make(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend constexpr Rational operator-(Rational a, Rational b) { return make(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend constexpr Rational operator*(Rational a, Rational b) { return make(a.num * b.num, a.den * b.den); }
    friend constexpr Rational operator/(Rational a, Rational b) { return make(a.num * b.den, a.den * b.num); }
    friend constexpr bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

/// Transmission 2(c+)/(c+ + c-) and reflection (c+ - c-)/(c+ + c-) for a
/// right-moving wave hitting the interface from the c- side.
struct InterfaceCoefficients {
    Rational transmission;
    Rational reflection;
};

constexpr InterfaceCoefficients interface_coefficients(Rational cm, Rational cp) {
    const Rational two{2, 1};
    return {two * cp / (cp + cm), (cp - cm) / (cp + cm)};
}

/// With incoming v = 1 and w+ = 0: u_t continuity 1 + R = T, u_x continuity
/// (R - 1)/c- = -T/c+, and the sum identity T + (c- - c+)/(c+ + c-) = 1.
constexpr bool interface_identity_holds(Rational cm, Rational cp) {
    const auto k = interface_coefficients(cm, cp);
    const Rational one{1, 1};
    const bool ut = one + k.reflection == k.transmission;
    const bool ux = (k.reflection - one) / cm == Rational{0, 1} - k.transmission / cp;
    const bool sum = k.transmission + (cm - cp) / (cp + cm) == one;
    return ut && ux && sum;
}

static_assert(interface_identity_holds({1, 1}, {2, 1}));
static_assert(interface_identity_holds({2, 1}, {1, 1}));
static_assert(interface_identity_holds({1, 1}, {1, 1}));
static_assert(interface_identity_holds({3, 2}, {7, 5}));
static_assert(interface_coefficients({1, 1}, {2, 1}).transmission == Rational{4, 3});
static_assert(interface_coefficients({1, 1}, {2, 1}).reflection == Rational{1, 3});

/// Classical connected solution of u_tt = c^2 u_xx with c = c_minus on x < 0,
/// c_plus on x > 0, u and u_x continuous across 0. Smooth data.
struct ConnectedSolution {
    double c_minus = 1.0;
    double c_plus = 2.0;
    Profile u0;
    Profile u1;

    double v0(double x) const;  ///< u1 - c u0' at t = 0
    double w0(double x) const;  ///< u1 + c u0' at t = 0
};

struct ConnectedValue {
    double v = 0.0, w = 0.0, u = 0.0;
};

/// Characteristic formulas by region; x = 0 evaluates the left limit, which
/// equals the right one. u integrates (v + w)/2 in time from u0.
ConnectedValue connected_eval(const ConnectedSolution& cs, double t, double x);
/// One-sided limit at the interface: side < 0 left, side > 0 right.
ConnectedValue connected_interface(const ConnectedSolution& cs, double t, int side);

struct TransmissionResidual {
    double u = 0.0;   ///< |u(0-) - u(0+)|
    double ux = 0.0;  ///< |u_x(0-) - u_x(0+)|
    double ut = 0.0;  ///< |u_t(0-) - u_t(0+)|
};
TransmissionResidual transmission_residual(const ConnectedSolution& cs, double t);

/// Distributional solution for u0 = 0, u1 = delta(x - x0), x0 < 0. H(0) = 1/2.
double delta_solution_eval(double c_minus, double c_plus, double t, double x, double x0 = -1.0);

/// Lines where delta_solution_eval jumps, each clipped to where its Heaviside
/// factor is active, as (t, x) segments on [0, t_end].
std::vector<RaySegment> delta_jump_locus(double c_minus, double c_plus, double t_end, double x0 = -1.0);

/// True when the two segment lists describe the same set of segments
/// (endpoints compared up to tol, orientation ignored).
bool same_segments(const std::vector<RaySegment>& a, const std::vector<RaySegment>& b, double tol = 1e-12);

/// Split factors at the time jump for v = u_t - c u_x and w = u_t + c u_x:
/// v' = T v + R w, w' = R v + T w with T = (c0 + c1)/(2 c0), R = (c0 - c1)/(2 c0).
struct TJumpAmplitudes {
    double transmitted = 0.0;
    double refracted = 0.0;
};
TJumpAmplitudes t_jump_amplitudes(double c0, double c1);

/// u for c = c0 before t_jump and c1 after, with u and u_t continuous at t_jump.
double piecewise_t_solution(double c0, double c1, double t_jump, const Profile& u0, const Profile& u1,
                            double t, double x);

/// <u, psi> for a field given pointwise; the x integral uses Gauss-Legendre
/// panels between the breakpoints returned for each t, the t integral is
/// adaptive Gauss-Kronrod split at t_breaks.
double pairing_2d(const std::function<double(double, double)>& u, const TestFunction& psi,
                  const std::function<std::vector<double>(double)>& x_breaks = {},
                  const std::vector<double>& t_breaks = {});

/// <delta_solution, psi> with exact x integration between jump lines.
double delta_oracle_pairing(double c_minus, double c_plus, const TestFunction& psi, double x0 = -1.0);

/// Errors below this multiple of ||psi||_1 count as settled.
inline constexpr double kAssociationNoise = 1e-7;

struct AssociationResult {
    std::vector<double> eps;
    std::vector<double> errors;
    double tol = 0.0;
    double noise_floor = 0.0;
    bool decreasing_tail = false;
    double final_error = 0.0;
    bool pass = false;
};

/// e_k = |<u_eps_k, psi> - oracle| from the solver-accumulated pairing with
/// the given index. PASS when e_k does not increase over the last half of the
/// ladder, drops across it, and e_last <= tol_rel * ||psi||_1. Errors are
/// clamped to the noise floor before the monotonicity test.
AssociationResult associate_check(const SolutionFamily& fam, std::size_t pairing_index, double oracle_value,
                                  const TestFunction& psi, double tol_rel = 1e-2);

/// Same verdict from explicit (eps, value) pairs.
AssociationResult associate_values(const std::vector<double>& eps, const std::vector<double>& values,
                                   double oracle_value, const TestFunction& psi, double tol_rel = 1e-2);

}  // namespace colwave
