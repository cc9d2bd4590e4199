#pragma once

#include <array>
#include <memory>

#include "colwave/coefficients.hpp"

namespace colwave {

/// Partial derivatives of gamma(t, x, 0) in x and in t, orders 1..3.
struct GammaPartials {
    double gamma = 0.0;
    std::array<double, 3> dx{};
    std::array<double, 3> dt{};
};

/// Characteristic curves of dx/dtau = c: gamma(t, x, tau) is the position at
/// time tau of the curve passing through x at time t.
class CharCurve {
public:
    enum class Kind { x_dependent, t_dependent, tanh_minus, tanh_plus };

    static CharCurve x_dependent(std::shared_ptr<const CoeffIntegral> antideriv);
    /// direction +1 follows dx/dt = c(t), -1 follows dx/dt = -c(t).
    static CharCurve t_dependent(std::shared_ptr<const CoeffIntegral> time_integral, int direction);
    /// c(x) = -tanh(x/eps).
    static CharCurve tanh_minus(double eps);
    /// c(x) = tanh(x/eps).
    static CharCurve tanh_plus(double eps);

    Kind kind() const { return kind_; }
    double eps() const { return eps_; }
    /// Regularized coefficient behind the curve; null for the tanh kinds.
    std::shared_ptr<const RegularizedCoeff> coeff_ptr() const {
        return integral_ ? integral_->coeff_ptr() : nullptr;
    }

    double gamma(double t, double x, double tau) const;
    /// d gamma / dx at (t, x, tau).
    double gamma_dx(double t, double x, double tau) const;
    /// Closed-form partials at tau = 0; x_dependent kind only.
    GammaPartials partials(double t, double x) const;
    /// Speed at (t, x).
    double speed(double t, double x) const;

private:
    Kind kind_ = Kind::x_dependent;
    std::shared_ptr<const CoeffIntegral> integral_;
    int direction_ = 1;
    double eps_ = 0.0;
};

/// T_eps(t) = integral from 0 to t of c_eps.
double time_integral(const CoeffIntegral& T, double t);

/// asinh(e^s sinh r) without overflow of e^s.
double arsinh_exp_sinh(double s, double r);
/// d/dr of asinh(e^s sinh r) = e^s cosh r / sqrt(1 + e^{2s} sinh^2 r), evaluated in log form.
double arsinh_exp_sinh_dr(double s, double r);

}  // namespace colwave
