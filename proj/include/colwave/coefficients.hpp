#pragma once

#include <memory>
#include <string>
#include <vector>

#include "colwave/mollifier.hpp"

namespace colwave {

enum class Variable { space, time };

/// c(s) = values[i] on the i-th interval cut by the sorted breakpoints.
struct PiecewiseConstantCoeff {
    std::vector<double> breakpoints;
    std::vector<double> values;
    Variable variable = Variable::space;

    static PiecewiseConstantCoeff constant(double c, Variable var = Variable::space);
    static PiecewiseConstantCoeff jump(double c_minus, double c_plus, double at,
                                       Variable var = Variable::space);

    void validate() const;
    double eval(double s) const;
    double lower() const;
    double upper() const;
};

/// c_eps = c * phi_h with h = scale(eps), in closed form through Phi.
class RegularizedCoeff {
public:
    RegularizedCoeff(PiecewiseConstantCoeff base, Mollifier mollifier, ScaleFn scale, double eps);

    double eval(double s) const;
    /// k-th derivative, k = 0 returns eval.
    double deriv(double s, int k) const;

    double h() const { return h_; }
    double eps() const { return eps_; }
    double lower() const { return base_.lower(); }
    double upper() const { return base_.upper(); }
    const PiecewiseConstantCoeff& base() const { return base_; }
    const Mollifier& mollifier() const { return mollifier_; }
    const ScaleFn& scale() const { return scale_; }

    /// Closed intervals [x_j - h, x_j + h], merged where they overlap.
    std::vector<std::pair<double, double>> layers() const;

private:
    PiecewiseConstantCoeff base_;
    Mollifier mollifier_;
    ScaleFn scale_;
    double eps_;
    double h_;
};

/// F(s) = integral from 0 to s of f(c_eps), with f(c) = 1/c (reciprocal, the
/// travel-time antiderivative C_eps) or f(c) = c (direct, the time integral T_eps).
class CoeffIntegral {
public:
    enum class Integrand { reciprocal, direct };

    CoeffIntegral(std::shared_ptr<const RegularizedCoeff> coeff, Integrand kind);

    double eval(double s) const;
    /// Solves F(s) = y; F is a strictly increasing bijection of the real line.
    double invert(double y) const;
    /// dF/ds.
    double integrand(double s) const;

    const RegularizedCoeff& coeff() const { return *coeff_; }
    std::shared_ptr<const RegularizedCoeff> coeff_ptr() const { return coeff_; }
    Integrand kind() const { return kind_; }

private:
    double raw(double s) const;  // integral from knots_.front()
    double f_of(double c) const { return kind_ == Integrand::reciprocal ? 1.0 / c : c; }
    double panel_integral(double a, double b) const;

    std::shared_ptr<const RegularizedCoeff> coeff_;
    Integrand kind_;
    std::vector<double> knots_;
    std::vector<double> cumulative_;
    std::vector<char> is_panel_;
    double offset_ = 0.0;
};

/// C_eps(x) = integral from 0 to x of dy / c_eps(y).
std::shared_ptr<const CoeffIntegral> make_antideriv(std::shared_ptr<const RegularizedCoeff> c);
/// T_eps(t) = integral from 0 to t of c_eps(s) ds.
std::shared_ptr<const CoeffIntegral> make_time_integral(std::shared_ptr<const RegularizedCoeff> c);

}  // namespace colwave
