#include "colwave/characteristics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace colwave {

namespace {

double log_sinh(double a) {  // a > 0
    if (a > 20.0) return a - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * a));
    return std::log(std::sinh(a));
}

double log_cosh(double a) {  // a >= 0
    return a - std::numbers::ln2 + std::log1p(std::exp(-2.0 * a));
}

}  // namespace

double arsinh_exp_sinh(double s, double r) {
    if (r == 0.0) return 0.0;
    const double sign = r > 0.0 ? 1.0 : -1.0;
    const double L = s + log_sinh(std::abs(r));
    if (L < 30.0) return sign * std::asinh(std::exp(L));
    return sign * (L + std::log1p(std::sqrt(1.0 + std::exp(-2.0 * L))));
}

double arsinh_exp_sinh_dr(double s, double r) {
    const double num = s + log_cosh(std::abs(r));
    double den = 0.0;
    if (r != 0.0) {
        const double L = s + log_sinh(std::abs(r));
        den = L < 30.0 ? 0.5 * std::log1p(std::exp(2.0 * L)) : L + 0.5 * std::log1p(std::exp(-2.0 * L));
    }
    return std::exp(num - den);
}

CharCurve CharCurve::x_dependent(std::shared_ptr<const CoeffIntegral> antideriv) {
    if (!antideriv || antideriv->kind() != CoeffIntegral::Integrand::reciprocal ||
        antideriv->coeff().base().variable != Variable::space)
        throw std::invalid_argument("x_dependent characteristics need the reciprocal antiderivative of a space coefficient");
    CharCurve cc;
    cc.kind_ = Kind::x_dependent;
    cc.eps_ = antideriv->coeff().eps();
    cc.integral_ = std::move(antideriv);
    return cc;
}

CharCurve CharCurve::t_dependent(std::shared_ptr<const CoeffIntegral> time_integral, int direction) {
    if (!time_integral || time_integral->kind() != CoeffIntegral::Integrand::direct ||
        time_integral->coeff().base().variable != Variable::time)
        throw std::invalid_argument("t_dependent characteristics need the time integral of a time coefficient");
    if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
    CharCurve cc;
    cc.kind_ = Kind::t_dependent;
    cc.eps_ = time_integral->coeff().eps();
    cc.integral_ = std::move(time_integral);
    cc.direction_ = direction;
    return cc;
}

CharCurve CharCurve::tanh_minus(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    CharCurve cc;
    cc.kind_ = Kind::tanh_minus;
    cc.eps_ = eps;
    return cc;
}

CharCurve CharCurve::tanh_plus(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    CharCurve cc;
    cc.kind_ = Kind::tanh_plus;
    cc.eps_ = eps;
    return cc;
}

double CharCurve::gamma(double t, double x, double tau) const {
    if (tau == t) return x;
    switch (kind_) {
        case Kind::x_dependent:
            return integral_->invert(integral_->eval(x) + tau - t);
        case Kind::t_dependent:
            return x + direction_ * (integral_->eval(tau) - integral_->eval(t));
        case Kind::tanh_minus:
            return eps_ * arsinh_exp_sinh((t - tau) / eps_, x / eps_);
        case Kind::tanh_plus:
            return eps_ * arsinh_exp_sinh((tau - t) / eps_, x / eps_);
    }
    return x;
}

double CharCurve::gamma_dx(double t, double x, double tau) const {
    switch (kind_) {
        case Kind::x_dependent: {
            const auto& c = integral_->coeff();
            return c.eval(gamma(t, x, tau)) / c.eval(x);
        }
        case Kind::t_dependent:
            return 1.0;
        case Kind::tanh_minus:
            return arsinh_exp_sinh_dr((t - tau) / eps_, x / eps_);
        case Kind::tanh_plus:
            return arsinh_exp_sinh_dr((tau - t) / eps_, x / eps_);
    }
    return 1.0;
}

GammaPartials CharCurve::partials(double t, double x) const {
    if (kind_ != Kind::x_dependent) throw std::invalid_argument("partials need the x_dependent kind");
    const auto& c = integral_->coeff();
    GammaPartials p;
    const double g = gamma(t, x, 0.0);
    p.gamma = g;
    const double cx = c.eval(x), c1x = c.deriv(x, 1), c2x = c.deriv(x, 2);
    const double cg = c.eval(g), c1g = c.deriv(g, 1), c2g = c.deriv(g, 2);

    const double gx = cg / cx;
    const double gxx = c1g * gx / cx - cg * c1x / (cx * cx);
    const double gxxx = (c2g * gx * gx + c1g * gxx) / cx - c1g * gx * c1x / (cx * cx) -
                        (c1g * gx * c1x + cg * c2x) / (cx * cx) +
                        2.0 * cg * c1x * c1x / (cx * cx * cx);
    p.dx = {gx, gxx, gxxx};
    p.dt = {-cg, c1g * cg, -c1g * c1g * cg - c2g * cg * cg};
    return p;
}

double CharCurve::speed(double t, double x) const {
    switch (kind_) {
        case Kind::x_dependent: return integral_->coeff().eval(x);
        case Kind::t_dependent: return direction_ * integral_->coeff().eval(t);
        case Kind::tanh_minus: return -std::tanh(x / eps_);
        case Kind::tanh_plus: return std::tanh(x / eps_);
    }
    return 0.0;
}

double time_integral(const CoeffIntegral& T, double t) {
    if (T.kind() != CoeffIntegral::Integrand::direct)
        throw std::invalid_argument("time_integral needs a direct integral");
    return T.eval(t);
}

}  // namespace colwave
