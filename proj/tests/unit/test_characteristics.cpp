#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "colwave/characteristics.hpp"

using namespace colwave;

namespace {

std::shared_ptr<const RegularizedCoeff> coeff(double cm, double cp, double eps, Variable var = Variable::space) {
    return std::make_shared<RegularizedCoeff>(PiecewiseConstantCoeff::jump(cm, cp, var == Variable::space ? 0.0 : 1.0, var),
                                              Mollifier::polynomial(2), ScaleFn::standard(), eps);
}

CharCurve xcurve(double eps) { return CharCurve::x_dependent(make_antideriv(coeff(1.0, 2.0, eps))); }

}  // namespace

TEST_SUITE("characteristics") {

TEST_CASE("constant speed") {
    const auto cc = xcurve(0.01);
    CHECK(cc.gamma(1.0, -3.0, 0.0) == doctest::Approx(-4.0));
    const auto one = CharCurve::x_dependent(make_antideriv(coeff(1.0, 1.0, 0.1)));
    CHECK(one.gamma(0.7, 0.2, 0.0) == doctest::Approx(0.2 - 0.7).epsilon(1e-14));
    const auto p = one.partials(0.7, 0.2);
    CHECK(p.dx[0] == doctest::Approx(1.0));
    CHECK(p.dx[1] == 0.0);
    CHECK(p.dx[2] == 0.0);
    CHECK(cc.gamma(0.4, 0.123, 0.4) == 0.123);
    const auto m = CharCurve::tanh_minus(0.1);
    CHECK(m.gamma(0.3, 0.25, 0.3) == 0.25);
}

TEST_CASE("x-dependent flow against RK4") {
    for (double eps : {0.1, 0.02}) {
        const auto c = coeff(1.0, 2.0, eps);
        const auto cc = CharCurve::x_dependent(make_antideriv(c));
        for (double T : {0.5, 1.0, 1.6}) {
            // forward from (0, -1): gamma(0, -1, T)
            const double rk = ref::rk4([&](double x) { return c->eval(x); }, -1.0, T, 20000);
            CHECK(std::abs(cc.gamma(0.0, -1.0, T) - rk) <= 1e-8);
        }
        // piecewise ray limit: x = -1 + t until 0 at t = 1, then slope 2 (up to O(h))
        CHECK(std::abs(cc.gamma(0.0, -1.0, 1.5) - 1.0) <= 2 * eps);
    }
}

TEST_CASE("corner values at the interface") {
    const auto m = Mollifier::polynomial(2);
    const double a = m.eval(0.0);
    for (double eps : {0.1, 0.03, 0.005}) {
        const auto cc = xcurve(eps);
        for (double t : {0.25, 0.5, 1.0}) {
            const auto p = cc.partials(t, 0.0);
            CHECK(ref::rel(p.dx[0], 2.0 / 3.0) <= 1e-12);
            CHECK(ref::rel(p.dx[1], -4.0 * a / (9.0 * eps)) <= 1e-12);
            CHECK(ref::rel(p.dx[2], 16.0 * a * a / (27.0 * eps * eps)) <= 1e-12);
        }
    }
}

TEST_CASE("closed-form partials cross-checked by finite differences") {
    const double eps = 0.05;
    const auto cc = xcurve(eps);
    for (double t : {0.02, 0.3, 0.9})
        for (double x : {-0.03, 0.0, 0.01, 0.04, 0.4}) {
            const auto p = cc.partials(t, x);
            const double s = 1e-4 * eps;
            const double g1 = ref::d1([&](double y) { return cc.gamma(t, y, 0.0); }, x, s);
            const double g2 = ref::d1([&](double y) { return cc.gamma_dx(t, y, 0.0); }, x, s);
            const double g3 = ref::d1([&](double y) { return cc.partials(t, y).dx[1]; }, x, s);
            CHECK(std::abs(p.dx[0] - g1) <= 1e-7);
            CHECK(std::abs(p.dx[1] - g2) <= 1e-6 / eps);
            CHECK(std::abs(p.dx[2] - g3) <= 1e-5 / (eps * eps));
            CHECK(std::abs(p.dt[0] - ref::d1([&](double s2) { return cc.gamma(s2, x, 0.0); }, t, 1e-5)) <= 1e-7);
        }
}

TEST_CASE("group property and monotone flow") {
    auto gen = ref::rng(3);
    std::uniform_real_distribution<double> X(-1.5, 1.5), T(0.0, 2.0);
    for (double eps : {0.1, 0.01}) {
        const auto cc = xcurve(eps);
        for (int k = 0; k < 200; ++k) {
            const double t = T(gen), s = T(gen), tau = T(gen), x = X(gen);
            CHECK(std::abs(cc.gamma(s, cc.gamma(t, x, s), tau) - cc.gamma(t, x, tau)) <= 1e-9);
            const double fd = (cc.gamma(t, x + 1e-7, tau) - cc.gamma(t, x - 1e-7, tau)) / 2e-7;
            CHECK(fd > 0.0);
            CHECK(cc.gamma_dx(t, x, tau) > 0.0);
        }
    }
}

TEST_CASE("time integral and the bent ray") {
    const auto c = coeff(1.0, 2.0, 1e-3, Variable::time);
    const auto T = make_time_integral(c);
    CHECK(std::abs(time_integral(*T, 2.0) - 3.0) <= 1e-3);
    const auto k = make_time_integral(std::make_shared<RegularizedCoeff>(
        PiecewiseConstantCoeff::constant(1.7, Variable::time), Mollifier::polynomial(2), ScaleFn::standard(), 0.1));
    CHECK(time_integral(*k, 0.6) == doctest::Approx(1.7 * 0.6));
    // refracted position 2 T(1) - T(t) against the sharp value 2 - (1 + 2 (t - 1))
    for (double t : {1.2, 1.5, 2.0}) CHECK(std::abs(2 * time_integral(*T, 1.0) - time_integral(*T, t) - (3.0 - 2.0 * t)) <= 2e-3);
    const auto right = CharCurve::t_dependent(T, +1), left = CharCurve::t_dependent(T, -1);
    CHECK(right.gamma(2.0, 0.0, 0.0) == doctest::Approx(-time_integral(*T, 2.0)));
    CHECK(left.gamma(2.0, 0.0, 0.0) == doctest::Approx(time_integral(*T, 2.0)));
}

TEST_CASE("tanh flows against RK4 and closed forms") {
    const double eps = 0.2;
    const auto minus = CharCurve::tanh_minus(eps), plus = CharCurve::tanh_plus(eps);
    for (double x : {-0.3, 0.05, 0.4}) {
        // gamma(t, x, 0): integrate backward, i.e. x' = -c(x) over [0, t]
        const double t = 0.7;
        const double rm = ref::rk4([&](double y) { return std::tanh(y / eps); }, x, t, 20000);
        const double rp = ref::rk4([&](double y) { return -std::tanh(y / eps); }, x, t, 20000);
        CHECK(std::abs(minus.gamma(t, x, 0.0) - rm) <= 1e-9);
        CHECK(std::abs(plus.gamma(t, x, 0.0) - rp) <= 1e-9);
    }
    // d gamma/dx at the origin is e^{t/eps} for the diverging flow
    for (double t : {0.1, 0.5, 1.0}) CHECK(ref::rel(minus.gamma_dx(t, 0.0, 0.0), std::exp(t / eps)) <= 1e-12);
}

TEST_CASE("overflow-free arsinh(e^s sinh r)") {
    auto gen = ref::rng(9);
    std::uniform_real_distribution<double> S(-20.0, 20.0), R(-5.0, 5.0);
    for (int k = 0; k < 500; ++k) {
        const double s = S(gen), r = R(gen);
        const double want = std::asinh(std::exp(s) * std::sinh(r));
        CHECK(std::abs(arsinh_exp_sinh(s, r) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
        const double dwant = std::exp(s) * std::cosh(r) / std::sqrt(1.0 + std::exp(2 * s) * std::sinh(r) * std::sinh(r));
        CHECK(std::abs(arsinh_exp_sinh_dr(s, r) - dwant) <= 1e-11 * std::max(1.0, dwant));
    }
    // far past double range of e^s: asinh(y) ~ log(2y)
    const double big = arsinh_exp_sinh(2000.0, 1.0);
    CHECK(std::isfinite(big));
    CHECK(big == doctest::Approx(2000.0 + std::log(2.0 * std::sinh(1.0))).epsilon(1e-15));
    CHECK(arsinh_exp_sinh(2000.0, -1.0) == doctest::Approx(-big).epsilon(1e-15));
    CHECK(arsinh_exp_sinh(2000.0, 0.0) == 0.0);
    CHECK(std::log(arsinh_exp_sinh_dr(700.0, 0.0)) == doctest::Approx(700.0).epsilon(1e-12));
}

}  // TEST_SUITE
