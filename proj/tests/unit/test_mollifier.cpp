#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "colwave/mollifier.hpp"

using namespace colwave;

TEST_SUITE("mollifier") {

TEST_CASE("polynomial(2) point values") {
    const auto m = Mollifier::polynomial(2);
    CHECK(m.eval(1.5) == 0.0);
    CHECK(m.eval(-1.0) == 0.0);
    CHECK(m.eval(0.0) == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
    CHECK(m.eval(-0.3) == m.eval(0.3));
    CHECK(m.deriv(0.0, 1) == 0.0);
    // d/dx (15/16)(1 - x^2)^2 = -(15/16) 4x (1 - x^2)
    CHECK(m.deriv(0.5, 1) == doctest::Approx(-1.40625).epsilon(1e-14));
    CHECK(m.deriv(1.2, 2) == 0.0);
}

TEST_CASE("antiderivative anchors") {
    for (const auto& m : {Mollifier::polynomial(2), Mollifier::polynomial(4), Mollifier::bump()}) {
        CAPTURE(m.describe());
        CHECK(m.antideriv(0.0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m.antideriv(-1.0) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(m.antideriv(-3.0) == 0.0);
        CHECK(m.antideriv(1.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.antideriv(7.0) == 1.0);
    }
}

TEST_CASE("unit mass by independent quadrature") {
    for (int n : {1, 2, 3, 5}) {
        const auto m = Mollifier::polynomial(n);
        const double mass = ref::integrate([&](double x) { return m.eval(x); }, -1.0, 1.0);
        CHECK(std::abs(mass - 1.0) <= 1e-12);
    }
    const auto b = Mollifier::bump();
    CHECK(std::abs(ref::integrate([&](double x) { return b.eval(x); }, -1.0, 1.0) - 1.0) <= 1e-10);
}

TEST_CASE("scaled kernel keeps unit mass and matches phi(x/h)/h") {
    const auto m = Mollifier::polynomial(2);
    for (double h : {1.0, 0.3, 0.01, 1e-4}) {
        const double mass = ref::integrate([&](double x) { return m.scaled(x, h); }, -h, h);
        CHECK(std::abs(mass - 1.0) <= 1e-10);
        for (double s : {-0.7, 0.0, 0.25, 0.9}) CHECK(m.scaled(s * h, h) == doctest::Approx(m.eval(s) / h));
    }
}

TEST_CASE("antiderivative matches quadrature, is monotone and odd about 1/2") {
    auto gen = ref::rng();
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    for (const auto& m : {Mollifier::polynomial(2), Mollifier::polynomial(3), Mollifier::bump()}) {
        CAPTURE(m.describe());
        for (int k = 0; k < 200; ++k) {
            const double x = U(gen);
            CHECK(m.antideriv(x) + m.antideriv(-x) == doctest::Approx(1.0).epsilon(1e-12));
        }
        for (int k = 0; k < 40; ++k) {
            const double x = U(gen);
            const double q = ref::integrate([&](double y) { return m.eval(y); }, -1.0, std::clamp(x, -1.0, 1.0));
            CHECK(std::abs(m.antideriv(x) - q) <= 1e-10);
        }
        double prev = -1.0;
        for (double x = -1.1; x <= 1.1; x += 1e-3) {
            const double v = m.antideriv(x);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("shape: symmetric, compact, increasing on [-1, 0]") {
    auto gen = ref::rng(7);
    std::uniform_real_distribution<double> U(-1.0, 0.0);
    for (const auto& m : {Mollifier::polynomial(2), Mollifier::bump()}) {
        for (int k = 0; k < 300; ++k) {
            const double x = U(gen);
            CHECK(m.eval(x) == m.eval(-x));
            CHECK(m.deriv(x, 1) >= 0.0);
        }
        for (double x : {1.0, 1.0001, 2.0, -5.0}) CHECK(m.eval(x) == 0.0);
    }
}

TEST_CASE("derivatives agree with finite differences of the next lower order") {
    for (const auto& m : {Mollifier::polynomial(3), Mollifier::bump()}) {
        CAPTURE(m.describe());
        for (int k = 1; k <= m.max_order(); ++k)
            for (double x : {-0.8, -0.35, 0.1, 0.6}) {
                const double fd = ref::d1([&](double y) { return m.deriv(y, k - 1); }, x, 1e-4);
                CHECK(std::abs(m.deriv(x, k) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            }
    }
    const auto m = Mollifier::polynomial(2);
    const double h = 0.01;
    CHECK(m.scaled_deriv(0.3 * h, h, 1) == doctest::Approx(m.deriv(0.3, 1) / (h * h)));
}

TEST_CASE("order and domain errors") {
    const auto m = Mollifier::polynomial(2);
    CHECK(m.max_order() == 3);
    CHECK_THROWS_AS(m.deriv(0.1, 4), OrderTooHigh);
    CHECK_NOTHROW(Mollifier::polynomial(3).deriv(0.1, 4));
    CHECK_THROWS_AS(ScaleFn::standard().eval(0.0), DomainError);
    CHECK_THROWS_AS(ScaleFn::standard().eval(-1.0), DomainError);
    CHECK_THROWS_AS(ScaleFn::logarithmic().eval(1.0), DomainError);
}

TEST_CASE("scale functions") {
    CHECK(ScaleFn::standard().eval(0.01) == 0.01);
    CHECK(ScaleFn::logarithmic().eval(std::exp(-10.0)) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(ScaleFn::slow(4).eval(1e-4) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("ladder log ratios") {
    EpsilonLadder L;
    const auto eps = L.values();
    REQUIRE(eps.size() == 10);
    CHECK(eps.front() == 0.1);
    CHECK(L.smallest() == doctest::Approx(0.1 * std::pow(0.7, 9)));
    double prev_log = 1.0, prev_slow = 1.0;
    for (double e : eps) {
        CHECK(std::log(ScaleFn::standard().eval(e)) / std::log(e) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::log(ScaleFn::slow(4).eval(e)) / std::log(e) == doctest::Approx(0.25).epsilon(1e-14));
        // logarithmic scale: log(1/h)/log(1/eps) = log(L)/L with L = log(1/eps), which
        // decreases towards 0 once L > e
        const double r = std::log(1.0 / ScaleFn::logarithmic().eval(e)) / std::log(1.0 / e);
        if (e < std::exp(-std::exp(1.0))) CHECK(r < prev_log);
        prev_log = r;
        CHECK(ScaleFn::slow(4).eval(e) < prev_slow);
        prev_slow = ScaleFn::slow(4).eval(e);
    }
    CHECK_THROWS(EpsilonLadder{0.1, 1.2, 10}.validate());
    CHECK_THROWS(EpsilonLadder{0.0, 0.7, 10}.validate());
    CHECK_THROWS(EpsilonLadder{0.1, 0.7, 2}.validate());
}

}  // TEST_SUITE
