#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "colwave/radial.hpp"

using namespace colwave;

namespace {

constexpr double pi = std::numbers::pi;

/// Smooth even bump supported in [-s, s].
double bump4(double r, double s) {
    const double z = r / s;
    return std::abs(z) < 1.0 ? std::pow(1.0 - z * z, 4) : 0.0;
}

std::shared_ptr<const RegularizedCoeff> tcoeff(double c0, double c1, double eps) {
    return std::make_shared<RegularizedCoeff>(PiecewiseConstantCoeff::jump(c0, c1, 1.0, Variable::time),
                                              Mollifier::polynomial(2), ScaleFn::standard(), eps);
}

SolveOptions at_times(std::vector<double> t) {
    SolveOptions o;
    o.output_times = std::move(t);
    o.enforce_resolution = false;
    return o;
}

double interp(const SolutionRecord& rec, std::size_t s, const std::string& f, double x) {
    const auto& u = rec.field(s, f);
    const double q = (x - rec.grid.x_min) / rec.grid.dx();
    const int i = std::clamp(static_cast<int>(std::floor(q)), 0, rec.grid.nx - 1);
    const double a = q - i;
    return (1 - a) * u[i] + a * u[i + 1];
}

/// u(t, r) for u_tt = c^2 Lap u in 3D, u(0) = 0, u_t(0) = g(|x|):
/// (1/(2 c r)) integral over [r - ct, r + ct] of s g(|s|) ds.
double spherical_exact(const std::function<double(double)>& g, double c, double t, double r) {
    return ref::integrate_split([&](double s) { return s * g(std::abs(s)); }, r - c * t, r + c * t, 16) / (2 * c * r);
}

/// Same in 2D via the Poisson formula, with rho = ct sin(phi) removing the edge singularity.
double disk_exact(const std::function<double(double)>& g, double c, double t, double r) {
    auto inner = [&](double phi) {
        const double rho = c * t * std::sin(phi);
        auto ang = [&](double th) { return g(std::sqrt(std::max(0.0, r * r + rho * rho - 2 * r * rho * std::cos(th)))); };
        return std::sin(phi) * 2.0 * ref::integrate_split(ang, 0.0, pi, 8, 1e-11);
    };
    return t / (2 * pi) * ref::integrate_split(inner, 0.0, 0.5 * pi, 8, 1e-10);
}

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("abel_forward closed forms") {
    for (double r : {0.3, 1.0, 2.5}) {
        CHECK(abel_forward([](double) { return 1.0; }, r) == doctest::Approx(pi / 2).epsilon(1e-13));
        CHECK(abel_forward([](double y) { return y * y; }, r) == doctest::Approx(r * r * pi / 4).epsilon(1e-13));
    }
    CHECK(abel_forward([](double) { return 1.0; }, 0.0) == doctest::Approx(pi / 2).epsilon(1e-13));
}

TEST_CASE("abel pair round trip on smooth compact profiles") {
    for (double s : {1.0, 0.2}) {
        auto v = [&](double r) { return bump4(r, s); };
        const double dr = s / 400;
        const int n = 800;
        auto w = abel_invert(v, s, dr, n, dr / 4, 32);
        w.tail_power = 2.0;
        double worst = 0.0;
        for (double r = 0.0; r <= 1.5 * s; r += s / 37) {
            const double back = abel_forward([&](double y) { return w.eval(y); }, r, 2 * s, 32);
            worst = std::max(worst, std::abs(back - v(r)));
        }
        CHECK(worst <= 1e-5);
        auto zero = abel_invert([](double) { return 0.0; }, s, dr, 20, dr / 4);
        for (double f : zero.f) CHECK(f == 0.0);
    }
}

TEST_CASE("inverted data: algebraic tail of strength -(2/pi) int r v") {
    const double s = 0.5;
    auto v = [&](double r) { return bump4(r, s); };
    const double M = ref::integrate([&](double r) { return r * v(r); }, 0.0, s);
    const auto w = abel_invert(v, s, 0.01, 1000, 0.0025, 32);
    for (double r : {4.0, 8.0}) CHECK(ref::rel(w.eval(r) * r * r, -2.0 / pi * M) <= 2 * (s / r) * (s / r));
    // the tail decays, so the profile still pairs to zero past the support in the forward map
    double worst = 0.0;
    for (double r = 1.2 * s; r <= 3.0; r += 0.1)
        worst = std::max(worst, std::abs(abel_forward([&](double y) { return w.eval(y); }, r, 10.0, 64)));
    CHECK(worst <= 1e-5);
}

TEST_CASE("iterated radial data") {
    const double s = 0.3;
    auto g = [&](double r) { return bump4(r, s); };
    const auto p1 = iterated_radial_data(g, s, 1, 4000);
    const auto p2 = iterated_radial_data(g, s, 2, 4000);
    for (double r : {0.0, 0.05, 0.17, 0.29}) {
        const double q1 = ref::integrate([&](double y) { return y * g(y); }, r, s);
        CHECK(std::abs(p1.eval(r) - q1) <= 1e-12);
        // (-1/r) d/dr psi_2 = psi_1
        if (r > 0) CHECK(std::abs(-p2.deriv(r) / r - p1.eval(r)) <= 1e-9);
    }
    // compact support inside [-s, s], even
    CHECK(p1.eval(s) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p2.eval(1.2 * s) == 0.0);
    CHECK(p2.eval(-0.1) == p2.eval(0.1));
}

TEST_CASE("d = 3 matches the spherical-wave formula for constant c") {
    const double eps = 0.1;
    auto g = [&](double r) { return Mollifier::polynomial(2).scaled(r, eps); };
    const Grid1D grid{-3.0, 3.0, 9600, 1.5, 0.5};
    const auto rec = solve_radial_odd(tcoeff(1.0, 1.0, eps), 3, g, eps, grid, at_times({0.5, 1.0, 1.5}));
    for (std::size_t s = 1; s < rec.snaps.size(); ++s) {
        const double t = rec.snaps[s].t;
        const auto& u = rec.field(s, "u");
        double worst = 0.0;
        for (int i = 0; i < grid.nodes(); ++i) {
            const double r = grid.x(i);
            if (r < 0.1 || r > 2.9) continue;
            worst = std::max(worst, std::abs(u[i] - spherical_exact(g, 1.0, t, r)));
            // shell support |r - t| <= eps
            if (std::abs(r - t) > eps + 2 * grid.dx()) CHECK(std::abs(u[i]) <= 1e-8);
        }
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("recursion output solves the higher-dimensional radial equation") {
    // smooth data, constant c: residual of u_tt - c^2 (u_rr + (d-1)/r u_r) at scheme order
    const double c = 1.0;
    auto g = [](double r) { return bump4(r, 0.6); };
    for (int d : {3, 5}) {
        CAPTURE(d);
        const Grid1D grid{-4.0, 4.0, 8000, 1.2, 0.5};
        const double dt = 0.01;
        const auto rec = solve_radial_odd(tcoeff(c, c, 0.1), d, g, 0.6, grid, at_times({1.0 - dt, 1.0, 1.0 + dt}));
        REQUIRE(rec.snaps.size() >= 3);
        const std::size_t k = rec.snapshot_near(1.0);
        const double t0 = rec.snaps[k - 1].t, t1 = rec.snaps[k].t, t2 = rec.snaps[k + 1].t;
        double worst = 0.0, scale = 0.0;
        for (double r : {0.4, 0.8, 1.0, 1.3, 1.5}) {
            const double h = 1e-2;
            auto u = [&](std::size_t s, double x) { return interp(rec, s, "u", x); };
            const double a = u(k - 1, r), b = u(k, r), e = u(k + 1, r);
            const double utt = 2 * (a / ((t0 - t1) * (t0 - t2)) + b / ((t1 - t0) * (t1 - t2)) + e / ((t2 - t0) * (t2 - t1)));
            const double urr = (u(k, r + h) - 2 * b + u(k, r - h)) / (h * h);
            const double ur = (u(k, r + h) - u(k, r - h)) / (2 * h);
            worst = std::max(worst, std::abs(utt - c * c * (urr + (d - 1) / r * ur)));
            scale = std::max(scale, std::abs(utt));
        }
        CHECK(worst <= 2e-3 * scale);
    }
}

TEST_CASE("d = 2 through the Abel pair matches the Poisson formula") {
    const double s = 0.4;
    auto g = [&](double r) { return bump4(r, s); };
    const Grid1D grid{-4.0, 4.0, 3200, 1.0, 0.5};
    const auto rec = solve_radial_even(tcoeff(1.0, 1.0, 0.1), 2, g, s, grid, at_times({1.0}));
    const std::size_t k = rec.snaps.size() - 1;
    const double t = rec.snaps[k].t;
    double worst = 0.0, peak = 0.0;
    for (double r : {0.0, 0.2, 0.5, 0.8, 1.0, 1.2, 1.6}) {
        const double want = disk_exact(g, 1.0, t, r);
        worst = std::max(worst, std::abs(interp(rec, k, "u", r) - want));
        peak = std::max(peak, std::abs(want));
    }
    CHECK(worst <= 1e-3 * peak);
    // interior support: the 2D wave keeps a wake inside the disk
    CHECK(interp(rec, k, "u", 0.0) > 0.05 * peak);
}

TEST_CASE("radial lowering of an even polynomial") {
    const Grid1D grid{-2.0, 2.0, 400, 1.0, 0.5};
    std::vector<double> f(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) f[i] = std::pow(grid.x(i), 4) - 3 * std::pow(grid.x(i), 2);
    const auto L = radial_lowering(f, grid);
    // (-1/r) d/dr (r^4 - 3 r^2) = -4 r^2 + 6
    for (int i = 2; i + 2 < grid.nodes(); ++i) {
        const double r = grid.x(i);
        CHECK(std::abs(L[i] - (-4 * r * r + 6)) <= 1e-8);
    }
}

}  // TEST_SUITE
