#include "colwave/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gauss.hpp"

namespace colwave {

double RadialProfile::eval(double r) const {
    const double a = std::abs(r);
    const std::size_t n = f.size() - 1;
    const double rm = r_max();
    if (a >= rm) {
        if (tail_power > 0.0) return f[n] * std::pow(rm / a, tail_power);
        return a == rm ? f[n] : 0.0;
    }
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(a / dr));
    const double s = a / dr - static_cast<double>(i);
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f[i] + (s3 - 2 * s2 + s) * dr * df[i] + (-2 * s3 + 3 * s2) * f[i + 1] +
           (s3 - s2) * dr * df[i + 1];
}

double RadialProfile::deriv(double r) const {
    const double sign = r < 0.0 ? -1.0 : 1.0;
    const double a = std::abs(r);
    const std::size_t n = f.size() - 1;
    const double rm = r_max();
    if (a >= rm) {
        if (tail_power > 0.0) return -sign * tail_power * f[n] * std::pow(rm / a, tail_power) / a;
        return a == rm ? sign * df[n] : 0.0;
    }
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(a / dr));
    const double s = a / dr - static_cast<double>(i);
    const double s2 = s * s;
    const double d = (6 * s2 - 6 * s) * f[i] / dr + (3 * s2 - 4 * s + 1) * df[i] +
                     (-6 * s2 + 6 * s) * f[i + 1] / dr + (3 * s2 - 2 * s) * df[i + 1];
    return sign * d;
}

namespace {

using Rule = detail::GaussRule<16>;

/// Integral over [0, theta_hi] split into equal Gauss-Legendre panels.
template <class F>
double theta_integral(F&& f, double theta_hi, int panels) {
    const auto& rule = Rule::get();
    const double w = theta_hi / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += rule.integrate(f, p * w, (p + 1) * w);
    return s;
}

double theta_limit(double r, double support) {
    const double a = std::abs(r);
    if (a <= support) return 0.5 * std::numbers::pi;
    return std::asin(support / a);
}

/// Fourth-order differences on a uniform table with one-sided closures.
std::vector<double> table_slopes(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 5) return d;
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
    d[0] = 0.0;  // even profile
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
    d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) / (12 * h);
    d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * h);
    return d;
}

int zero_index(const Grid1D& g) {
    const double q = -g.x_min / g.dx();
    const int i0 = static_cast<int>(std::lround(q));
    if (std::abs(q - i0) > 1e-6 || std::abs(g.x_min + g.x_max) > 1e-9 * (g.x_max - g.x_min))
        throw std::invalid_argument("radial solvers need a grid symmetric about r = 0 with a node at 0");
    return i0;
}

/// (-1/r) times a given radial derivative; the r = 0 node uses -f''(0)
/// obtained by differencing the derivative.
std::vector<double> lower_from_derivative(const std::vector<double>& fr, const Grid1D& g, int i0) {
    const int n = static_cast<int>(fr.size());
    const double dx = g.dx();
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (i == i0) continue;
        out[i] = -fr[i] / g.x(i);
    }
    if (i0 >= 2 && i0 + 2 < n)
        out[i0] = -(fr[i0 - 2] - 8 * fr[i0 - 1] + 8 * fr[i0 + 1] - fr[i0 + 2]) / (12 * dx);
    return out;
}

/// 4-point Lagrange interpolation of an even gridded field.
double grid_interp(const std::vector<double>& f, const Grid1D& g, double r) {
    const int n = static_cast<int>(f.size());
    const double q = (r - g.x_min) / g.dx();
    if (q < 0.0 || q > n - 1) return 0.0;
    const int j = std::clamp(static_cast<int>(std::floor(q)) - 1, 0, n - 4);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (q - (j + b)) / static_cast<double>(a - b);
        s += w * f[j + a];
    }
    return s;
}

}  // namespace

double abel_forward(const std::function<double(double)>& w, double r, double support, int panels) {
    const double hi = theta_limit(r, support);
    return theta_integral([&](double th) { return w(r * std::sin(th)); }, hi, panels);
}

RadialProfile abel_invert(const std::function<double(double)>& v, double support, double dr, int n,
                          double fd_step, int panels) {
    if (n < 5) throw std::invalid_argument("abel_invert needs at least 5 intervals");
    auto G = [&](double r) {
        if (r == 0.0) return 0.0;
        const double hi = theta_limit(r, support);
        return theta_integral([&](double th) { return 2.0 * r * std::sin(th) * v(r * std::sin(th)); }, hi,
                              panels);
    };
    RadialProfile out;
    out.dr = dr;
    out.f.resize(n + 1);
    const double d = fd_step;
    for (int i = 0; i <= n; ++i) {
        const double r = i * dr;
        const double g = (G(r - 2 * d) - 8 * G(r - d) + 8 * G(r + d) - G(r + 2 * d)) / (12 * d);
        out.f[i] = g / std::numbers::pi;
    }
    out.df = table_slopes(out.f, dr);
    return out;
}

RadialProfile iterated_radial_data(const std::function<double(double)>& g, double support, int k, int n) {
    if (k < 1) throw std::invalid_argument("iterated_radial_data needs k >= 1");
    if (n < 2 || !(support > 0.0)) throw std::invalid_argument("iterated_radial_data needs a positive support");
    const auto& rule = Rule::get();
    const double dr = support / n;
    std::function<double(double)> prev = g;
    RadialProfile table;
    for (int level = 1; level <= k; ++level) {
        RadialProfile next;
        next.dr = dr;
        next.f.assign(n + 1, 0.0);
        next.df.assign(n + 1, 0.0);
        for (int i = n - 1; i >= 0; --i)
            next.f[i] = next.f[i + 1] + rule.integrate([&](double s) { return s * prev(s); }, i * dr, (i + 1) * dr);
        for (int i = 0; i <= n; ++i) next.df[i] = -i * dr * prev(i * dr);
        table = std::move(next);
        prev = [t = table](double r) { return t.eval(r); };
    }
    return table;
}

std::vector<double> radial_lowering(const std::vector<double>& f, const Grid1D& grid) {
    const int i0 = zero_index(grid);
    const int n = static_cast<int>(f.size());
    const double dx = grid.dx();
    std::vector<double> fr(n, 0.0);
    for (int i = 2; i + 2 < n; ++i) fr[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * dx);
    auto out = lower_from_derivative(fr, grid, i0);
    if (i0 >= 2 && i0 + 2 < n)
        out[i0] = -(-f[i0 - 2] + 16 * f[i0 - 1] - 30 * f[i0] + 16 * f[i0 + 1] - f[i0 + 2]) / (12 * dx * dx);
    for (int i : {0, 1, n - 2, n - 1}) out[i] = 0.0;
    return out;
}

SolutionRecord solve_radial_odd(std::shared_ptr<const RegularizedCoeff> coeff, int d,
                                const std::function<double(double)>& g, double support,
                                const Grid1D& grid, const SolveOptions& opt) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("solve_radial_odd needs odd d >= 3");
    grid.validate();
    const int i0 = zero_index(grid);
    const int k = (d - 1) / 2;
    const int n_tab = std::max(4096, static_cast<int>(std::ceil(8.0 * support / grid.dx())));
    const RadialProfile psi = iterated_radial_data(g, support, k, n_tab);

    Profile u1;
    u1.f = [psi](double r) { return psi.eval(r); };
    u1.df = [psi](double r) { return psi.deriv(r); };
    u1.support_lo = -support;
    u1.support_hi = support;
    u1.label = "radial_iterated";

    SolveOptions inner = opt;
    inner.pairings.clear();
    SolutionRecord line = solve_wave_t(std::move(coeff), Profile::zero(), u1, grid, inner);

    SolutionRecord rec = line;
    rec.field_names = {"u", "v"};
    for (std::size_t s = 0; s < line.snaps.size(); ++s) {
        const auto& v = line.field(s, "u");
        auto u = lower_from_derivative(line.field(s, "ux"), grid, i0);
        for (int level = 1; level < k; ++level) u = radial_lowering(u, grid);
        rec.snaps[s].fields = {std::move(u), v};
    }
    return rec;
}

SolutionRecord solve_radial_even(std::shared_ptr<const RegularizedCoeff> coeff, int d,
                                 const std::function<double(double)>& g, double support,
                                 const Grid1D& grid, const SolveOptions& opt) {
    if (d != 2) throw std::invalid_argument("solve_radial_even supports d = 2 only");
    grid.validate();
    const int i0 = zero_index(grid);
    const double R = grid.x_max;
    const double dr = grid.dx() / 4.0;
    const int n = static_cast<int>(std::ceil(R / dr));
    const int panels = std::max(8, static_cast<int>(std::ceil(support / dr / 8.0)));
    RadialProfile data = abel_invert(g, support, dr, n, std::min(dr, support / 32.0), panels);
    data.tail_power = 2.0;

    Profile u1;
    u1.f = [data](double r) { return data.eval(r); };
    u1.df = [data](double r) { return data.deriv(r); };
    u1.support_lo = -R;
    u1.support_hi = R;
    u1.label = "abel_inverted";
    SolveOptions inner = opt;
    inner.pairings.clear();
    SolutionRecord w = solve_wave_t(std::move(coeff), Profile::zero(), u1, grid, inner);

    SolutionRecord rec = w;
    rec.field_names = {"u", "w"};
    const int nodes = grid.nodes();
    for (std::size_t s = 0; s < w.snaps.size(); ++s) {
        const auto& wf = w.field(s, "u");
        std::vector<double> u(nodes, 0.0);
        for (int i = i0; i < nodes; ++i) {
            const double r = grid.x(i);
            const int pan = std::max(8, static_cast<int>(std::ceil(0.5 * r / grid.dx())));
            u[i] = abel_forward([&](double y) { return grid_interp(wf, grid, y); }, r,
                                std::numeric_limits<double>::infinity(), pan);
            if (2 * i0 - i >= 0) u[2 * i0 - i] = u[i];
        }
        rec.snaps[s].fields = {std::move(u), wf};
    }
    return rec;
}

}  // namespace colwave
