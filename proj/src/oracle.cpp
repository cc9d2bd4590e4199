#include "colwave/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gauss.hpp"

namespace colwave {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double gk(F&& f, double a, double b, double tol = 1e-13) {
    if (!(b > a)) return 0.0;
    return GK::integrate(f, a, b, 12, tol);
}

/// Adaptive integral over [a, b] split at the given interior points.
template <class F>
double gk_split(F&& f, double a, double b, std::vector<double> cuts, double tol = 1e-13) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (hi > lo) s += gk(f, lo, hi, tol);
    }
    return s;
}

double heaviside(double a) { return a > 0.0 ? 1.0 : (a < 0.0 ? 0.0 : 0.5); }

ConnectedValue side_eval(const ConnectedSolution& cs, double t, double x, int side) {
    const double cm = cs.c_minus, cp = cs.c_plus, sum = cm + cp;
    auto vw = [&](double tau) {
        double v, w;
        if (side < 0) {
            v = cs.v0(x - cm * tau);
            if (x + cm * tau < 0.0) {
                w = cs.w0(x + cm * tau);
            } else {
                const double s = tau + x / cm;
                w = ((cp - cm) * cs.v0(-cm * s) + 2.0 * cm * cs.w0(cp * s)) / sum;
            }
        } else {
            w = cs.w0(x + cp * tau);
            if (x - cp * tau > 0.0) {
                v = cs.v0(x - cp * tau);
            } else {
                const double s = tau - x / cp;
                v = (2.0 * cp * cs.v0(-cm * s) + (cm - cp) * cs.w0(cp * s)) / sum;
            }
        }
        return std::pair{v, w};
    };
    ConnectedValue out;
    const auto [v, w] = vw(t);
    out.v = v;
    out.w = w;
    const double c = side < 0 ? cm : cp;
    std::vector<double> cuts;
    if (std::abs(x) / c < t) cuts.push_back(std::abs(x) / c);
    out.u = cs.u0.f(x) + gk_split(
                             [&](double tau) {
                                 const auto [a, b] = vw(tau);
                                 return 0.5 * (a + b);
                             },
                             0.0, t, cuts);
    return out;
}

}  // namespace

double ConnectedSolution::v0(double x) const {
    const double c = x <= 0.0 ? c_minus : c_plus;
    return u1.f(x) - c * u0.df(x);
}

double ConnectedSolution::w0(double x) const {
    const double c = x <= 0.0 ? c_minus : c_plus;
    return u1.f(x) + c * u0.df(x);
}

ConnectedValue connected_eval(const ConnectedSolution& cs, double t, double x) {
    return side_eval(cs, t, x, x > 0.0 ? 1 : -1);
}

ConnectedValue connected_interface(const ConnectedSolution& cs, double t, int side) {
    return side_eval(cs, t, 0.0, side < 0 ? -1 : 1);
}

TransmissionResidual transmission_residual(const ConnectedSolution& cs, double t) {
    const auto l = connected_interface(cs, t, -1);
    const auto r = connected_interface(cs, t, 1);
    TransmissionResidual res;
    res.u = std::abs(l.u - r.u);
    res.ut = std::abs(0.5 * (l.v + l.w) - 0.5 * (r.v + r.w));
    res.ux = std::abs((l.w - l.v) / (2.0 * cs.c_minus) - (r.w - r.v) / (2.0 * cs.c_plus));
    return res;
}

namespace {

/// arg = a_t t + a_x x + b.
struct LinearArg {
    double a_t, a_x, b;
    double operator()(double t, double x) const { return a_t * t + a_x * x + b; }
};

struct HeavisideTerm {
    double coefficient;
    std::vector<LinearArg> factors;
    int side;  // -1: x < 0 branch, +1: x > 0 branch
};

std::vector<HeavisideTerm> delta_terms(double cm, double cp, double x0) {
    const double r = (cp - cm) / (cp + cm);
    return {
        {1.0 / (2.0 * cm), {{cm, -1.0, x0}, {cm, 1.0, -x0}}, -1},
        {r / (2.0 * cm), {{cm, 1.0, x0}}, -1},
        {cp / (cm * (cp + cm)), {{cp, -1.0, cp * x0 / cm}}, 1},
    };
}

/// Restricts [lo, hi] to where alpha t + beta > 0.
void restrict_positive(double alpha, double beta, double& lo, double& hi) {
    if (alpha == 0.0) {
        if (!(beta > 0.0)) hi = lo - 1.0;
        return;
    }
    const double t0 = -beta / alpha;
    if (alpha > 0.0) lo = std::max(lo, t0);
    else hi = std::min(hi, t0);
}

}  // namespace

double delta_solution_eval(double c_minus, double c_plus, double t, double x, double x0) {
    if (!(x0 < 0.0)) throw std::invalid_argument("delta datum must lie left of the interface");
    const int side = x > 0.0 ? 1 : -1;  // x = 0 takes the left formula, equal to the common value
    double u = 0.0;
    for (const auto& term : delta_terms(c_minus, c_plus, x0)) {
        if (term.side != side) continue;
        double p = term.coefficient;
        for (const auto& f : term.factors) p *= heaviside(f(t, x));
        u += p;
    }
    return u;
}

std::vector<RaySegment> delta_jump_locus(double c_minus, double c_plus, double t_end, double x0) {
    std::vector<RaySegment> out;
    for (const auto& term : delta_terms(c_minus, c_plus, x0)) {
        if (term.coefficient == 0.0) continue;
        for (std::size_t k = 0; k < term.factors.size(); ++k) {
            const auto& f = term.factors[k];
            // the jump line x(t) = -(a_t t + b)/a_x
            const double mx = -f.a_t / f.a_x, bx = -f.b / f.a_x;
            double lo = 0.0, hi = t_end;
            restrict_positive(term.side * mx, term.side * bx, lo, hi);
            for (std::size_t j = 0; j < term.factors.size(); ++j) {
                if (j == k) continue;
                const auto& g = term.factors[j];
                restrict_positive(g.a_t + g.a_x * mx, g.a_x * bx + g.b, lo, hi);
            }
            if (hi - lo > 1e-14) out.push_back({"", {{lo, mx * lo + bx}, {hi, mx * hi + bx}}});
        }
    }
    return out;
}

bool same_segments(const std::vector<RaySegment>& a, const std::vector<RaySegment>& b, double tol) {
    if (a.size() != b.size()) return false;
    auto close = [&](const std::array<double, 2>& p, const std::array<double, 2>& q) {
        return std::abs(p[0] - q[0]) <= tol && std::abs(p[1] - q[1]) <= tol;
    };
    std::vector<bool> used(b.size(), false);
    for (const auto& s : a) {
        if (s.vertices.size() != 2) return false;
        bool found = false;
        for (std::size_t j = 0; j < b.size() && !found; ++j) {
            if (used[j] || b[j].vertices.size() != 2) continue;
            const auto& p = s.vertices;
            const auto& q = b[j].vertices;
            if ((close(p[0], q[0]) && close(p[1], q[1])) || (close(p[0], q[1]) && close(p[1], q[0]))) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

TJumpAmplitudes t_jump_amplitudes(double c0, double c1) {
    return {(c0 + c1) / (2.0 * c0), (c0 - c1) / (2.0 * c0)};
}

double piecewise_t_solution(double c0, double c1, double t_jump, const Profile& u0, const Profile& u1, double t,
                            double x) {
    auto I1 = [&](double a, double b) {
        std::vector<double> cuts;
        for (double s : {u1.support_lo, u1.support_hi})
            if (std::isfinite(s) && s > a && s < b) cuts.push_back(s);
        return gk_split([&](double y) { return u1.f(y); }, a, b, cuts, 1e-14);
    };
    auto dalembert = [&](double tt, double y) {
        return 0.5 * (u0.f(y - c0 * tt) + u0.f(y + c0 * tt)) + I1(y - c0 * tt, y + c0 * tt) / (2.0 * c0);
    };
    if (t <= t_jump) return dalembert(t, x);
    const double tau = t - t_jump;
    auto U1_integral = [&](double a, double b) {
        return 0.5 * c0 * ((u0.f(b + c0 * t_jump) - u0.f(a + c0 * t_jump)) - (u0.f(b - c0 * t_jump) - u0.f(a - c0 * t_jump))) +
               0.5 * (I1(a + c0 * t_jump, b + c0 * t_jump) + I1(a - c0 * t_jump, b - c0 * t_jump));
    };
    const double a = x - c1 * tau, b = x + c1 * tau;
    return 0.5 * (dalembert(t_jump, a) + dalembert(t_jump, b)) + U1_integral(a, b) / (2.0 * c1);
}

double pairing_2d(const std::function<double(double, double)>& u, const TestFunction& psi,
                  const std::function<std::vector<double>(double)>& x_breaks, const std::vector<double>& t_breaks) {
    const auto& rule = detail::GaussRule<16>::get();
    auto inner = [&](double t) {
        const double tf = psi.t_factor(t);
        if (tf == 0.0) return 0.0;
        std::vector<double> cuts{psi.x_lo(), psi.x_hi()};
        if (x_breaks)
            for (double c : x_breaks(t))
                if (c > psi.x_lo() && c < psi.x_hi()) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double w = (cuts[i + 1] - cuts[i]) / 8.0;
            for (int p = 0; p < 8; ++p)
                s += rule.integrate([&](double x) { return u(t, x) * psi.x_factor(x); }, cuts[i] + p * w,
                                    cuts[i] + (p + 1) * w);
        }
        return tf * s;
    };
    std::vector<double> cuts;
    for (double b : t_breaks)
        if (b > psi.t_lo() && b < psi.t_hi()) cuts.push_back(b);
    return gk_split(inner, std::max(0.0, psi.t_lo()), psi.t_hi(), cuts, 1e-12);
}

double delta_oracle_pairing(double c_minus, double c_plus, const TestFunction& psi, double x0) {
    const auto terms = delta_terms(c_minus, c_plus, x0);
    std::vector<LinearArg> lines{{0.0, 1.0, 0.0}};
    for (const auto& term : terms)
        for (const auto& f : term.factors) lines.push_back(f);
    auto inner = [&](double t) {
        const double tf = psi.t_factor(t);
        if (tf == 0.0) return 0.0;
        std::vector<double> cuts{psi.x_lo(), psi.x_hi()};
        for (const auto& l : lines) {
            const double x = -(l.a_t * t + l.b) / l.a_x;
            if (x > psi.x_lo() && x < psi.x_hi()) cuts.push_back(x);
        }
        std::sort(cuts.begin(), cuts.end());
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (!(cuts[i + 1] > cuts[i])) continue;
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            s += delta_solution_eval(c_minus, c_plus, t, mid, x0) *
                 (psi.x_factor_antideriv(cuts[i + 1]) - psi.x_factor_antideriv(cuts[i]));
        }
        return tf * s;
    };
    std::vector<double> cuts{-x0 / c_minus};
    for (const auto& l : lines) {
        if (l.a_t == 0.0) continue;
        for (double xb : {psi.x_lo(), psi.x_hi()}) cuts.push_back(-(l.a_x * xb + l.b) / l.a_t);
    }
    std::vector<double> inside;
    for (double c : cuts)
        if (c > std::max(0.0, psi.t_lo()) && c < psi.t_hi()) inside.push_back(c);
    return gk_split(inner, std::max(0.0, psi.t_lo()), psi.t_hi(), inside, 1e-13);
}

AssociationResult associate_values(const std::vector<double>& eps, const std::vector<double>& values,
                                   double oracle_value, const TestFunction& psi, double tol_rel) {
    if (eps.size() != values.size() || eps.size() < 2) throw std::invalid_argument("association needs at least two ladder values");
    AssociationResult res;
    res.eps = eps;
    for (double v : values) res.errors.push_back(std::abs(v - oracle_value));
    res.tol = tol_rel * psi.l1_norm();
    res.noise_floor = kAssociationNoise * psi.l1_norm();
    // below the floor the pairing quadrature dominates and the order is noise
    std::vector<double> e(res.errors);
    for (double& v : e) v = std::max(v, res.noise_floor);
    const std::size_t n = e.size();
    const std::size_t start = n / 2;
    bool mono = true;
    for (std::size_t k = start; k + 1 < n; ++k) mono = mono && e[k + 1] <= e[k] * (1.0 + 1e-6);
    res.decreasing_tail = mono && (e.back() < e[start] || e.back() <= res.noise_floor);
    res.final_error = res.errors.back();
    res.pass = res.decreasing_tail && res.final_error <= res.tol;
    return res;
}

AssociationResult associate_check(const SolutionFamily& fam, std::size_t pairing_index, double oracle_value,
                                  const TestFunction& psi, double tol_rel) {
    std::vector<double> eps, vals;
    for (const auto& r : fam.records) {
        if (pairing_index >= r.pairings.size()) throw std::invalid_argument("record lacks the requested pairing");
        eps.push_back(r.eps);
        vals.push_back(r.pairings[pairing_index]);
    }
    return associate_values(eps, vals, oracle_value, psi, tol_rel);
}

}  // namespace colwave
