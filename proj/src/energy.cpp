#include "colwave/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gauss.hpp"

namespace colwave {

double EnergyTrace::max_relative_drift() const {
    if (E.empty() || E.front() == 0.0) return 0.0;
    double d = 0.0;
    for (double e : E) d = std::max(d, std::abs(e - E.front()) / E.front());
    return d;
}

EnergyTrace energy_trace(const SolutionRecord& rec, EnergyForm form) {
    if (!rec.coeff) throw std::invalid_argument("energy needs the record's coefficient");
    if (!rec.has("ut") || !rec.has("ux")) throw std::invalid_argument("energy needs fields ut and ux");
    const auto& g = rec.grid;
    const int n = g.nodes();
    std::vector<double> cx(n, 1.0);
    if (form != EnergyForm::nonconservative_t)
        for (int i = 0; i < n; ++i) cx[i] = rec.coeff->eval(g.x(i));

    EnergyTrace tr;
    tr.eps = rec.eps;
    for (std::size_t s = 0; s < rec.snaps.size(); ++s) {
        const auto& ut = rec.field(s, "ut");
        const auto& ux = rec.field(s, "ux");
        const double t = rec.snaps[s].t;
        const double ct = form == EnergyForm::nonconservative_t ? rec.coeff->eval(t) : 1.0;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double e;
            switch (form) {
                case EnergyForm::conservative_x: e = ut[i] * ut[i] + cx[i] * cx[i] * ux[i] * ux[i]; break;
                case EnergyForm::nonconservative_x: e = ut[i] * ut[i] / (cx[i] * cx[i]) + ux[i] * ux[i]; break;
                default: e = ut[i] * ut[i] + ct * ct * ux[i] * ux[i]; break;
            }
            sum += (i == 0 || i == n - 1) ? 0.5 * e : e;
        }
        tr.times.push_back(t);
        tr.E.push_back(sum * g.dx());
    }
    return tr;
}

std::vector<EnergyTrace> energy_traces(const SolutionFamily& fam, EnergyForm form) {
    std::vector<EnergyTrace> out;
    for (const auto& r : fam.records) out.push_back(energy_trace(r, form));
    return out;
}

double gronwall_factor(const RegularizedCoeff& c, double t) {
    // |a'|/a = 2|c'|/c; integrate over the layers only, elsewhere c' = 0
    const auto& rule = detail::GaussRule<16>::get();
    double s = 0.0;
    for (const auto& [lo, hi] : c.layers()) {
        const double a = std::max(0.0, lo), b = std::min(t, hi);
        if (b <= a) continue;
        const int panels = 32;
        const double w = (b - a) / panels;
        for (int p = 0; p < panels; ++p)
            s += rule.integrate([&](double x) { return 2.0 * std::abs(c.deriv(x, 1)) / c.eval(x); }, a + p * w,
                                a + (p + 1) * w);
    }
    return std::exp(s);
}

double gronwall_factor_uniform(const RegularizedCoeff& c) {
    const auto& v = c.base().values;
    double tv = 0.0, lo = v.front() * v.front();
    for (std::size_t i = 0; i < v.size(); ++i) {
        lo = std::min(lo, v[i] * v[i]);
        if (i) tv += std::abs(v[i] * v[i] - v[i - 1] * v[i - 1]);
    }
    return std::exp(tv / lo);
}

double naive_growth_factor(const RegularizedCoeff& c, double T) {
    double m = 0.0;
    for (const auto& [lo, hi] : c.layers())
        for (int k = 0; k <= 400; ++k) m = std::max(m, std::abs(c.deriv(lo + (hi - lo) * k / 400.0, 1)));
    return std::exp(T * m);
}

}  // namespace colwave
