#pragma once

#include <array>

#include <boost/math/quadrature/gauss.hpp>

namespace colwave::detail {

/// Full Gauss-Legendre rule on [-1, 1] assembled from the boost half-tables.
template <unsigned N>
struct GaussRule {
    std::array<double, N> x{};
    std::array<double, N> w{};

    GaussRule() {
        using G = boost::math::quadrature::gauss<double, N>;
        const auto& a = G::abscissa();
        const auto& wt = G::weights();
        unsigned k = 0;
        for (unsigned i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) {
                x[k] = 0.0;
                w[k++] = wt[i];
            } else {
                x[k] = a[i];
                w[k++] = wt[i];
                x[k] = -a[i];
                w[k++] = wt[i];
            }
        }
    }

    template <class F>
    double integrate(F&& f, double lo, double hi) const {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double s = 0.0;
        for (unsigned i = 0; i < N; ++i) s += w[i] * f(mid + half * x[i]);
        return s * half;
    }

    static const GaussRule& get() {
        static const GaussRule rule;
        return rule;
    }
};

}  // namespace colwave::detail
