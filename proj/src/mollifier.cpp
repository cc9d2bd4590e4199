#include "colwave/mollifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace colwave {

namespace {

double horner(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> differentiate(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
    return d;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Truncated Taylor arithmetic used for the bump derivatives.
constexpr int kJet = 5;
using Jet = std::array<double, kJet>;

Jet jet_mul(const Jet& a, const Jet& b) {
    Jet r{};
    for (int i = 0; i < kJet; ++i)
        for (int j = 0; i + j < kJet; ++j) r[i + j] += a[i] * b[j];
    return r;
}

Jet jet_inv(const Jet& a) {
    Jet r{};
    r[0] = 1.0 / a[0];
    for (int k = 1; k < kJet; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += a[j] * r[k - j];
        r[k] = -s / a[0];
    }
    return r;
}

Jet jet_exp(const Jet& a) {
    // exp(a0 + b) with b nilpotent: e^{a0} * sum b^m / m!
    Jet b = a;
    b[0] = 0.0;
    Jet r{};
    r[0] = 1.0;
    Jet term = r;
    for (int m = 1; m < kJet; ++m) {
        term = jet_mul(term, b);
        for (int i = 0; i < kJet; ++i) term[i] /= m;
        for (int i = 0; i < kJet; ++i) r[i] += term[i];
    }
    const double e0 = std::exp(a[0]);
    for (auto& v : r) v *= e0;
    return r;
}

double bump_raw(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

}  // namespace

struct Mollifier::BumpTable {
    std::vector<double> x, F, dF;
};

Mollifier Mollifier::polynomial(int n) {
    if (n < 1) throw std::invalid_argument("polynomial mollifier needs n >= 1");
    Mollifier m;
    m.family_ = MollifierFamily::polynomial;
    m.n_ = n;
    m.poly_.assign(2 * n + 1, 0.0);
    for (int k = 0; k <= n; ++k) m.poly_[2 * k] = binomial(n, k) * ((k % 2) ? -1.0 : 1.0);
    // integral over [-1,1] of (1-x^2)^n, exactly from the even coefficients
    double mass = 0.0;
    for (int k = 0; k <= n; ++k) mass += m.poly_[2 * k] * 2.0 / (2 * k + 1);
    m.norm_ = 1.0 / mass;
    m.antipoly_.assign(2 * n + 2, 0.0);
    for (int i = 0; i <= 2 * n; ++i) m.antipoly_[i + 1] = m.norm_ * m.poly_[i] / (i + 1);
    m.antipoly_[0] = 0.5;  // odd part vanishes at 0, so Phi(0) = 1/2 fixes the constant
    return m;
}

Mollifier Mollifier::bump() {
    // the table is costly and identical every time
    static const Mollifier cached = [] {
        Mollifier m;
        m.family_ = MollifierFamily::bump;
        m.n_ = 0;

        auto table = std::make_shared<BumpTable>();
        constexpr int N = 4097;
        table->x.resize(N);
        for (int i = 0; i < N; ++i)
            table->x[i] = -std::cos(std::numbers::pi * i / (N - 1));
        table->x.front() = -1.0;
        table->x.back() = 1.0;
        table->F.assign(N, 0.0);
        for (int i = 1; i < N; ++i) {
            // panels are short and the integrand analytic on each; adaptive rules
            // stall near the ends where it underflows
            const double piece = boost::math::quadrature::gauss<double, 20>::integrate(bump_raw, table->x[i - 1], table->x[i]);
            table->F[i] = table->F[i - 1] + piece;
        }
        const double total = table->F.back();
        m.norm_ = 1.0 / total;
        for (auto& v : table->F) v /= total;
        table->dF.resize(N);
        for (int i = 0; i < N; ++i) table->dF[i] = bump_raw(table->x[i]) / total;
        // Fritsch-Carlson limiting keeps the Hermite interpolant monotone.
        for (int i = 0; i + 1 < N; ++i) {
            const double dx = table->x[i + 1] - table->x[i];
            const double delta = (table->F[i + 1] - table->F[i]) / dx;
            if (delta <= 0.0) {
                table->dF[i] = table->dF[i + 1] = 0.0;
                continue;
            }
            const double a = table->dF[i] / delta;
            const double b = table->dF[i + 1] / delta;
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                table->dF[i] = tau * a * delta;
                table->dF[i + 1] = tau * b * delta;
            }
        }
        m.table_ = table;
        return m;
    }();
    return cached;
}

int Mollifier::max_order() const {
    if (family_ == MollifierFamily::polynomial) return std::min(4, 2 * n_ - 1);
    return 4;
}

double Mollifier::eval(double x) const {
    if (std::abs(x) >= 1.0) return 0.0;
    if (family_ == MollifierFamily::polynomial) return norm_ * std::pow(1.0 - x * x, n_);
    return norm_ * bump_raw(x);
}

double Mollifier::deriv(double x, int k) const {
    if (k < 0) throw std::invalid_argument("negative derivative order");
    if (k > max_order()) {
        std::ostringstream os;
        os << "derivative order " << k << " exceeds " << max_order() << " for " << describe();
        throw OrderTooHigh(os.str());
    }
    if (k == 0) return eval(x);
    if (std::abs(x) >= 1.0) return 0.0;
    if (family_ == MollifierFamily::polynomial) {
        std::vector<double> c = poly_;
        for (int i = 0; i < k; ++i) c = differentiate(c);
        return norm_ * horner(c, x);
    }
    // bump: jets of s = 1 - (x+d)^2, g = -1/s, phi = exp(g)
    Jet s{};
    s[0] = 1.0 - x * x;
    s[1] = -2.0 * x;
    s[2] = -1.0;
    Jet g = jet_inv(s);
    for (auto& v : g) v = -v;
    const Jet e = jet_exp(g);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return norm_ * e[k] * fact;
}

double Mollifier::antideriv(double x) const {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (family_ == MollifierFamily::polynomial) return horner(antipoly_, x);
    if (x > 0.0) return 1.0 - antideriv(-x);
    const auto& t = *table_;
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const std::size_t i = std::min<std::size_t>(it - t.x.begin(), t.x.size() - 1) - 1;
    const double dx = t.x[i + 1] - t.x[i];
    const double s = (x - t.x[i]) / dx;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * t.F[i] + h10 * dx * t.dF[i] + h01 * t.F[i + 1] + h11 * dx * t.dF[i + 1];
}

double Mollifier::scaled_deriv(double x, double h, int k) const {
    return deriv(x / h, k) / std::pow(h, k + 1);
}

std::string Mollifier::describe() const {
    if (family_ == MollifierFamily::bump) return "bump";
    return "polynomial(" + std::to_string(n_) + ")";
}

double ScaleFn::eval(double eps) const {
    if (!(eps > 0.0)) throw DomainError("scale needs eps > 0");
    switch (kind) {
        case ScaleKind::standard:
            return eps;
        case ScaleKind::logarithmic:
            if (eps >= 1.0) throw DomainError("logarithmic scale needs eps < 1");
            return 1.0 / std::abs(std::log(eps));
        case ScaleKind::slow_scale:
            if (!(p > 1.0)) throw DomainError("slow scale needs p > 1");
            return std::pow(eps, 1.0 / p);
    }
    return eps;
}

std::string ScaleFn::describe() const {
    switch (kind) {
        case ScaleKind::standard: return "standard";
        case ScaleKind::logarithmic: return "logarithmic";
        case ScaleKind::slow_scale: {
            std::ostringstream os;
            os << "slow_scale(p=" << p << ")";
            return os.str();
        }
    }
    return "standard";
}

void EpsilonLadder::validate() const {
    if (!(eps0 > 0.0 && eps0 <= 1.0)) throw std::invalid_argument("ladder.eps0 must lie in (0,1]");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("ladder.ratio must lie in (0,1)");
    if (count < 4) throw std::invalid_argument("ladder.count must be at least 4");
}

std::vector<double> EpsilonLadder::values() const {
    validate();
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) v[k] = eps0 * std::pow(ratio, k);
    return v;
}

double EpsilonLadder::smallest() const { return values().back(); }

}  // namespace colwave
