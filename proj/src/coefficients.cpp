#include "colwave/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gauss.hpp"

namespace colwave {

PiecewiseConstantCoeff PiecewiseConstantCoeff::constant(double c, Variable var) {
    PiecewiseConstantCoeff p;
    p.values = {c};
    p.variable = var;
    p.validate();
    return p;
}

PiecewiseConstantCoeff PiecewiseConstantCoeff::jump(double c_minus, double c_plus, double at,
                                                    Variable var) {
    PiecewiseConstantCoeff p;
    p.breakpoints = {at};
    p.values = {c_minus, c_plus};
    p.variable = var;
    p.validate();
    return p;
}

void PiecewiseConstantCoeff::validate() const {
    if (values.size() != breakpoints.size() + 1)
        throw std::invalid_argument("coefficient needs one more value than breakpoints");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("coefficient values must be finite and positive");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("coefficient breakpoints must be strictly increasing");
}

double PiecewiseConstantCoeff::eval(double s) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
    return values[it - breakpoints.begin()];
}

double PiecewiseConstantCoeff::lower() const { return *std::min_element(values.begin(), values.end()); }
double PiecewiseConstantCoeff::upper() const { return *std::max_element(values.begin(), values.end()); }

RegularizedCoeff::RegularizedCoeff(PiecewiseConstantCoeff base, Mollifier mollifier, ScaleFn scale,
                                   double eps)
    : base_(std::move(base)), mollifier_(std::move(mollifier)), scale_(scale), eps_(eps) {
    base_.validate();
    h_ = scale_.eval(eps_);
}

double RegularizedCoeff::eval(double s) const {
    double c = base_.values.front();
    for (std::size_t j = 0; j < base_.breakpoints.size(); ++j) {
        const double jump = base_.values[j + 1] - base_.values[j];
        c += jump * mollifier_.antideriv((s - base_.breakpoints[j]) / h_);
    }
    return c;
}

double RegularizedCoeff::deriv(double s, int k) const {
    if (k == 0) return eval(s);
    double d = 0.0;
    const double scale = std::pow(h_, -k);
    for (std::size_t j = 0; j < base_.breakpoints.size(); ++j) {
        const double jump = base_.values[j + 1] - base_.values[j];
        d += jump * mollifier_.deriv((s - base_.breakpoints[j]) / h_, k - 1);
    }
    return d * scale;
}

std::vector<std::pair<double, double>> RegularizedCoeff::layers() const {
    std::vector<std::pair<double, double>> out;
    for (double b : base_.breakpoints) {
        const double lo = b - h_, hi = b + h_;
        if (!out.empty() && lo <= out.back().second)
            out.back().second = hi;
        else
            out.emplace_back(lo, hi);
    }
    return out;
}

CoeffIntegral::CoeffIntegral(std::shared_ptr<const RegularizedCoeff> coeff, Integrand kind)
    : coeff_(std::move(coeff)), kind_(kind) {
    const double h = coeff_->h();
    const auto layers = coeff_->layers();
    if (layers.empty()) {
        knots_ = {0.0};
        cumulative_ = {0.0};
    }
    for (const auto& [a, b] : layers) {
        if (!knots_.empty()) is_panel_.push_back(0);  // affine gap between two layers
        knots_.push_back(a);
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / (h / 8.0) - 1e-9)));
        for (int i = 1; i <= n; ++i) {
            knots_.push_back(a + (b - a) * i / n);
            is_panel_.push_back(1);
        }
    }
    if (!layers.empty()) {
        cumulative_.assign(knots_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
            const double lo = knots_[i], hi = knots_[i + 1];
            double piece;
            if (is_panel_[i]) piece = panel_integral(lo, hi);
            else piece = (hi - lo) * f_of(coeff_->base().eval(0.5 * (lo + hi)));
            cumulative_[i + 1] = cumulative_[i] + piece;
        }
    }
    offset_ = 0.0;
    offset_ = raw(0.0);
}

double CoeffIntegral::panel_integral(double a, double b) const {
    const auto& rule = detail::GaussRule<16>::get();
    return rule.integrate([&](double y) { return f_of(coeff_->eval(y)); }, a, b);
}

double CoeffIntegral::raw(double s) const {
    const auto& base = coeff_->base();
    if (s <= knots_.front()) return -(knots_.front() - s) * f_of(base.values.front());
    if (s >= knots_.back()) return cumulative_.back() + (s - knots_.back()) * f_of(base.values.back());
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    const std::size_t i = (it - knots_.begin()) - 1;
    if (is_panel_[i]) return cumulative_[i] + panel_integral(knots_[i], s);
    return cumulative_[i] + (s - knots_[i]) * f_of(base.eval(0.5 * (knots_[i] + knots_[i + 1])));
}

double CoeffIntegral::eval(double s) const { return raw(s) - offset_; }

double CoeffIntegral::integrand(double s) const { return f_of(coeff_->eval(s)); }

double CoeffIntegral::invert(double y) const {
    const double b0 = coeff_->lower(), b1 = coeff_->upper();
    double k1, k2;
    if (kind_ == Integrand::reciprocal) {
        k1 = b0;
        k2 = b1;
    } else {
        k1 = 1.0 / b0;
        k2 = 1.0 / b1;
    }
    const double pad = 1e-12 * (1.0 + std::abs(y) * b1 / b0);
    double lo = std::min(y * k1, y * k2) - pad;
    double hi = std::max(y * k1, y * k2) + pad;
    double s = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double r = eval(s) - y;
        if (r == 0.0) return s;
        if (r > 0.0) hi = s;
        else lo = s;
        double next = s - r / integrand(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - s);
        s = next;
        if (step <= 4e-16 * (1.0 + std::abs(s)) || hi - lo <= 4e-16 * (1.0 + std::abs(s))) break;
    }
    return s;
}

std::shared_ptr<const CoeffIntegral> make_antideriv(std::shared_ptr<const RegularizedCoeff> c) {
    return std::make_shared<const CoeffIntegral>(std::move(c), CoeffIntegral::Integrand::reciprocal);
}

std::shared_ptr<const CoeffIntegral> make_time_integral(std::shared_ptr<const RegularizedCoeff> c) {
    return std::make_shared<const CoeffIntegral>(std::move(c), CoeffIntegral::Integrand::direct);
}

}  // namespace colwave
