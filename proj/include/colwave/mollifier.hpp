#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace colwave {

/// Raised when a mollifier derivative is requested beyond the supported order.
class OrderTooHigh : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a scale function is evaluated outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class MollifierFamily { polynomial, bump };

/// Symmetric unit-mass kernel supported in [-1, 1].
///
/// polynomial(n): C_n (1 - x^2)^n, exact derivatives and antiderivative.
/// bump: C exp(-1/(1 - x^2)); antiderivative tabulated once and interpolated.
class Mollifier {
public:
    static Mollifier polynomial(int n = 2);
    static Mollifier bump();

    MollifierFamily family() const { return family_; }
    int degree() const { return n_; }
    double normalization() const { return norm_; }

    /// phi(x); zero for |x| >= 1.
    double eval(double x) const;
    /// k-th derivative of phi, k <= max_order().
    double deriv(double x, int k) const;
    /// Phi(x) = integral of phi from -infinity to x.
    double antideriv(double x) const;
    /// Highest derivative order served by deriv().
    int max_order() const;

    /// phi_h(x) = phi(x/h)/h.
    double scaled(double x, double h) const { return eval(x / h) / h; }
    /// k-th derivative of phi_h.
    double scaled_deriv(double x, double h, int k) const;

    std::string describe() const;

private:
    struct BumpTable;

    MollifierFamily family_ = MollifierFamily::polynomial;
    int n_ = 2;
    double norm_ = 1.0;
    std::vector<double> poly_;      // coefficients of (1 - x^2)^n in powers of x
    std::vector<double> antipoly_;  // coefficients of C_n * integral from -1
    std::shared_ptr<const BumpTable> table_;
};

enum class ScaleKind { standard, logarithmic, slow_scale };

/// Regularization scale h(eps).
struct ScaleFn {
    ScaleKind kind = ScaleKind::standard;
    double p = 4.0;  ///< exponent for slow_scale: h = eps^(1/p)

    static ScaleFn standard() { return {ScaleKind::standard, 4.0}; }
    static ScaleFn logarithmic() { return {ScaleKind::logarithmic, 4.0}; }
    static ScaleFn slow(double p = 4.0) { return {ScaleKind::slow_scale, p}; }

    double eval(double eps) const;
    std::string describe() const;
};

/// eps_k = eps0 * ratio^k, k = 0..count-1.
struct EpsilonLadder {
    double eps0 = 0.1;
    double ratio = 0.7;
    int count = 10;

    void validate() const;
    std::vector<double> values() const;
    double smallest() const;
};

}  // namespace colwave
