#pragma once

#include <complex>
#include <vector>

#include "altq/polynomial.hpp"

namespace altq {

// Ratio of two real polynomials. Canonical form keeps the leading denominator
// coefficient positive; no factor cancellation is attempted beyond trimming.
class RationalFunction {
  public:
    RationalFunction();  // 0 / 1
    RationalFunction(Polynomial numerator, Polynomial denominator);
    static RationalFunction constant(double value);
    static RationalFunction from_polynomial(Polynomial p);

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    double operator()(double s) const;
    std::complex<double> operator()(const std::complex<double>& s) const;

    // Exact symbolic derivative by the quotient rule, applied `order` times.
    RationalFunction derivative(int order = 1) const;

    // f(x), f'(x), ..., f^(order)(x) evaluated from exact polynomial
    // derivatives of numerator and denominator, without forming the symbolic
    // quotient-rule expression.
    std::vector<std::complex<double>> derivatives_at(std::complex<double> x, int order) const;
    std::vector<double> derivatives_at(double x, int order) const;

    RationalFunction& operator+=(const RationalFunction& rhs);
    RationalFunction& operator-=(const RationalFunction& rhs);
    RationalFunction& operator*=(const RationalFunction& rhs);
    RationalFunction& operator*=(double factor);

    friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
    friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
    friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
    friend RationalFunction operator*(RationalFunction a, double f) { return a *= f; }
    friend RationalFunction operator*(double f, RationalFunction a) { return a *= f; }
    friend RationalFunction operator-(const RationalFunction& a) { return a * -1.0; }

    bool operator==(const RationalFunction&) const = default;

  private:
    void canonicalize();
    Polynomial num_;
    Polynomial den_;
};

}  // namespace altq
