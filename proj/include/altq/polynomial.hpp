#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace altq {

// Dense univariate polynomial with real coefficients stored in ascending
// degree order. Trailing zero coefficients are trimmed, so the leading
// coefficient of a nonzero polynomial is nonzero; the zero polynomial has an
// empty coefficient vector and degree -1.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    Polynomial(std::initializer_list<double> coefficients);

    static Polynomial constant(double value);
    static Polynomial monomial(int degree, double coefficient = 1.0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    double coefficient(int k) const;
    double leading_coefficient() const;
    double max_abs_coefficient() const;
    const std::vector<double>& coefficients() const { return coeffs_; }

    double operator()(double s) const;
    std::complex<double> operator()(const std::complex<double>& s) const;

    Polynomial derivative(int order = 1) const;
    // Substitutes s -> -s.
    Polynomial reflected() const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(const Polynomial& rhs);
    Polynomial& operator*=(double factor);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, double f) { return a *= f; }
    friend Polynomial operator*(double f, Polynomial a) { return a *= f; }
    friend Polynomial operator-(const Polynomial& a) { return a * -1.0; }

    bool operator==(const Polynomial&) const = default;

  private:
    void trim();
    std::vector<double> coeffs_;
};

}  // namespace altq
