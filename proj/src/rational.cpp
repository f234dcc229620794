#include "altq/rational.hpp"

#include <cmath>

#include "altq/errors.hpp"

namespace altq {

namespace {

// Upper bound on |p(x)| from termwise magnitudes; the natural scale for
// deciding whether an evaluation point sits on a pole.
double eval_scale(const Polynomial& p, double absx) {
    double scale = 0.0, power = 1.0;
    for (double c : p.coefficients()) {
        scale += std::abs(c) * power;
        power *= absx;
    }
    return scale;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    return b;
}

}  // namespace

RationalFunction::RationalFunction() : num_{}, den_{Polynomial::constant(1.0)} {}

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_.is_zero()) throw ValidationError("rational function denominator is identically zero");
    canonicalize();
}

RationalFunction RationalFunction::constant(double value) {
    return RationalFunction{Polynomial::constant(value), Polynomial::constant(1.0)};
}

RationalFunction RationalFunction::from_polynomial(Polynomial p) {
    return RationalFunction{std::move(p), Polynomial::constant(1.0)};
}

void RationalFunction::canonicalize() {
    if (den_.leading_coefficient() < 0.0) {
        num_ *= -1.0;
        den_ *= -1.0;
    }
}

double RationalFunction::operator()(double s) const {
    double d = den_(s);
    if (std::abs(d) <= 1e-14 * eval_scale(den_, std::abs(s)))
        throw DomainError("rational function evaluated at a pole");
    return num_(s) / d;
}

std::complex<double> RationalFunction::operator()(const std::complex<double>& s) const {
    std::complex<double> d = den_(s);
    if (std::abs(d) <= 1e-14 * eval_scale(den_, std::abs(s)))
        throw DomainError("rational function evaluated at a pole");
    return num_(s) / d;
}

RationalFunction RationalFunction::derivative(int order) const {
    RationalFunction f = *this;
    for (int pass = 0; pass < order; ++pass) {
        Polynomial num = f.num_.derivative() * f.den_ - f.num_ * f.den_.derivative();
        Polynomial den = f.den_ * f.den_;
        f = RationalFunction{std::move(num), std::move(den)};
    }
    return f;
}

std::vector<std::complex<double>> RationalFunction::derivatives_at(std::complex<double> x, int order) const {
    // From num = f * den, Leibniz gives
    //   num^(k)(x) = sum_j C(k,j) f^(j)(x) den^(k-j)(x),
    // which is solved for f^(k)(x) one order at a time.
    std::complex<double> d0 = den_(x);
    if (std::abs(d0) <= 1e-14 * eval_scale(den_, std::abs(x)))
        throw DomainError("rational function derivatives requested at a pole");
    std::vector<std::complex<double>> nd(static_cast<size_t>(order) + 1);
    std::vector<std::complex<double>> dd(static_cast<size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        nd[static_cast<size_t>(k)] = num_.derivative(k)(x);
        dd[static_cast<size_t>(k)] = den_.derivative(k)(x);
    }
    std::vector<std::complex<double>> f(static_cast<size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        std::complex<double> acc = nd[static_cast<size_t>(k)];
        for (int j = 0; j < k; ++j)
            acc -= binomial(k, j) * f[static_cast<size_t>(j)] * dd[static_cast<size_t>(k - j)];
        f[static_cast<size_t>(k)] = acc / d0;
    }
    return f;
}

std::vector<double> RationalFunction::derivatives_at(double x, int order) const {
    auto cv = derivatives_at(std::complex<double>(x, 0.0), order);
    std::vector<double> out(cv.size());
    for (size_t k = 0; k < cv.size(); ++k) out[k] = cv[k].real();
    return out;
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& rhs) {
    Polynomial num = num_ * rhs.den_ + rhs.num_ * den_;
    Polynomial den = den_ * rhs.den_;
    *this = RationalFunction{std::move(num), std::move(den)};
    return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& rhs) {
    Polynomial num = num_ * rhs.den_ - rhs.num_ * den_;
    Polynomial den = den_ * rhs.den_;
    *this = RationalFunction{std::move(num), std::move(den)};
    return *this;
}

RationalFunction& RationalFunction::operator*=(const RationalFunction& rhs) {
    *this = RationalFunction{num_ * rhs.num_, den_ * rhs.den_};
    return *this;
}

RationalFunction& RationalFunction::operator*=(double factor) {
    num_ *= factor;
    return *this;
}

}  // namespace altq
