#include "altq/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace altq {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    trim();
}

Polynomial::Polynomial(std::initializer_list<double> coefficients) : coeffs_(coefficients) {
    trim();
}

Polynomial Polynomial::constant(double value) {
    return Polynomial{std::vector<double>{value}};
}

Polynomial Polynomial::monomial(int degree, double coefficient) {
    std::vector<double> c(static_cast<size_t>(degree) + 1, 0.0);
    c.back() = coefficient;
    return Polynomial{std::move(c)};
}

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::coefficient(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
    return coeffs_[static_cast<size_t>(k)];
}

double Polynomial::leading_coefficient() const {
    return coeffs_.empty() ? 0.0 : coeffs_.back();
}

double Polynomial::max_abs_coefficient() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

std::complex<double> Polynomial::operator()(const std::complex<double>& s) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

Polynomial Polynomial::derivative(int order) const {
    std::vector<double> c = coeffs_;
    for (int pass = 0; pass < order && !c.empty(); ++pass) {
        std::vector<double> d;
        d.reserve(c.size() > 0 ? c.size() - 1 : 0);
        for (size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
        c = std::move(d);
    }
    return Polynomial{std::move(c)};
}

Polynomial Polynomial::reflected() const {
    std::vector<double> c = coeffs_;
    for (size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return Polynomial{std::move(c)};
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
    if (coeffs_.empty() || rhs.coeffs_.empty()) {
        coeffs_.clear();
        return *this;
    }
    std::vector<double> out(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
    for (size_t a = 0; a < coeffs_.size(); ++a)
        for (size_t b = 0; b < rhs.coeffs_.size(); ++b) out[a + b] += coeffs_[a] * rhs.coeffs_[b];
    coeffs_ = std::move(out);
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double factor) {
    for (double& c : coeffs_) c *= factor;
    trim();
    return *this;
}

}  // namespace altq
