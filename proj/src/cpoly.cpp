#include "altq/cpoly.hpp"

#include <algorithm>
#include <cmath>

namespace altq::cpoly {

CVec from(const Polynomial& p) {
    CVec v;
    v.reserve(p.coefficients().size());
    for (double c : p.coefficients()) v.emplace_back(c, 0.0);
    return v;
}

void trim(CVec& v) {
    while (!v.empty() && v.back() == Complex{0.0, 0.0}) v.pop_back();
}

CVec add(const CVec& a, const CVec& b) {
    CVec out(std::max(a.size(), b.size()), Complex{0.0, 0.0});
    for (size_t k = 0; k < a.size(); ++k) out[k] += a[k];
    for (size_t k = 0; k < b.size(); ++k) out[k] += b[k];
    trim(out);
    return out;
}

CVec mul(const CVec& a, const CVec& b) {
    if (a.empty() || b.empty()) return {};
    CVec out(a.size() + b.size() - 1, Complex{0.0, 0.0});
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    trim(out);
    return out;
}

CVec scaled(const CVec& a, Complex factor) {
    CVec out = a;
    for (Complex& c : out) c *= factor;
    trim(out);
    return out;
}

Complex eval(const CVec& a, Complex s) {
    Complex acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * s + *it;
    return acc;
}

CVec derivative(const CVec& a) {
    if (a.size() <= 1) return {};
    CVec out;
    out.reserve(a.size() - 1);
    for (size_t k = 1; k < a.size(); ++k) out.push_back(static_cast<double>(k) * a[k]);
    trim(out);
    return out;
}

CVec deflate(const CVec& a, Complex root) {
    // synthetic division, highest coefficient first
    if (a.size() <= 1) return {};
    CVec out(a.size() - 1, Complex{0.0, 0.0});
    Complex carry = a.back();
    for (size_t k = a.size() - 1; k-- > 0;) {
        out[k] = carry;
        carry = a[k] + carry * root;
    }
    trim(out);
    return out;
}

CVec raise(const CVec& a, Complex root) {
    if (a.empty()) return {};
    CVec out(a.size() + 1, Complex{0.0, 0.0});
    for (size_t k = 0; k < a.size(); ++k) {
        out[k + 1] += a[k];
        out[k] -= a[k] * root;
    }
    trim(out);
    return out;
}

CVec from_roots(const std::vector<Complex>& roots, Complex leading) {
    CVec out{leading};
    for (Complex r : roots) out = raise(out, r);
    return out;
}

Polynomial to_real(const CVec& a, double* max_rel_imag) {
    double scale = 0.0;
    for (Complex c : a) scale = std::max(scale, std::abs(c));
    double worst = 0.0;
    std::vector<double> coeffs;
    coeffs.reserve(a.size());
    for (Complex c : a) {
        if (scale > 0.0) worst = std::max(worst, std::abs(c.imag()) / scale);
        coeffs.push_back(c.real());
    }
    if (max_rel_imag) *max_rel_imag = worst;
    return Polynomial{std::move(coeffs)};
}

}  // namespace altq::cpoly
