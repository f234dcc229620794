#include "altq/partial_fractions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "altq/errors.hpp"

namespace altq {

namespace {

using cpoly::Complex;
using cpoly::CVec;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    return b;
}

}  // namespace

std::complex<double> PartialFractionExpansion::operator()(std::complex<double> s) const {
    Complex acc = constant_term;
    for (const PartialFractionTerm& t : terms) {
        Complex d = s - t.pole;
        Complex pw = d;
        for (int k = 1; k < t.order; ++k) pw *= d;
        acc += t.coefficient / pw;
    }
    return acc;
}

PartialFractionExpansion partial_fractions(const RationalFunction& f, const RootSet& poles, double tol) {
    return partial_fractions(cpoly::from(f.numerator()), cpoly::from(f.denominator()), poles, tol);
}

PartialFractionExpansion partial_fractions(const CVec& numerator, const CVec& denominator,
                                           const RootSet& poles, double tol) {
    CVec num = numerator;
    CVec den = denominator;
    cpoly::trim(num);
    cpoly::trim(den);
    if (den.empty()) throw ValidationError("partial fractions: denominator is identically zero");
    const int num_deg = static_cast<int>(num.size()) - 1;
    const int den_deg = static_cast<int>(den.size()) - 1;
    if (num_deg > den_deg)
        throw ValidationError("partial fractions: numerator degree exceeds denominator degree");
    if (poles.total_multiplicity() != den_deg)
        throw ValidationError("partial fractions: pole multiplicities do not match the denominator degree");

    PartialFractionExpansion expansion;
    if (num_deg == den_deg && num_deg >= 0) expansion.constant_term = num.back() / den.back();

    for (const Root& pole : poles.roots) {
        const Complex r = pole.value;
        const int m = pole.multiplicity;
        CVec cofactor = den;
        for (int k = 0; k < m; ++k) cofactor = cpoly::deflate(cofactor, r);

        // Derivatives of g = num / cofactor at the pole via the Leibniz
        // recurrence; the coefficient of 1/(s-r)^(m-j) is g^(j)(r)/j!.
        std::vector<Complex> nd(static_cast<size_t>(m)), cd(static_cast<size_t>(m));
        CVec npoly = num, cpolyv = cofactor;
        for (int d = 0; d < m; ++d) {
            nd[static_cast<size_t>(d)] = cpoly::eval(npoly, r);
            cd[static_cast<size_t>(d)] = cpoly::eval(cpolyv, r);
            npoly = cpoly::derivative(npoly);
            cpolyv = cpoly::derivative(cpolyv);
        }
        if (std::abs(cd[0]) == 0.0)
            throw NumericalError("partial fractions: pole cofactor vanished (poles not separated)");
        std::vector<Complex> g(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            Complex acc = nd[static_cast<size_t>(k)];
            for (int j = 0; j < k; ++j)
                acc -= binomial(k, j) * g[static_cast<size_t>(j)] * cd[static_cast<size_t>(k - j)];
            g[static_cast<size_t>(k)] = acc / cd[0];
        }
        for (int j = 0; j < m; ++j) {
            Complex coeff = g[static_cast<size_t>(j)] / factorial(j);
            expansion.terms.push_back(PartialFractionTerm{r, m - j, coeff});
        }
    }

    // Drop negligible coefficients so exact-zero terms do not linger.
    double coeff_scale = std::abs(expansion.constant_term);
    for (const PartialFractionTerm& t : expansion.terms) coeff_scale = std::max(coeff_scale, std::abs(t.coefficient));
    if (coeff_scale == 0.0) coeff_scale = 1.0;
    std::erase_if(expansion.terms, [&](const PartialFractionTerm& t) {
        return std::abs(t.coefficient) <= 1e-12 * coeff_scale;
    });

    // Recombination identity at pseudo-random probe points.
    double pole_scale = 1.0;
    for (const Root& pole : poles.roots) pole_scale = std::max(pole_scale, std::abs(pole.value));
    std::mt19937 rng(0x9e3779b9u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    std::ostringstream bad;
    bool ok = true;
    int attempts = 0;
    while (checked < 16 && attempts < 1000) {
        ++attempts;
        double radius = (0.5 + 1.5 * unit(rng)) * pole_scale;
        double angle = 2.0 * std::numbers::pi * unit(rng);
        Complex z{radius * std::cos(angle), radius * std::sin(angle)};
        double separation = std::numeric_limits<double>::infinity();
        for (const Root& pole : poles.roots) separation = std::min(separation, std::abs(z - pole.value));
        if (separation < 0.05 * pole_scale) continue;
        Complex direct = cpoly::eval(num, z) / cpoly::eval(den, z);
        Complex recombined = expansion(z);
        double err = std::abs(direct - recombined);
        if (err > tol * (1.0 + std::abs(direct))) {
            ok = false;
            bad << " probe (" << z.real() << "," << z.imag() << ") error " << err;
        }
        ++checked;
    }
    if (!ok)
        throw NumericalError("partial fraction recombination failed probe check:" + bad.str());

    return expansion;
}

}  // namespace altq
