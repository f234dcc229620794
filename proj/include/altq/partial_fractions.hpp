#pragma once

#include <complex>
#include <vector>

#include "altq/cpoly.hpp"
#include "altq/rational.hpp"
#include "altq/roots.hpp"

namespace altq {

struct PartialFractionTerm {
    std::complex<double> pole;
    int order = 1;  // the term is coefficient / (s - pole)^order
    std::complex<double> coefficient;
};

struct PartialFractionExpansion {
    std::complex<double> constant_term{0.0, 0.0};
    std::vector<PartialFractionTerm> terms;
    std::complex<double> operator()(std::complex<double> s) const;
};

// Expansion of f over the given poles (the zeros of the denominator, with
// multiplicities). Requires deg(numerator) <= deg(denominator). Terms with
// negligible coefficients are dropped. The recombination identity is checked
// at 16 pseudo-random probe points before returning; a violation beyond the
// tolerance raises NumericalError.
PartialFractionExpansion partial_fractions(const RationalFunction& f, const RootSet& poles,
                                           double tol = 1e-9);
PartialFractionExpansion partial_fractions(const cpoly::CVec& numerator, const cpoly::CVec& denominator,
                                           const RootSet& poles, double tol = 1e-9);

}  // namespace altq
