#pragma once

#include <complex>
#include <vector>

#include "altq/polynomial.hpp"

// Polynomial arithmetic with complex coefficients, used by root
// post-processing, partial fractions, and the joint-model solver. Vectors are
// ascending-degree coefficient lists like Polynomial.
namespace altq::cpoly {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

CVec from(const Polynomial& p);
void trim(CVec& v);
CVec add(const CVec& a, const CVec& b);
CVec mul(const CVec& a, const CVec& b);
CVec scaled(const CVec& a, Complex factor);
Complex eval(const CVec& a, Complex s);
CVec derivative(const CVec& a);

// Quotient of a by (s - root); the remainder is discarded.
CVec deflate(const CVec& a, Complex root);
// a * (s - root)
CVec raise(const CVec& a, Complex root);
CVec from_roots(const std::vector<Complex>& roots, Complex leading = 1.0);

// Drops imaginary parts. If max_rel_imag is given it receives the largest
// |imag| relative to the coefficient scale, so callers can assert the input
// was real up to rounding.
Polynomial to_real(const CVec& a, double* max_rel_imag = nullptr);

}  // namespace altq::cpoly
