#pragma once

#include <complex>
#include <vector>

#include "altq/polynomial.hpp"

namespace altq {

struct Root {
    std::complex<double> value;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;
    int total_multiplicity() const;
    // Each root repeated according to its multiplicity.
    std::vector<std::complex<double>> expanded() const;
};

struct RootFindingOptions {
    // Accept a root when |p(r)| <= residual_tol * sum_k |c_k||r|^k.
    double residual_tol = 1e-8;
    // Roots closer than cluster_tol * max(1, |r|max) merge into one multiple root.
    double cluster_tol = 1e-7;
};

// All complex zeros of p with multiplicities, from the eigenvalues of the
// companion matrix. Nearby eigenvalues are clustered into multiple roots and
// conjugate symmetry is enforced on the result. Throws NumericalError with
// the offending residuals when the eigensolver fails or a residual check
// does not pass.
RootSet find_roots(const Polynomial& p, const RootFindingOptions& options = {});
RootSet find_roots(const Polynomial& p, double residual_tol);

// leading * prod (s - r)^multiplicity, snapped to real coefficients.
Polynomial polynomial_from_roots(const RootSet& roots, double leading);

}  // namespace altq
