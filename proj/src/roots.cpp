#include "altq/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "altq/cpoly.hpp"
#include "altq/errors.hpp"

namespace altq {

namespace {

using Complex = std::complex<double>;

// Termwise evaluation magnitude: the natural scale for residuals of p at x.
double eval_scale(const Polynomial& p, double absx) {
    double scale = 0.0, power = 1.0;
    for (double c : p.coefficients()) {
        scale += std::abs(c) * power;
        power *= absx;
    }
    return scale;
}

bool value_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// A root of multiplicity m is a simple root of the (m-1)-th derivative;
// Newton there recovers it to full precision.
Complex polish_multiple_root(const std::vector<Polynomial>& derivatives, Complex z, int multiplicity) {
    const Polynomial& target = derivatives[static_cast<size_t>(multiplicity - 1)];
    const Polynomial& slope = derivatives[static_cast<size_t>(multiplicity)];
    for (int step = 0; step < 8; ++step) {
        Complex dv = slope(z);
        if (std::abs(dv) < 1e-300) break;
        Complex delta = target(z) / dv;
        z -= delta;
        if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
}

// True for a genuine m-fold root: p and its first m-1 derivatives all vanish
// at z relative to their own evaluation scales.
bool derivatives_vanish(const std::vector<Polynomial>& derivatives, Complex z, int multiplicity) {
    for (int k = 0; k < multiplicity; ++k) {
        const Polynomial& d = derivatives[static_cast<size_t>(k)];
        double scale = eval_scale(d, std::abs(z));
        if (scale == 0.0) continue;
        if (std::abs(d(z)) > 1e-6 * scale) return false;
    }
    return true;
}

struct Cluster {
    Complex center;
    int multiplicity;
};

}  // namespace

int RootSet::total_multiplicity() const {
    int total = 0;
    for (const Root& r : roots) total += r.multiplicity;
    return total;
}

std::vector<Complex> RootSet::expanded() const {
    std::vector<Complex> out;
    for (const Root& r : roots)
        for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
    return out;
}

RootSet find_roots(const Polynomial& p, double residual_tol) {
    RootFindingOptions options;
    options.residual_tol = residual_tol;
    return find_roots(p, options);
}

RootSet find_roots(const Polynomial& p, const RootFindingOptions& options) {
    const int degree = p.degree();
    if (degree < 1) throw ValidationError("root finding requires degree >= 1");

    // Companion matrix of the monic polynomial.
    const double lead = p.leading_coefficient();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -p.coefficient(i) / lead;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("companion-matrix eigenvalue iteration did not converge");

    std::vector<Complex> values;
    values.reserve(static_cast<size_t>(degree));
    for (int i = 0; i < degree; ++i) values.push_back(solver.eigenvalues()(i));

    // Aberth sweeps starting from the eigenvalues. Simple roots polish to
    // machine precision; multiple-root clusters stay spread at the attainable
    // accuracy radius and are handled by the merge pass below.
    const Polynomial derivative = p.derivative();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double worst_step = 0.0;
        for (size_t i = 0; i < values.size(); ++i) {
            Complex pv = p(values[i]);
            Complex dv = derivative(values[i]);
            Complex newton = (dv == Complex{0.0, 0.0}) ? Complex{0.0, 0.0} : pv / dv;
            Complex repulsion{0.0, 0.0};
            for (size_t j = 0; j < values.size(); ++j) {
                if (j == i) continue;
                Complex gap = values[i] - values[j];
                if (std::abs(gap) > 1e-300) repulsion += 1.0 / gap;
            }
            Complex denom = 1.0 - newton * repulsion;
            Complex step = (std::abs(denom) > 1e-300) ? newton / denom : newton;
            values[i] -= step;
            worst_step = std::max(worst_step, std::abs(step) / (1.0 + std::abs(values[i])));
        }
        if (worst_step < 1e-14) break;
    }

    double magnitude = 1.0;
    for (const Complex& v : values) magnitude = std::max(magnitude, std::abs(v));
    const double merge_dist = options.cluster_tol * magnitude;

    // Single-linkage clustering at the base threshold.
    std::sort(values.begin(), values.end(), value_less);
    std::vector<Cluster> clusters;
    std::vector<bool> assigned(values.size(), false);
    for (size_t i = 0; i < values.size(); ++i) {
        if (assigned[i]) continue;
        std::vector<size_t> members{i};
        assigned[i] = true;
        for (size_t scan = 0; scan < members.size(); ++scan) {
            for (size_t j = 0; j < values.size(); ++j) {
                if (assigned[j]) continue;
                if (std::abs(values[members[scan]] - values[j]) <= merge_dist) {
                    members.push_back(j);
                    assigned[j] = true;
                }
            }
        }
        Complex sum{0.0, 0.0};
        for (size_t m : members) sum += values[m];
        clusters.push_back(Cluster{sum / static_cast<double>(members.size()),
                                   static_cast<int>(members.size())});
    }

    // Multiplicity-aware merging. A root of multiplicity m is only computable
    // to about eps^(1/m), so the eigenvalues of a triple or higher root land
    // far outside the base threshold. Candidate clusters within that radius
    // are merged only when p and its lower derivatives genuinely vanish at
    // the polished common root.
    std::vector<Polynomial> derivatives(static_cast<size_t>(degree) + 2);
    derivatives[0] = p;
    for (int k = 1; k <= degree + 1; ++k) derivatives[static_cast<size_t>(k)] = derivatives[static_cast<size_t>(k - 1)].derivative();
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t a = 0; a < clusters.size() && !merged; ++a) {
            for (size_t b = a + 1; b < clusters.size() && !merged; ++b) {
                int m = clusters[a].multiplicity + clusters[b].multiplicity;
                if (m > degree) continue;
                // one multiplicity step wider than the attainable-accuracy
                // radius, so members of an (m+1)-fold cluster qualify pairwise
                double radius = magnitude * std::pow(1e-12, 1.0 / static_cast<double>(m + 1));
                if (std::abs(clusters[a].center - clusters[b].center) > radius) continue;
                Complex center = (static_cast<double>(clusters[a].multiplicity) * clusters[a].center +
                                  static_cast<double>(clusters[b].multiplicity) * clusters[b].center) /
                                 static_cast<double>(m);
                center = polish_multiple_root(derivatives, center, m);
                if (!derivatives_vanish(derivatives, center, m)) continue;
                clusters[a] = Cluster{center, m};
                clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
                merged = true;
            }
        }
    }
    // Polish surviving multiple roots found at the base threshold too.
    for (Cluster& c : clusters)
        if (c.multiplicity > 1) c.center = polish_multiple_root(derivatives, c.center, c.multiplicity);

    std::vector<Root> roots;
    roots.reserve(clusters.size());
    for (const Cluster& c : clusters) roots.push_back(Root{c.center, c.multiplicity});

    // Conjugate symmetry: snap near-real roots, then average conjugate pairs.
    for (Root& r : roots)
        if (std::abs(r.value.imag()) <= merge_dist) r.value = Complex{r.value.real(), 0.0};
    std::vector<bool> paired(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (paired[i] || roots[i].value.imag() == 0.0) continue;
        size_t best = i;
        double best_dist = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < roots.size(); ++j) {
            if (j == i || paired[j]) continue;
            double d = std::abs(roots[j].value - std::conj(roots[i].value));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best != i && best_dist <= 4.0 * merge_dist && roots[best].multiplicity == roots[i].multiplicity) {
            Complex rep = 0.5 * (roots[i].value + std::conj(roots[best].value));
            roots[i].value = rep;
            roots[best].value = std::conj(rep);
            paired[i] = paired[best] = true;
        }
    }

    // Residual acceptance check against the termwise evaluation magnitude.
    std::ostringstream bad;
    bool ok = true;
    for (const Root& r : roots) {
        double residual = std::abs(p(r.value));
        double scale = eval_scale(p, std::abs(r.value));
        if (residual > options.residual_tol * scale) {
            ok = false;
            bad << " |p(" << r.value.real() << (r.value.imag() >= 0 ? "+" : "") << r.value.imag()
                << "i)| = " << residual << " (scale " << scale << ")";
        }
    }
    if (!ok) throw NumericalError("root residuals exceed tolerance:" + bad.str());

    RootSet result{std::move(roots)};
    std::sort(result.roots.begin(), result.roots.end(),
              [](const Root& a, const Root& b) { return value_less(a.value, b.value); });
    return result;
}

Polynomial polynomial_from_roots(const RootSet& roots, double leading) {
    cpoly::CVec prod = cpoly::from_roots(roots.expanded(), Complex{leading, 0.0});
    return cpoly::to_real(prod);
}

}  // namespace altq
