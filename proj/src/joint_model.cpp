#include "altq/joint_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "altq/cpoly.hpp"
#include "altq/errors.hpp"
#include "altq/partial_fractions.hpp"
#include "altq/roots.hpp"

namespace altq {

namespace {

using cpoly::Complex;
using cpoly::CVec;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

Complex int_power(Complex base, int n) {
    Complex acc{1.0, 0.0};
    for (int i = 0; i < n; ++i) acc *= base;
    return acc;
}

void validate(const JointLstModel& m) {
    if (!(m.service_rate > 0.0)) throw ValidationError("service rate must be positive");
    if (std::abs(m.base_lst(0.0) - 1.0) > 1e-9)
        throw ValidationError("preparation transform factor must equal 1 at the origin");
    if (!m.laplace_exponent.is_zero() && std::abs(m.laplace_exponent(0.0)) > 1e-9)
        throw ValidationError("exponent function must vanish at the origin");
    const Polynomial& p1 = m.base_lst.numerator();
    const Polynomial& q1 = m.base_lst.denominator();
    if (p1.degree() > q1.degree())
        throw ValidationError("preparation transform factor must stay bounded at infinity");
    if (q1.degree() >= 1) {
        RootSet zeros = find_roots(q1);
        for (const Root& r : zeros.roots)
            if (r.value.real() >= -1e-9 * (1.0 + std::abs(r.value)))
                throw ValidationError(
                    "poles of the preparation transform factor must have negative real part");
    }
}

// int_0^x t^p e^{r t} dt for Re(r) < 0, closed form.
Complex incomplete_term_integral(int p, Complex r, double x) {
    Complex tail{0.0, 0.0}, term{1.0, 0.0};
    for (int k = 0; k <= p; ++k) {
        tail += term;
        term *= -r * x / static_cast<double>(k + 1);
    }
    return factorial(p) / int_power(-r, p + 1) * (1.0 - std::exp(r * x) * tail);
}

struct HalfPlaneSplit {
    Complex constant{0.0, 0.0};
    std::vector<PartialFractionTerm> negative;  // poles with negative real part
    std::vector<PartialFractionTerm> positive;
    Complex eval_negative(Complex s) const {
        Complex acc{0.0, 0.0};
        for (const PartialFractionTerm& t : negative) acc += t.coefficient / int_power(s - t.pole, t.order);
        return acc;
    }
    Complex eval_positive(Complex s) const {
        Complex acc{0.0, 0.0};
        for (const PartialFractionTerm& t : positive) acc += t.coefficient / int_power(s - t.pole, t.order);
        return acc;
    }
};

HalfPlaneSplit split_by_half_plane(const PartialFractionExpansion& pf) {
    HalfPlaneSplit split;
    split.constant = pf.constant_term;
    for (const PartialFractionTerm& t : pf.terms) {
        if (t.pole.real() < 0.0)
            split.negative.push_back(t);
        else
            split.positive.push_back(t);
    }
    return split;
}

// Merge an extra pole into a root set, growing the multiplicity of a nearby
// existing root instead of keeping two almost-coincident poles.
RootSet merge_pole(const RootSet& base, Complex pole, int multiplicity) {
    double scale = 1.0 + std::abs(pole);
    for (const Root& r : base.roots) scale = std::max(scale, 1.0 + std::abs(r.value));
    RootSet out = base;
    for (Root& r : out.roots) {
        if (std::abs(r.value - pole) <= 1e-7 * scale) {
            r.multiplicity += multiplicity;
            return out;
        }
    }
    out.roots.push_back(Root{pole, multiplicity});
    return out;
}

}  // namespace

JointLstModel make_independent(const RationalFunction& preparation_lst, double service_rate) {
    JointLstModel m;
    m.service_rate = service_rate;
    m.base_lst = preparation_lst;
    m.laplace_exponent = RationalFunction{};
    m.kind = DependenceKind::independent;
    validate(m);
    return m;
}

JointLstModel make_independent(const MixedErlangSpec& preparation, double service_rate) {
    JointLstModel m = make_independent(preparation.lst(), service_rate);
    m.preparation_spec = preparation;
    return m;
}

JointLstModel make_linear(double coefficient, double service_rate) {
    if (!(coefficient > 0.0)) throw ValidationError("linear dependence coefficient must be positive");
    JointLstModel m;
    m.service_rate = service_rate;
    m.base_lst = RationalFunction::constant(1.0);
    m.laplace_exponent = RationalFunction::from_polynomial(Polynomial{0.0, coefficient});
    m.kind = DependenceKind::linear;
    m.linear_coefficient = coefficient;
    validate(m);
    return m;
}

JointLstModel make_compound_poisson(double intensity, const RationalFunction& jump_lst, double service_rate) {
    if (!(intensity > 0.0)) throw ValidationError("compound Poisson intensity must be positive");
    if (std::abs(jump_lst(0.0) - 1.0) > 1e-9)
        throw ValidationError("jump transform must equal 1 at the origin");
    JointLstModel m;
    m.service_rate = service_rate;
    m.base_lst = RationalFunction::constant(1.0);
    m.laplace_exponent = (RationalFunction::constant(1.0) - jump_lst) * intensity;
    m.kind = DependenceKind::compound_poisson;
    m.jump_intensity = intensity;
    validate(m);
    return m;
}

JointLstModel make_compound_poisson(double intensity, const MixedErlangSpec& jumps, double service_rate) {
    JointLstModel m = make_compound_poisson(intensity, jumps.lst(), service_rate);
    m.jump_spec = jumps;
    return m;
}

JointLstModel make_brownian(double drift, double variance, double service_rate) {
    if (variance < 0.0) throw ValidationError("diffusion variance must be nonnegative");
    JointLstModel m;
    m.service_rate = service_rate;
    m.base_lst = RationalFunction::constant(1.0);
    m.laplace_exponent = RationalFunction::from_polynomial(Polynomial{0.0, drift, -0.5 * variance});
    m.kind = DependenceKind::brownian;
    m.drift = drift;
    m.diffusion_variance = variance;
    validate(m);
    return m;
}

std::complex<double> joint_transform(const JointLstModel& m, std::complex<double> s, std::complex<double> z) {
    Complex denom = m.service_rate + m.laplace_exponent(s) + z;
    if (!(denom.real() > 0.0))
        throw DomainError("joint transform undefined: rate + exponent(s) + z must have positive real part");
    return m.service_rate * m.base_lst(s) / denom;
}

double preparation_mean(const JointLstModel& m) {
    double psi1 = m.laplace_exponent.derivatives_at(0.0, 1)[1];
    double chi1 = m.base_lst.derivatives_at(0.0, 1)[1];
    return psi1 / m.service_rate - chi1;
}

double service_preparation_covariance(const JointLstModel& m) {
    double psi1 = m.laplace_exponent.derivatives_at(0.0, 1)[1];
    return psi1 / (m.service_rate * m.service_rate);
}

Polynomial denominator_polynomial(const JointLstModel& m) {
    Polynomial lambda_minus_s{m.service_rate, -1.0};
    return m.base_lst.denominator() *
           (lambda_minus_s * m.laplace_exponent.denominator() + m.laplace_exponent.numerator());
}

int expected_denominator_degree(const JointLstModel& m) {
    int d1 = m.base_lst.denominator().degree();
    int n = m.laplace_exponent.denominator().degree();
    int l = m.laplace_exponent.numerator().degree();  // -1 when the exponent vanishes
    return d1 + std::max(n + 1, l);
}

double JointWaitingSolution::density_at(double x) const {
    Complex acc{0.0, 0.0};
    for (const JointDensityTerm& t : terms) {
        if (t.coefficient == Complex{0.0, 0.0}) continue;
        acc += t.coefficient * std::pow(x, t.order - 1) * std::exp(t.root * x);
    }
    return acc.real();
}

double JointWaitingSolution::cdf_at(double x) const {
    if (x < 0.0) throw DomainError("waiting-time distribution evaluated at negative x");
    Complex acc{atom, 0.0};
    for (const JointDensityTerm& t : terms) {
        if (t.coefficient == Complex{0.0, 0.0}) continue;
        acc += t.coefficient * incomplete_term_integral(t.order - 1, t.root, x);
    }
    return acc.real();
}

JointWaitingSolution solve_waiting_time(const JointLstModel& m, double tol) {
    validate(m);
    const double lambda = m.service_rate;
    Polynomial d_poly = denominator_polynomial(m);
    if (d_poly.is_zero())
        throw ValidationError("characteristic polynomial vanishes identically (degenerate model)");

    JointWaitingSolution sol;
    sol.characteristic = d_poly;
    sol.degree = d_poly.degree();
    const int k_expected = expected_denominator_degree(m);
    if (d_poly.degree() < k_expected) {
        std::ostringstream msg;
        msg << "characteristic degree " << d_poly.degree() << " below the factor-degree bound "
            << k_expected << " (leading coefficients cancel)";
        sol.warnings.push_back(msg.str());
    }

    RootSet roots;
    if (d_poly.degree() >= 1) roots = find_roots(d_poly);
    for (const Root& r : roots.roots)
        if (std::abs(r.value.real()) <= 1e-9 * (1.0 + std::abs(r.value)))
            throw ValidationError("characteristic root on the imaginary axis: the model sits on the "
                                  "stability boundary");

    std::vector<Root> retained;
    for (const Root& r : roots.roots)
        if (r.value.real() < 0.0) retained.push_back(r);

    // Unknown layout: slot 0 is the atom, then one slot per retained root and
    // pole order.
    struct Slot {
        int root_index;  // into retained
        int order;
    };
    std::vector<Slot> slots;
    for (size_t t = 0; t < retained.size(); ++t)
        for (int k = 1; k <= retained[t].multiplicity; ++k)
            slots.push_back(Slot{static_cast<int>(t), k});
    const int unknowns = 1 + static_cast<int>(slots.size());

    // The forward transform factor lambda * P1 * Q2 / D multiplies the
    // reflected waiting transform. Each unknown contributes a rational piece
    // whose partial fractions split by half-plane.
    Polynomial forward_num =
        m.base_lst.numerator() * m.laplace_exponent.denominator() * lambda;
    CVec forward_cnum = cpoly::from(forward_num);
    CVec d_cvec = cpoly::from(d_poly);

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(unknowns, unknowns);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(unknowns);

    // Row 0 matches the constant: atom = 1 - (positive-part mass of the
    // increment transform at 0); rows for (root, order) match the pole
    // coefficients of the positive part against the transform's own.
    for (int u = 0; u < unknowns; ++u) {
        CVec num = forward_cnum;
        CVec den = d_cvec;
        RootSet poles = roots;
        if (u > 0) {
            const Slot& slot = slots[static_cast<size_t>(u - 1)];
            const Complex r = retained[static_cast<size_t>(slot.root_index)].value;
            if (slot.order % 2 == 1) num = cpoly::scaled(num, Complex{-1.0, 0.0});
            for (int k = 0; k < slot.order; ++k) den = cpoly::raise(den, -r);
            poles = merge_pole(poles, -r, slot.order);
        }
        PartialFractionExpansion pf = partial_fractions(num, den, poles, std::max(tol, 1e-10));
        HalfPlaneSplit split = split_by_half_plane(pf);

        Complex mass_at_zero{0.0, 0.0};
        for (const PartialFractionTerm& t : split.negative)
            mass_at_zero += t.coefficient / int_power(-t.pole, t.order);
        a(0, u) += mass_at_zero;
        if (u == 0) a(0, 0) += 1.0;

        for (size_t si = 0; si < slots.size(); ++si) {
            const Slot& target = slots[si];
            const Complex r = retained[static_cast<size_t>(target.root_index)].value;
            Complex coeff{0.0, 0.0};
            for (const PartialFractionTerm& t : split.negative)
                if (t.order == target.order && std::abs(t.pole - r) <= 1e-6 * (1.0 + std::abs(r)))
                    coeff += t.coefficient;
            int row = 1 + static_cast<int>(si);
            a(row, u) -= coeff;
            if (u == row) a(row, u) += 1.0;
        }
    }
    rhs(0) = Complex{1.0, 0.0};

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    Eigen::VectorXcd solution = a.partialPivLu().solve(rhs);
    if (!solution.allFinite() || !std::isfinite(cond) || cond > 1e14) {
        std::ostringstream msg;
        msg << "coefficient system is numerically singular (condition estimate " << cond << ")";
        throw NumericalError(msg.str());
    }
    sol.condition_estimate = cond;
    if (cond > 1e10) {
        std::ostringstream msg;
        msg << "coefficient system condition estimate " << cond << " above 1e10";
        sol.warnings.push_back(msg.str());
    }

    // Conjugate symmetrisation: coefficients of conjugate roots must be
    // conjugate so the density is real.
    std::vector<Complex> coeffs(slots.size());
    for (size_t si = 0; si < slots.size(); ++si) coeffs[si] = solution(1 + static_cast<Eigen::Index>(si));
    for (size_t si = 0; si < slots.size(); ++si) {
        const Slot& s1 = slots[si];
        const Complex r1 = retained[static_cast<size_t>(s1.root_index)].value;
        if (r1.imag() == 0.0) {
            coeffs[si] = Complex{coeffs[si].real(), 0.0};
            continue;
        }
        for (size_t sj = si + 1; sj < slots.size(); ++sj) {
            const Slot& s2 = slots[sj];
            if (s2.order != s1.order) continue;
            const Complex r2 = retained[static_cast<size_t>(s2.root_index)].value;
            if (std::abs(r2 - std::conj(r1)) <= 1e-9 * (1.0 + std::abs(r1))) {
                Complex c = 0.5 * (coeffs[si] + std::conj(coeffs[sj]));
                coeffs[si] = c;
                coeffs[sj] = std::conj(c);
            }
        }
    }

    Complex c0 = solution(0);
    if (std::abs(c0.imag()) > 1e-9)
        throw SolutionRejectedError("atom has a non-vanishing imaginary part");
    sol.atom = c0.real();

    // Density terms: partial-fraction coefficient over (order-1)! turns a
    // 1/(s-r)^k transform piece into x^(k-1) e^{r x}. Roots in the closed
    // right half-plane keep zero coefficients.
    for (const Root& r : roots.roots) {
        if (r.value.real() < 0.0) continue;
        for (int k = 1; k <= r.multiplicity; ++k)
            sol.terms.push_back(JointDensityTerm{r.value, k, Complex{0.0, 0.0}});
    }
    for (size_t si = 0; si < slots.size(); ++si) {
        const Slot& slot = slots[si];
        sol.terms.push_back(JointDensityTerm{retained[static_cast<size_t>(slot.root_index)].value,
                                             slot.order,
                                             coeffs[si] / factorial(slot.order - 1)});
    }

    // Solution invariants.
    std::ostringstream why;
    if (sol.atom < -1e-9 || sol.atom > 1.0 + 1e-9) why << " atom " << sol.atom << " outside [0,1];";
    Complex total{sol.atom, 0.0};
    for (const JointDensityTerm& t : sol.terms)
        total += t.coefficient * factorial(t.order - 1) / int_power(-t.root, t.order);
    if (std::abs(total - Complex{1.0, 0.0}) > 1e-9)
        why << " atom plus density integral is " << total.real() << (total.imag() < 0 ? "" : "+")
            << total.imag() << "i, expected 1;";
    double slowest = 0.0;
    for (const Root& r : retained) slowest = std::max(slowest, r.value.real());
    if (!retained.empty()) {
        const double xmax = 20.0 / std::abs(slowest);
        for (int g = 0; g < 200; ++g) {
            double x = xmax * static_cast<double>(g) / 199.0;
            Complex v{0.0, 0.0};
            for (const JointDensityTerm& t : sol.terms)
                v += t.coefficient * std::pow(x, t.order - 1) * std::exp(t.root * x);
            if (std::abs(v.imag()) > 1e-9) {
                why << " density imaginary residue " << v.imag() << " at x = " << x << ";";
                break;
            }
            if (v.real() < -1e-9) {
                why << " density " << v.real() << " at x = " << x << " negative;";
                break;
            }
        }
    }
    std::string text = why.str();
    if (!text.empty()) throw SolutionRejectedError("waiting-time solution rejected:" + text);
    return sol;
}

double mean_waiting_time(const JointWaitingSolution& s) {
    Complex acc{0.0, 0.0};
    for (const JointDensityTerm& t : s.terms)
        acc += t.coefficient * factorial(t.order) / int_power(-t.root, t.order + 1);
    if (std::abs(acc.imag()) > 1e-9)
        throw SolutionRejectedError("mean waiting time has a non-vanishing imaginary part");
    return acc.real();
}

double functional_equation_residual(const JointLstModel& m, const JointWaitingSolution& s) {
    const double lambda = m.service_rate;
    const Polynomial& d_poly = s.characteristic;

    // Recombine the solved transform into numerator / (product of retained
    // pole factors), then reflect it for the increment transform.
    std::vector<Complex> retained_poles;
    std::vector<std::pair<JointDensityTerm, Complex>> retained_terms;  // term, pf coefficient
    for (const JointDensityTerm& t : s.terms) {
        if (t.root.real() >= 0.0 || t.coefficient == Complex{0.0, 0.0}) continue;
        retained_terms.emplace_back(t, t.coefficient * factorial(t.order - 1));
    }
    // pole multiplicities: highest order seen per distinct root
    RootSet pole_set;
    for (const auto& [term, pf_coeff] : retained_terms) {
        bool found = false;
        for (Root& r : pole_set.roots)
            if (std::abs(r.value - term.root) == 0.0) {
                r.multiplicity = std::max(r.multiplicity, term.order);
                found = true;
            }
        if (!found) pole_set.roots.push_back(Root{term.root, term.order});
    }
    CVec denom_neg = cpoly::from_roots(pole_set.expanded());
    CVec num_omega = cpoly::scaled(denom_neg, Complex{s.atom, 0.0});
    for (const auto& [term, pf_coeff] : retained_terms) {
        CVec cof = denom_neg;
        for (int k = 0; k < term.order; ++k) cof = cpoly::deflate(cof, term.root);
        num_omega = cpoly::add(num_omega, cpoly::scaled(cof, pf_coeff));
    }
    Polynomial num_omega_real = cpoly::to_real(num_omega);
    Polynomial denom_neg_real = cpoly::to_real(denom_neg);

    // increment transform numerator/denominator: lambda P1 Q2 num_omega(-s)
    // over D(s) denom_neg(-s)
    Polynomial g_num = m.base_lst.numerator() * m.laplace_exponent.denominator() *
                       num_omega_real.reflected() * lambda;
    Polynomial g_den = d_poly * denom_neg_real.reflected();

    RootSet g_poles;
    if (d_poly.degree() >= 1) g_poles = find_roots(d_poly);
    for (const Root& r : pole_set.roots) g_poles = merge_pole(g_poles, -r.value, r.multiplicity);

    PartialFractionExpansion pf =
        partial_fractions(cpoly::from(g_num), cpoly::from(g_den), g_poles, 1e-8);
    HalfPlaneSplit split = split_by_half_plane(pf);
    Complex positive_mass{0.0, 0.0};
    for (const PartialFractionTerm& t : split.negative)
        positive_mass += t.coefficient / int_power(-t.pole, t.order);

    auto omega_at = [&](Complex z) {
        Complex acc{s.atom, 0.0};
        for (const auto& [term, pf_coeff] : retained_terms)
            acc += pf_coeff / int_power(z - term.root, term.order);
        return acc;
    };

    double worst = 0.0;
    for (int probe = 1; probe <= 20; ++probe) {
        Complex z{0.0, 0.1 * static_cast<double>(probe) * lambda};
        // crossing term from the independently split negative part
        Complex h = (Complex{1.0, 0.0} - positive_mass) - split.constant - split.eval_positive(z);
        Complex lhs = omega_at(z) * d_poly(z);
        Complex rhs = lambda * omega_at(-z) * m.base_lst.numerator()(z) *
                          m.laplace_exponent.denominator()(z) +
                      d_poly(z) * h;
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

}  // namespace altq
