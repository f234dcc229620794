#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "altq/mixed_erlang.hpp"
#include "altq/polynomial.hpp"
#include "altq/rational.hpp"

namespace altq {

enum class DependenceKind { independent, linear, compound_poisson, brownian };

// Exponential service times with the next preparation time tied to the
// current service time: given a service of length t, the conditional
// preparation transform is base_lst(s) * exp(-laplace_exponent(s) * t). Both
// factors are rational. The kind tag and sampler fields let the simulator
// draw from the same dependence structure.
struct JointLstModel {
    double service_rate = 1.0;
    RationalFunction base_lst;          // service-independent preparation component
    RationalFunction laplace_exponent;  // multiplies the service length in the exponent
    DependenceKind kind = DependenceKind::independent;

    double linear_coefficient = 0.0;
    double jump_intensity = 0.0;
    std::optional<MixedErlangSpec> jump_spec;
    std::optional<MixedErlangSpec> preparation_spec;
    double drift = 0.0;
    double diffusion_variance = 0.0;
};

// Preparation independent of the service time, distributed per the given
// transform (or samplable mixed-Erlang spec).
JointLstModel make_independent(const RationalFunction& preparation_lst, double service_rate);
JointLstModel make_independent(const MixedErlangSpec& preparation, double service_rate);
// Preparation equal to coefficient times the service time.
JointLstModel make_linear(double coefficient, double service_rate);
// Preparation accumulated by a compound Poisson process run for the service
// duration.
JointLstModel make_compound_poisson(double intensity, const RationalFunction& jump_lst, double service_rate);
JointLstModel make_compound_poisson(double intensity, const MixedErlangSpec& jumps, double service_rate);
// Preparation normally distributed with mean drift*t and variance variance*t
// given a service of length t; negative values are allowed.
JointLstModel make_brownian(double drift, double variance, double service_rate);

// E[exp(-s B - z A)] for the generic preparation/service pair.
std::complex<double> joint_transform(const JointLstModel& m, std::complex<double> s, std::complex<double> z);
double preparation_mean(const JointLstModel& m);
double service_preparation_covariance(const JointLstModel& m);

// Characteristic polynomial whose zeros drive the waiting-time density, and
// its expected degree from the factor degrees. A lower actual degree
// signals leading-coefficient cancellation and is reported as a warning by
// the solver.
Polynomial denominator_polynomial(const JointLstModel& m);
int expected_denominator_degree(const JointLstModel& m);

// One coefficient * x^(order-1) * exp(root x) piece of the density.
struct JointDensityTerm {
    std::complex<double> root;
    int order = 1;
    std::complex<double> coefficient;
};

struct JointWaitingSolution {
    double atom = 0.0;  // P[W = 0]
    std::vector<JointDensityTerm> terms;
    int degree = 0;
    Polynomial characteristic;
    double condition_estimate = 0.0;
    std::vector<std::string> warnings;

    double density_at(double x) const;
    double cdf_at(double x) const;
};

// Steady-state waiting-time distribution. The transform is written in
// partial-fraction form with unknown coefficients, the bilateral transform of
// the recursion increment is split by pole half-plane, and matching the
// positive part closes a linear system for the coefficients. Roots with
// nonnegative real part carry zero coefficients.
JointWaitingSolution solve_waiting_time(const JointLstModel& m, double tol = 1e-9);

double mean_waiting_time(const JointWaitingSolution& s);

// Largest relative violation of the transform functional equation over 20
// probe points on the imaginary axis, with the crossing term reconstructed
// from an independent partial-fraction split of the solved transform.
double functional_equation_residual(const JointLstModel& m, const JointWaitingSolution& s);

}  // namespace altq
