#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "altq/mixed_erlang.hpp"
#include "altq/rational.hpp"

namespace altq {

// Row-stochastic transition matrix of the modulating chain. Construction
// validates stochasticity and irreducibility; periodic chains are accepted
// and flagged, solvers then produce the time-averaged stationary solution.
class TransitionMatrix {
  public:
    explicit TransitionMatrix(Eigen::MatrixXd entries);
    int state_count() const { return static_cast<int>(p_.rows()); }
    double operator()(int i, int j) const { return p_(i, j); }
    const Eigen::MatrixXd& entries() const { return p_; }
    int period() const { return period_; }
    bool aperiodic() const { return period_ == 1; }

  private:
    Eigen::MatrixXd p_;
    int period_ = 1;
};

Eigen::VectorXd stationary_distribution(const TransitionMatrix& p);
Eigen::MatrixXd n_step(const TransitionMatrix& p, long long n);

// Service-time distribution attached to one state. The mean and second
// moment are always derived from the transform, never supplied separately.
// `sampler` is set when the distribution belongs to the samplable
// mixed-Erlang family; transform-only specs solve fine but cannot be
// simulated.
struct StateServiceSpec {
    RationalFunction lst;
    double mean = 0.0;
    double second_moment = 0.0;
    std::optional<MixedErlangSpec> sampler;

    static StateServiceSpec from_lst(const RationalFunction& lst);
    static StateServiceSpec from_mixed_erlang(const MixedErlangSpec& spec);
};

// Preparation and service times modulated by a common discrete-time Markov
// chain: each transition i -> j draws a service time from state i's spec and
// the next preparation time from state j's spec.
struct MarkovModulatedModel {
    MarkovModulatedModel(TransitionMatrix transition, std::vector<StateServiceSpec> service,
                         std::vector<MixedErlangSpec> preparation);

    TransitionMatrix transition;
    std::vector<StateServiceSpec> service;
    std::vector<MixedErlangSpec> preparation;

    int state_count() const { return transition.state_count(); }
    int max_phase_count() const;
    MarkovModulatedModel with_preparation_rate_scale(double factor) const;
};

// Lag-n correlation of consecutive service (or preparation) times, computed
// exactly from the stationary distribution, the n-step transition matrix and
// the per-state moments. Throws UndefinedCorrelationError for a single-state
// chain or a degenerate (zero-variance) sequence.
double service_autocorrelation(const MarkovModulatedModel& m, int lag);
double preparation_autocorrelation(const MarkovModulatedModel& m, int lag);
// Correlation between a service time and the preparation time generated at
// the same transition.
double cross_correlation(const MarkovModulatedModel& m);

struct StabilityWitness {
    bool stable = false;
    // 0-based transition i -> j for which the recursion hits zero with
    // positive probability; (-1, -1) when no such transition exists.
    int from_state = -1;
    int to_state = -1;
};
StabilityWitness check_stability(const MarkovModulatedModel& m);

// One coefficient * x^power * exp(-rate * x) piece of a waiting-time density.
struct DensityTerm {
    double coefficient = 0.0;
    double rate = 1.0;
    int power = 0;
};

struct StateWaitingPart {
    double atom = 0.0;  // P[W = 0, Z = j]
    std::vector<DensityTerm> density;

    double density_at(double x) const;
    // atom + integral of the density over [0, x]
    double mass_at_or_below(double x) const;
    double total_mass() const;
    // E[W; Z = j]
    double partial_mean() const;
};

struct MarkovWaitingSolution {
    std::vector<StateWaitingPart> per_state;
    // transform_derivatives[m](i, j): m-th derivative of the state-i
    // waiting-time transform at the preparation rate of state j. Retained for
    // diagnostics and the fixed-point residual check.
    std::vector<Eigen::MatrixXd> transform_derivatives;
    double condition_estimate = 0.0;
    std::vector<std::string> warnings;

    double total_atom() const;
};

// Steady-state waiting-time distribution when every preparation time is
// exponential (single-phase). Solves the linear system for the transform
// values at the preparation rates.
MarkovWaitingSolution solve_exponential(const MarkovModulatedModel& m);

// General mixed-Erlang preparation times. The unknowns are the transform
// values and their derivatives at the preparation rates; the system comes
// from differentiating the fixed-point transform equation.
MarkovWaitingSolution solve_mixed_erlang(const MarkovModulatedModel& m);

double mean_waiting_time(const MarkovWaitingSolution& s);
std::vector<double> per_state_mean_waiting_time(const MarkovWaitingSolution& s);

struct DensityCdf {
    double density = 0.0;
    double cdf = 0.0;
};
// Aggregate density and CDF over all states at x >= 0.
DensityCdf evaluate(const MarkovWaitingSolution& s, double x);

// Largest relative violation of the defining transform equation over a probe
// grid of 20 points. Small values mean the solved transforms, atoms and
// densities are mutually consistent.
double fixed_point_residual(const MarkovModulatedModel& m, const MarkovWaitingSolution& s);

}  // namespace altq
