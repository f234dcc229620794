#pragma once

#include <cstdint>
#include <vector>

#include "altq/joint_model.hpp"
#include "altq/markov_model.hpp"

namespace altq {

struct SimulationConfig {
    long long iterations = 1'000'000;  // recursion steps per replication, warmup included
    long long warmup = 10'000;
    uint64_t seed = 1;
    int replications = 1;
    int histogram_bins = 10;
    double histogram_max = 10.0;

    bool operator==(const SimulationConfig&) const = default;
};

struct StateEstimate {
    double mean = 0.0;  // estimate of E[W; Z = j]
    double mean_stderr = 0.0;
    double atom = 0.0;  // estimate of P[W = 0, Z = j]
    double atom_stderr = 0.0;
    long long samples_in_state = 0;

    bool operator==(const StateEstimate&) const = default;
};

struct SimulationEstimate {
    double mean_wait = 0.0;
    double mean_stderr = 0.0;  // batch means across replications
    double sample_variance = 0.0;
    double atom_estimate = 0.0;  // fraction of exact zeros
    double atom_stderr = 0.0;
    std::vector<StateEstimate> per_state;  // empty for joint models
    std::vector<long long> histogram;      // nonzero samples per bin over [0, histogram_max)
    long long histogram_overflow = 0;      // nonzero samples beyond histogram_max
    std::vector<double> histogram_fraction;
    std::vector<double> histogram_fraction_stderr;
    long long samples_used = 0;
    uint64_t seed_used = 0;
    int batches = 0;

    bool operator==(const SimulationEstimate&) const = default;
};

// Monte Carlo estimates of the waiting-time law by iterating the recursion
// W <- max{0, B - A - W}. Zeros are recorded exactly (the max operand being
// nonpositive), never by thresholding. Replications run on independent child
// streams and merge in index order, so the parallel and serial entry points
// return bit-identical estimates. Standard errors come from batch means (32
// batches per replication) because consecutive waiting times are correlated.
SimulationEstimate simulate_markov(const MarkovModulatedModel& m, const SimulationConfig& config);
SimulationEstimate simulate_markov_serial(const MarkovModulatedModel& m, const SimulationConfig& config);
SimulationEstimate simulate_joint(const JointLstModel& m, const SimulationConfig& config);
SimulationEstimate simulate_joint_serial(const JointLstModel& m, const SimulationConfig& config);

struct CorrelationEstimate {
    double service_autocorr = 0.0;
    double service_stderr = 0.0;
    double preparation_autocorr = 0.0;
    double preparation_stderr = 0.0;
    double cross_correlation = 0.0;
    double cross_stderr = 0.0;
    long long samples_used = 0;

    bool operator==(const CorrelationEstimate&) const = default;
};

// Sample-path estimators for the modulated correlations at the given lag.
// Batch lengths are multiples of the chain period so periodic chains average
// over full cycles.
CorrelationEstimate empirical_correlations(const MarkovModulatedModel& m, int lag,
                                           const SimulationConfig& config);
CorrelationEstimate empirical_correlations_serial(const MarkovModulatedModel& m, int lag,
                                                  const SimulationConfig& config);

}  // namespace altq
