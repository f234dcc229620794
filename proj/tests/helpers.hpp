#pragma once

// Shared test-only helpers: randomized model generators and tolerance
// comparison used across the unit and acceptance suites.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "altq/markov_model.hpp"

namespace altq::testing {

inline bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline Eigen::MatrixXd random_transition(std::mt19937& rng, int states) {
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    Eigen::MatrixXd p(states, states);
    for (int i = 0; i < states; ++i) {
        double sum = 0.0;
        for (int j = 0; j < states; ++j) {
            p(i, j) = unit(rng);
            sum += p(i, j);
        }
        // renormalize exactly: assign the last entry the residual
        double acc = 0.0;
        for (int j = 0; j < states - 1; ++j) {
            p(i, j) /= sum;
            acc += p(i, j);
        }
        p(i, states - 1) = 1.0 - acc;
    }
    return p;
}

inline MixedErlangSpec random_mixed_erlang(std::mt19937& rng, int max_phases) {
    std::uniform_real_distribution<double> rate_of(0.3, 4.0);
    std::uniform_int_distribution<int> phases_of(1, max_phases);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int phases = phases_of(rng);
    std::vector<double> weights(static_cast<size_t>(phases));
    double sum = 0.0;
    for (double& w : weights) {
        w = unit(rng) + 0.05;
        sum += w;
    }
    double acc = 0.0;
    for (size_t k = 0; k + 1 < weights.size(); ++k) {
        weights[k] /= sum;
        acc += weights[k];
    }
    weights.back() = 1.0 - acc;
    return MixedErlangSpec(rate_of(rng), std::move(weights));
}

// Random irreducible model with mixed-Erlang service and preparation laws.
inline MarkovModulatedModel random_markov_model(std::mt19937& rng, int max_states, int max_phases) {
    std::uniform_int_distribution<int> states_of(1, max_states);
    int states = states_of(rng);
    std::vector<StateServiceSpec> service;
    std::vector<MixedErlangSpec> preparation;
    for (int j = 0; j < states; ++j) {
        service.push_back(StateServiceSpec::from_mixed_erlang(random_mixed_erlang(rng, max_phases)));
        preparation.push_back(random_mixed_erlang(rng, max_phases));
    }
    return MarkovModulatedModel{TransitionMatrix(random_transition(rng, states)), std::move(service),
                                std::move(preparation)};
}

inline Eigen::MatrixXd cyclic_matrix4() {
    Eigen::MatrixXd p(4, 4);
    p << 0, 1, 0, 0,
         0, 0, 1, 0,
         0, 0, 0, 1,
         1, 0, 0, 0;
    return p;
}

inline Eigen::MatrixXd uniform_matrix4() {
    return Eigen::MatrixXd::Constant(4, 4, 0.25);
}

inline Eigen::MatrixXd bipartite_matrix4() {
    Eigen::MatrixXd p(4, 4);
    p << 0, 0.5, 0, 0.5,
         0.5, 0, 0.5, 0,
         0, 0.5, 0, 0.5,
         0.5, 0, 0.5, 0;
    return p;
}

// The positive-crosscorrelation example: exponential services with rates
// (1, 100, 1, 100) and exponential preparations with rates u*(1/2, 10, 1/2, 10).
inline MarkovModulatedModel example_model(const Eigen::MatrixXd& transition,
                                          const std::vector<double>& prep_rates, double u = 1.0) {
    std::vector<StateServiceSpec> service;
    for (double rate : {1.0, 100.0, 1.0, 100.0})
        service.push_back(StateServiceSpec::from_mixed_erlang(MixedErlangSpec::exponential(rate)));
    std::vector<MixedErlangSpec> preparation;
    for (double rate : prep_rates) preparation.push_back(MixedErlangSpec::exponential(rate * u));
    return MarkovModulatedModel{TransitionMatrix(transition), std::move(service), std::move(preparation)};
}

inline const std::vector<double> kPrepPositive{0.5, 10.0, 0.5, 10.0};
inline const std::vector<double> kPrepNegative{10.0, 0.5, 10.0, 0.5};
inline const std::vector<double> kPrepZero{0.5, 0.5, 10.0, 10.0};

}  // namespace altq::testing
