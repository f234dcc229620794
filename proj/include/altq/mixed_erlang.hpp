#pragma once

#include <vector>

#include "altq/rational.hpp"

namespace altq {

// Mixture of Erlang distributions with one common rate: weights[n-1] is the
// probability that the variable is a sum of n exponential(rate) phases. This
// family is dense in the distributions on [0, inf) and is the sampler family
// supported by the simulator.
struct MixedErlangSpec {
    double rate = 1.0;
    std::vector<double> weights{1.0};

    MixedErlangSpec() = default;
    MixedErlangSpec(double rate, std::vector<double> weights);  // validates

    static MixedErlangSpec exponential(double rate);
    static MixedErlangSpec erlang(int phases, double rate);

    int phase_count() const { return static_cast<int>(weights.size()); }
    double mean() const;
    double second_moment() const;
    RationalFunction lst() const;
    MixedErlangSpec scaled_rate(double factor) const;

    bool operator==(const MixedErlangSpec&) const = default;
};

}  // namespace altq
