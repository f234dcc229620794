#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "altq/mixed_erlang.hpp"

namespace altq {

uint64_t splitmix64(uint64_t x);

// Deterministic sample stream. Replication streams derive from the root seed
// by index, so merged results cannot depend on execution order. All inverse
// transforms are implemented here because the standard does not pin down the
// library distribution algorithms, and estimates must be bit-reproducible.
class RandomStream {
  public:
    explicit RandomStream(uint64_t seed) : engine_(seed) {}
    static RandomStream child(uint64_t root_seed, uint64_t index);

    double uniform();  // [0, 1)
    double exponential(double rate);
    double erlang(int phases, double rate);
    double sample(const MixedErlangSpec& spec);
    // Two uniforms per draw (Box-Muller), keeping the stream layout fixed.
    double normal(double mean, double stddev);
    long long poisson(double mean);
    // First index whose cumulative probability exceeds a fresh uniform.
    int pick(const std::vector<double>& cumulative);

  private:
    std::mt19937_64 engine_;
};

}  // namespace altq
