#include "altq/random.hpp"

#include <cmath>
#include <numbers>

namespace altq {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RandomStream RandomStream::child(uint64_t root_seed, uint64_t index) {
    return RandomStream(splitmix64(root_seed + 0x9e3779b97f4a7c15ull * (index + 1)));
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

double RandomStream::erlang(int phases, double rate) {
    double acc = 0.0;
    for (int i = 0; i < phases; ++i) acc += exponential(rate);
    return acc;
}

double RandomStream::sample(const MixedErlangSpec& spec) {
    double u = uniform();
    double cum = 0.0;
    int phases = spec.phase_count();
    for (int n = 0; n < phases; ++n) {
        cum += spec.weights[static_cast<size_t>(n)];
        if (u < cum) {
            phases = n + 1;
            break;
        }
    }
    return erlang(phases, spec.rate);
}

double RandomStream::normal(double mean, double stddev) {
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

long long RandomStream::poisson(double mean) {
    // Additivity keeps the multiplication method inside the range where
    // exp(-mean) does not underflow.
    long long total = 0;
    while (mean > 500.0) {
        total += poisson(500.0);
        mean -= 500.0;
    }
    double threshold = std::exp(-mean);
    double product = uniform();
    long long count = 0;
    while (product >= threshold) {
        ++count;
        product *= uniform();
    }
    return total + count;
}

int RandomStream::pick(const std::vector<double>& cumulative) {
    double u = uniform();
    for (size_t i = 0; i + 1 < cumulative.size(); ++i)
        if (u < cumulative[i]) return static_cast<int>(i);
    return static_cast<int>(cumulative.size()) - 1;
}

}  // namespace altq
