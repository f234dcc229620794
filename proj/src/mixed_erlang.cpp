#include "altq/mixed_erlang.hpp"

#include <cmath>
#include <string>

#include "altq/errors.hpp"

namespace altq {

MixedErlangSpec::MixedErlangSpec(double rate_, std::vector<double> weights_)
    : rate(rate_), weights(std::move(weights_)) {
    if (!(rate > 0.0)) throw ValidationError("mixed-Erlang rate must be positive");
    if (weights.empty()) throw ValidationError("mixed-Erlang weight list must not be empty");
    double sum = 0.0;
    for (double w : weights) {
        if (w < -1e-12 || w > 1.0 + 1e-12)
            throw ValidationError("mixed-Erlang weight outside [0, 1]: " + std::to_string(w));
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("mixed-Erlang weights must sum to 1 (got " + std::to_string(sum) + ")");
}

MixedErlangSpec MixedErlangSpec::exponential(double rate) {
    return MixedErlangSpec(rate, {1.0});
}

MixedErlangSpec MixedErlangSpec::erlang(int phases, double rate) {
    if (phases < 1) throw ValidationError("Erlang phase count must be >= 1");
    std::vector<double> w(static_cast<size_t>(phases), 0.0);
    w.back() = 1.0;
    return MixedErlangSpec(rate, std::move(w));
}

double MixedErlangSpec::mean() const {
    double m = 0.0;
    for (size_t n = 0; n < weights.size(); ++n) m += weights[n] * static_cast<double>(n + 1);
    return m / rate;
}

double MixedErlangSpec::second_moment() const {
    double m = 0.0;
    for (size_t n = 0; n < weights.size(); ++n) {
        double phases = static_cast<double>(n + 1);
        m += weights[n] * phases * (phases + 1.0);
    }
    return m / (rate * rate);
}

RationalFunction MixedErlangSpec::lst() const {
    // sum_n w_n (rate/(rate+s))^n over the common denominator (rate+s)^N
    const int N = phase_count();
    Polynomial base{rate, 1.0};  // rate + s
    Polynomial den = Polynomial::constant(1.0);
    for (int k = 0; k < N; ++k) den *= base;
    Polynomial num;
    double rate_pow = 1.0;
    Polynomial tail = den;  // (rate+s)^(N-n), maintained incrementally
    for (int n = 1; n <= N; ++n) {
        rate_pow *= rate;
        // divide tail by (rate+s): exact since tail is a power of base
        std::vector<double> q(static_cast<size_t>(tail.degree()), 0.0);
        double carry = tail.leading_coefficient();
        for (int k = tail.degree() - 1; k >= 0; --k) {
            q[static_cast<size_t>(k)] = carry;
            carry = tail.coefficient(k) - carry * rate;
        }
        tail = Polynomial{std::move(q)};
        num += weights[static_cast<size_t>(n - 1)] * rate_pow * tail;
    }
    return RationalFunction{std::move(num), std::move(den)};
}

MixedErlangSpec MixedErlangSpec::scaled_rate(double factor) const {
    if (!(factor > 0.0)) throw ValidationError("rate scale factor must be positive");
    return MixedErlangSpec(rate * factor, weights);
}

}  // namespace altq
