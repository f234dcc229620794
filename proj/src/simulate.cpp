#include "altq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "altq/errors.hpp"
#include "altq/random.hpp"

namespace altq {

namespace {

constexpr int kBatches = 32;

void validate_config(const SimulationConfig& config) {
    if (config.iterations < 1) throw ValidationError("iterations must be >= 1");
    if (config.warmup < 0) throw ValidationError("warmup must be >= 0");
    if (config.warmup >= config.iterations)
        throw ValidationError("warmup must be smaller than iterations");
    if (config.replications < 1) throw ValidationError("replications must be >= 1");
    if (config.histogram_bins < 1) throw ValidationError("histogram_bins must be >= 1");
    if (!(config.histogram_max > 0.0)) throw ValidationError("histogram_max must be positive");
    if (config.iterations - config.warmup < kBatches)
        throw ValidationError("run too short: need at least " + std::to_string(kBatches) +
                              " post-warmup samples");
}

struct ReplicationTally {
    long long batch_size = 0;
    std::vector<double> sum, sumsq;
    std::vector<long long> zeros;
    std::vector<std::vector<long long>> bins;  // [batch][bin]
    std::vector<long long> overflow;
    std::vector<std::vector<double>> state_sum;      // [batch][state], markov only
    std::vector<std::vector<long long>> state_zeros;
    std::vector<long long> state_count;

    ReplicationTally(long long batch_size_, int bins_, int states)
        : batch_size(batch_size_),
          sum(kBatches, 0.0),
          sumsq(kBatches, 0.0),
          zeros(kBatches, 0),
          bins(kBatches, std::vector<long long>(static_cast<size_t>(bins_), 0)),
          overflow(kBatches, 0),
          state_sum(states > 0 ? kBatches : 0, std::vector<double>(static_cast<size_t>(states), 0.0)),
          state_zeros(states > 0 ? kBatches : 0, std::vector<long long>(static_cast<size_t>(states), 0)),
          state_count(static_cast<size_t>(states), 0) {}

    void record(int batch, double w, bool zero, const SimulationConfig& config, int state) {
        size_t b = static_cast<size_t>(batch);
        sum[b] += w;
        sumsq[b] += w * w;
        if (zero) {
            ++zeros[b];
        } else if (w < config.histogram_max) {
            int bin = static_cast<int>(w / config.histogram_max * config.histogram_bins);
            bin = std::min(bin, config.histogram_bins - 1);
            ++bins[b][static_cast<size_t>(bin)];
        } else {
            ++overflow[b];
        }
        if (state >= 0) {
            state_sum[b][static_cast<size_t>(state)] += w;
            if (zero) ++state_zeros[b][static_cast<size_t>(state)];
            ++state_count[static_cast<size_t>(state)];
        }
    }
};

// Mean of batch values and the batch-means standard error of that mean.
std::pair<double, double> batch_mean_stderr(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double se = (values.size() > 1) ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, se};
}

SimulationEstimate merge(const std::vector<ReplicationTally>& tallies, const SimulationConfig& config,
                         int states) {
    SimulationEstimate est;
    est.seed_used = config.seed;
    est.batches = kBatches * static_cast<int>(tallies.size());
    const double batch_size = static_cast<double>(tallies.front().batch_size);

    std::vector<double> mean_batches, atom_batches;
    double total_sum = 0.0, total_sumsq = 0.0;
    long long total_zeros = 0, total_samples = 0;
    est.histogram.assign(static_cast<size_t>(config.histogram_bins), 0);
    for (const ReplicationTally& t : tallies) {
        total_samples += t.batch_size * kBatches;
        for (int b = 0; b < kBatches; ++b) {
            mean_batches.push_back(t.sum[static_cast<size_t>(b)] / batch_size);
            atom_batches.push_back(static_cast<double>(t.zeros[static_cast<size_t>(b)]) / batch_size);
            total_sum += t.sum[static_cast<size_t>(b)];
            total_sumsq += t.sumsq[static_cast<size_t>(b)];
            total_zeros += t.zeros[static_cast<size_t>(b)];
            est.histogram_overflow += t.overflow[static_cast<size_t>(b)];
            for (int k = 0; k < config.histogram_bins; ++k)
                est.histogram[static_cast<size_t>(k)] += t.bins[static_cast<size_t>(b)][static_cast<size_t>(k)];
        }
    }
    est.samples_used = total_samples;
    auto [mean, mean_se] = batch_mean_stderr(mean_batches);
    est.mean_wait = mean;
    est.mean_stderr = mean_se;
    est.sample_variance = total_sumsq / static_cast<double>(total_samples) - mean * mean;
    auto [atom, atom_se] = batch_mean_stderr(atom_batches);
    est.atom_estimate = atom;
    est.atom_stderr = atom_se;

    est.histogram_fraction.resize(static_cast<size_t>(config.histogram_bins));
    est.histogram_fraction_stderr.resize(static_cast<size_t>(config.histogram_bins));
    std::vector<double> bin_batches(mean_batches.size());
    for (int k = 0; k < config.histogram_bins; ++k) {
        size_t idx = 0;
        for (const ReplicationTally& t : tallies)
            for (int b = 0; b < kBatches; ++b)
                bin_batches[idx++] =
                    static_cast<double>(t.bins[static_cast<size_t>(b)][static_cast<size_t>(k)]) / batch_size;
        auto [bf, bse] = batch_mean_stderr(bin_batches);
        est.histogram_fraction[static_cast<size_t>(k)] = bf;
        est.histogram_fraction_stderr[static_cast<size_t>(k)] = bse;
    }

    if (states > 0) {
        est.per_state.resize(static_cast<size_t>(states));
        std::vector<double> buf(mean_batches.size());
        for (int j = 0; j < states; ++j) {
            size_t idx = 0;
            for (const ReplicationTally& t : tallies)
                for (int b = 0; b < kBatches; ++b)
                    buf[idx++] = t.state_sum[static_cast<size_t>(b)][static_cast<size_t>(j)] / batch_size;
            auto [sm, sse] = batch_mean_stderr(buf);
            idx = 0;
            for (const ReplicationTally& t : tallies)
                for (int b = 0; b < kBatches; ++b)
                    buf[idx++] = static_cast<double>(
                                     t.state_zeros[static_cast<size_t>(b)][static_cast<size_t>(j)]) /
                                 batch_size;
            auto [sa, sase] = batch_mean_stderr(buf);
            StateEstimate& se = est.per_state[static_cast<size_t>(j)];
            se.mean = sm;
            se.mean_stderr = sse;
            se.atom = sa;
            se.atom_stderr = sase;
            for (const ReplicationTally& t : tallies)
                se.samples_in_state += t.state_count[static_cast<size_t>(j)];
        }
    }
    return est;
}

template <typename RunReplication>
std::vector<ReplicationTally> run_all(int replications, bool parallel, RunReplication run) {
    std::vector<ReplicationTally> tallies;
    tallies.reserve(static_cast<size_t>(replications));
    for (int r = 0; r < replications; ++r) tallies.push_back(run(r, /*execute=*/false));
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < replications; ++r) tallies[static_cast<size_t>(r)] = run(r, true);
        return tallies;
    }
#else
    (void)parallel;
#endif
    for (int r = 0; r < replications; ++r) tallies[static_cast<size_t>(r)] = run(r, true);
    return tallies;
}

SimulationEstimate simulate_markov_impl(const MarkovModulatedModel& model,
                                        const SimulationConfig& config, bool parallel) {
    validate_config(config);
    const int M = model.state_count();
    std::vector<MixedErlangSpec> service_samplers;
    for (int i = 0; i < M; ++i) {
        const StateServiceSpec& spec = model.service[static_cast<size_t>(i)];
        if (!spec.sampler)
            throw CapabilityError("service distribution of state " + std::to_string(i + 1) +
                                  " is outside the samplable mixed-Erlang family");
        service_samplers.push_back(*spec.sampler);
    }
    std::vector<std::vector<double>> cumulative(static_cast<size_t>(M),
                                                std::vector<double>(static_cast<size_t>(M), 0.0));
    for (int i = 0; i < M; ++i) {
        double acc = 0.0;
        for (int j = 0; j < M; ++j) {
            acc += model.transition(i, j);
            cumulative[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
        }
    }
    const long long batch_size = (config.iterations - config.warmup) / kBatches;

    auto run = [&](int replication, bool execute) {
        ReplicationTally tally(batch_size, config.histogram_bins, M);
        if (!execute) return tally;
        RandomStream stream = RandomStream::child(config.seed, static_cast<uint64_t>(replication));
        int state = 0;
        double w = 0.0;
        const long long total = config.warmup + batch_size * kBatches;
        long long recorded = 0;
        for (long long step = 0; step < total; ++step) {
            double a = stream.sample(service_samplers[static_cast<size_t>(state)]);
            int next = stream.pick(cumulative[static_cast<size_t>(state)]);
            double b = stream.sample(model.preparation[static_cast<size_t>(next)]);
            double x = b - a - w;
            bool zero = (x <= 0.0);
            w = zero ? 0.0 : x;
            state = next;
            if (step < config.warmup) continue;
            tally.record(static_cast<int>(recorded / batch_size), w, zero, config, state);
            ++recorded;
        }
        return tally;
    };
    auto tallies = run_all(config.replications, parallel, run);
    return merge(tallies, config, M);
}

SimulationEstimate simulate_joint_impl(const JointLstModel& model, const SimulationConfig& config,
                                       bool parallel) {
    validate_config(config);
    if (model.kind == DependenceKind::independent && !model.preparation_spec)
        throw CapabilityError(
            "independent preparation distribution is outside the samplable mixed-Erlang family");
    if (model.kind == DependenceKind::compound_poisson && !model.jump_spec)
        throw CapabilityError("jump distribution is outside the samplable mixed-Erlang family");
    const long long batch_size = (config.iterations - config.warmup) / kBatches;

    auto run = [&](int replication, bool execute) {
        ReplicationTally tally(batch_size, config.histogram_bins, 0);
        if (!execute) return tally;
        RandomStream stream = RandomStream::child(config.seed, static_cast<uint64_t>(replication));
        double w = 0.0;
        const long long total = config.warmup + batch_size * kBatches;
        long long recorded = 0;
        for (long long step = 0; step < total; ++step) {
            double a = stream.exponential(model.service_rate);
            double b = 0.0;
            switch (model.kind) {
                case DependenceKind::independent:
                    b = stream.sample(*model.preparation_spec);
                    break;
                case DependenceKind::linear:
                    b = model.linear_coefficient * a;
                    break;
                case DependenceKind::compound_poisson: {
                    long long jumps = stream.poisson(model.jump_intensity * a);
                    for (long long k = 0; k < jumps; ++k) b += stream.sample(*model.jump_spec);
                    break;
                }
                case DependenceKind::brownian:
                    b = stream.normal(model.drift * a, std::sqrt(model.diffusion_variance * a));
                    break;
            }
            double x = b - a - w;
            bool zero = (x <= 0.0);
            w = zero ? 0.0 : x;
            if (step < config.warmup) continue;
            tally.record(static_cast<int>(recorded / batch_size), w, zero, config, -1);
            ++recorded;
        }
        return tally;
    };
    auto tallies = run_all(config.replications, parallel, run);
    return merge(tallies, config, 0);
}

struct CorrelationTally {
    // per batch: correlation estimates
    std::vector<double> service, preparation, cross;
    long long samples = 0;
};

CorrelationEstimate correlations_impl(const MarkovModulatedModel& model, int lag,
                                      const SimulationConfig& config, bool parallel) {
    validate_config(config);
    if (lag < 1) throw ValidationError("correlation lag must be >= 1");
    const int M = model.state_count();
    for (int i = 0; i < M; ++i)
        if (!model.service[static_cast<size_t>(i)].sampler)
            throw CapabilityError("service distribution of state " + std::to_string(i + 1) +
                                  " is outside the samplable mixed-Erlang family");

    const int period = model.transition.period();
    long long batch_size = (config.iterations - config.warmup) / kBatches / period * period;
    if (batch_size <= lag)
        throw ValidationError("run too short for the requested correlation lag");

    std::vector<std::vector<double>> cumulative(static_cast<size_t>(M),
                                                std::vector<double>(static_cast<size_t>(M), 0.0));
    for (int i = 0; i < M; ++i) {
        double acc = 0.0;
        for (int j = 0; j < M; ++j) {
            acc += model.transition(i, j);
            cumulative[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
        }
    }

    std::vector<CorrelationTally> tallies(static_cast<size_t>(config.replications));
    auto run = [&](int replication) {
        CorrelationTally tally;
        RandomStream stream = RandomStream::child(config.seed, static_cast<uint64_t>(replication));
        int state = 0;
        std::vector<double> as(static_cast<size_t>(batch_size)), bs(static_cast<size_t>(batch_size));
        long long recorded = 0;
        const long long total = config.warmup + batch_size * kBatches;
        for (long long step = 0; step < total; ++step) {
            // the service time and the preparation time generated in the
            // current state form one correlated pair
            double a = stream.sample(*model.service[static_cast<size_t>(state)].sampler);
            double b = stream.sample(model.preparation[static_cast<size_t>(state)]);
            state = stream.pick(cumulative[static_cast<size_t>(state)]);
            if (step < config.warmup) continue;
            size_t idx = static_cast<size_t>(recorded % batch_size);
            as[idx] = a;
            bs[idx] = b;
            ++recorded;
            if (idx + 1 == static_cast<size_t>(batch_size)) {
                const double n = static_cast<double>(batch_size);
                double ma = 0, mb = 0, va = 0, vb = 0, cab = 0, caa = 0, cbb = 0;
                for (long long t = 0; t < batch_size; ++t) {
                    ma += as[static_cast<size_t>(t)];
                    mb += bs[static_cast<size_t>(t)];
                }
                ma /= n;
                mb /= n;
                for (long long t = 0; t < batch_size; ++t) {
                    va += (as[static_cast<size_t>(t)] - ma) * (as[static_cast<size_t>(t)] - ma);
                    vb += (bs[static_cast<size_t>(t)] - mb) * (bs[static_cast<size_t>(t)] - mb);
                    cab += (as[static_cast<size_t>(t)] - ma) * (bs[static_cast<size_t>(t)] - mb);
                }
                va /= n;
                vb /= n;
                cab /= n;
                const double pairs = static_cast<double>(batch_size - lag);
                for (long long t = 0; t + lag < batch_size; ++t) {
                    caa += (as[static_cast<size_t>(t)] - ma) * (as[static_cast<size_t>(t + lag)] - ma);
                    cbb += (bs[static_cast<size_t>(t)] - mb) * (bs[static_cast<size_t>(t + lag)] - mb);
                }
                caa /= pairs;
                cbb /= pairs;
                tally.service.push_back(caa / va);
                tally.preparation.push_back(cbb / vb);
                tally.cross.push_back(cab / std::sqrt(va * vb));
                tally.samples += batch_size;
            }
        }
        return tally;
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < config.replications; ++r) tallies[static_cast<size_t>(r)] = run(r);
    } else
#else
    (void)parallel;
#endif
    {
        for (int r = 0; r < config.replications; ++r) tallies[static_cast<size_t>(r)] = run(r);
    }

    std::vector<double> svc, prep, cross;
    CorrelationEstimate est;
    for (const CorrelationTally& t : tallies) {
        svc.insert(svc.end(), t.service.begin(), t.service.end());
        prep.insert(prep.end(), t.preparation.begin(), t.preparation.end());
        cross.insert(cross.end(), t.cross.begin(), t.cross.end());
        est.samples_used += t.samples;
    }
    auto [sm, sse] = batch_mean_stderr(svc);
    auto [pm, pse] = batch_mean_stderr(prep);
    auto [cm, cse] = batch_mean_stderr(cross);
    est.service_autocorr = sm;
    est.service_stderr = sse;
    est.preparation_autocorr = pm;
    est.preparation_stderr = pse;
    est.cross_correlation = cm;
    est.cross_stderr = cse;
    return est;
}

}  // namespace

SimulationEstimate simulate_markov(const MarkovModulatedModel& m, const SimulationConfig& config) {
    return simulate_markov_impl(m, config, true);
}

SimulationEstimate simulate_markov_serial(const MarkovModulatedModel& m, const SimulationConfig& config) {
    return simulate_markov_impl(m, config, false);
}

SimulationEstimate simulate_joint(const JointLstModel& m, const SimulationConfig& config) {
    return simulate_joint_impl(m, config, true);
}

SimulationEstimate simulate_joint_serial(const JointLstModel& m, const SimulationConfig& config) {
    return simulate_joint_impl(m, config, false);
}

CorrelationEstimate empirical_correlations(const MarkovModulatedModel& m, int lag,
                                           const SimulationConfig& config) {
    return correlations_impl(m, lag, config, true);
}

CorrelationEstimate empirical_correlations_serial(const MarkovModulatedModel& m, int lag,
                                                  const SimulationConfig& config) {
    return correlations_impl(m, lag, config, false);
}

}  // namespace altq
