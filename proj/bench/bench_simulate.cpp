// Compares the serial reference simulator against the OpenMP replication
// loop on the same model and reports throughput. The estimates must match
// bit for bit; the wall-clock ratio is the point of the exercise.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "altq/simulate.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

altq::MarkovModulatedModel example_model() {
    Eigen::MatrixXd cyclic(4, 4);
    cyclic << 0, 1, 0, 0,
              0, 0, 1, 0,
              0, 0, 0, 1,
              1, 0, 0, 0;
    std::vector<altq::StateServiceSpec> service;
    for (double rate : {1.0, 100.0, 1.0, 100.0})
        service.push_back(altq::StateServiceSpec::from_mixed_erlang(altq::MixedErlangSpec::exponential(rate)));
    std::vector<altq::MixedErlangSpec> preparation;
    for (double rate : {0.5, 10.0, 0.5, 10.0})
        preparation.push_back(altq::MixedErlangSpec::exponential(rate));
    return altq::MarkovModulatedModel{altq::TransitionMatrix(cyclic), service, preparation};
}

}  // namespace

int main() {
    altq::MarkovModulatedModel model = example_model();
    altq::JointLstModel joint = altq::make_compound_poisson(1.0, altq::MixedErlangSpec::exponential(1.0), 1.0);

    altq::SimulationConfig config;
    config.iterations = 500'000;
    config.warmup = 10'000;
    config.seed = 7;
    config.replications = 8;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif
    std::printf("%-28s %12s %12s %10s\n", "case", "serial [s]", "parallel [s]", "speedup");

    {
        auto t0 = Clock::now();
        altq::SimulationEstimate serial = altq::simulate_markov_serial(model, config);
        double ts = seconds_since(t0);
        t0 = Clock::now();
        altq::SimulationEstimate parallel = altq::simulate_markov(model, config);
        double tp = seconds_since(t0);
        std::printf("%-28s %12.3f %12.3f %9.2fx %s\n", "markov (4 states)", ts, tp, ts / tp,
                    serial == parallel ? "" : "MISMATCH");
    }
    {
        auto t0 = Clock::now();
        altq::SimulationEstimate serial = altq::simulate_joint_serial(joint, config);
        double ts = seconds_since(t0);
        t0 = Clock::now();
        altq::SimulationEstimate parallel = altq::simulate_joint(joint, config);
        double tp = seconds_since(t0);
        std::printf("%-28s %12.3f %12.3f %9.2fx %s\n", "joint (compound Poisson)", ts, tp, ts / tp,
                    serial == parallel ? "" : "MISMATCH");
    }
    {
        auto t0 = Clock::now();
        altq::CorrelationEstimate serial = altq::empirical_correlations_serial(model, 1, config);
        double ts = seconds_since(t0);
        t0 = Clock::now();
        altq::CorrelationEstimate parallel = altq::empirical_correlations(model, 1, config);
        double tp = seconds_since(t0);
        std::printf("%-28s %12.3f %12.3f %9.2fx %s\n", "correlations (lag 1)", ts, tp, ts / tp,
                    serial == parallel ? "" : "MISMATCH");
    }
    return 0;
}
