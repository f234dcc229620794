#pragma once

#include <optional>
#include <string>
#include <vector>

#include "altq/scenario.hpp"

namespace altq {

// One CSV row of a solve/simulate/sweep run. Aggregate rows leave `state`
// empty; per-state rows report the joint quantities E[W; Z=j] and
// P[W=0, Z=j]. Simulation columns stay empty in analytic-only mode and vice
// versa (the atom column carries the analytic atom whenever one was
// computed).
struct ResultRow {
    std::string scenario_id;
    std::string sweep_param;
    std::optional<double> sweep_value;
    std::optional<int> state;  // 1-based
    std::optional<double> atom;
    std::optional<double> mean_wait_analytic;
    std::optional<double> mean_wait_sim;
    std::optional<double> sim_stderr;
    std::optional<long long> samples;
    std::optional<uint64_t> seed;
};

inline constexpr const char* kResultCsvHeader =
    "scenario_id,sweep_param,sweep_value,state,atom,mean_wait_analytic,mean_wait_sim,sim_stderr,"
    "samples,seed";

// One CSV row of a correlations run, long format: one row per quantity.
struct CorrelationRow {
    std::string scenario_id;
    std::string sweep_param;
    std::optional<double> sweep_value;
    int lag = 1;
    std::string quantity;  // autocorr_service | autocorr_preparation | crosscorrelation
    std::optional<double> analytic;
    std::optional<double> simulated;
    std::optional<double> sim_stderr;
    std::optional<long long> samples;
    std::optional<uint64_t> seed;
};

inline constexpr const char* kCorrelationCsvHeader =
    "scenario_id,sweep_param,sweep_value,lag,quantity,analytic,simulated,sim_stderr,samples,seed";

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_csv(const std::vector<CorrelationRow>& rows);

// Solves and/or simulates the scenario at one parameter point (the sweep is
// ignored). `point` annotates the rows when called from a sweep.
std::vector<ResultRow> run_point(const Scenario& s, RunMode mode, std::optional<double> point = {});

// Full scenario run: every sweep point (or the base model when there is no
// sweep) under the scenario's run mode. Points execute concurrently; rows
// are emitted in sweep order. Errors are annotated with the sweep point.
std::vector<ResultRow> run_scenario(const Scenario& s);

// Closed-form and (run mode permitting) sample-path correlations at the
// given lag, per sweep point.
std::vector<CorrelationRow> run_correlations(const Scenario& s, int lag);

}  // namespace altq
