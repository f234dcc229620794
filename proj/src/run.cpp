#include "altq/run.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "altq/errors.hpp"

namespace altq {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void append(std::ostringstream& out, const std::optional<double>& v, bool last = false) {
    if (v) out << format_value(*v);
    if (!last) out << ',';
}

// Scenario model at one sweep point.
struct PointModels {
    std::optional<MarkovModulatedModel> markov;
    std::optional<JointLstModel> joint;
};

PointModels instantiate(const Scenario& s, std::optional<double> point) {
    PointModels models;
    if (s.is_markov()) {
        double scale = 1.0;
        if (point && s.sweep && s.sweep->parameter == "u") scale = *point;
        models.markov = build_markov_model(s.markov(), scale);
    } else {
        JointScenario js = s.joint();
        if (point && s.sweep) {
            if (s.sweep->parameter == "c") js.c = *point;
            if (s.sweep->parameter == "gamma") js.gamma = *point;
        }
        models.joint = build_joint_model(js);
    }
    return models;
}

MarkovWaitingSolution solve_markov_auto(const MarkovModulatedModel& model) {
    return model.max_phase_count() == 1 ? solve_exponential(model) : solve_mixed_erlang(model);
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << kResultCsvHeader << '\n';
    for (const ResultRow& r : rows) {
        out << r.scenario_id << ',' << r.sweep_param << ',';
        append(out, r.sweep_value);
        if (r.state) out << *r.state;
        out << ',';
        append(out, r.atom);
        append(out, r.mean_wait_analytic);
        append(out, r.mean_wait_sim);
        append(out, r.sim_stderr);
        if (r.samples) out << *r.samples;
        out << ',';
        if (r.seed) out << *r.seed;
        out << '\n';
    }
    return out.str();
}

std::string to_csv(const std::vector<CorrelationRow>& rows) {
    std::ostringstream out;
    out << kCorrelationCsvHeader << '\n';
    for (const CorrelationRow& r : rows) {
        out << r.scenario_id << ',' << r.sweep_param << ',';
        append(out, r.sweep_value);
        out << r.lag << ',' << r.quantity << ',';
        append(out, r.analytic);
        append(out, r.simulated);
        append(out, r.sim_stderr);
        if (r.samples) out << *r.samples;
        out << ',';
        if (r.seed) out << *r.seed;
        out << '\n';
    }
    return out.str();
}

std::vector<ResultRow> run_point(const Scenario& s, RunMode mode, std::optional<double> point) {
    PointModels models = instantiate(s, point);
    const bool analytic = mode != RunMode::simulate;
    const bool simulated = mode != RunMode::analytic;
    const std::string sweep_param = (point && s.sweep) ? s.sweep->parameter : "";

    std::vector<ResultRow> rows;
    ResultRow aggregate;
    aggregate.scenario_id = s.id;
    aggregate.sweep_param = sweep_param;
    aggregate.sweep_value = point;

    if (models.markov) {
        std::optional<MarkovWaitingSolution> solution;
        if (analytic) {
            solution = solve_markov_auto(*models.markov);
            aggregate.atom = solution->total_atom();
            aggregate.mean_wait_analytic = mean_waiting_time(*solution);
        }
        std::optional<SimulationEstimate> estimate;
        if (simulated) {
            estimate = simulate_markov(*models.markov, s.sim);
            aggregate.mean_wait_sim = estimate->mean_wait;
            aggregate.sim_stderr = estimate->mean_stderr;
            aggregate.samples = estimate->samples_used;
            aggregate.seed = estimate->seed_used;
            if (!aggregate.atom) aggregate.atom = estimate->atom_estimate;
        }
        rows.push_back(aggregate);
        const int M = models.markov->state_count();
        for (int j = 0; j < M; ++j) {
            ResultRow row = aggregate;
            row.state = j + 1;
            row.atom.reset();
            row.mean_wait_analytic.reset();
            row.mean_wait_sim.reset();
            row.sim_stderr.reset();
            if (solution) {
                row.atom = solution->per_state[static_cast<size_t>(j)].atom;
                row.mean_wait_analytic = solution->per_state[static_cast<size_t>(j)].partial_mean();
            }
            if (estimate) {
                row.mean_wait_sim = estimate->per_state[static_cast<size_t>(j)].mean;
                row.sim_stderr = estimate->per_state[static_cast<size_t>(j)].mean_stderr;
                if (!row.atom) row.atom = estimate->per_state[static_cast<size_t>(j)].atom;
            }
            rows.push_back(row);
        }
    } else {
        if (analytic) {
            JointWaitingSolution solution = solve_waiting_time(*models.joint);
            aggregate.atom = solution.atom;
            aggregate.mean_wait_analytic = mean_waiting_time(solution);
        }
        if (simulated) {
            SimulationEstimate estimate = simulate_joint(*models.joint, s.sim);
            aggregate.mean_wait_sim = estimate.mean_wait;
            aggregate.sim_stderr = estimate.mean_stderr;
            aggregate.samples = estimate.samples_used;
            aggregate.seed = estimate.seed_used;
            if (!aggregate.atom) aggregate.atom = estimate.atom_estimate;
        }
        rows.push_back(aggregate);
    }
    return rows;
}

namespace {

// Runs one job per sweep point, keeping output order and annotating errors
// with the point. Exceptions cannot unwind an OpenMP region, so they are
// captured per point and rethrown after the loop.
template <typename Job>
void run_sweep_points(const Scenario& s, const std::vector<std::optional<double>>& points, Job job) {
    std::vector<std::string> validation_errors(points.size());
    std::vector<std::string> numerical_errors(points.size());
    std::vector<std::string> other_errors(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < points.size(); ++i) {
        try {
            job(i, points[i]);
        } catch (const ValidationError& e) {
            validation_errors[i] = e.what();
        } catch (const NumericalError& e) {
            numerical_errors[i] = e.what();
        } catch (const std::exception& e) {
            other_errors[i] = e.what();
        }
    }
    for (size_t i = 0; i < points.size(); ++i) {
        std::string where;
        if (points[i] && s.sweep)
            where = " at sweep point " + s.sweep->parameter + " = " + format_value(*points[i]);
        if (!validation_errors[i].empty()) throw ValidationError(validation_errors[i] + where);
        if (!numerical_errors[i].empty()) throw NumericalError(numerical_errors[i] + where);
        if (!other_errors[i].empty()) throw Error(other_errors[i] + where);
    }
}

}  // namespace

std::vector<ResultRow> run_scenario(const Scenario& s) {
    std::vector<std::optional<double>> points;
    if (s.sweep)
        for (double v : s.sweep->values) points.emplace_back(v);
    else
        points.emplace_back(std::nullopt);

    std::vector<std::vector<ResultRow>> buffered(points.size());
    run_sweep_points(s, points, [&](size_t i, std::optional<double> point) {
        buffered[i] = run_point(s, s.run, point);
    });

    std::vector<ResultRow> rows;
    for (const auto& group : buffered) rows.insert(rows.end(), group.begin(), group.end());
    return rows;
}

std::vector<CorrelationRow> run_correlations(const Scenario& s, int lag) {
    if (!s.is_markov())
        throw ValidationError("correlations apply to markov scenarios only");
    std::vector<std::optional<double>> points;
    if (s.sweep)
        for (double v : s.sweep->values) points.emplace_back(v);
    else
        points.emplace_back(std::nullopt);

    std::vector<std::vector<CorrelationRow>> buffered(points.size());
    run_sweep_points(s, points, [&](size_t i, std::optional<double> point) {
        PointModels models = instantiate(s, point);
        const MarkovModulatedModel& model = *models.markov;
        const std::string sweep_param = (point && s.sweep) ? s.sweep->parameter : "";

        CorrelationRow base;
        base.scenario_id = s.id;
        base.sweep_param = sweep_param;
        base.sweep_value = point;
        base.lag = lag;
        CorrelationRow service = base, preparation = base, cross = base;
        service.quantity = "autocorr_service";
        preparation.quantity = "autocorr_preparation";
        cross.quantity = "crosscorrelation";

        if (s.run != RunMode::simulate) {
            service.analytic = service_autocorrelation(model, lag);
            preparation.analytic = preparation_autocorrelation(model, lag);
            cross.analytic = cross_correlation(model);
        }
        if (s.run != RunMode::analytic) {
            CorrelationEstimate est = empirical_correlations(model, lag, s.sim);
            service.simulated = est.service_autocorr;
            service.sim_stderr = est.service_stderr;
            preparation.simulated = est.preparation_autocorr;
            preparation.sim_stderr = est.preparation_stderr;
            cross.simulated = est.cross_correlation;
            cross.sim_stderr = est.cross_stderr;
            for (CorrelationRow* row : {&service, &preparation, &cross}) {
                row->samples = est.samples_used;
                row->seed = s.sim.seed;
            }
        }
        buffered[i] = {service, preparation, cross};
    });

    std::vector<CorrelationRow> rows;
    for (const auto& group : buffered) rows.insert(rows.end(), group.begin(), group.end());
    return rows;
}

}  // namespace altq
