// Command-line front end: scenario-driven solvers, simulation, sweeps and
// correlation reports, emitting CSV. Exit codes: 0 success, 2 validation
// error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "altq/errors.hpp"
#include "altq/run.hpp"
#include "altq/scenario.hpp"

namespace {

struct Options {
    std::string scenario_path;
    std::string out_path;
    std::optional<uint64_t> seed;
    int lag = 1;
};

void add_common_options(CLI::App* cmd, Options& options, bool with_lag = false) {
    cmd->add_option("--scenario", options.scenario_path, "scenario file")->required();
    cmd->add_option("--out", options.out_path, "CSV output path (default: scenario output or stdout)");
    cmd->add_option("--seed", options.seed, "override the scenario seed");
    if (with_lag) cmd->add_option("--lag", options.lag, "correlation lag")->check(CLI::PositiveNumber);
}

altq::Scenario load(const Options& options) {
    altq::Scenario scenario = altq::load_scenario(options.scenario_path);
    if (options.seed) scenario.sim.seed = *options.seed;
    return scenario;
}

void write_output(const altq::Scenario& scenario, const Options& options, const std::string& csv) {
    std::string path = !options.out_path.empty() ? options.out_path : scenario.output;
    if (path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw altq::ValidationError("cannot open output file '" + path + "'");
    out << csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alternating-service queue solver and simulator"};
    app.require_subcommand(1);

    Options options;
    CLI::App* solve_markov = app.add_subcommand("solve-markov", "analytic solve of a markov scenario");
    add_common_options(solve_markov, options);
    CLI::App* solve_joint = app.add_subcommand("solve-joint", "analytic solve of a joint scenario");
    add_common_options(solve_joint, options);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a scenario");
    add_common_options(simulate, options);
    CLI::App* sweep = app.add_subcommand("sweep", "run the scenario over its sweep values");
    add_common_options(sweep, options);
    CLI::App* correlations = app.add_subcommand("correlations", "correlation report for a markov scenario");
    add_common_options(correlations, options, /*with_lag=*/true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        altq::Scenario scenario = load(options);
        std::string csv;
        if (solve_markov->parsed()) {
            if (!scenario.is_markov())
                throw altq::ValidationError("solve-markov needs a markov scenario");
            csv = altq::to_csv(altq::run_point(scenario, altq::RunMode::analytic));
        } else if (solve_joint->parsed()) {
            if (scenario.is_markov())
                throw altq::ValidationError("solve-joint needs a joint scenario");
            csv = altq::to_csv(altq::run_point(scenario, altq::RunMode::analytic));
        } else if (simulate->parsed()) {
            csv = altq::to_csv(altq::run_point(scenario, altq::RunMode::simulate));
        } else if (sweep->parsed()) {
            csv = altq::to_csv(altq::run_scenario(scenario));
        } else if (correlations->parsed()) {
            csv = altq::to_csv(altq::run_correlations(scenario, options.lag));
        }
        write_output(scenario, options, csv);
        return 0;
    } catch (const altq::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const altq::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
