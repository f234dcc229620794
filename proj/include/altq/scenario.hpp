#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "altq/joint_model.hpp"
#include "altq/markov_model.hpp"
#include "altq/simulate.hpp"

namespace altq {

enum class RunMode { analytic, simulate, both };

// Declarative experiment description, read from a line-oriented
// "key = value" file. See serialize_scenario for the exact key set.
struct MarkovScenario {
    Eigen::MatrixXd transition;
    std::vector<MixedErlangSpec> service;
    std::vector<MixedErlangSpec> preparation;

    bool operator==(const MarkovScenario& other) const;
};

struct JointScenario {
    DependenceKind kind = DependenceKind::independent;
    double lambda = 1.0;
    double c = 1.0;       // linear coefficient
    double gamma = 1.0;   // compound Poisson intensity
    double drift = 0.0;   // Brownian drift
    double variance = 0.0;
    std::optional<MixedErlangSpec> preparation;  // independent case
    std::optional<MixedErlangSpec> jumps;        // compound Poisson case

    bool operator==(const JointScenario&) const = default;
};

struct SweepSpec {
    // "u" scales every preparation rate of a Markov scenario; "c" is the
    // linear coefficient; "gamma" the compound Poisson intensity.
    std::string parameter;
    std::vector<double> values;  // strictly positive, strictly increasing

    bool operator==(const SweepSpec&) const = default;
};

struct Scenario {
    std::string id;
    std::variant<MarkovScenario, JointScenario> model;
    std::optional<SweepSpec> sweep;
    RunMode run = RunMode::analytic;
    SimulationConfig sim;
    std::string output;  // CSV destination; empty writes to standard output

    bool is_markov() const { return std::holds_alternative<MarkovScenario>(model); }
    const MarkovScenario& markov() const { return std::get<MarkovScenario>(model); }
    const JointScenario& joint() const { return std::get<JointScenario>(model); }

    bool operator==(const Scenario& other) const;
};

// Parses scenario text. All problems are collected and reported together,
// each prefixed with its line number; the exception message carries one
// problem per line.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

MarkovModulatedModel build_markov_model(const MarkovScenario& s, double preparation_rate_scale = 1.0);
JointLstModel build_joint_model(const JointScenario& s);

}  // namespace altq
