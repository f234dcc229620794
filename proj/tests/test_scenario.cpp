#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "altq/errors.hpp"
#include "altq/run.hpp"
#include "altq/scenario.hpp"

using namespace altq;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::string kScenarioDir = ALTQ_SCENARIO_DIR;

}  // namespace

TEST_CASE("the shipped positive-crosscorrelation scenario parses and is uniform in law") {
    Scenario s = parse_scenario(read_file(kScenarioDir + "/ex1_cyclic.scn"));
    CHECK(s.id == "ex1-cyclic");
    CHECK(s.is_markov());
    REQUIRE(s.sweep.has_value());
    CHECK(s.sweep->parameter == "u");
    CHECK(s.sweep->values.size() == 40);
    MarkovModulatedModel model = build_markov_model(s.markov());
    Eigen::VectorXd pi = stationary_distribution(model.transition);
    for (int j = 0; j < 4; ++j) CHECK(pi(j) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("a transition row that does not sum to one is reported with its line") {
    std::string text =
        "id = broken\n"
        "model = markov\n"
        "states = 2\n"
        "row = 0.5 0.4\n"
        "row = 0.5 0.5\n"
        "service.1.rate = 1\nservice.2.rate = 1\n"
        "prep.1.rate = 1\nprep.2.rate = 1\n";
    try {
        parse_scenario(text);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        std::string what = e.what();
        CHECK(what.find("line 4") != std::string::npos);
        CHECK(what.find("row 1") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with their line number") {
    try {
        parse_scenario("id = x\nmodel = joint\njoint.kind = linear\njoint.lambda = 1\njoint.c = 2\nbogus = 1\n");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        std::string what = e.what();
        CHECK(what.find("line 6") != std::string::npos);
        CHECK(what.find("bogus") != std::string::npos);
    }
}

TEST_CASE("joint linear scenario with a c sweep parses") {
    std::string text =
        "id = lin\nmodel = joint\njoint.kind = linear\njoint.lambda = 1\njoint.c = 2.5\n"
        "sweep.param = c\nsweep.values = 1.5 2 2.5\n";
    Scenario s = parse_scenario(text);
    CHECK_FALSE(s.is_markov());
    CHECK(s.joint().kind == DependenceKind::linear);
    REQUIRE(s.sweep.has_value());
    CHECK(s.sweep->values == std::vector<double>{1.5, 2.0, 2.5});
}

TEST_CASE("sweep parameters must match the model kind and be increasing") {
    std::string markov_with_c =
        "id = x\nmodel = markov\nstates = 1\nrow = 1\nservice.1.rate = 1\nprep.1.rate = 1\n"
        "sweep.param = c\nsweep.values = 1 2\n";
    CHECK_THROWS_AS(parse_scenario(markov_with_c), ValidationError);
    std::string decreasing =
        "id = x\nmodel = markov\nstates = 1\nrow = 1\nservice.1.rate = 1\nprep.1.rate = 1\n"
        "sweep.param = u\nsweep.values = 2 1\n";
    CHECK_THROWS_AS(parse_scenario(decreasing), ValidationError);
}

TEST_CASE("every shipped scenario round-trips through serialization") {
    for (const char* name : {"ex1_cyclic.scn", "ex1_iid.scn", "ex2_cyclic.scn", "ex2_iid.scn",
                             "ex3_bipartite.scn", "ex3_iid.scn", "ex1_cyclic_sim.scn", "linear.scn",
                             "compound.scn", "brownian.scn", "independent.scn"}) {
        Scenario s = parse_scenario(read_file(kScenarioDir + "/" + name));
        Scenario again = parse_scenario(serialize_scenario(s));
        CHECK(again == s);
        CHECK(serialize_scenario(again) == serialize_scenario(s));
    }
}

TEST_CASE("result CSV schema is pinned") {
    CHECK(std::string(kResultCsvHeader) ==
          "scenario_id,sweep_param,sweep_value,state,atom,mean_wait_analytic,mean_wait_sim,"
          "sim_stderr,samples,seed");
    Scenario s = parse_scenario(
        "id = lin\nmodel = joint\njoint.kind = linear\njoint.lambda = 1\njoint.c = 2.5\n");
    std::string csv = to_csv(run_point(s, RunMode::analytic));
    CHECK(csv.rfind(kResultCsvHeader, 0) == 0);
    // analytic mode leaves the simulation columns empty
    std::string row = csv.substr(csv.find('\n') + 1);
    CHECK(row.substr(row.size() - 4) == ",,,\n");
}

TEST_CASE("linear sweep emits the exact golden mean column") {
    Scenario s = parse_scenario(read_file(kScenarioDir + "/linear.scn"));
    std::vector<ResultRow> rows = run_scenario(s);
    REQUIRE(rows.size() == 4);
    const double expected[] = {1.0 / 3.0, 2.0 / 3.0, 1.0, 8.0 / 3.0};
    for (size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].mean_wait_analytic.has_value());
        CHECK(*rows[i].mean_wait_analytic == doctest::Approx(expected[i]).epsilon(1e-9));
        CHECK(*rows[i].atom == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }
}

TEST_CASE("run_scenario output is deterministic byte for byte") {
    Scenario s = parse_scenario(read_file(kScenarioDir + "/brownian.scn"));
    std::string a = to_csv(run_scenario(s));
    std::string b = to_csv(run_scenario(s));
    CHECK(a == b);
    CHECK(a.find("brownian") != std::string::npos);
}

TEST_CASE("both-mode rows agree between solver and simulator within 3 standard errors") {
    Scenario s = parse_scenario(read_file(kScenarioDir + "/brownian.scn"));
    std::vector<ResultRow> rows = run_scenario(s);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].mean_wait_analytic.has_value());
    REQUIRE(rows[0].mean_wait_sim.has_value());
    CHECK(std::abs(*rows[0].mean_wait_analytic - *rows[0].mean_wait_sim) <= 3.0 * *rows[0].sim_stderr);
}

TEST_CASE("correlation rows carry the closed-form values") {
    Scenario s = parse_scenario(read_file(kScenarioDir + "/ex1_cyclic.scn"));
    s.sweep.reset();
    std::vector<CorrelationRow> rows = run_correlations(s, 1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].quantity == "autocorr_service");
    CHECK(*rows[0].analytic == doctest::Approx(-9801.0 / 29803.0).epsilon(1e-12));
    CHECK(rows[1].quantity == "autocorr_preparation");
    CHECK(*rows[1].analytic == doctest::Approx(-361.0 / 1163.0).epsilon(1e-12));
    CHECK(rows[2].quantity == "crosscorrelation");
    CHECK(std::abs(*rows[2].analytic - 0.3195) < 5e-4);
    CHECK(to_csv(rows).rfind(kCorrelationCsvHeader, 0) == 0);
}

TEST_CASE("correlations require a markov scenario") {
    Scenario s = parse_scenario(
        "id = lin\nmodel = joint\njoint.kind = linear\njoint.lambda = 1\njoint.c = 2.5\n");
    CHECK_THROWS_AS(run_correlations(s, 1), ValidationError);
}
