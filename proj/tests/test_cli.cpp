// End-to-end checks of the command-line tool: subcommands, exit codes and
// CSV output, run through the installed binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = ALTQ_CLI_PATH;
const std::string kScenarioDir = ALTQ_SCENARIO_DIR;

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_command(const std::string& args) {
    std::string stdout_path = std::string("cli_test_stdout.tmp");
    std::string command = kCli + " " + args + " > " + stdout_path + " 2>&1";
    int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(stdout_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    std::remove(stdout_path.c_str());
    return result;
}

std::string write_temp_scenario(const std::string& name, const std::string& text) {
    std::string path = name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("solve-joint reports the linear golden values") {
    std::string path = write_temp_scenario("cli_linear.scn",
                                           "id = lin\nmodel = joint\njoint.kind = linear\n"
                                           "joint.lambda = 1\njoint.c = 2.5\n");
    CommandResult r = run_command("solve-joint --scenario " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("scenario_id,sweep_param,sweep_value,state,atom,mean_wait_analytic,"
                        "mean_wait_sim,sim_stderr,samples,seed") != std::string::npos);
    CHECK(r.output.find("0.333333333333") != std::string::npos);
    CHECK(r.output.find(",1,") != std::string::npos);  // mean 1 printed as "1"
    std::remove(path.c_str());
}

TEST_CASE("correlations reports the alternating service autocorrelation") {
    CommandResult r =
        run_command("correlations --scenario " + kScenarioDir + "/ex1_cyclic.scn --lag 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("autocorr_service") != std::string::npos);
    CHECK(r.output.find("-0.328859510788") != std::string::npos);
    CHECK(r.output.find("-0.310404127257") != std::string::npos);
}

TEST_CASE("simulate on a transform-only family exits with the capability code") {
    // matrix-exponential preparation: valid analytically, not samplable
    std::string path = write_temp_scenario(
        "cli_joint_bad.scn",
        "id = x\nmodel = joint\njoint.kind = linear\njoint.lambda = 1\njoint.c = -3\n");
    CommandResult r = run_command("simulate --scenario " + path);
    CHECK(r.exit_code == 2);
    std::remove(path.c_str());
}

TEST_CASE("validation failures exit with code 2 and name the line") {
    std::string path = write_temp_scenario("cli_bad.scn",
                                           "id = bad\nmodel = markov\nstates = 2\n"
                                           "row = 0.5 0.4\nrow = 0.5 0.5\n"
                                           "service.1.rate = 1\nservice.2.rate = 1\n"
                                           "prep.1.rate = 1\nprep.2.rate = 1\n");
    CommandResult r = run_command("solve-markov --scenario " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("line 4") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("solve-markov rejects joint scenarios") {
    std::string path = write_temp_scenario("cli_kind.scn",
                                           "id = lin\nmodel = joint\njoint.kind = linear\n"
                                           "joint.lambda = 1\njoint.c = 2\n");
    CommandResult r = run_command("solve-markov --scenario " + path);
    CHECK(r.exit_code == 2);
    std::remove(path.c_str());
}

TEST_CASE("sweep writes byte-identical CSV to --out under a fixed seed") {
    CommandResult a = run_command("sweep --scenario " + kScenarioDir +
                                  "/linear.scn --out cli_sweep_a.csv");
    CommandResult b = run_command("sweep --scenario " + kScenarioDir +
                                  "/linear.scn --out cli_sweep_b.csv");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    std::ifstream fa("cli_sweep_a.csv"), fb("cli_sweep_b.csv");
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().find("1.5") != std::string::npos);
    std::remove("cli_sweep_a.csv");
    std::remove("cli_sweep_b.csv");
}

TEST_CASE("the seed flag overrides the scenario seed") {
    CommandResult a = run_command("simulate --scenario " + kScenarioDir +
                                  "/independent.scn --seed 7");
    CHECK(a.exit_code == 0);
    CHECK(a.output.find(",7\n") != std::string::npos);
}

TEST_CASE("missing subcommand or file is a usage error") {
    CommandResult none = run_command("");
    CHECK(none.exit_code == 2);
    CommandResult missing = run_command("solve-joint --scenario does_not_exist.scn");
    CHECK(missing.exit_code == 2);
}
