// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical comparisons run against the Monte Carlo oracle at
// 3 standard errors; a comparison that misses is rerun once on a fresh
// child seed and only a repeated miss fails the criterion (with correct
// code, about one first-pass miss per full suite is expected at 3 sigma).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "altq/partial_fractions.hpp"
#include "altq/random.hpp"
#include "altq/run.hpp"
#include "altq/scenario.hpp"
#include "altq/simulate.hpp"
#include "helpers.hpp"

using namespace altq;
namespace tst = altq::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int number;
    std::string title;
    double time_limit_seconds;
    std::function<void(std::ostringstream&)> body;  // appends failure details
};

int failures = 0;

void run_criterion(const Criterion& c) {
    std::ostringstream detail;
    bool threw = false;
    auto start = Clock::now();
    try {
        c.body(detail);
    } catch (const std::exception& e) {
        threw = true;
        detail << " exception: " << e.what();
    }
    double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    bool time_ok = c.time_limit_seconds <= 0.0 || elapsed < c.time_limit_seconds;
    if (!time_ok) detail << " runtime " << elapsed << "s exceeds " << c.time_limit_seconds << "s";
    bool pass = !threw && detail.str().empty() && time_ok;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s (%.2fs)%s\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str(),
                elapsed, detail.str().c_str());
    std::fflush(stdout);
}

std::string scenario_dir() { return ALTQ_SCENARIO_DIR; }

Scenario load(const std::string& name) {
    return load_scenario(scenario_dir() + "/" + name);
}

// |a - b| within 3 combined standard errors (plus a tiny slack for exact
// zero-variance cases).
bool within_3se(double a, double b, double se) { return std::abs(a - b) <= 3.0 * se + 1e-12; }

struct OracleCase {
    std::string name;
    double analytic_mean = 0.0;
    double analytic_atom = 0.0;
    std::function<SimulationEstimate(const SimulationConfig&)> simulate;
};

// One analytic-vs-simulation comparison with the single-rerun policy.
void check_oracle_case(const OracleCase& oc, std::ostringstream& detail) {
    SimulationConfig config;
    config.iterations = 1'000'000;
    config.warmup = 10'000;
    config.replications = 1;
    config.seed = std::hash<std::string>{}(oc.name);
    for (int attempt = 0; attempt < 2; ++attempt) {
        SimulationEstimate est = oc.simulate(config);
        bool mean_ok = within_3se(est.mean_wait, oc.analytic_mean, est.mean_stderr);
        bool atom_ok = within_3se(est.atom_estimate, oc.analytic_atom, est.atom_stderr);
        if (mean_ok && atom_ok) return;
        if (attempt == 1) {
            detail << " [" << oc.name << ": analytic mean " << oc.analytic_mean << " atom "
                   << oc.analytic_atom << " vs simulated " << est.mean_wait << " +- "
                   << est.mean_stderr << ", atom " << est.atom_estimate << " +- " << est.atom_stderr
                   << " after rerun]";
        } else {
            config.seed = splitmix64(config.seed ^ 0xA5A5A5A5ull);  // documented rerun, fresh stream
        }
    }
}

std::vector<JointLstModel> joint_corpus() {
    std::vector<JointLstModel> models;
    for (double lambda : {0.7, 1.0, 1.8})
        models.push_back(make_independent(MixedErlangSpec(1.1, {0.25, 0.5, 0.25}), lambda));
    for (double c : {0.8, 2.5, 4.0}) models.push_back(make_linear(c, 1.0));
    for (double gamma : {0.5, 1.0, 2.0})
        models.push_back(make_compound_poisson(gamma, MixedErlangSpec(1.0, {0.5, 0.5}), 1.0));
    models.push_back(make_brownian(0.5, 0.5, 1.0));
    models.push_back(make_brownian(1.0, 1.0, 1.0));
    models.push_back(make_brownian(1.5, 0.25, 1.0));
    return models;
}

const char* joint_kind_name(DependenceKind kind) {
    switch (kind) {
        case DependenceKind::independent: return "independent";
        case DependenceKind::linear: return "linear";
        case DependenceKind::compound_poisson: return "compound_poisson";
        case DependenceKind::brownian: return "brownian";
    }
    return "?";
}

void criterion_linear_golden(std::ostringstream& detail) {
    for (double c : {1.5, 2.0, 2.5, 5.0}) {
        JointWaitingSolution sol = solve_waiting_time(make_linear(c, 1.0));
        double expected_mean = 2.0 * (c - 1.0) / 3.0;
        if (std::abs(sol.atom - 1.0 / 3.0) > 1e-9)
            detail << " [c=" << c << ": atom " << sol.atom << "]";
        if (std::abs(mean_waiting_time(sol) - expected_mean) > 1e-9)
            detail << " [c=" << c << ": mean " << mean_waiting_time(sol) << " != " << expected_mean << "]";
    }
    for (double c : {0.5, 1.0}) {
        JointWaitingSolution sol = solve_waiting_time(make_linear(c, 1.0));
        if (sol.atom != 1.0) detail << " [c=" << c << ": atom " << sol.atom << " != 1 exactly]";
        if (mean_waiting_time(sol) != 0.0) detail << " [c=" << c << ": mean not exactly 0]";
    }
}

void criterion_correlations(std::ostringstream& detail) {
    const double svc = 9801.0 / 29803.0;
    const double prep = 361.0 / 1163.0;
    for (double u : {0.1, 1.0, 10.0}) {
        MarkovModulatedModel pos = tst::example_model(tst::cyclic_matrix4(), tst::kPrepPositive, u);
        for (int lag = 1; lag <= 5; ++lag) {
            double sign = (lag % 2 == 0) ? 1.0 : -1.0;
            if (std::abs(service_autocorrelation(pos, lag) - sign * svc) > 1e-12)
                detail << " [service acf lag " << lag << " u=" << u << "]";
            if (std::abs(preparation_autocorrelation(pos, lag) - sign * prep) > 1e-12)
                detail << " [preparation acf lag " << lag << " u=" << u << "]";
        }
        if (std::abs(cross_correlation(pos) - 0.3195) > 5e-4)
            detail << " [crosscorr positive family u=" << u << ": " << cross_correlation(pos) << "]";
        MarkovModulatedModel neg = tst::example_model(tst::cyclic_matrix4(), tst::kPrepNegative, u);
        if (std::abs(cross_correlation(neg) + 0.3195) > 5e-4)
            detail << " [crosscorr negative family u=" << u << "]";
        MarkovModulatedModel zero = tst::example_model(tst::cyclic_matrix4(), tst::kPrepZero, u);
        if (std::abs(cross_correlation(zero)) > 1e-12)
            detail << " [crosscorr zero family u=" << u << ": " << cross_correlation(zero) << "]";
    }
}

void criterion_reductions(std::ostringstream& detail) {
    std::mt19937 rng(20240901);
    for (int trial = 0; trial < 50; ++trial) {
        MarkovModulatedModel model = tst::random_markov_model(rng, 4, 1);
        MarkovWaitingSolution a = solve_exponential(model);
        MarkovWaitingSolution b = solve_mixed_erlang(model);
        for (int j = 0; j < model.state_count(); ++j) {
            const StateWaitingPart& pa = a.per_state[static_cast<size_t>(j)];
            const StateWaitingPart& pb = b.per_state[static_cast<size_t>(j)];
            if (std::abs(pa.atom - pb.atom) > 1e-10)
                detail << " [trial " << trial << " state " << j << " atom mismatch]";
            if (pa.density.size() != pb.density.size() ||
                std::abs(pa.density[0].coefficient - pb.density[0].coefficient) > 1e-10)
                detail << " [trial " << trial << " state " << j << " density mismatch]";
        }
    }
    std::uniform_real_distribution<double> rate(0.4, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        double lambda = rate(rng), mu = rate(rng);
        JointWaitingSolution js = solve_waiting_time(make_independent(MixedErlangSpec::exponential(mu), lambda));
        Eigen::MatrixXd one(1, 1);
        one << 1.0;
        MarkovModulatedModel markov{
            TransitionMatrix(one),
            {StateServiceSpec::from_mixed_erlang(MixedErlangSpec::exponential(lambda))},
            {MixedErlangSpec::exponential(mu)}};
        MarkovWaitingSolution ms = solve_exponential(markov);
        if (std::abs(js.atom - ms.per_state[0].atom) > 1e-8)
            detail << " [joint/markov atom mismatch at lambda=" << lambda << " mu=" << mu << "]";
        if (std::abs(mean_waiting_time(js) - mean_waiting_time(ms)) > 1e-8)
            detail << " [joint/markov mean mismatch at lambda=" << lambda << " mu=" << mu << "]";
        for (double x : {0.0, 0.5, 2.0})
            if (std::abs(js.density_at(x) - ms.per_state[0].density_at(x)) > 1e-8)
                detail << " [joint/markov density mismatch]";
    }
}

void criterion_oracle(std::ostringstream& detail) {
    std::mt19937 rng(603);
    std::vector<OracleCase> cases;
    std::vector<MarkovModulatedModel> markov_models;
    for (int trial = 0; trial < 20; ++trial)
        markov_models.push_back(tst::random_markov_model(rng, 4, 3));
    for (size_t i = 0; i < markov_models.size(); ++i) {
        const MarkovModulatedModel& model = markov_models[i];
        MarkovWaitingSolution sol = solve_mixed_erlang(model);
        OracleCase oc;
        oc.name = "markov-" + std::to_string(i);
        oc.analytic_mean = mean_waiting_time(sol);
        oc.analytic_atom = sol.total_atom();
        oc.simulate = [&model](const SimulationConfig& c) { return simulate_markov(model, c); };
        cases.push_back(oc);
    }
    std::vector<JointLstModel> joint_models = joint_corpus();
    for (size_t i = 0; i < joint_models.size(); ++i) {
        const JointLstModel& model = joint_models[i];
        JointWaitingSolution sol = solve_waiting_time(model);
        OracleCase oc;
        oc.name = std::string("joint-") + joint_kind_name(model.kind) + "-" + std::to_string(i);
        oc.analytic_mean = mean_waiting_time(sol);
        oc.analytic_atom = sol.atom;
        oc.simulate = [&model](const SimulationConfig& c) { return simulate_joint(model, c); };
        cases.push_back(oc);
    }
    for (const OracleCase& oc : cases) check_oracle_case(oc, detail);

    // per-state masses and the 10-bin histogram for the worked example model
    MarkovModulatedModel example = tst::example_model(tst::cyclic_matrix4(), tst::kPrepPositive);
    MarkovWaitingSolution sol = solve_exponential(example);
    SimulationConfig config;
    config.iterations = 1'000'000;
    config.warmup = 10'000;
    config.seed = 1702;
    config.histogram_bins = 10;
    config.histogram_max = 20.0;
    SimulationEstimate est = simulate_markov(example, config);
    for (int j = 0; j < 4; ++j) {
        const StateEstimate& se = est.per_state[static_cast<size_t>(j)];
        if (!within_3se(se.atom, sol.per_state[static_cast<size_t>(j)].atom, se.atom_stderr))
            detail << " [example per-state atom " << j << "]";
        if (!within_3se(se.mean, sol.per_state[static_cast<size_t>(j)].partial_mean(), se.mean_stderr))
            detail << " [example per-state mean " << j << "]";
    }
    for (int k = 0; k < 10; ++k) {
        double lo = 20.0 * k / 10.0, hi = 20.0 * (k + 1) / 10.0;
        double analytic_bin = evaluate(sol, hi).cdf - evaluate(sol, lo).cdf;
        if (!within_3se(est.histogram_fraction[static_cast<size_t>(k)], analytic_bin,
                        est.histogram_fraction_stderr[static_cast<size_t>(k)]))
            detail << " [example histogram bin " << k << "]";
    }
}

void criterion_normalization(std::ostringstream& detail) {
    std::mt19937 rng(1111);
    for (int trial = 0; trial < 30; ++trial) {
        MarkovModulatedModel model = tst::random_markov_model(rng, 4, 3);
        MarkovWaitingSolution sol = solve_mixed_erlang(model);
        Eigen::VectorXd pi = stationary_distribution(model.transition);
        double total = 0.0;
        double max_mean = 0.0;
        for (const MixedErlangSpec& prep : model.preparation) max_mean = std::max(max_mean, prep.mean());
        for (int j = 0; j < model.state_count(); ++j) {
            double mass = sol.per_state[static_cast<size_t>(j)].total_mass();
            total += mass;
            if (std::abs(mass - pi(j)) > 1e-9) detail << " [markov trial " << trial << " state mass]";
            for (int g = 0; g < 200; ++g) {
                double x = 10.0 * max_mean * g / 199.0;
                if (sol.per_state[static_cast<size_t>(j)].density_at(x) < -1e-9) {
                    detail << " [markov trial " << trial << " negative density]";
                    break;
                }
            }
        }
        if (std::abs(total - 1.0) > 1e-9) detail << " [markov trial " << trial << " total mass]";
    }
    for (const JointLstModel& model : joint_corpus()) {
        JointWaitingSolution sol = solve_waiting_time(model);
        std::complex<double> total{sol.atom, 0.0};
        for (const JointDensityTerm& t : sol.terms) {
            std::complex<double> pw{1.0, 0.0};
            for (int k = 0; k < t.order; ++k) pw *= -t.root;
            double fact = 1.0;
            for (int k = 2; k < t.order; ++k) fact *= k;
            total += t.coefficient * fact / pw;
        }
        if (std::abs(total.real() - 1.0) > 1e-9 || std::abs(total.imag()) > 1e-9)
            detail << " [joint " << joint_kind_name(model.kind) << " normalization]";
        for (int g = 0; g <= 200; ++g) {
            double x = 0.2 * g;
            if (sol.density_at(x) < -1e-9) {
                detail << " [joint " << joint_kind_name(model.kind) << " negative density]";
                break;
            }
        }
        for (const JointDensityTerm& t : sol.terms)
            if (t.root.real() >= 0.0 && std::abs(t.coefficient) > 1e-9)
                detail << " [joint " << joint_kind_name(model.kind) << " right-half-plane coefficient]";
    }
}

void criterion_fixed_point(std::ostringstream& detail) {
    std::mt19937 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        MarkovModulatedModel model = tst::random_markov_model(rng, 4, 3);
        MarkovWaitingSolution sol = solve_mixed_erlang(model);
        double residual = fixed_point_residual(model, sol);
        if (residual > 1e-7) detail << " [markov trial " << trial << " residual " << residual << "]";
    }
    for (const JointLstModel& model : joint_corpus()) {
        JointWaitingSolution sol = solve_waiting_time(model);
        double residual = functional_equation_residual(model, sol);
        if (residual > 1e-7)
            detail << " [joint " << joint_kind_name(model.kind) << " residual " << residual << "]";
    }
}

void criterion_figures(std::ostringstream& detail) {
    auto aggregate_means = [](const std::vector<ResultRow>& rows) {
        std::vector<double> means;
        for (const ResultRow& r : rows)
            if (!r.state) means.push_back(*r.mean_wait_analytic);
        return means;
    };
    auto ex1c = aggregate_means(run_scenario(load("ex1_cyclic.scn")));
    auto ex1i = aggregate_means(run_scenario(load("ex1_iid.scn")));
    auto ex2c = aggregate_means(run_scenario(load("ex2_cyclic.scn")));
    auto ex2i = aggregate_means(run_scenario(load("ex2_iid.scn")));
    auto ex3b = aggregate_means(run_scenario(load("ex3_bipartite.scn")));
    auto ex3i = aggregate_means(run_scenario(load("ex3_iid.scn")));
    if (ex1c.size() != 40 || ex1i.size() != 40) detail << " [example 1 sweep size]";
    for (size_t i = 0; i < ex1c.size(); ++i)
        if (ex1c[i] < ex1i[i] - 1e-12) detail << " [example 1 ordering at point " << i << "]";
    for (size_t i = 0; i < ex2c.size(); ++i)
        if (ex2c[i] < ex2i[i] - 1e-12) detail << " [example 2 ordering at point " << i << "]";
    for (size_t i = 0; i < ex3b.size(); ++i)
        if (std::abs(ex3b[i] - ex3i[i]) > 0.05 * ex3i[i])
            detail << " [example 3 gap " << std::abs(ex3b[i] - ex3i[i]) / ex3i[i] << " at point " << i << "]";
    // byte determinism of a both-mode sweep under a fixed seed
    Scenario sim_scenario = load("ex1_cyclic_sim.scn");
    std::string a = to_csv(run_scenario(sim_scenario));
    std::string b = to_csv(run_scenario(sim_scenario));
    if (a != b) detail << " [simulation sweep CSV not byte-deterministic]";
}

void criterion_kernel_properties(std::ostringstream& detail) {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> coeff(-5.0, 5.0);
    std::uniform_int_distribution<int> degree_of(1, 8);
    int instances = 0;
    for (int trial = 0; trial < 350; ++trial, ++instances) {
        int degree = degree_of(rng);
        std::vector<double> coeffs(static_cast<size_t>(degree) + 1);
        for (double& x : coeffs) x = coeff(rng);
        if (std::abs(coeffs.back()) < 0.1) coeffs.back() = 1.0;
        Polynomial p{coeffs};
        RootSet roots = find_roots(p);
        if (roots.total_multiplicity() != degree) {
            detail << " [re-expansion trial " << trial << " multiplicity sum]";
            continue;
        }
        for (const Root& r : roots.roots) {
            if (r.value.imag() == 0.0) continue;
            bool partnered = false;
            for (const Root& o : roots.roots)
                if (o.multiplicity == r.multiplicity &&
                    std::abs(o.value - std::conj(r.value)) <= 1e-9 * (1.0 + std::abs(r.value)))
                    partnered = true;
            if (!partnered) detail << " [conjugate closure trial " << trial << "]";
        }
        Polynomial rebuilt = polynomial_from_roots(roots, p.leading_coefficient());
        double scale = p.max_abs_coefficient();
        for (int k = 0; k <= degree; ++k)
            if (std::abs(rebuilt.coefficient(k) - p.coefficient(k)) > 1e-8 * scale) {
                detail << " [re-expansion trial " << trial << " coefficient " << k << "]";
                break;
            }
    }
    std::uniform_real_distribution<double> angle(0.0, 6.28318);
    for (int trial = 0; trial < 150; ++trial, ++instances) {
        int dden = degree_of(rng);
        std::vector<double> dc(static_cast<size_t>(dden) + 1);
        for (double& x : dc) x = coeff(rng);
        if (std::abs(dc.back()) < 0.1) dc.back() = 1.0;
        std::vector<double> nc(static_cast<size_t>(dden));
        for (double& x : nc) x = coeff(rng);
        Polynomial den{dc};
        Polynomial num{nc};
        if (num.is_zero()) num = Polynomial::constant(1.0);
        RootSet poles = find_roots(den);
        PartialFractionExpansion pf = partial_fractions(RationalFunction{num, den}, poles);
        for (int probe = 0; probe < 4; ++probe) {
            double theta = angle(rng);
            std::complex<double> z = 4.0 * std::complex<double>{std::cos(theta), std::sin(theta)};
            double separation = 1e9;
            for (const Root& r : poles.roots) separation = std::min(separation, std::abs(z - r.value));
            if (separation < 0.1) continue;
            std::complex<double> direct = num(z) / den(z);
            if (std::abs(direct - pf(z)) > 1e-9 * (1.0 + std::abs(direct))) {
                detail << " [recombination trial " << trial << "]";
                break;
            }
        }
    }
    if (instances != 500) detail << " [instance count " << instances << " != 500]";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "linear-dependence golden values", 1.0, criterion_linear_golden},
        {2, "correlation test vectors", 1.0, criterion_correlations},
        {3, "reduction identities", 10.0, criterion_reductions},
        {4, "Monte Carlo oracle agreement", 120.0, criterion_oracle},
        {5, "normalization and positivity", 0.0, criterion_normalization},
        {6, "fixed-point residuals", 0.0, criterion_fixed_point},
        {7, "figure sweeps: orderings and determinism", 0.0, criterion_figures},
        {8, "transform-algebra kernel properties", 30.0, criterion_kernel_properties},
    };
    for (const Criterion& c : criteria) run_criterion(c);
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
