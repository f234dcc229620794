#include "altq/markov_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "altq/errors.hpp"

namespace altq {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    return b;
}

// d^m/ds^m (mu/(mu+s))^q evaluated at s: the kernel derivatives appearing in
// the differentiated transform equation.
double kernel_derivative(int q, int m, double mu, double s) {
    double rising = 1.0;
    for (int i = 0; i < m; ++i) rising *= static_cast<double>(q + i);
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * rising * std::pow(mu, q) / std::pow(mu + s, q + m);
}

// Per-model coefficient tensor of the fixed-point transform equation:
//   omega_j(s) = u_j + sum_{i,m,q} S(i,j,m,q) omega_i^(m)(mu_j) (mu_j/(mu_j+s))^q
// with u_j = pi_j - sum_{i,m} [sum_q S(i,j,m,q)] omega_i^(m)(mu_j).
struct FixedPointSystem {
    int states = 0;
    std::vector<int> phases;   // per-state mixture length N_j
    std::vector<int> offset;   // offset[j] = sum of phases before j
    int total_phases = 0;
    Eigen::VectorXd pi;
    // S[((i * M + j) * Nmax + m)][q - 1]
    int max_phases = 0;
    std::vector<std::vector<double>> S;

    int unknown_index(int i, int j, int m) const { return i * total_phases + offset[j] + m; }
    const std::vector<double>& coeff(int i, int j, int m) const {
        return S[static_cast<size_t>((i * states + j) * max_phases + m)];
    }
    std::vector<double>& coeff(int i, int j, int m) {
        return S[static_cast<size_t>((i * states + j) * max_phases + m)];
    }
};

FixedPointSystem build_fixed_point_system(const MarkovModulatedModel& model) {
    FixedPointSystem sys;
    const int M = model.state_count();
    sys.states = M;
    sys.pi = stationary_distribution(model.transition);
    sys.phases.resize(static_cast<size_t>(M));
    sys.offset.resize(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) {
        sys.phases[static_cast<size_t>(j)] = model.preparation[static_cast<size_t>(j)].phase_count();
        sys.offset[static_cast<size_t>(j)] = sys.total_phases;
        sys.total_phases += sys.phases[static_cast<size_t>(j)];
    }
    sys.max_phases = model.max_phase_count();
    sys.S.assign(static_cast<size_t>(M * M * sys.max_phases), {});
    for (auto& v : sys.S) v.assign(static_cast<size_t>(sys.max_phases), 0.0);

    for (int j = 0; j < M; ++j) {
        const MixedErlangSpec& prep = model.preparation[static_cast<size_t>(j)];
        const double mu = prep.rate;
        const int Nj = prep.phase_count();
        for (int i = 0; i < M; ++i) {
            const double p_ij = model.transition(i, j);
            if (p_ij == 0.0) continue;
            // service transform derivatives at the preparation rate
            std::vector<double> alpha =
                model.service[static_cast<size_t>(i)].lst.derivatives_at(mu, Nj - 1);
            for (int n = 1; n <= Nj; ++n) {
                const double kappa = prep.weights[static_cast<size_t>(n - 1)];
                if (kappa == 0.0) continue;
                for (int ell = 0; ell < n; ++ell) {
                    const int q = n - ell;
                    const double base =
                        kappa * p_ij * std::pow(-mu, ell) / factorial(ell);
                    for (int m = 0; m <= ell; ++m) {
                        sys.coeff(i, j, m)[static_cast<size_t>(q - 1)] +=
                            base * binomial(ell, m) * alpha[static_cast<size_t>(ell - m)];
                    }
                }
            }
        }
    }
    return sys;
}

void require_stable(const MarkovModulatedModel& model) {
    StabilityWitness w = check_stability(model);
    if (!w.stable)
        throw ValidationError(
            "model is not stable: no transition allows the recursion to reach zero");
}

void verify_solution(const MarkovWaitingSolution& sol, const Eigen::VectorXd& pi,
                     const MarkovModulatedModel& model) {
    std::ostringstream why;
    double total = 0.0;
    for (size_t j = 0; j < sol.per_state.size(); ++j) {
        const StateWaitingPart& part = sol.per_state[j];
        if (!std::isfinite(part.atom)) why << " atom[" << j << "] not finite;";
        if (part.atom < -1e-9 || part.atom > 1.0 + 1e-9)
            why << " atom[" << j << "] = " << part.atom << " outside [0,1];";
        double mass = part.total_mass();
        total += mass;
        if (std::abs(mass - pi(static_cast<Eigen::Index>(j))) > 1e-9)
            why << " state " << j << " mass " << mass << " != pi " << pi(static_cast<Eigen::Index>(j)) << ";";
    }
    if (std::abs(total - 1.0) > 1e-9) why << " total mass " << total << " != 1;";

    double max_mean = 0.0;
    for (const MixedErlangSpec& prep : model.preparation) max_mean = std::max(max_mean, prep.mean());
    const double xmax = 10.0 * max_mean;
    for (size_t j = 0; j < sol.per_state.size(); ++j) {
        for (int g = 0; g < 200; ++g) {
            double x = xmax * static_cast<double>(g) / 199.0;
            double d = sol.per_state[j].density_at(x);
            if (d < -1e-9) {
                why << " density[" << j << "](" << x << ") = " << d << " negative;";
                break;
            }
        }
    }
    std::string text = why.str();
    if (!text.empty()) throw SolutionRejectedError("waiting-time solution rejected:" + text);
}

}  // namespace

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries) : p_(std::move(entries)) {
    const int M = static_cast<int>(p_.rows());
    if (M < 1 || p_.cols() != p_.rows())
        throw ValidationError("transition matrix must be square and non-empty");
    for (int i = 0; i < M; ++i) {
        double sum = 0.0;
        for (int j = 0; j < M; ++j) {
            double v = p_(i, j);
            if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
                throw ValidationError("transition probability out of range in row " +
                                      std::to_string(i + 1));
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("row " + std::to_string(i + 1) + " sums to " +
                                  std::to_string(sum) + ", expected 1");
    }

    // Irreducibility: forward and backward reachability from state 0.
    auto reachable = [&](bool forward) {
        std::vector<bool> seen(static_cast<size_t>(M), false);
        std::vector<int> queue{0};
        seen[0] = true;
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (int v = 0; v < M; ++v) {
                double edge = forward ? p_(u, v) : p_(v, u);
                if (edge > 0.0 && !seen[static_cast<size_t>(v)]) {
                    seen[static_cast<size_t>(v)] = true;
                    queue.push_back(v);
                }
            }
        }
        return seen;
    };
    auto fwd = reachable(true);
    auto bwd = reachable(false);
    for (int v = 0; v < M; ++v)
        if (!fwd[static_cast<size_t>(v)] || !bwd[static_cast<size_t>(v)])
            throw ValidationError("transition matrix is reducible (state " +
                                  std::to_string(v + 1) + " not on a common cycle)");

    // Period: gcd of d(u) + 1 - d(v) over edges, with d the BFS levels.
    std::vector<int> depth(static_cast<size_t>(M), -1);
    depth[0] = 0;
    std::vector<int> frontier{0};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v = 0; v < M; ++v)
                if (p_(u, v) > 0.0 && depth[static_cast<size_t>(v)] < 0) {
                    depth[static_cast<size_t>(v)] = depth[static_cast<size_t>(u)] + 1;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    int g = 0;
    for (int u = 0; u < M; ++u)
        for (int v = 0; v < M; ++v)
            if (p_(u, v) > 0.0)
                g = std::gcd(g, std::abs(depth[static_cast<size_t>(u)] + 1 - depth[static_cast<size_t>(v)]));
    period_ = (g == 0) ? 1 : g;
}

Eigen::VectorXd stationary_distribution(const TransitionMatrix& p) {
    const int M = p.state_count();
    Eigen::MatrixXd a = p.entries().transpose() - Eigen::MatrixXd::Identity(M, M);
    a.row(M - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(M);
    b(M - 1) = 1.0;
    Eigen::VectorXd pi = a.partialPivLu().solve(b);
    double sum = pi.sum();
    for (int j = 0; j < M; ++j) {
        if (!(pi(j) > 1e-14) || !std::isfinite(pi(j)))
            throw ValidationError("stationary distribution is not strictly positive");
    }
    return pi / sum;
}

Eigen::MatrixXd n_step(const TransitionMatrix& p, long long n) {
    const int M = p.state_count();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(M, M);
    Eigen::MatrixXd base = p.entries();
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

StateServiceSpec StateServiceSpec::from_lst(const RationalFunction& lst) {
    StateServiceSpec spec;
    spec.lst = lst;
    std::vector<double> d = lst.derivatives_at(0.0, 2);
    if (std::abs(d[0] - 1.0) > 1e-9)
        throw ValidationError("service transform must equal 1 at the origin");
    double mean = -d[1];
    double second = d[2];
    if (mean < -1e-9) throw ValidationError("service transform implies a negative mean");
    if (second < -1e-9) throw ValidationError("service transform implies a negative second moment");
    spec.mean = std::max(mean, 0.0);
    spec.second_moment = std::max(second, 0.0);
    return spec;
}

StateServiceSpec StateServiceSpec::from_mixed_erlang(const MixedErlangSpec& me) {
    StateServiceSpec spec;
    spec.lst = me.lst();
    spec.mean = me.mean();
    spec.second_moment = me.second_moment();
    spec.sampler = me;
    return spec;
}

MarkovModulatedModel::MarkovModulatedModel(TransitionMatrix transition_,
                                           std::vector<StateServiceSpec> service_,
                                           std::vector<MixedErlangSpec> preparation_)
    : transition(std::move(transition_)), service(std::move(service_)), preparation(std::move(preparation_)) {
    const size_t M = static_cast<size_t>(transition.state_count());
    if (service.size() != M || preparation.size() != M)
        throw ValidationError("model needs one service and one preparation spec per state");
}

int MarkovModulatedModel::max_phase_count() const {
    int n = 1;
    for (const MixedErlangSpec& p : preparation) n = std::max(n, p.phase_count());
    return n;
}

MarkovModulatedModel MarkovModulatedModel::with_preparation_rate_scale(double factor) const {
    std::vector<MixedErlangSpec> scaled;
    scaled.reserve(preparation.size());
    for (const MixedErlangSpec& p : preparation) scaled.push_back(p.scaled_rate(factor));
    return MarkovModulatedModel{transition, service, std::move(scaled)};
}

namespace {

double modulated_autocorrelation(const TransitionMatrix& p, const std::vector<double>& means,
                                 const std::vector<double>& second_moments, int lag) {
    if (lag < 1) throw ValidationError("autocorrelation lag must be >= 1");
    const int M = p.state_count();
    if (M < 2)
        throw UndefinedCorrelationError(
            "autocorrelation is undefined for a single-state chain (no variation across states)");
    Eigen::VectorXd pi = stationary_distribution(p);
    Eigen::MatrixXd pn = n_step(p, lag);
    double mean = 0.0, msq = 0.0;
    for (int i = 0; i < M; ++i) {
        mean += pi(i) * means[static_cast<size_t>(i)];
        msq += pi(i) * second_moments[static_cast<size_t>(i)];
    }
    double variance = msq - mean * mean;
    if (variance <= 1e-14 * (msq + mean * mean))
        throw UndefinedCorrelationError("autocorrelation is undefined: the sequence has zero variance");
    double cov = 0.0;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            cov += pi(i) * (pn(i, j) - pi(j)) * means[static_cast<size_t>(i)] * means[static_cast<size_t>(j)];
    return cov / variance;
}

}  // namespace

double service_autocorrelation(const MarkovModulatedModel& m, int lag) {
    std::vector<double> means, seconds;
    for (const StateServiceSpec& s : m.service) {
        means.push_back(s.mean);
        seconds.push_back(s.second_moment);
    }
    return modulated_autocorrelation(m.transition, means, seconds, lag);
}

double preparation_autocorrelation(const MarkovModulatedModel& m, int lag) {
    std::vector<double> means, seconds;
    for (const MixedErlangSpec& p : m.preparation) {
        means.push_back(p.mean());
        seconds.push_back(p.second_moment());
    }
    return modulated_autocorrelation(m.transition, means, seconds, lag);
}

double cross_correlation(const MarkovModulatedModel& m) {
    const int M = m.state_count();
    Eigen::VectorXd pi = stationary_distribution(m.transition);
    double mean_a = 0.0, msq_a = 0.0, mean_b = 0.0, msq_b = 0.0, mixed = 0.0;
    for (int i = 0; i < M; ++i) {
        double ma = m.service[static_cast<size_t>(i)].mean;
        double mb = m.preparation[static_cast<size_t>(i)].mean();
        mean_a += pi(i) * ma;
        mean_b += pi(i) * mb;
        msq_a += pi(i) * m.service[static_cast<size_t>(i)].second_moment;
        msq_b += pi(i) * m.preparation[static_cast<size_t>(i)].second_moment();
        mixed += pi(i) * ma * mb;
    }
    double var_a = msq_a - mean_a * mean_a;
    double var_b = msq_b - mean_b * mean_b;
    if (var_a <= 1e-14 * (msq_a + mean_a * mean_a) || var_b <= 1e-14 * (msq_b + mean_b * mean_b))
        throw UndefinedCorrelationError("cross-correlation is undefined: zero variance");
    return (mixed - mean_a * mean_b) / std::sqrt(var_a * var_b);
}

StabilityWitness check_stability(const MarkovModulatedModel& m) {
    // Preparation times are mixed-Erlang, so P[B < a] > 0 for every a > 0;
    // a transition i -> j makes the recursion hit zero with positive
    // probability whenever p_ij > 0 and state i's service time is not
    // almost surely zero.
    const int M = m.state_count();
    for (int i = 0; i < M; ++i) {
        if (!(m.service[static_cast<size_t>(i)].mean > 0.0)) continue;
        for (int j = 0; j < M; ++j)
            if (m.transition(i, j) > 0.0) return StabilityWitness{true, i, j};
    }
    return StabilityWitness{false, -1, -1};
}

double StateWaitingPart::density_at(double x) const {
    double acc = 0.0;
    for (const DensityTerm& t : density) acc += t.coefficient * std::pow(x, t.power) * std::exp(-t.rate * x);
    return acc;
}

double StateWaitingPart::mass_at_or_below(double x) const {
    // int_0^x t^p e^(-r t) dt = p!/r^(p+1) * (1 - e^(-r x) sum_{k<=p} (r x)^k / k!)
    double acc = atom;
    for (const DensityTerm& t : density) {
        double tail = 0.0, term = 1.0;
        for (int k = 0; k <= t.power; ++k) {
            tail += term;
            term *= t.rate * x / static_cast<double>(k + 1);
        }
        double full = factorial(t.power) / std::pow(t.rate, t.power + 1);
        acc += t.coefficient * full * (1.0 - std::exp(-t.rate * x) * tail);
    }
    return acc;
}

double StateWaitingPart::total_mass() const {
    double acc = atom;
    for (const DensityTerm& t : density)
        acc += t.coefficient * factorial(t.power) / std::pow(t.rate, t.power + 1);
    return acc;
}

double StateWaitingPart::partial_mean() const {
    double acc = 0.0;
    for (const DensityTerm& t : density)
        acc += t.coefficient * factorial(t.power + 1) / std::pow(t.rate, t.power + 2);
    return acc;
}

double MarkovWaitingSolution::total_atom() const {
    double acc = 0.0;
    for (const StateWaitingPart& part : per_state) acc += part.atom;
    return acc;
}

MarkovWaitingSolution solve_exponential(const MarkovModulatedModel& model) {
    const int M = model.state_count();
    for (const MixedErlangSpec& prep : model.preparation)
        if (prep.phase_count() != 1)
            throw ValidationError("exponential solver requires single-phase preparation times");
    require_stable(model);
    Eigen::VectorXd pi = stationary_distribution(model.transition);

    // alpha(i, j) = service transform of state i at the preparation rate of state j
    Eigen::MatrixXd alpha(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            alpha(i, j) = model.service[static_cast<size_t>(i)].lst(model.preparation[static_cast<size_t>(j)].rate);

    // Unknown x(i, j) = omega_i(mu_j), flattened as i * M + j. One equation
    // per (j, l): omega_j(mu_l) + mu_l/(mu_j + mu_l) sum_i p_ij alpha(i, j)
    // omega_i(mu_j) = pi_j.
    const int U = M * M;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(U, U);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(U);
    for (int j = 0; j < M; ++j) {
        const double mu_j = model.preparation[static_cast<size_t>(j)].rate;
        for (int l = 0; l < M; ++l) {
            const double mu_l = model.preparation[static_cast<size_t>(l)].rate;
            const int row = j * M + l;
            A(row, j * M + l) += 1.0;
            const double factor = mu_l / (mu_j + mu_l);
            for (int i = 0; i < M; ++i)
                A(row, i * M + j) += factor * model.transition(i, j) * alpha(i, j);
            b(row) = pi(j);
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    if (!x.allFinite() || !std::isfinite(cond) || cond > 1e14) {
        std::ostringstream msg;
        msg << "transform system is numerically singular (condition estimate " << cond << ")";
        throw NumericalError(msg.str());
    }

    MarkovWaitingSolution sol;
    sol.condition_estimate = cond;
    if (cond > 1e10) {
        std::ostringstream msg;
        msg << "transform system condition estimate " << cond << " above 1e10";
        sol.warnings.push_back(msg.str());
    }
    sol.transform_derivatives.assign(1, Eigen::MatrixXd::Zero(M, M));
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) sol.transform_derivatives[0](i, j) = x(i * M + j);

    sol.per_state.resize(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) {
        const double mu_j = model.preparation[static_cast<size_t>(j)].rate;
        double c_j = 0.0;
        for (int i = 0; i < M; ++i)
            c_j += model.transition(i, j) * sol.transform_derivatives[0](i, j) * alpha(i, j);
        StateWaitingPart& part = sol.per_state[static_cast<size_t>(j)];
        part.atom = pi(j) - c_j;
        part.density.push_back(DensityTerm{mu_j * c_j, mu_j, 0});
    }
    verify_solution(sol, pi, model);
    return sol;
}

MarkovWaitingSolution solve_mixed_erlang(const MarkovModulatedModel& model) {
    require_stable(model);
    const int M = model.state_count();
    FixedPointSystem sys = build_fixed_point_system(model);
    const int U = M * sys.total_phases;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(U, U);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(U);
    for (int j = 0; j < M; ++j) {
        const double mu_j = model.preparation[static_cast<size_t>(j)].rate;
        const int Nj = sys.phases[static_cast<size_t>(j)];
        for (int k = 0; k < M; ++k) {
            const double mu_k = model.preparation[static_cast<size_t>(k)].rate;
            const int Nk = sys.phases[static_cast<size_t>(k)];
            for (int mp = 0; mp < Nk; ++mp) {
                const int row = sys.unknown_index(j, k, mp);
                A(row, row) += 1.0;
                const double delta0 = (mp == 0) ? 1.0 : 0.0;
                for (int i = 0; i < M; ++i) {
                    for (int m = 0; m < Nj; ++m) {
                        const std::vector<double>& sc = sys.coeff(i, j, m);
                        double acc = 0.0;
                        for (int q = 1; q <= Nj; ++q) {
                            double c = sc[static_cast<size_t>(q - 1)];
                            if (c == 0.0) continue;
                            acc += c * (delta0 - kernel_derivative(q, mp, mu_j, mu_k));
                        }
                        if (acc != 0.0) A(row, sys.unknown_index(i, j, m)) += acc;
                    }
                }
                b(row) = delta0 * sys.pi(j);
            }
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    if (!x.allFinite() || !std::isfinite(cond) || cond > 1e14) {
        std::ostringstream msg;
        msg << "transform system is numerically singular (condition estimate " << cond << ")";
        throw NumericalError(msg.str());
    }

    MarkovWaitingSolution sol;
    sol.condition_estimate = cond;
    if (cond > 1e10) {
        std::ostringstream msg;
        msg << "transform system condition estimate " << cond << " above 1e10";
        sol.warnings.push_back(msg.str());
    }
    sol.transform_derivatives.assign(static_cast<size_t>(sys.max_phases), Eigen::MatrixXd::Zero(M, M));
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            for (int m = 0; m < sys.phases[static_cast<size_t>(j)]; ++m)
                sol.transform_derivatives[static_cast<size_t>(m)](i, j) = x(sys.unknown_index(i, j, m));

    sol.per_state.resize(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) {
        const MixedErlangSpec& prep = model.preparation[static_cast<size_t>(j)];
        const double mu_j = prep.rate;
        const int Nj = prep.phase_count();

        // mass at the origin: pi_j minus the kernel sums at s = 0
        double mass = sys.pi(j);
        for (int i = 0; i < M; ++i)
            for (int m = 0; m < Nj; ++m) {
                double t = 0.0;
                for (double c : sys.coeff(i, j, m)) t += c;
                mass -= t * sol.transform_derivatives[static_cast<size_t>(m)](i, j);
            }

        // density coefficients grouped by the power of x
        std::vector<double> power_coeff(static_cast<size_t>(Nj), 0.0);
        for (int i = 0; i < M; ++i) {
            const double p_ij = model.transition(i, j);
            if (p_ij == 0.0) continue;
            std::vector<double> alpha =
                model.service[static_cast<size_t>(i)].lst.derivatives_at(mu_j, Nj - 1);
            for (int n = 1; n <= Nj; ++n) {
                const double kappa = prep.weights[static_cast<size_t>(n - 1)];
                if (kappa == 0.0) continue;
                for (int ell = 0; ell < n; ++ell) {
                    const int p = n - ell - 1;
                    const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
                    for (int m = 0; m <= ell; ++m) {
                        power_coeff[static_cast<size_t>(p)] +=
                            kappa * p_ij * sign / factorial(ell) * binomial(ell, m) *
                            alpha[static_cast<size_t>(ell - m)] *
                            sol.transform_derivatives[static_cast<size_t>(m)](i, j) *
                            std::pow(mu_j, n) / factorial(p);
                    }
                }
            }
        }

        StateWaitingPart& part = sol.per_state[static_cast<size_t>(j)];
        part.atom = mass;
        for (int p = 0; p < Nj; ++p)
            if (power_coeff[static_cast<size_t>(p)] != 0.0 || p == 0)
                part.density.push_back(DensityTerm{power_coeff[static_cast<size_t>(p)], mu_j, p});
    }
    verify_solution(sol, sys.pi, model);
    return sol;
}

double mean_waiting_time(const MarkovWaitingSolution& s) {
    double acc = 0.0;
    for (const StateWaitingPart& part : s.per_state) acc += part.partial_mean();
    return acc;
}

std::vector<double> per_state_mean_waiting_time(const MarkovWaitingSolution& s) {
    std::vector<double> out;
    out.reserve(s.per_state.size());
    for (const StateWaitingPart& part : s.per_state) out.push_back(part.partial_mean());
    return out;
}

DensityCdf evaluate(const MarkovWaitingSolution& s, double x) {
    if (x < 0.0) throw DomainError("waiting-time distribution evaluated at negative x");
    DensityCdf out;
    for (const StateWaitingPart& part : s.per_state) {
        out.density += part.density_at(x);
        out.cdf += part.mass_at_or_below(x);
    }
    return out;
}

double fixed_point_residual(const MarkovModulatedModel& model, const MarkovWaitingSolution& sol) {
    FixedPointSystem sys = build_fixed_point_system(model);
    const int M = model.state_count();
    double max_rate = 0.0;
    for (const MixedErlangSpec& prep : model.preparation) max_rate = std::max(max_rate, prep.rate);

    double worst = 0.0;
    for (int probe = 1; probe <= 20; ++probe) {
        const double s = 0.1 * static_cast<double>(probe) * max_rate;
        for (int j = 0; j < M; ++j) {
            const StateWaitingPart& part = sol.per_state[static_cast<size_t>(j)];
            // transform of the solved distribution at s
            double lhs = part.atom;
            for (const DensityTerm& t : part.density)
                lhs += t.coefficient * factorial(t.power) / std::pow(t.rate + s, t.power + 1);
            // right-hand side of the fixed-point equation
            const double mu_j = model.preparation[static_cast<size_t>(j)].rate;
            const int Nj = sys.phases[static_cast<size_t>(j)];
            double rhs = sys.pi(j);
            for (int i = 0; i < M; ++i)
                for (int m = 0; m < Nj; ++m) {
                    const std::vector<double>& sc = sys.coeff(i, j, m);
                    double omega = sol.transform_derivatives[static_cast<size_t>(m)](i, j);
                    for (int q = 1; q <= Nj; ++q) {
                        double c = sc[static_cast<size_t>(q - 1)];
                        if (c == 0.0) continue;
                        rhs += c * omega * (std::pow(mu_j / (mu_j + s), q) - 1.0);
                    }
                }
            double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
    }
    return worst;
}

}  // namespace altq
