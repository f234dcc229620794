#include "altq/scenario.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "altq/errors.hpp"

namespace altq {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ParsedLine {
    int number = 0;
    std::string key;
    std::string value;
};

class ScenarioAssembler {
  public:
    void add_error(int line, const std::string& message) {
        std::ostringstream out;
        if (line > 0) out << "line " << line << ": ";
        out << message;
        errors_.push_back(out.str());
    }

    bool parse_double(const ParsedLine& l, double& out) {
        char* end = nullptr;
        out = std::strtod(l.value.c_str(), &end);
        if (end == l.value.c_str() || *end != '\0') {
            add_error(l.number, "expected a number for '" + l.key + "', got '" + l.value + "'");
            return false;
        }
        return true;
    }

    bool parse_int(const ParsedLine& l, long long& out) {
        char* end = nullptr;
        out = std::strtoll(l.value.c_str(), &end, 10);
        if (end == l.value.c_str() || *end != '\0') {
            add_error(l.number, "expected an integer for '" + l.key + "', got '" + l.value + "'");
            return false;
        }
        return true;
    }

    bool parse_uint64(const ParsedLine& l, uint64_t& out) {
        char* end = nullptr;
        out = std::strtoull(l.value.c_str(), &end, 10);
        if (end == l.value.c_str() || *end != '\0') {
            add_error(l.number, "expected an unsigned integer for '" + l.key + "', got '" + l.value + "'");
            return false;
        }
        return true;
    }

    bool parse_list(const ParsedLine& l, std::vector<double>& out) {
        std::istringstream in(l.value);
        std::string token;
        out.clear();
        while (in >> token) {
            char* end = nullptr;
            double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0') {
                add_error(l.number, "expected numbers for '" + l.key + "', got '" + token + "'");
                return false;
            }
            out.push_back(v);
        }
        if (out.empty()) {
            add_error(l.number, "'" + l.key + "' needs at least one value");
            return false;
        }
        return true;
    }

    void consume(const ParsedLine& l) {
        const std::string& key = l.key;
        if (key == "id") {
            set_scalar(l, id_);
        } else if (key == "model") {
            set_scalar(l, model_kind_);
        } else if (key == "run") {
            set_scalar(l, run_mode_);
        } else if (key == "output") {
            set_scalar(l, output_);
        } else if (key == "states") {
            long long v;
            if (parse_int(l, v)) {
                if (v < 1 || v > 64)
                    add_error(l.number, "states must be between 1 and 64");
                else
                    states_ = static_cast<int>(v);
            }
        } else if (key == "row") {
            std::vector<double> row;
            if (parse_list(l, row)) {
                double sum = 0.0;
                for (double p : row) sum += p;
                if (std::abs(sum - 1.0) > 1e-12)
                    add_error(l.number, "transition row " + std::to_string(rows_.size() + 1) +
                                            " sums to " + format_double(sum) + ", expected 1");
                rows_.push_back(std::move(row));
                row_lines_.push_back(l.number);
            }
        } else if (key.rfind("service.", 0) == 0 || key.rfind("prep.", 0) == 0) {
            consume_state_spec(l);
        } else if (key == "joint.kind") {
            set_scalar(l, joint_kind_);
        } else if (key == "joint.lambda") {
            set_scalar_double(l, joint_lambda_);
        } else if (key == "joint.c") {
            set_scalar_double(l, joint_c_);
        } else if (key == "joint.gamma") {
            set_scalar_double(l, joint_gamma_);
        } else if (key == "joint.drift") {
            set_scalar_double(l, joint_drift_);
        } else if (key == "joint.variance") {
            set_scalar_double(l, joint_variance_);
        } else if (key == "joint.prep.rate") {
            set_scalar_double(l, joint_prep_rate_);
        } else if (key == "joint.prep.weights") {
            parse_list(l, joint_prep_weights_);
        } else if (key == "joint.jump.rate") {
            set_scalar_double(l, joint_jump_rate_);
        } else if (key == "joint.jump.weights") {
            parse_list(l, joint_jump_weights_);
        } else if (key == "sweep.param") {
            set_scalar(l, sweep_param_);
        } else if (key == "sweep.values") {
            parse_list(l, sweep_values_);
            sweep_values_line_ = l.number;
        } else if (key == "sim.iterations") {
            parse_int(l, sim_.iterations);
        } else if (key == "sim.warmup") {
            parse_int(l, sim_.warmup);
        } else if (key == "sim.seed") {
            parse_uint64(l, sim_.seed);
        } else if (key == "sim.replications") {
            long long v;
            if (parse_int(l, v)) sim_.replications = static_cast<int>(v);
        } else if (key == "sim.histogram_bins") {
            long long v;
            if (parse_int(l, v)) sim_.histogram_bins = static_cast<int>(v);
        } else if (key == "sim.histogram_max") {
            parse_double(l, sim_.histogram_max);
        } else {
            add_error(l.number, "unknown key '" + key + "'");
        }
    }

    Scenario finish() {
        Scenario scenario;
        if (id_.value.empty())
            add_error(0, "missing 'id'");
        scenario.id = id_.value;
        scenario.output = output_.value;

        if (run_mode_.value.empty() || run_mode_.value == "analytic")
            scenario.run = RunMode::analytic;
        else if (run_mode_.value == "simulate")
            scenario.run = RunMode::simulate;
        else if (run_mode_.value == "both")
            scenario.run = RunMode::both;
        else
            add_error(run_mode_.line, "run must be analytic, simulate, or both");

        scenario.sim = sim_;

        if (model_kind_.value == "markov")
            assemble_markov(scenario);
        else if (model_kind_.value == "joint")
            assemble_joint(scenario);
        else
            add_error(model_kind_.line, "model must be 'markov' or 'joint'");

        assemble_sweep(scenario);

        if (!errors_.empty()) {
            std::ostringstream all;
            for (size_t i = 0; i < errors_.size(); ++i) {
                if (i) all << '\n';
                all << errors_[i];
            }
            throw ValidationError(all.str());
        }
        return scenario;
    }

  private:
    struct Scalar {
        std::string value;
        int line = 0;
    };

    void set_scalar(const ParsedLine& l, Scalar& slot) {
        if (!slot.value.empty()) add_error(l.number, "duplicate key '" + l.key + "'");
        slot.value = l.value;
        slot.line = l.number;
    }

    void set_scalar_double(const ParsedLine& l, std::optional<double>& slot) {
        if (slot) add_error(l.number, "duplicate key '" + l.key + "'");
        double v;
        if (parse_double(l, v)) slot = v;
    }

    void consume_state_spec(const ParsedLine& l) {
        bool service = l.key.rfind("service.", 0) == 0;
        std::string rest = l.key.substr(service ? 8 : 5);
        size_t dot = rest.find('.');
        if (dot == std::string::npos) {
            add_error(l.number, "expected '" + std::string(service ? "service" : "prep") +
                                    ".<state>.rate' or '...weights'");
            return;
        }
        int index = std::atoi(rest.substr(0, dot).c_str());
        std::string field = rest.substr(dot + 1);
        if (index < 1) {
            add_error(l.number, "state index in '" + l.key + "' must be >= 1");
            return;
        }
        auto& map = service ? service_specs_ : prep_specs_;
        auto& slot = map[index];
        if (field == "rate") {
            double v;
            if (parse_double(l, v)) slot.rate = v;
            slot.line = l.number;
        } else if (field == "weights") {
            parse_list(l, slot.weights);
            slot.line = l.number;
        } else {
            add_error(l.number, "unknown field '" + field + "' in '" + l.key + "'");
        }
    }

    struct RawSpec {
        std::optional<double> rate;
        std::vector<double> weights;
        int line = 0;
    };

    std::optional<MixedErlangSpec> build_spec(const RawSpec& raw, const std::string& what) {
        if (!raw.rate) {
            add_error(raw.line, what + " is missing its rate");
            return std::nullopt;
        }
        std::vector<double> weights = raw.weights.empty() ? std::vector<double>{1.0} : raw.weights;
        try {
            return MixedErlangSpec(*raw.rate, std::move(weights));
        } catch (const ValidationError& e) {
            add_error(raw.line, what + ": " + e.what());
            return std::nullopt;
        }
    }

    void assemble_markov(Scenario& scenario) {
        MarkovScenario ms;
        if (!states_) {
            add_error(0, "markov model needs 'states'");
            return;
        }
        const int M = *states_;
        if (static_cast<int>(rows_.size()) != M) {
            add_error(0, "expected " + std::to_string(M) + " transition rows, got " +
                             std::to_string(rows_.size()));
            return;
        }
        ms.transition.resize(M, M);
        for (int i = 0; i < M; ++i) {
            if (static_cast<int>(rows_[static_cast<size_t>(i)].size()) != M) {
                add_error(row_lines_[static_cast<size_t>(i)],
                          "transition row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows_[static_cast<size_t>(i)].size()) + " entries, expected " +
                              std::to_string(M));
                return;
            }
            for (int j = 0; j < M; ++j) ms.transition(i, j) = rows_[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
        for (int j = 1; j <= M; ++j) {
            auto sit = service_specs_.find(j);
            if (sit == service_specs_.end()) {
                add_error(0, "missing service spec for state " + std::to_string(j));
                continue;
            }
            auto pit = prep_specs_.find(j);
            if (pit == prep_specs_.end()) {
                add_error(0, "missing preparation spec for state " + std::to_string(j));
                continue;
            }
            auto svc = build_spec(sit->second, "service spec of state " + std::to_string(j));
            auto prep = build_spec(pit->second, "preparation spec of state " + std::to_string(j));
            if (svc && prep) {
                ms.service.push_back(*svc);
                ms.preparation.push_back(*prep);
            }
        }
        for (const auto& [index, raw] : service_specs_)
            if (index > M) add_error(raw.line, "service spec index " + std::to_string(index) + " exceeds states");
        for (const auto& [index, raw] : prep_specs_)
            if (index > M) add_error(raw.line, "preparation spec index " + std::to_string(index) + " exceeds states");
        if (errors_.empty()) {
            scenario.model = std::move(ms);
            model_assigned_ = true;
        }
    }

    void assemble_joint(Scenario& scenario) {
        JointScenario js;
        if (!joint_lambda_) {
            add_error(0, "joint model needs 'joint.lambda'");
            return;
        }
        js.lambda = *joint_lambda_;
        const std::string& kind = joint_kind_.value;
        if (kind == "independent") {
            js.kind = DependenceKind::independent;
            if (!joint_prep_rate_) {
                add_error(0, "independent model needs 'joint.prep.rate'");
                return;
            }
            RawSpec raw{joint_prep_rate_, joint_prep_weights_, 0};
            auto spec = build_spec(raw, "joint preparation spec");
            if (spec) js.preparation = *spec;
        } else if (kind == "linear") {
            js.kind = DependenceKind::linear;
            if (!joint_c_) {
                add_error(0, "linear model needs 'joint.c'");
                return;
            }
            js.c = *joint_c_;
        } else if (kind == "compound_poisson") {
            js.kind = DependenceKind::compound_poisson;
            if (!joint_gamma_ || !joint_jump_rate_) {
                add_error(0, "compound_poisson model needs 'joint.gamma' and 'joint.jump.rate'");
                return;
            }
            js.gamma = *joint_gamma_;
            RawSpec raw{joint_jump_rate_, joint_jump_weights_, 0};
            auto spec = build_spec(raw, "jump spec");
            if (spec) js.jumps = *spec;
        } else if (kind == "brownian") {
            js.kind = DependenceKind::brownian;
            if (!joint_drift_ || !joint_variance_) {
                add_error(0, "brownian model needs 'joint.drift' and 'joint.variance'");
                return;
            }
            js.drift = *joint_drift_;
            js.variance = *joint_variance_;
        } else {
            add_error(joint_kind_.line,
                      "joint.kind must be independent, linear, compound_poisson, or brownian");
            return;
        }
        if (errors_.empty()) {
            scenario.model = std::move(js);
            model_assigned_ = true;
        }
    }

    void assemble_sweep(Scenario& scenario) {
        if (sweep_param_.value.empty() && sweep_values_.empty()) return;
        if (sweep_param_.value.empty() || sweep_values_.empty()) {
            add_error(sweep_param_.line, "sweep needs both sweep.param and sweep.values");
            return;
        }
        SweepSpec sweep;
        sweep.parameter = sweep_param_.value;
        sweep.values = sweep_values_;
        for (size_t i = 0; i < sweep.values.size(); ++i) {
            if (!(sweep.values[i] > 0.0)) {
                add_error(sweep_values_line_, "sweep values must be strictly positive");
                return;
            }
            if (i > 0 && !(sweep.values[i] > sweep.values[i - 1])) {
                add_error(sweep_values_line_, "sweep values must be strictly increasing");
                return;
            }
        }
        bool markov = std::holds_alternative<MarkovScenario>(scenario.model);
        if (sweep.parameter == "u") {
            if (model_assigned_ && !markov) {
                add_error(sweep_param_.line, "sweep parameter 'u' applies to markov scenarios");
                return;
            }
        } else if (sweep.parameter == "c") {
            if (model_assigned_ &&
                (markov || std::get<JointScenario>(scenario.model).kind != DependenceKind::linear)) {
                add_error(sweep_param_.line, "sweep parameter 'c' applies to linear joint scenarios");
                return;
            }
        } else if (sweep.parameter == "gamma") {
            if (model_assigned_ &&
                (markov ||
                 std::get<JointScenario>(scenario.model).kind != DependenceKind::compound_poisson)) {
                add_error(sweep_param_.line,
                          "sweep parameter 'gamma' applies to compound_poisson joint scenarios");
                return;
            }
        } else {
            add_error(sweep_param_.line, "sweep.param must be u, c, or gamma");
            return;
        }
        scenario.sweep = std::move(sweep);
    }

    std::vector<std::string> errors_;
    Scalar id_, model_kind_, run_mode_, output_, joint_kind_, sweep_param_;
    std::optional<int> states_;
    std::vector<std::vector<double>> rows_;
    std::vector<int> row_lines_;
    std::map<int, RawSpec> service_specs_, prep_specs_;
    std::optional<double> joint_lambda_, joint_c_, joint_gamma_, joint_drift_, joint_variance_;
    std::optional<double> joint_prep_rate_, joint_jump_rate_;
    std::vector<double> joint_prep_weights_, joint_jump_weights_;
    std::vector<double> sweep_values_;
    int sweep_values_line_ = 0;
    bool model_assigned_ = false;
    SimulationConfig sim_;
};

}  // namespace

bool MarkovScenario::operator==(const MarkovScenario& other) const {
    return transition.rows() == other.transition.rows() &&
           transition.cols() == other.transition.cols() &&
           (transition.array() == other.transition.array()).all() && service == other.service &&
           preparation == other.preparation;
}

bool Scenario::operator==(const Scenario& other) const {
    return id == other.id && model == other.model && sweep == other.sweep && run == other.run &&
           sim == other.sim && output == other.output;
}

Scenario parse_scenario(const std::string& text) {
    ScenarioAssembler assembler;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            assembler.add_error(number, "expected 'key = value'");
            continue;
        }
        ParsedLine parsed;
        parsed.number = number;
        parsed.key = trim(line.substr(0, eq));
        parsed.value = trim(line.substr(eq + 1));
        if (parsed.key.empty()) {
            assembler.add_error(number, "missing key before '='");
            continue;
        }
        assembler.consume(parsed);
    }
    return assembler.finish();
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "id = " << s.id << '\n';
    out << "model = " << (s.is_markov() ? "markov" : "joint") << '\n';
    switch (s.run) {
        case RunMode::analytic: out << "run = analytic\n"; break;
        case RunMode::simulate: out << "run = simulate\n"; break;
        case RunMode::both: out << "run = both\n"; break;
    }
    auto write_list = [&out](const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out << ' ';
            out << format_double(values[i]);
        }
        out << '\n';
    };
    if (s.is_markov()) {
        const MarkovScenario& ms = s.markov();
        const int M = static_cast<int>(ms.transition.rows());
        out << "states = " << M << '\n';
        for (int i = 0; i < M; ++i) {
            out << "row = ";
            std::vector<double> row(static_cast<size_t>(M));
            for (int j = 0; j < M; ++j) row[static_cast<size_t>(j)] = ms.transition(i, j);
            write_list(row);
        }
        for (int j = 0; j < M; ++j) {
            out << "service." << (j + 1) << ".rate = " << format_double(ms.service[static_cast<size_t>(j)].rate) << '\n';
            out << "service." << (j + 1) << ".weights = ";
            write_list(ms.service[static_cast<size_t>(j)].weights);
            out << "prep." << (j + 1) << ".rate = " << format_double(ms.preparation[static_cast<size_t>(j)].rate) << '\n';
            out << "prep." << (j + 1) << ".weights = ";
            write_list(ms.preparation[static_cast<size_t>(j)].weights);
        }
    } else {
        const JointScenario& js = s.joint();
        const char* kind = "";
        switch (js.kind) {
            case DependenceKind::independent: kind = "independent"; break;
            case DependenceKind::linear: kind = "linear"; break;
            case DependenceKind::compound_poisson: kind = "compound_poisson"; break;
            case DependenceKind::brownian: kind = "brownian"; break;
        }
        out << "joint.kind = " << kind << '\n';
        out << "joint.lambda = " << format_double(js.lambda) << '\n';
        if (js.kind == DependenceKind::linear) out << "joint.c = " << format_double(js.c) << '\n';
        if (js.kind == DependenceKind::compound_poisson) {
            out << "joint.gamma = " << format_double(js.gamma) << '\n';
            out << "joint.jump.rate = " << format_double(js.jumps->rate) << '\n';
            out << "joint.jump.weights = ";
            write_list(js.jumps->weights);
        }
        if (js.kind == DependenceKind::independent) {
            out << "joint.prep.rate = " << format_double(js.preparation->rate) << '\n';
            out << "joint.prep.weights = ";
            write_list(js.preparation->weights);
        }
        if (js.kind == DependenceKind::brownian) {
            out << "joint.drift = " << format_double(js.drift) << '\n';
            out << "joint.variance = " << format_double(js.variance) << '\n';
        }
    }
    if (s.sweep) {
        out << "sweep.param = " << s.sweep->parameter << '\n';
        out << "sweep.values = ";
        write_list(s.sweep->values);
    }
    out << "sim.iterations = " << s.sim.iterations << '\n';
    out << "sim.warmup = " << s.sim.warmup << '\n';
    out << "sim.seed = " << s.sim.seed << '\n';
    out << "sim.replications = " << s.sim.replications << '\n';
    out << "sim.histogram_bins = " << s.sim.histogram_bins << '\n';
    out << "sim.histogram_max = " << format_double(s.sim.histogram_max) << '\n';
    if (!s.output.empty()) out << "output = " << s.output << '\n';
    return out.str();
}

MarkovModulatedModel build_markov_model(const MarkovScenario& s, double preparation_rate_scale) {
    std::vector<StateServiceSpec> service;
    service.reserve(s.service.size());
    for (const MixedErlangSpec& spec : s.service) service.push_back(StateServiceSpec::from_mixed_erlang(spec));
    std::vector<MixedErlangSpec> preparation;
    preparation.reserve(s.preparation.size());
    for (const MixedErlangSpec& spec : s.preparation) preparation.push_back(spec.scaled_rate(preparation_rate_scale));
    return MarkovModulatedModel{TransitionMatrix(s.transition), std::move(service), std::move(preparation)};
}

JointLstModel build_joint_model(const JointScenario& s) {
    switch (s.kind) {
        case DependenceKind::independent:
            return make_independent(*s.preparation, s.lambda);
        case DependenceKind::linear:
            return make_linear(s.c, s.lambda);
        case DependenceKind::compound_poisson:
            return make_compound_poisson(s.gamma, *s.jumps, s.lambda);
        case DependenceKind::brownian:
            return make_brownian(s.drift, s.variance, s.lambda);
    }
    throw ValidationError("unknown joint model kind");
}

}  // namespace altq
