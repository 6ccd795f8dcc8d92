#include "diqv/io.hpp"

#include <cmath>
#include <stdexcept>

namespace diqv {

namespace {

Json number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

template <typename T>
Json optional_number(const std::optional<T>& x) {
    return x ? number(*x) : Json(nullptr);
}

Json matrix_json(const ComplexMatrix& m, const std::vector<std::size_t>& dims) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    }
    return {{"dims", dims}, {"re", std::move(re)}, {"im", std::move(im)}};
}

std::vector<Complex> entries(const Json& j) {
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw std::invalid_argument("re and im arrays differ in length");
    std::vector<Complex> out(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
    return out;
}

StateSpec state_spec_from_json(const Json& j) {
    StateSpec s;
    if (j.is_string()) {
        s.name = j.get<std::string>();
    } else {
        s.name = j.value("name", std::string("ghz"));
        s.depolarize = j.value("depolarize", 0.0);
    }
    if (s.name == "ghz3") {
        s.name = "ghz";
        s.param = 3;
    } else if (s.name == "ghz") {
        s.param = j.is_object() ? j.value("n", std::size_t{3}) : 3;
    } else if (s.name == "maximally_mixed") {
        s.param = j.is_object() ? j.value("dim", std::size_t{8}) : 8;
    }
    return s;
}

SourceKind kind_from_string(const std::string& s) {
    if (s == "iid") return SourceKind::iid;
    if (s == "independent") return SourceKind::independent;
    if (s == "mixture") return SourceKind::mixture;
    if (s == "bernoulli") return SourceKind::bernoulli;
    throw std::invalid_argument("unknown source kind '" + s + "'");
}

double parse_number(const std::string& text, const std::string& context) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw std::invalid_argument("bad number '" + text + "' in " + context);
    return v;
}

}  // namespace

Json to_json(const DensityOperator& rho) { return matrix_json(rho.matrix(), rho.dims()); }

Json to_json(const StateVector& psi) {
    Json j = matrix_json(psi.amplitudes(), psi.dims());
    return j;
}

DensityOperator density_from_json(const Json& j) {
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    const auto values = entries(j);
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(values.size()))));
    if (static_cast<std::size_t>(n * n) != values.size()) throw std::invalid_argument("density matrix entries are not square");
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = values[static_cast<std::size_t>(r * n + c)];
    }
    return DensityOperator(std::move(m), dims);
}

StateVector state_vector_from_json(const Json& j) {
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    const auto values = entries(j);
    ComplexVector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
    return StateVector(std::move(v), dims);
}

Json to_json(const RobustnessModel& m) {
    return {{"p_QM", m.p_qm},           {"p_L", m.p_l}, {"b_Q", m.b_q}, {"b_L", m.b_l}, {"c", optional_number(m.c)},
            {"c_tilde", optional_number(m.c_tilde)}, {"algebraic", m.algebraic}};
}

Json to_json(const GameDefinition& def) {
    const auto& g = def.game;
    Json inputs = Json::array();
    Json predicate = Json::array();
    for (std::size_t in = 0; in < g.input_count(); ++in) {
        inputs.push_back(g.decode_inputs(in));
        Json row = Json::array();
        for (std::size_t out = 0; out < g.output_count(); ++out) row.push_back(g.wins(in, out) ? 1 : 0);
        predicate.push_back(std::move(row));
    }
    Json j = {{"name", g.name()},
              {"parties", g.parties()},
              {"inputs", std::move(inputs)},
              {"distribution", g.input_distribution()},
              {"predicate", std::move(predicate)},
              {"robustness", to_json(def.robustness)}};
    if (g.functional()) {
        j["bell_functional"] = {{"correlator_coefficients", g.functional()->correlator_coefficients},
                                {"slope", g.functional()->slope},
                                {"intercept", g.functional()->intercept}};
    }
    return j;
}

Json to_json(const BoundReport& r) {
    return {{"protocol", to_string(r.protocol)},
            {"regime", to_string(r.regime)},
            {"p1", r.p1},
            {"p2", r.p2},
            {"kl", number(r.kl)},
            {"tail_bound", r.tail_bound},
            {"optimal_t", number(r.optimal_t)},
            {"sample_size", r.sample_size},
            {"N", r.sample_size},
            {"taylor_size", r.taylor_size},
            {"mu", optional_number(r.mu)}};
}

Json to_json(const VerificationPlan& p) {
    return {{"protocol", "verification"},
            {"game", p.game},
            {"robustness", to_json(p.robustness)},
            {"eta", p.eta},
            {"eps1", p.eps1},
            {"eps2", p.eps2},
            {"delta", p.delta},
            {"N", p.copies},
            {"p1", p.p1},
            {"p2", p.p2},
            {"halt_on_first_failure", p.halt_on_first_failure}};
}

Json to_json(const CertificationPlan& p) {
    return {{"protocol", "certification"},
            {"game", p.game},
            {"robustness", to_json(p.robustness)},
            {"eta_c", p.eta_c},
            {"eta", p.eta},
            {"mu", p.mu},
            {"eps1", p.eps1},
            {"eps2", p.eps2},
            {"delta", p.delta},
            {"N", p.copies},
            {"p1", p.p1},
            {"p2", p.p2}};
}

Json to_json(const Transcript& t) {
    Json rounds = Json::array();
    for (const auto& r : t.rounds) {
        Json jr = {{"measured", r.measured}};
        if (r.measured) {
            jr["success_prob"] = r.success_prob;
            jr["inputs"] = r.record.inputs;
            jr["outputs"] = r.record.outputs;
            jr["win"] = r.record.win;
        }
        rounds.push_back(std::move(jr));
    }
    return {{"N1", t.n1},
            {"q1", t.q1},
            {"P", t.success_rate},
            {"halted", t.halted},
            {"certificate", t.certificate},
            {"rounds", std::move(rounds)}};
}

Json to_json(const Verdict& v) {
    Json j = {{"outcome", to_string(v.outcome)}, {"P", v.success_rate}, {"q1", v.q1}, {"N1", v.n1}};
    if (v.claim) {
        const auto& c = *v.claim;
        Json claim = {{"kind", c.kind == ClaimKind::average_extractability ? "average_extractability"
                                                                            : "certificate_extractability"},
                      {"extractability_floor", c.extractability_floor},
                      {"confidence", c.confidence},
                      {"clamped", c.clamped}};
        if (c.certificate_success_floor) claim["certificate_success_floor"] = *c.certificate_success_floor;
        if (c.approximate_success_floor) claim["approximate_success_floor"] = *c.approximate_success_floor;
        if (c.approximate_extractability_floor) {
            claim["approximate_extractability_floor"] = *c.approximate_extractability_floor;
        }
        j["claim"] = std::move(claim);
    } else {
        j["claim"] = nullptr;
    }
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

Json to_json(const OracleResult& r) {
    return {{"exact_probability", r.exact_probability}, {"bound", r.bound}, {"slack", r.slack}};
}

Json to_json(const PassEstimate& e) {
    return {{"rate", e.rate}, {"stderr", e.stderr_}, {"passes", e.passes}, {"trials", e.trials}};
}

Json to_json(const FigureSpec& s) {
    return {{"figure_id", to_string(s.figure)},
            {"etas", s.etas},
            {"n_min", s.n_min},
            {"n_max", s.n_max},
            {"n_step", s.n_step},
            {"mu", s.mu},
            {"p1", s.p1},
            {"c", s.c},
            {"nu", s.nu},
            {"delta", s.delta}};
}

std::string transcript_csv(const Transcript& t, std::size_t parties) {
    std::string out = "round,measured";
    for (std::size_t p = 1; p <= parties; ++p) out += ",i" + std::to_string(p);
    for (std::size_t p = 1; p <= parties; ++p) out += ",o" + std::to_string(p);
    out += ",win\n";
    for (std::size_t k = 0; k < t.rounds.size(); ++k) {
        const auto& r = t.rounds[k];
        out += std::to_string(k) + ',' + (r.measured ? '1' : '0');
        const bool labelled = r.measured && r.record.inputs.size() == parties;
        for (std::size_t p = 0; p < parties; ++p) out += labelled ? "," + std::to_string(r.record.inputs[p]) : ",";
        for (std::size_t p = 0; p < parties; ++p) out += labelled ? "," + std::to_string(r.record.outputs[p]) : ",";
        out += r.measured ? (r.record.win ? ",1\n" : ",0\n") : ",\n";
    }
    return out;
}

SourceSpec source_spec_from_json(const Json& j) {
    SourceSpec spec;
    spec.kind = kind_from_string(j.at("kind").get<std::string>());
    spec.copies = j.value("N", std::size_t{0});
    if (j.contains("state")) spec.state = state_spec_from_json(j.at("state"));
    if (j.contains("states")) {
        for (const auto& s : j.at("states")) spec.states.push_back(state_spec_from_json(s));
    }
    if (j.contains("probs")) spec.probs = j.at("probs").get<std::vector<double>>();
    if (j.contains("p")) spec.p = j.at("p").get<double>();
    if (j.contains("weights")) spec.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("branches")) {
        for (const auto& b : j.at("branches")) {
            BranchSpec branch;
            if (b.contains("state")) branch.state = state_spec_from_json(b.at("state"));
            if (b.contains("states")) {
                for (const auto& s : b.at("states")) branch.states.push_back(state_spec_from_json(s));
            }
            if (b.contains("p")) branch.p = b.at("p").get<double>();
            if (b.contains("probs")) branch.probs = b.at("probs").get<std::vector<double>>();
            spec.branches.push_back(std::move(branch));
        }
    }
    return spec;
}

SourceSpec source_spec_from_shorthand(const std::string& text, std::size_t copies) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    SourceSpec spec;
    spec.copies = copies;
    if (head == "iid-ghz-depolarized") {
        spec.kind = SourceKind::iid;
        spec.state = StateSpec{"ghz", 3, arg.empty() ? 0.0 : parse_number(arg, text)};
    } else if (head == "iid-bell-depolarized") {
        spec.kind = SourceKind::iid;
        spec.state = StateSpec{"bell", 2, arg.empty() ? 0.0 : parse_number(arg, text)};
    } else if (head == "iid-bernoulli") {
        spec.kind = SourceKind::bernoulli;
        if (arg.empty()) throw std::invalid_argument("iid-bernoulli needs a probability");
        spec.p = parse_number(arg, text);
    } else if (head == "coin-flip") {
        const double w = arg.empty() ? 0.5 : parse_number(arg, text);
        spec.kind = SourceKind::mixture;
        spec.weights = {w, 1.0 - w};
        spec.branches.resize(2);
        spec.branches[0].state = StateSpec{"ghz", 3, 0.0};
        spec.branches[1].state = StateSpec{"maximally_mixed", 8, 0.0};
    } else {
        throw std::invalid_argument("unknown source shorthand '" + text + "'");
    }
    return spec;
}

}  // namespace diqv
