#include "cli.hpp"

#include "diqv/bounds.hpp"
#include "diqv/experiments.hpp"
#include "diqv/games.hpp"
#include "diqv/io.hpp"
#include "diqv/protocols.hpp"
#include "diqv/sources.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace diqv::cli {

namespace {

struct CliConfig {
    std::string subcommand;
    std::optional<std::string> game;
    std::optional<double> c;
    std::optional<std::string> c_variant;
    std::optional<double> c_tilde;
    std::optional<double> nu;
    std::optional<double> eta;
    std::optional<double> eta_c;
    std::optional<double> eps1;
    std::optional<double> delta;
    std::optional<double> mu;
    std::optional<double> p1;
    std::optional<std::uint64_t> copies;
    std::optional<std::string> source;
    std::optional<Json> inline_source;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> config;
    std::optional<std::string> figure;
    bool allpass = false;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
void fill(std::optional<T>& slot, const Json& file, const char* key) {
    if (slot || !file.contains(key)) return;
    try {
        slot = file.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("config key '") + key + "' has the wrong type");
    }
}

void merge_config_file(CliConfig& cfg) {
    if (!cfg.config) return;
    std::ifstream in(*cfg.config);
    if (!in) throw UsageError("cannot read config file " + *cfg.config);
    Json file;
    try {
        file = Json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
        throw UsageError("config file is not valid JSON");
    }
    if (!file.is_object()) throw UsageError("config file must hold a JSON object");
    static const char* const known[] = {"game", "c",  "c_variant", "c_tilde", "nu",      "eta",   "eta_c",
                                        "eps1", "delta", "mu",     "p1",      "N",       "source", "seed",
                                        "trials", "workers", "out", "format", "allpass"};
    for (const auto& [key, value] : file.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw UsageError("unknown config key '" + key + "'");
        }
    }
    fill(cfg.game, file, "game");
    fill(cfg.c, file, "c");
    fill(cfg.c_variant, file, "c_variant");
    fill(cfg.c_tilde, file, "c_tilde");
    fill(cfg.nu, file, "nu");
    fill(cfg.eta, file, "eta");
    fill(cfg.eta_c, file, "eta_c");
    fill(cfg.eps1, file, "eps1");
    fill(cfg.delta, file, "delta");
    fill(cfg.mu, file, "mu");
    fill(cfg.p1, file, "p1");
    fill(cfg.copies, file, "N");
    fill(cfg.seed, file, "seed");
    fill(cfg.trials, file, "trials");
    fill(cfg.workers, file, "workers");
    fill(cfg.out, file, "out");
    fill(cfg.format, file, "format");
    if (!cfg.source && file.contains("source")) {
        if (file["source"].is_object()) {
            cfg.inline_source = file["source"];
        } else {
            fill(cfg.source, file, "source");
        }
    }
    if (!cfg.allpass && file.contains("allpass")) cfg.allpass = file["allpass"].get<bool>();
}

GameDefinition resolve_game(const CliConfig& cfg) {
    MerminConstant constant = MerminConstant::standard;
    const std::string variant = cfg.c_variant.value_or("standard");
    if (variant == "quarter") {
        constant = MerminConstant::quarter;
    } else if (variant != "standard") {
        throw UsageError("--c-variant must be standard or quarter");
    }
    GameDefinition def = standard_game(cfg.game.value_or("mermin3"), constant);
    if (cfg.c && cfg.c_tilde) throw UsageError("give --c or --c-tilde, not both");
    if (cfg.c) {
        def.robustness = def.robustness.with_c(*cfg.c);
    } else if (cfg.c_tilde) {
        if (!(*cfg.c_tilde > 0.0)) throw UsageError("--c-tilde must be positive");
        def.robustness = def.robustness.with_c(1.0 / (def.robustness.b_q * *cfg.c_tilde));
    }
    def.robustness.require_c();
    return def;
}

VerificationPlan make_verification_plan(const CliConfig& cfg, const GameDefinition& def) {
    const double eta = cfg.eta.value_or(0.1);
    const double delta = cfg.delta.value_or(0.01);
    VerificationPlan plan = cfg.allpass ? plan_allpass_verification(def.game, def.robustness, eta, delta)
                                        : plan_verification(def, eta, cfg.eps1.value_or(0.0), delta);
    if (cfg.copies) plan.copies = *cfg.copies;
    return plan;
}

CertificationPlan make_certification_plan(const CliConfig& cfg, const GameDefinition& def) {
    CertificationPlan plan = plan_certification(def.game, def.robustness, cfg.eta_c.value_or(0.2), cfg.mu.value_or(0.5),
                                                cfg.eps1.value_or(0.0), cfg.delta.value_or(0.01));
    if (cfg.copies) plan.copies = *cfg.copies;
    return plan;
}

RoundEngine make_engine(const CliConfig& cfg, const GameDefinition& def, std::uint64_t copies) {
    SourceSpec spec;
    if (cfg.inline_source) {
        spec = source_spec_from_json(*cfg.inline_source);
    } else {
        const std::string text = cfg.source.value_or(def.game.parties() == 2 ? "iid-bell-depolarized:0"
                                                                              : "iid-ghz-depolarized:0");
        const std::filesystem::path path(text);
        if (path.extension() == ".json") {
            std::ifstream in(path);
            if (!in) throw UsageError("cannot read source file " + text);
            spec = source_spec_from_json(Json::parse(in));
        } else {
            spec = source_spec_from_shorthand(text, copies);
        }
    }
    if (spec.copies == 0) spec.copies = copies;
    return RoundEngine(make_source(spec), def.game);
}

std::string csv_from_flat(const Json& j) {
    std::string header;
    std::string values;
    for (const auto& [key, value] : j.items()) {
        if (value.is_structured()) continue;
        if (!header.empty()) {
            header += ',';
            values += ',';
        }
        header += key;
        values += value.is_string() ? value.get<std::string>() : value.dump();
    }
    return header + '\n' + values + '\n';
}

void emit(const CliConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out) {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) throw UsageError("cannot write " + *cfg.out);
        file << text;
    } else {
        out << text;
    }
}

bool want_csv(const CliConfig& cfg) {
    const std::string f = cfg.format.value_or("json");
    if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
    return f == "csv";
}

void emit_json(const CliConfig& cfg, std::ostream& out, const Json& j) {
    emit(cfg, out, want_csv(cfg) ? csv_from_flat(j) : j.dump(2) + '\n');
}

int cmd_bound(const CliConfig& cfg, std::ostream& out) {
    const GameDefinition def = resolve_game(cfg);
    const double c = def.robustness.require_c();
    const double eps1 = cfg.eps1.value_or(0.0);
    const double delta = cfg.delta.value_or(0.01);
    const bool certification = cfg.mu.has_value() || cfg.eta_c.has_value();
    Json j;
    BoundReport report;
    if (certification) {
        const double mu = cfg.mu.value_or(0.5);
        const double eta_c = cfg.eta_c.value_or(0.2);
        const double eps2 = c * eta_c * (1.0 - mu);
        report = bound_report(Protocol::certification, def.robustness.p_qm, eps1, eps2, delta, mu);
        j = {{"game", def.game.name()}, {"c", c}, {"eta_c", eta_c}, {"eps1", eps1}, {"eps2", eps2}, {"delta", delta}};
    } else {
        const double eta = cfg.eta.value_or(0.1);
        const double eps2 = c * eta;
        report = bound_report(Protocol::verification, def.robustness.p_qm, eps1, eps2, delta);
        j = {{"game", def.game.name()}, {"c", c}, {"eta", eta}, {"eps1", eps1}, {"eps2", eps2}, {"delta", delta}};
    }
    j.update(to_json(report));
    emit_json(cfg, out, j);
    return kExitSuccess;
}

int cmd_plan_verify(const CliConfig& cfg, std::ostream& out) {
    emit_json(cfg, out, to_json(make_verification_plan(cfg, resolve_game(cfg))));
    return kExitSuccess;
}

int cmd_plan_certify(const CliConfig& cfg, std::ostream& out) {
    emit_json(cfg, out, to_json(make_certification_plan(cfg, resolve_game(cfg))));
    return kExitSuccess;
}

template <typename Plan, typename Runner>
int run_protocol(const CliConfig& cfg, std::ostream& out, const GameDefinition& def, const Plan& plan, Runner runner) {
    const RoundEngine engine = make_engine(cfg, def, plan.copies);
    const std::uint64_t seed = cfg.seed.value_or(0);
    const ProtocolRun run = runner(plan, engine, seed);
    if (want_csv(cfg)) {
        emit(cfg, out, transcript_csv(run.transcript, def.game.parties()));
    } else {
        Json j = {{"seed", seed}, {"plan", to_json(plan)}, {"verdict", to_json(run.verdict)}};
        if (cfg.trials) {
            j["monte_carlo"] = to_json(mc_pass_estimate(plan, engine, *cfg.trials, seed, cfg.workers.value_or(1)));
        }
        j["transcript"] = to_json(run.transcript);
        emit(cfg, out, j.dump(2) + '\n');
    }
    return run.verdict.outcome == Outcome::success ? kExitSuccess : kExitInconclusive;
}

int cmd_verify(const CliConfig& cfg, std::ostream& out) {
    const GameDefinition def = resolve_game(cfg);
    return run_protocol(cfg, out, def, make_verification_plan(cfg, def),
                        [](const VerificationPlan& p, const RoundEngine& e, std::uint64_t s) {
                            return run_verification(p, e, s);
                        });
}

int cmd_certify(const CliConfig& cfg, std::ostream& out) {
    const GameDefinition def = resolve_game(cfg);
    return run_protocol(cfg, out, def, make_certification_plan(cfg, def),
                        [](const CertificationPlan& p, const RoundEngine& e, std::uint64_t s) {
                            return run_certification(p, e, s);
                        });
}

std::vector<double> round_success_probs(const RoundEngine& engine) {
    const auto& model = engine.model();
    if (!model.independent_copies()) throw UsageError("oracle needs a source with independent copies");
    std::vector<double> probs(model.copies());
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = engine.state_success(model.state_index(0, k));
    return probs;
}

int cmd_oracle(const CliConfig& cfg, std::ostream& out) {
    const GameDefinition def = resolve_game(cfg);
    const bool certification = cfg.mu.has_value() || cfg.eta_c.has_value();
    Json j;
    if (certification) {
        CertificationPlan plan = make_certification_plan(cfg, def);
        if (cfg.p1) plan.p1 = *cfg.p1;
        const RoundEngine engine = cfg.source || cfg.inline_source
                                       ? make_engine(cfg, def, plan.copies)
                                       : RoundEngine(SourceModel::bernoulli(std::vector<double>(plan.copies, plan.p2)),
                                                     def.game);
        const auto probs = round_success_probs(engine);
        j = {{"protocol", "certification"}, {"N", probs.size()}, {"mu", plan.mu}, {"p1", plan.p1}};
        j.update(to_json(certification_oracle(probs, plan.mu, plan.p1)));
        if (cfg.trials) {
            j["monte_carlo"] =
                to_json(mc_pass_estimate(plan, engine, *cfg.trials, cfg.seed.value_or(0), cfg.workers.value_or(1)));
        }
    } else {
        VerificationPlan plan = make_verification_plan(cfg, def);
        if (cfg.p1) plan.p1 = *cfg.p1;
        const RoundEngine engine = cfg.source || cfg.inline_source
                                       ? make_engine(cfg, def, plan.copies)
                                       : RoundEngine(SourceModel::bernoulli(std::vector<double>(plan.copies, plan.p2)),
                                                     def.game);
        const auto probs = round_success_probs(engine);
        j = {{"protocol", "verification"}, {"N", probs.size()}, {"p1", plan.p1}};
        j.update(to_json(verification_oracle(probs, plan.p1)));
        if (cfg.trials) {
            j["monte_carlo"] =
                to_json(mc_pass_estimate(plan, engine, *cfg.trials, cfg.seed.value_or(0), cfg.workers.value_or(1)));
        }
    }
    emit_json(cfg, out, j);
    return kExitSuccess;
}

int cmd_figure(const CliConfig& cfg, std::ostream& out) {
    if (!cfg.figure) throw UsageError("figure needs an id: fig2a, fig2b or fig3");
    FigureSpec spec = default_figure_spec(figure_id_from_string(*cfg.figure));
    if (cfg.c) spec.c = *cfg.c;
    if (cfg.nu) spec.nu = *cfg.nu;
    if (cfg.delta) spec.delta = *cfg.delta;
    if (cfg.mu) spec.mu = *cfg.mu;
    if (cfg.p1) spec.p1 = *cfg.p1;
    spec.output_dir = cfg.out.value_or(".");
    const auto path = write_figure(spec);
    out << Json{{"figure", *cfg.figure}, {"csv", path.string()}}.dump() << '\n';
    return kExitSuccess;
}

void add_common(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("--game", cfg.game, "mermin3 (default) or chsh");
    cmd->add_option("--c", cfg.c, "robustness constant: success deficit per unit of extractability deficit");
    cmd->add_option("--c-variant", cfg.c_variant, "mermin3 constant: standard (2-sqrt2) or quarter");
    cmd->add_option("--c-tilde", cfg.c_tilde, "violation-side constant; sets c = 1/(b_Q c_tilde)");
    cmd->add_option("--eta", cfg.eta, "target extractability deficit (default 0.1)");
    cmd->add_option("--eta-c", cfg.eta_c, "certificate extractability deficit (default 0.2)");
    cmd->add_option("--eps1", cfg.eps1, "acceptance slack below p_QM (default 0)");
    cmd->add_option("--delta", cfg.delta, "failure probability (default 0.01)");
    cmd->add_option("--mu", cfg.mu, "measurement probability (default 0.5)");
    cmd->add_option("--N", cfg.copies, "override the planned number of copies");
    cmd->add_option("--seed", cfg.seed, "master seed (default 0)");
    cmd->add_option("--trials", cfg.trials, "Monte Carlo trials");
    cmd->add_option("--workers", cfg.workers, "Monte Carlo worker threads (default 1)");
    cmd->add_option("--out", cfg.out, "output file (directory for figure)");
    cmd->add_option("--format", cfg.format, "json (default) or csv");
    cmd->add_option("--config", cfg.config, "JSON file with defaults; flags take precedence");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Device-independent state verification and certification toolkit", "diqv-cli"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto* bound = app.add_subcommand("bound", "tail bound and sample size for one configuration");
    auto* plan_v = app.add_subcommand("plan-verify", "plan a verification run");
    auto* plan_c = app.add_subcommand("plan-certify", "plan a certification run");
    auto* verify = app.add_subcommand("verify", "simulate verification on a source");
    auto* certify = app.add_subcommand("certify", "simulate certification on a source");
    auto* oracle = app.add_subcommand("oracle", "exact pass probability versus the bound");
    auto* figure = app.add_subcommand("figure", "write a figure dataset as CSV plus JSON sidecar");
    for (auto* cmd : {bound, plan_v, plan_c, verify, certify, oracle, figure}) add_common(cmd, cfg);
    for (auto* cmd : {plan_v, verify, oracle}) {
        cmd->add_flag("--allpass", cfg.allpass, "halt at the first lost round (requires p_QM = 1)");
    }
    for (auto* cmd : {verify, certify, oracle}) {
        cmd->add_option("--source", cfg.source,
                        "iid-ghz-depolarized:<l>, iid-bell-depolarized:<l>, iid-bernoulli:<p>, coin-flip[:<w>] "
                        "or a .json source file");
    }
    for (auto* cmd : {oracle, figure}) cmd->add_option("--p1", cfg.p1, "acceptance threshold override");
    figure->add_option("id", cfg.figure, "fig2a, fig2b or fig3")->required();
    figure->add_option("--nu", cfg.nu, "device-dependent constant for fig2a");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    const std::vector<std::pair<CLI::App*, std::function<int(const CliConfig&, std::ostream&)>>> handlers = {
        {bound, cmd_bound},   {plan_v, cmd_plan_verify}, {plan_c, cmd_plan_certify}, {verify, cmd_verify},
        {certify, cmd_certify}, {oracle, cmd_oracle},     {figure, cmd_figure}};
    try {
        merge_config_file(cfg);
        for (const auto& [cmd, handler] : handlers) {
            if (cmd->parsed()) {
                cfg.subcommand = cmd->get_name();
                return handler(cfg, out);
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"diqv-cli"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace diqv::cli
