// sygra: critical pair analysis for symbolic graph transformation rules.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sygra/conflict.hpp"
#include "sygra/document.hpp"
#include "sygra/error.hpp"
#include "sygra/oracle.hpp"

namespace {

using namespace sygra;

enum Exit { kOk = 0, kFound = 1, kUsage = 2, kSolver = 3 };

struct Common {
    std::string rules;
    std::string backend = "builtin";
    std::string smt_cmd;
    int timeout_ms = 10000;
    std::string out;
    std::string mode = "narrowing";
    std::size_t max_fresh = SIZE_MAX;
    bool no_self = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("rules", c.rules, "Rule set (.json for JSON, anything else for text)")->required();
    cmd->add_option("--solver", c.backend, "Solver backend")->check(CLI::IsMember({"builtin", "external"}));
    cmd->add_option("--smt-cmd", c.smt_cmd, "External SMT-LIB solver command (default $SYGRA_SMT_CMD or 'z3 -in')");
    cmd->add_option("--timeout-ms", c.timeout_ms, "Per-query timeout of the external solver")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "Write the document here instead of standard output");
    cmd->add_option("--max-fresh", c.max_fresh, "Most fresh variables per narrowing match");
    cmd->add_flag("--no-self", c.no_self, "Skip pairs of a rule with itself");
}

SolverConfig solver_config(const Common& c) {
    SolverConfig cfg;
    cfg.backend = c.backend == "external" ? Backend::External : Backend::Builtin;
    cfg.command = c.smt_cmd;
    cfg.timeout_ms = c.timeout_ms;
    // The builtin backend hands undecided queries on only to an explicitly
    // configured solver.
    const char* env = std::getenv("SYGRA_SMT_CMD");
    cfg.escalate = cfg.backend == Backend::Builtin && (!c.smt_cmd.empty() || (env && *env));
    return cfg;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + c.out + "'");
    f << text;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ConfluenceMode parse_mode(const std::string& m) {
    return m == "symbolic" ? ConfluenceMode::Symbolic : ConfluenceMode::Narrowing;
}

int cmd_analyze(const Common& c, bool timing, bool json) {
    const auto start = std::chrono::steady_clock::now();
    RuleSetDocument doc = load_rule_set(c.rules);
    SolverConfig cfg = solver_config(c);
    auto solver = make_solver(cfg);

    ClassifyOptions opts;
    opts.confluence.mode = parse_mode(c.mode);
    opts.confluence.narrowing.max_fresh = c.max_fresh;

    ReportDocument report;
    report.backend = c.backend;
    if (cfg.backend == Backend::External) report.command = resolve_smt_command(cfg);
    report.timeout_ms = cfg.timeout_ms;
    report.logic = cfg.logic;
    report.mode = c.mode;
    for (const auto& r1 : doc.rules) {
        for (const auto& r2 : doc.rules) {
            if (c.no_self && r1.name == r2.name) continue;
            report.pairs.push_back(make_pair_record(classify_pair(r1, r2, *solver, opts)));
            if (report.pairs.back().conflicting) report.conflicting = true;
        }
    }
    if (timing)
        report.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    emit(c, json || ends_with(c.out, ".json") ? print_report_json(report) : print_report(report));
    return report.conflicting ? kFound : kOk;
}

int cmd_apply(const Common& c, const std::string& rule_name, const std::string& host_name) {
    RuleSetDocument doc = load_rule_set(c.rules);
    const Rule* rule = doc.find_rule(rule_name);
    if (!rule) throw InvalidInput("unknown rule '" + rule_name + "'");
    const HostDecl* host = doc.find_host(host_name);
    if (!host) throw InvalidInput("unknown host '" + host_name + "'");
    auto solver = make_solver(solver_config(c));

    const bool narrowing = c.mode == "narrowing";
    MatchSet ms = narrowing ? find_narrowing_matches(*rule, host->graph, NarrowingOptions{c.max_fresh})
                            : find_symbolic_matches(*rule, host->graph, *solver);
    if (ms.matches.empty()) {
        std::cerr << "no match";
        if (ms.indeterminate) std::cerr << " (" << ms.indeterminate << " candidates undecided)";
        std::cerr << "\n";
        return kFound;
    }

    std::ostringstream os;
    os << "apply {\n";
    os << "  rule " << rule->name << "\n";
    os << "  host " << host->name << "\n";
    os << "  mode " << c.mode << "\n";
    os << "  matches " << ms.matches.size() << "\n";
    if (ms.indeterminate) os << "  undecided " << ms.indeterminate << "\n";
    for (std::size_t i = 0; i < ms.matches.size(); ++i) {
        const Match& m = ms.matches[i];
        ApplyResult res = narrowing ? apply_narrowing(*rule, m, *solver) : apply_symbolic(*rule, m);
        os << "  match " << i << ' ' << to_string(res.outcome) << " {\n";
        std::vector<std::string> fresh;
        for (const auto& l : m.host.graph->labels())
            if (!host->graph.graph->contains(Sort::Label, l) && l.rfind("_v", 0) == 0) fresh.push_back(l);
        if (!fresh.empty()) {
            os << "    fresh";
            for (const auto& f : fresh) os << ' ' << f;
            os << "\n";
        }
        if (res.violation)
            os << "    violation " << to_string(res.violation->kind) << ' ' << sort_name(res.violation->sort) << ' '
               << res.violation->element << "\n";
        if (!res.diagnostic.empty()) os << "    note " << res.diagnostic << "\n";
        if (res.derivation) os << print_derivation(*res.derivation, 2);
        os << "  }\n";
    }
    os << "}\n";
    emit(c, os.str());
    return kOk;
}

std::vector<std::pair<std::string, std::string>> parse_pairs(const std::vector<std::string>& specs) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : specs) {
        auto colon = s.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
            throw InvalidInput("pair '" + s + "' must look like RULE:RULE");
        out.emplace_back(s.substr(0, colon), s.substr(colon + 1));
    }
    return out;
}

int cmd_oracle(const Common& c, const std::vector<std::string>& pair_specs, std::uint64_t seed,
               std::size_t trials) {
    RuleSetDocument doc = load_rule_set(c.rules);
    auto solver = make_solver(solver_config(c));
    oracle::FuzzOptions opts;
    opts.seed = seed;
    opts.trials = trials;
    opts.pairs = parse_pairs(pair_specs);
    if (opts.pairs.empty()) {
        for (const auto& a : doc.rules)
            for (const auto& b : doc.rules)
                if (!(c.no_self && a.name == b.name)) opts.pairs.emplace_back(a.name, b.name);
    }
    if (opts.pairs.empty() || doc.rules.empty()) opts.trials = 0;
    ClassifyOptions classify;
    classify.confluence.mode = parse_mode(c.mode);
    classify.confluence.narrowing.max_fresh = c.max_fresh;
    oracle::FuzzReport rep =
        opts.trials ? oracle::completeness_fuzz(doc.rules, *solver, opts, classify) : oracle::FuzzReport{};

    std::ostringstream os;
    os << "oracle {\n";
    os << "  seed " << seed << "\n";
    os << "  trials " << rep.trials << "\n";
    os << "  derivation-pairs " << rep.derivation_pairs << "\n";
    os << "  non-confluent " << rep.nonconfluent << "\n";
    os << "  violations " << rep.violations << "\n";
    for (const auto& [key, t] : rep.per_pair)
        os << "  row " << key.first << ' ' << key.second << " trials " << t.trials << " pairs " << t.derivation_pairs
           << " non-confluent " << t.nonconfluent << " covered " << t.covered << "\n";
    for (const auto& d : rep.details) os << "  violation " << d << "\n";
    os << "}\n";
    emit(c, os.str());
    return rep.violations ? kFound : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conflict analysis for symbolic graph transformation rules"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sygra::kToolVersion));

    Common c;
    bool timing = false;
    bool json = false;
    std::string rule_name, host_name;
    std::vector<std::string> pairs;
    std::uint64_t seed = 1;
    std::size_t trials = 100;

    auto* analyze = app.add_subcommand("analyze", "Classify every ordered rule pair");
    add_common(analyze, c);
    analyze->add_option("--mode", c.mode, "Closing derivations")->check(CLI::IsMember({"symbolic", "narrowing"}));
    analyze->add_flag("--timing", timing, "Record the elapsed time in the report");
    analyze->add_flag("--json", json, "Emit JSON");

    auto* apply = app.add_subcommand("apply", "Apply one rule to a host of the rule set");
    add_common(apply, c);
    apply->add_option("--rule", rule_name, "Rule name")->required();
    apply->add_option("--host", host_name, "Host name")->required();
    apply->add_option("--mode", c.mode, "Derivation kind")->check(CLI::IsMember({"symbolic", "narrowing"}));

    auto* oracle_cmd = app.add_subcommand("oracle", "Compare against the concrete brute-force oracle");
    add_common(oracle_cmd, c);
    oracle_cmd->add_option("--pairs", pairs, "Rule pairs RULE:RULE (default: all)")->delimiter(',');
    oracle_cmd->add_option("--seed", seed, "Random seed");
    oracle_cmd->add_option("--trials", trials, "Number of random hosts");
    oracle_cmd->add_option("--mode", c.mode, "Closing derivations")->check(CLI::IsMember({"symbolic", "narrowing"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    if (apply->parsed() && c.mode == "narrowing" && !apply->count("--mode")) c.mode = "symbolic";

    try {
        if (analyze->parsed()) return cmd_analyze(c, timing, json);
        if (apply->parsed()) return cmd_apply(c, rule_name, host_name);
        return cmd_oracle(c, pairs, seed, trials);
    } catch (const sygra::ParseError& e) {
        std::cerr << c.rules << ":" << e.what() << "\n";
        return kUsage;
    } catch (const sygra::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const sygra::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolver;
    }
}
