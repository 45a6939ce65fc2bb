#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sygra/conflict.hpp"
#include "sygra/solver.hpp"
#include "sygra/symbolic.hpp"

namespace sygra {

inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Stanza syntax
//
//   document := stanza*
//   stanza   := keyword arg* ('{' NL stanza* '}')? NL
//
// '#' starts a comment. ':' and '->' are tokens of their own. Keywords listed
// in `raw_keywords` take the rest of their line verbatim (formulas).

struct Stanza {
    std::string key;
    std::vector<std::string> args;
    /// Rest of the line after the keyword, for raw keywords.
    std::string rest;
    int line = 0;
    int rest_column = 0;
    bool block = false;
    std::vector<Stanza> children;
};

std::vector<Stanza> parse_stanzas(std::string_view text);

// ---------------------------------------------------------------------------
// Rule sets

struct HostDecl {
    std::string name;
    SymbolicGraph graph;
};

struct RuleSetDocument {
    std::string algebra = "int";
    std::vector<Rule> rules;
    std::vector<HostDecl> hosts;

    const Rule* find_rule(std::string_view name) const;
    const HostDecl* find_host(std::string_view name) const;
};

/// Throws ParseError (with position) or InvalidInput.
RuleSetDocument parse_rule_set(std::string_view text);
RuleSetDocument parse_rule_set_json(std::string_view text);
std::string print_rule_set(const RuleSetDocument& doc);
std::string print_rule_set_json(const RuleSetDocument& doc);

/// Chooses the encoding by extension (.json or anything else).
RuleSetDocument load_rule_set(const std::string& path);

/// Graph body lines (node/edge/label/attr/eattr) at the given indent.
std::string print_graph_body(const EGraph& g, int indent);

// ---------------------------------------------------------------------------
// Reports

using MapSet = std::array<IdMap, 5>;

struct EntryRecord {
    std::size_t index = 0;
    Classification classification = Classification::NcpPair;
    bool indeterminate = false;
    bool untracked_confluent = false;
    SymbolicGraph context;
    MapSet o1{};
    MapSet o2{};
    std::vector<DependenceEvidence> evidence;
    bool has_witness = false;
    MapSet close1{};  // closing match of the second rule on the first result
    MapSet close2{};
    Formula x1_formula = Formula::truth();
    Formula x2_formula = Formula::truth();
    MapSet iso{};

    bool operator==(const EntryRecord& o) const;
};

struct PairRecord {
    std::string rule1;
    std::string rule2;
    bool conflicting = false;
    std::size_t gluing_skipped = 0;
    SolverStats stats;
    std::vector<EntryRecord> entries;

    bool operator==(const PairRecord& o) const;
};

struct ReportDocument {
    std::string version{kToolVersion};
    std::string backend = "builtin";
    std::string command;  // external backend only
    int timeout_ms = 10000;
    std::string logic = "LIA";
    std::string mode = "narrowing";
    bool conflicting = false;
    std::vector<PairRecord> pairs;
    std::optional<double> elapsed_ms;

    bool operator==(const ReportDocument& o) const;
};

PairRecord make_pair_record(const PairReport& report);

std::string print_report(const ReportDocument& doc);
std::string print_report_json(const ReportDocument& doc);
ReportDocument parse_report(std::string_view text);
ReportDocument parse_report_json(std::string_view text);

// ---------------------------------------------------------------------------
// Derivation traces (apply command)

std::string print_derivation(const Derivation& d, int indent);
std::string print_maps(const MapSet& maps, int indent);

}  // namespace sygra
