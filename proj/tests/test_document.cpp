#include <doctest.h>

#include "support.hpp"
#include "sygra/error.hpp"

using namespace sygra;
using namespace sygra::testing;

namespace {

bool same_rules(const RuleSetDocument& a, const RuleSetDocument& b) {
    if (a.rules.size() != b.rules.size() || a.hosts.size() != b.hosts.size()) return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        const Rule& x = a.rules[i];
        const Rule& y = b.rules[i];
        if (x.name != y.name || *x.lhs != *y.lhs || *x.interface != *y.interface || *x.rhs != *y.rhs ||
            to_string(x.formula) != to_string(y.formula))
            return false;
    }
    for (std::size_t i = 0; i < a.hosts.size(); ++i) {
        const auto& x = a.hosts[i];
        const auto& y = b.hosts[i];
        if (x.name != y.name || *x.graph.graph != *y.graph.graph || x.graph.grounded != y.graph.grounded ||
            to_string(x.graph.formula) != to_string(y.graph.formula))
            return false;
    }
    return true;
}

ReportDocument analyze(const RuleSetDocument& doc) {
    BuiltinSolver s;
    ReportDocument r;
    for (const auto& a : doc.rules)
        for (const auto& b : doc.rules) {
            r.pairs.push_back(make_pair_record(classify_pair(a, b, s)));
            r.conflicting = r.conflicting || r.pairs.back().conflicting;
        }
    return r;
}

}  // namespace

TEST_CASE("stanza syntax") {
    auto st = parse_stanzas("a b: c -> d  # comment\nblock x {\n  formula y' = y + 1 # not a comment? no\n}\n");
    REQUIRE(st.size() == 2);
    CHECK(st[0].args == std::vector<std::string>{"b", ":", "c", "->", "d"});
    CHECK(st[1].block);
    REQUIRE(st[1].children.size() == 1);
    CHECK(st[1].children[0].rest == "y' = y + 1");
    CHECK(st[1].children[0].rest_column == 11);
}

TEST_CASE("unbalanced braces are reported with their line") {
    try {
        parse_stanzas("a {\n  b\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
    try {
        parse_stanzas("a\n}\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("rule set text round trip") {
    for (const char* file : {"running.sygra", "conflict.sygra", "pool.sygra"}) {
        CAPTURE(file);
        auto doc = rules(file);
        std::string text = print_rule_set(doc);
        auto again = parse_rule_set(text);
        CHECK(same_rules(doc, again));
        CHECK(print_rule_set(again) == text);
    }
}

TEST_CASE("rule set JSON round trip") {
    auto doc = rules("pool.sygra");
    std::string json = print_rule_set_json(doc);
    auto again = parse_rule_set_json(json);
    CHECK(same_rules(doc, again));
    CHECK(print_rule_set_json(again) == json);
    CHECK(same_rules(parse_rule_set(print_rule_set(again)), doc));
}

TEST_CASE("grounded hosts accept literal values") {
    auto doc = parse_rule_set("host h {\n  grounded\n  node n\n  attr a: n -> -3\n}\n");
    const auto& h = doc.hosts.at(0).graph;
    CHECK(h.grounded);
    CHECK(h.graph->node_attrs().at("a").target == "c_n3");
    CHECK(to_string(h.formula) == "c_n3 = -3");
}

TEST_CASE("formula errors point into the file") {
    const char* text = "rule r {\n  lhs {\n  }\n  interface {\n  }\n  rhs {\n  }\n  formula x = = 1\n}\n";
    try {
        parse_rule_set(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 8);
        CHECK(e.column() == 15);
    }
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(parse_rule_set("algebra real\n"), ParseError);
    CHECK_THROWS_AS(parse_rule_set("rule r {\n  lhs {\n  }\n}\n"), ParseError);
    CHECK_THROWS_AS(parse_rule_set("host h {\n  edge e: a -> b\n}\n"), ParseError);
    CHECK_THROWS_AS(parse_rule_set("host h {\n}\nhost h {\n}\n"), InvalidInput);
    CHECK_THROWS_AS(parse_rule_set_json("{\"rules\": [}"), ParseError);
    CHECK_THROWS_AS(parse_rule_set_json("{\"rules\": [{\"name\": 1}]}"), InvalidInput);
}

TEST_CASE("empty rule set") {
    auto doc = parse_rule_set("");
    CHECK(doc.rules.empty());
    CHECK(print_report(analyze(doc)).find("pair") == std::string::npos);
}

TEST_CASE("report text round trip") {
    auto report = analyze(rules("conflict.sygra"));
    report.elapsed_ms = 12.5;
    std::string text = print_report(report);
    auto again = parse_report(text);
    CHECK(again == report);
    CHECK(print_report(again) == text);
    CHECK(text.find("NcpPair") != std::string::npos);
}

TEST_CASE("report JSON round trip") {
    auto report = analyze(rules("running.sygra"));
    report.backend = "external";
    report.command = "z3 -in";
    std::string json = print_report_json(report);
    auto again = parse_report_json(json);
    CHECK(again == report);
    CHECK(print_report_json(again) == json);
    CHECK(print_report(parse_report(print_report(again))) == print_report(report));
}

TEST_CASE("unknown classifications are rejected") {
    CHECK_THROWS_AS(parse_report("report {\n  pair a b {\n    overlap 0 Clash {\n    }\n  }\n}\n"), ParseError);
}
