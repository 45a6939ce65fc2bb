#include "sygra/document.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sygra/error.hpp"

namespace sygra {

using json = nlohmann::ordered_json;

namespace {

const std::set<std::string_view> kRawKeywords{"formula", "x1-formula", "x2-formula", "command"};

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

[[noreturn]] void fail(const Stanza& s, const std::string& msg) { throw ParseError(s.line, 1, msg); }

}  // namespace

// ---------------------------------------------------------------------------
// Stanza syntax

std::vector<Stanza> parse_stanzas(std::string_view text) {
    std::vector<Stanza> top;
    std::vector<Stanza*> stack;
    std::vector<int> open_lines;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        struct Tok {
            std::string text;
            int column;
        };
        std::vector<Tok> toks;
        std::size_t i = 0;
        auto column_of = [&](std::size_t byte) {
            int col = 1;
            for (std::size_t k = 0; k < byte; ++k)
                if ((static_cast<unsigned char>(line[k]) & 0xC0) != 0x80) ++col;
            return col;
        };
        std::string key;
        bool raw = false;
        while (i < line.size()) {
            char c = line[i];
            if (c == ' ' || c == '\t') {
                ++i;
                continue;
            }
            if (toks.size() == 1 && kRawKeywords.count(toks[0].text)) {
                raw = true;
                break;
            }
            if (c == ':' || c == '{' || c == '}') {
                toks.push_back({std::string(1, c), column_of(i)});
                ++i;
                continue;
            }
            if (line.substr(i, 2) == "->") {
                toks.push_back({"->", column_of(i)});
                i += 2;
                continue;
            }
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != ':' && line[i] != '{' &&
                   line[i] != '}' && line.substr(i, 2) != "->")
                ++i;
            toks.push_back({std::string(line.substr(start, i - start)), column_of(start)});
        }
        if (toks.empty()) continue;

        if (toks.size() == 1 && toks[0].text == "}") {
            if (stack.empty()) throw ParseError(lineno, toks[0].column, "unbalanced '}'");
            stack.pop_back();
            open_lines.pop_back();
            continue;
        }
        Stanza s;
        s.key = toks[0].text;
        s.line = lineno;
        if (s.key == "{" || s.key == "}" || s.key == ":" || s.key == "->")
            throw ParseError(lineno, toks[0].column, "expected keyword, found '" + s.key + "'");
        if (raw) {
            std::string_view rest = line.substr(i);
            while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
            s.rest = std::string(rest);
            s.rest_column = column_of(i);
        } else {
            std::size_t n = toks.size();
            bool closes_inline = false;
            if (n >= 3 && toks[n - 2].text == "{" && toks[n - 1].text == "}") {
                s.block = true;
                closes_inline = true;
                n -= 2;
            } else if (toks[n - 1].text == "{") {
                s.block = true;
                n -= 1;
            }
            for (std::size_t k = 1; k < n; ++k) {
                if (toks[k].text == "{" || toks[k].text == "}")
                    throw ParseError(lineno, toks[k].column, "unexpected '" + toks[k].text + "'");
                s.args.push_back(toks[k].text);
            }
            (void)closes_inline;
        }
        const bool opens = s.block && !(toks.size() >= 2 && toks.back().text == "}");
        auto& siblings = stack.empty() ? top : stack.back()->children;
        siblings.push_back(std::move(s));
        if (opens) {
            stack.push_back(&siblings.back());
            open_lines.push_back(lineno);
        }
    }
    if (!stack.empty()) throw ParseError(open_lines.back(), 1, "unclosed '{'");
    return top;
}

// ---------------------------------------------------------------------------
// Graph bodies

namespace {

bool is_graph_key(std::string_view k) {
    return k == "node" || k == "label" || k == "edge" || k == "attr" || k == "eattr";
}

std::string ground_target(const std::string& t, bool grounded) {
    if (!grounded) return t;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && p == t.data() + t.size()) return constant_name(v);
    return t;
}

// Applies one graph statement; false if `s` is not one.
bool apply_graph_stanza(EGraph& g, const Stanza& s, bool grounded) {
    if (!is_graph_key(s.key)) return false;
    if (s.block) fail(s, "'" + s.key + "' does not take a block");
    try {
        if (s.key == "node" || s.key == "label") {
            if (s.args.empty()) fail(s, "'" + s.key + "' needs at least one id");
            for (const auto& a : s.args) {
                if (s.key == "node") {
                    g.add_node(a);
                } else {
                    std::string v = ground_target(a, grounded);
                    if (!is_identifier(v)) fail(s, "label '" + a + "' is not a valid variable name");
                    if (!g.contains(Sort::Label, v)) g.add_label(v);
                }
            }
            return true;
        }
        // id ':' source '->' target ['@tag']
        const auto& a = s.args;
        if (a.size() < 5 || a.size() > 6 || a[1] != ":" || a[3] != "->")
            fail(s, "expected '" + s.key + " ID: SOURCE -> TARGET [@tag]'");
        std::optional<std::string> tag;
        if (a.size() == 6) {
            if (a[5].size() < 2 || a[5][0] != '@') fail(s, "attribute tag must look like @name");
            tag = a[5].substr(1);
        }
        if (s.key == "edge") {
            if (tag) fail(s, "graph edges carry no tag");
            g.add_edge(a[0], a[2], a[4]);
        } else {
            std::string target = ground_target(a[4], grounded);
            if (grounded && !g.contains(Sort::Label, target) && constant_value(target)) g.add_label(target);
            if (s.key == "attr") g.add_node_attr(a[0], a[2], target, tag);
            else g.add_edge_attr(a[0], a[2], target, tag);
        }
    } catch (const InvalidInput& e) {
        fail(s, e.what());
    }
    return true;
}

EGraph graph_from_block(const Stanza& block, bool grounded, const std::vector<std::string>& shared_labels) {
    EGraph g;
    for (const auto& l : shared_labels) g.add_label(l);
    for (const auto& c : block.children)
        if (!apply_graph_stanza(g, c, grounded)) fail(c, "unexpected '" + c.key + "' in graph");
    try {
        g.validate();
    } catch (const InvalidInput& e) {
        fail(block, e.what());
    }
    return g;
}

Formula formula_of(const Stanza& s) {
    if (s.rest.empty()) fail(s, "empty formula");
    return parse_formula(s.rest, s.line, s.rest_column);
}

}  // namespace

std::string print_graph_body(const EGraph& g, int indent) {
    std::ostringstream os;
    const std::string p = pad(indent);
    for (const auto& n : g.nodes()) os << p << "node " << n << "\n";
    if (!g.labels().empty()) {
        os << p << "label";
        for (const auto& l : g.labels()) os << ' ' << l;
        os << "\n";
    }
    for (Sort s : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        for (const auto& [id, a] : g.arrows(s)) {
            os << p << sort_name(s) << ' ' << id << ": " << a.source << " -> " << a.target;
            if (a.tag) os << " @" << *a.tag;
            os << "\n";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Rule sets (text)

const Rule* RuleSetDocument::find_rule(std::string_view name) const {
    for (const auto& r : rules)
        if (r.name == name) return &r;
    return nullptr;
}

const HostDecl* RuleSetDocument::find_host(std::string_view name) const {
    for (const auto& h : hosts)
        if (h.name == name) return &h;
    return nullptr;
}

namespace {

Rule rule_from_stanza(const Stanza& s) {
    if (s.args.size() != 1 || !s.block) fail(s, "expected 'rule NAME {'");
    std::vector<std::string> labels;
    const Stanza *lhs = nullptr, *iface = nullptr, *rhs = nullptr;
    Formula phi = Formula::truth();
    for (const auto& c : s.children) {
        if (c.key == "labels") {
            for (const auto& a : c.args) {
                if (!is_identifier(a)) fail(c, "label '" + a + "' is not a valid variable name");
                labels.push_back(a);
            }
        } else if (c.key == "lhs" || c.key == "interface" || c.key == "rhs") {
            if (!c.block || !c.args.empty()) fail(c, "expected '" + c.key + " {'");
            const Stanza*& slot = c.key == "lhs" ? lhs : c.key == "interface" ? iface : rhs;
            if (slot) fail(c, "duplicate '" + c.key + "'");
            slot = &c;
        } else if (c.key == "formula") {
            phi = formula_of(c);
        } else {
            fail(c, "unexpected '" + c.key + "' in rule");
        }
    }
    if (!lhs || !iface || !rhs) fail(s, "rule '" + s.args[0] + "' needs lhs, interface and rhs blocks");
    try {
        return Rule::make(s.args[0], graph_from_block(*lhs, false, labels), graph_from_block(*iface, false, labels),
                          graph_from_block(*rhs, false, labels), phi);
    } catch (const InvalidInput& e) {
        fail(s, e.what());
    }
}

HostDecl host_from_stanza(const Stanza& s) {
    if (s.args.size() != 1 || !s.block) fail(s, "expected 'host NAME {'");
    bool grounded = false;
    for (const auto& c : s.children)
        if (c.key == "grounded") grounded = true;
    EGraph g;
    std::optional<Formula> phi;
    for (const auto& c : s.children) {
        if (c.key == "grounded") continue;
        if (c.key == "formula") {
            phi = formula_of(c);
            continue;
        }
        if (!apply_graph_stanza(g, c, grounded)) fail(c, "unexpected '" + c.key + "' in host");
    }
    HostDecl h;
    h.name = s.args[0];
    h.graph.graph = share(std::move(g));
    h.graph.grounded = grounded;
    if (grounded) {
        if (phi) fail(s, "grounded hosts take no formula");
        h.graph.formula = constant_bindings(*h.graph.graph);
    } else if (phi) {
        h.graph.formula = *phi;
    }
    try {
        h.graph.validate();
    } catch (const InvalidInput& e) {
        fail(s, e.what());
    }
    return h;
}

void check_unique(const RuleSetDocument& doc) {
    std::set<std::string> seen;
    for (const auto& r : doc.rules)
        if (!seen.insert(r.name).second) throw InvalidInput("duplicate rule '" + r.name + "'");
    seen.clear();
    for (const auto& h : doc.hosts)
        if (!seen.insert(h.name).second) throw InvalidInput("duplicate host '" + h.name + "'");
}

}  // namespace

RuleSetDocument parse_rule_set(std::string_view text) {
    RuleSetDocument doc;
    for (const auto& s : parse_stanzas(text)) {
        if (s.key == "algebra") {
            if (s.args.size() != 1 || s.args[0] != "int") fail(s, "only 'algebra int' is supported");
        } else if (s.key == "rule") {
            doc.rules.push_back(rule_from_stanza(s));
        } else if (s.key == "host") {
            doc.hosts.push_back(host_from_stanza(s));
        } else {
            fail(s, "unexpected '" + s.key + "' at top level");
        }
    }
    check_unique(doc);
    return doc;
}

std::string print_rule_set(const RuleSetDocument& doc) {
    std::ostringstream os;
    os << "algebra " << doc.algebra << "\n";
    for (const auto& r : doc.rules) {
        os << "\nrule " << r.name << " {\n";
        if (!r.lhs->labels().empty()) {
            os << "  labels";
            for (const auto& l : r.lhs->labels()) os << ' ' << l;
            os << "\n";
        }
        auto block = [&](const char* name, const EGraph& g) {
            // Labels are declared once per rule.
            os << "  " << name << " {\n";
            std::string text = print_graph_body(g, 2);
            std::istringstream lines(text);
            for (std::string line; std::getline(lines, line);)
                if (line.rfind("    label", 0) != 0) os << line << "\n";
            os << "  }\n";
        };
        block("lhs", *r.lhs);
        block("interface", *r.interface);
        block("rhs", *r.rhs);
        os << "  formula " << to_string(r.formula) << "\n";
        os << "}\n";
    }
    for (const auto& h : doc.hosts) {
        os << "\nhost " << h.name << " {\n";
        if (h.graph.grounded) os << "  grounded\n";
        os << print_graph_body(*h.graph.graph, 1);
        if (!h.graph.grounded && h.graph.formula.kind() != Formula::Kind::True)
            os << "  formula " << to_string(h.graph.formula) << "\n";
        os << "}\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Rule sets (JSON)

namespace {

json graph_json(const EGraph& g) {
    json j;
    j["nodes"] = g.ids(Sort::Node);
    j["labels"] = g.ids(Sort::Label);
    for (Sort s : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        json arr = json::array();
        for (const auto& [id, a] : g.arrows(s)) {
            json e{{"id", id}, {"source", a.source}, {"target", a.target}};
            if (a.tag) e["tag"] = *a.tag;
            arr.push_back(std::move(e));
        }
        j[s == Sort::Edge ? "edges" : s == Sort::NodeAttr ? "attrs" : "eattrs"] = std::move(arr);
    }
    return j;
}

EGraph graph_from_json(const json& j, bool grounded, const std::vector<std::string>& shared_labels) {
    EGraph g;
    for (const auto& l : shared_labels) g.add_label(l);
    for (const auto& n : j.value("nodes", json::array())) g.add_node(n.get<std::string>());
    for (const auto& l : j.value("labels", json::array())) {
        std::string v = ground_target(l.get<std::string>(), grounded);
        if (!is_identifier(v)) throw InvalidInput("label '" + v + "' is not a valid variable name");
        if (!g.contains(Sort::Label, v)) g.add_label(v);
    }
    for (Sort s : {Sort::Edge, Sort::NodeAttr, Sort::EdgeAttr}) {
        const char* key = s == Sort::Edge ? "edges" : s == Sort::NodeAttr ? "attrs" : "eattrs";
        for (const auto& e : j.value(key, json::array())) {
            Arrow a{e.at("source").get<std::string>(), e.at("target").get<std::string>(), std::nullopt};
            if (e.contains("tag")) a.tag = e.at("tag").get<std::string>();
            if (s != Sort::Edge) {
                a.target = ground_target(a.target, grounded);
                if (grounded && !g.contains(Sort::Label, a.target) && constant_value(a.target))
                    g.add_label(a.target);
            }
            g.add(s, e.at("id").get<std::string>(), a);
        }
    }
    g.validate();
    return g;
}

[[noreturn]] void rethrow_json(const json::parse_error& e, std::string_view text) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    throw ParseError(line, col, "invalid JSON");
}

}  // namespace

RuleSetDocument parse_rule_set_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        rethrow_json(e, text);
    }
    RuleSetDocument doc;
    try {
        if (j.value("algebra", std::string("int")) != "int") throw InvalidInput("only algebra 'int' is supported");
        for (const auto& r : j.value("rules", json::array())) {
            std::vector<std::string> labels;
            for (const auto& l : r.value("labels", json::array())) labels.push_back(l.get<std::string>());
            doc.rules.push_back(Rule::make(r.at("name").get<std::string>(), graph_from_json(r.at("lhs"), false, labels),
                                           graph_from_json(r.at("interface"), false, labels),
                                           graph_from_json(r.at("rhs"), false, labels),
                                           parse_formula(r.value("formula", std::string("true")))));
        }
        for (const auto& h : j.value("hosts", json::array())) {
            HostDecl d;
            d.name = h.at("name").get<std::string>();
            d.graph.grounded = h.value("grounded", false);
            d.graph.graph = share(graph_from_json(h.at("graph"), d.graph.grounded, {}));
            if (d.graph.grounded) d.graph.formula = constant_bindings(*d.graph.graph);
            else d.graph.formula = parse_formula(h.value("formula", std::string("true")));
            d.graph.validate();
            doc.hosts.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed rule set: ") + e.what());
    }
    check_unique(doc);
    return doc;
}

std::string print_rule_set_json(const RuleSetDocument& doc) {
    json j;
    j["algebra"] = doc.algebra;
    j["rules"] = json::array();
    for (const auto& r : doc.rules) {
        auto strip = [](const EGraph& g) {
            json x = graph_json(g);
            x.erase("labels");
            return x;
        };
        j["rules"].push_back({{"name", r.name},
                              {"labels", r.lhs->ids(Sort::Label)},
                              {"lhs", strip(*r.lhs)},
                              {"interface", strip(*r.interface)},
                              {"rhs", strip(*r.rhs)},
                              {"formula", to_string(r.formula)}});
    }
    j["hosts"] = json::array();
    for (const auto& h : doc.hosts) {
        json x{{"name", h.name}, {"grounded", h.graph.grounded}, {"graph", graph_json(*h.graph.graph)}};
        if (!h.graph.grounded) x["formula"] = to_string(h.graph.formula);
        j["hosts"].push_back(std::move(x));
    }
    return j.dump(2) + "\n";
}

RuleSetDocument load_rule_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return is_json ? parse_rule_set_json(ss.str()) : parse_rule_set(ss.str());
}

// ---------------------------------------------------------------------------
// Reports

namespace {

bool same_graph(const SymbolicGraph& a, const SymbolicGraph& b) {
    return *a.graph == *b.graph && a.grounded == b.grounded && to_string(a.formula) == to_string(b.formula);
}

}  // namespace

bool EntryRecord::operator==(const EntryRecord& o) const {
    auto same_ev = [](const std::vector<DependenceEvidence>& a, const std::vector<DependenceEvidence>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].missing != b[i].missing || a[i].deleting_rule != b[i].deleting_rule || a[i].sort != b[i].sort ||
                a[i].element != b[i].element)
                return false;
        return true;
    };
    return index == o.index && classification == o.classification && indeterminate == o.indeterminate &&
           untracked_confluent == o.untracked_confluent && same_graph(context, o.context) && o1 == o.o1 &&
           o2 == o.o2 && same_ev(evidence, o.evidence) && has_witness == o.has_witness && close1 == o.close1 &&
           close2 == o.close2 && to_string(x1_formula) == to_string(o.x1_formula) &&
           to_string(x2_formula) == to_string(o.x2_formula) && iso == o.iso;
}

bool PairRecord::operator==(const PairRecord& o) const {
    return rule1 == o.rule1 && rule2 == o.rule2 && conflicting == o.conflicting &&
           gluing_skipped == o.gluing_skipped && stats.queries == o.stats.queries && stats.sat == o.stats.sat &&
           stats.unsat == o.stats.unsat && stats.unknown == o.stats.unknown &&
           stats.escalated == o.stats.escalated && entries == o.entries;
}

bool ReportDocument::operator==(const ReportDocument& o) const {
    auto ms = [](const std::optional<double>& d) { return d ? static_cast<long long>(*d * 1000 + 0.5) : -1LL; };
    return version == o.version && backend == o.backend && command == o.command && timeout_ms == o.timeout_ms &&
           logic == o.logic && mode == o.mode && conflicting == o.conflicting && pairs == o.pairs &&
           ms(elapsed_ms) == ms(o.elapsed_ms);
}

PairRecord make_pair_record(const PairReport& report) {
    PairRecord p;
    p.rule1 = report.rule1;
    p.rule2 = report.rule2;
    p.conflicting = report.conflicting;
    p.gluing_skipped = report.gluing_skipped;
    p.stats = report.stats;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        EntryRecord r;
        r.index = i;
        r.classification = e.classification;
        r.indeterminate = e.indeterminate;
        r.untracked_confluent = e.untracked_confluent;
        r.context = e.overlap.context;
        r.o1 = e.overlap.o1.maps;
        r.o2 = e.overlap.o2.maps;
        r.evidence = e.dependence.evidence;
        if (e.witness) {
            r.has_witness = true;
            r.close1 = e.witness->close1.match.maps;
            r.close2 = e.witness->close2.match.maps;
            r.x1_formula = e.witness->close1.output.formula;
            r.x2_formula = e.witness->close2.output.formula;
            r.iso = e.witness->iso.maps;
        }
        p.entries.push_back(std::move(r));
    }
    return p;
}

std::string print_maps(const MapSet& maps, int indent) {
    std::ostringstream os;
    for (Sort s : kAllSorts)
        for (const auto& [x, y] : maps[index_of(s)]) os << pad(indent) << sort_name(s) << ' ' << x << " -> " << y << "\n";
    return os.str();
}

namespace {

std::string fmt_ms(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* verdict_word(bool conflicting) { return conflicting ? "conflicting" : "non-conflicting"; }

void print_block(std::ostringstream& os, int indent, const std::string& head, const std::string& body) {
    os << pad(indent) << head << " {\n" << body << pad(indent) << "}\n";
}

}  // namespace

std::string print_report(const ReportDocument& doc) {
    std::ostringstream os;
    os << "report {\n";
    os << "  version " << doc.version << "\n";
    os << "  solver " << doc.backend << "\n";
    if (!doc.command.empty()) os << "  command " << doc.command << "\n";
    os << "  timeout-ms " << doc.timeout_ms << "\n";
    os << "  logic " << doc.logic << "\n";
    os << "  mode " << doc.mode << "\n";
    os << "  verdict " << verdict_word(doc.conflicting) << "\n";
    if (doc.elapsed_ms) os << "  elapsed-ms " << fmt_ms(*doc.elapsed_ms) << "\n";
    for (const auto& p : doc.pairs) {
        os << "  pair " << p.rule1 << ' ' << p.rule2 << " {\n";
        os << "    verdict " << verdict_word(p.conflicting) << "\n";
        os << "    gluing-skipped " << p.gluing_skipped << "\n";
        os << "    stats queries " << p.stats.queries << " sat " << p.stats.sat << " unsat " << p.stats.unsat
           << " unknown " << p.stats.unknown << " escalated " << p.stats.escalated << "\n";
        for (const auto& e : p.entries) {
            os << "    overlap " << e.index << ' ' << to_string(e.classification) << " {\n";
            if (e.indeterminate) os << "      indeterminate\n";
            if (e.untracked_confluent) os << "      untracked-confluent\n";
            std::string ctx = print_graph_body(*e.context.graph, 4);
            ctx += "        formula " + to_string(e.context.formula) + "\n";
            print_block(os, 3, "context", ctx);
            print_block(os, 3, "o1", print_maps(e.o1, 4));
            print_block(os, 3, "o2", print_maps(e.o2, 4));
            for (const auto& ev : e.evidence)
                os << "      evidence " << ev.missing << ' ' << ev.deleting_rule << ' ' << sort_name(ev.sort) << ' '
                   << ev.element << "\n";
            if (e.has_witness) {
                std::ostringstream w;
                print_block(w, 4, "close1", print_maps(e.close1, 5));
                print_block(w, 4, "close2", print_maps(e.close2, 5));
                w << pad(4) << "x1-formula " << to_string(e.x1_formula) << "\n";
                w << pad(4) << "x2-formula " << to_string(e.x2_formula) << "\n";
                print_block(w, 4, "iso", print_maps(e.iso, 5));
                print_block(os, 3, "witness", w.str());
            }
            os << "    }\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

namespace {

bool parse_verdict(const Stanza& s) {
    if (s.args.size() != 1 || (s.args[0] != "conflicting" && s.args[0] != "non-conflicting"))
        fail(s, "expected 'verdict conflicting|non-conflicting'");
    return s.args[0] == "conflicting";
}

std::uint64_t parse_count(const Stanza& s, const std::string& text) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) fail(s, "expected a number, found '" + text + "'");
    return v;
}

MapSet maps_from(const Stanza& block) {
    MapSet m{};
    for (const auto& c : block.children) {
        auto sort = parse_sort(c.key);
        if (!sort || c.args.size() != 3 || c.args[1] != "->") fail(c, "expected 'SORT ID -> ID'");
        m[index_of(*sort)][c.args[0]] = c.args[2];
    }
    return m;
}

EntryRecord entry_from(const Stanza& s) {
    if (s.args.size() != 2 || !s.block) fail(s, "expected 'overlap INDEX CLASSIFICATION {'");
    EntryRecord e;
    e.index = parse_count(s, s.args[0]);
    auto cls = parse_classification(s.args[1]);
    if (!cls) fail(s, "unknown classification '" + s.args[1] + "'");
    e.classification = *cls;
    for (const auto& c : s.children) {
        if (c.key == "indeterminate") {
            e.indeterminate = true;
        } else if (c.key == "untracked-confluent") {
            e.untracked_confluent = true;
        } else if (c.key == "context") {
            EGraph g;
            Formula phi = Formula::truth();
            for (const auto& x : c.children) {
                if (x.key == "formula") phi = formula_of(x);
                else if (!apply_graph_stanza(g, x, false)) fail(x, "unexpected '" + x.key + "' in context");
            }
            e.context.graph = share(std::move(g));
            e.context.formula = phi;
        } else if (c.key == "o1") {
            e.o1 = maps_from(c);
        } else if (c.key == "o2") {
            e.o2 = maps_from(c);
        } else if (c.key == "evidence") {
            if (c.args.size() != 4 || !parse_sort(c.args[2])) fail(c, "expected 'evidence i|j RULE SORT ID'");
            e.evidence.push_back({c.args[0], c.args[1], *parse_sort(c.args[2]), c.args[3]});
        } else if (c.key == "witness") {
            e.has_witness = true;
            for (const auto& w : c.children) {
                if (w.key == "close1") e.close1 = maps_from(w);
                else if (w.key == "close2") e.close2 = maps_from(w);
                else if (w.key == "iso") e.iso = maps_from(w);
                else if (w.key == "x1-formula") e.x1_formula = formula_of(w);
                else if (w.key == "x2-formula") e.x2_formula = formula_of(w);
                else fail(w, "unexpected '" + w.key + "' in witness");
            }
        } else {
            fail(c, "unexpected '" + c.key + "' in overlap");
        }
    }
    return e;
}

}  // namespace

ReportDocument parse_report(std::string_view text) {
    auto top = parse_stanzas(text);
    if (top.size() != 1 || top[0].key != "report" || !top[0].block)
        throw ParseError(top.empty() ? 1 : top[0].line, 1, "expected a single 'report {' block");
    ReportDocument doc;
    for (const auto& s : top[0].children) {
        auto one = [&]() -> const std::string& {
            if (s.args.size() != 1) fail(s, "'" + s.key + "' takes one value");
            return s.args[0];
        };
        if (s.key == "version") doc.version = one();
        else if (s.key == "solver") doc.backend = one();
        else if (s.key == "command") doc.command = s.rest;
        else if (s.key == "timeout-ms") doc.timeout_ms = static_cast<int>(parse_count(s, one()));
        else if (s.key == "logic") doc.logic = one();
        else if (s.key == "mode") doc.mode = one();
        else if (s.key == "verdict") doc.conflicting = parse_verdict(s);
        else if (s.key == "elapsed-ms") doc.elapsed_ms = std::stod(one());
        else if (s.key == "pair") {
            if (s.args.size() != 2 || !s.block) fail(s, "expected 'pair RULE RULE {'");
            PairRecord p;
            p.rule1 = s.args[0];
            p.rule2 = s.args[1];
            for (const auto& c : s.children) {
                if (c.key == "verdict") {
                    p.conflicting = parse_verdict(c);
                } else if (c.key == "gluing-skipped") {
                    if (c.args.size() != 1) fail(c, "'gluing-skipped' takes one value");
                    p.gluing_skipped = parse_count(c, c.args[0]);
                } else if (c.key == "stats") {
                    const auto& a = c.args;
                    if (a.size() != 10) fail(c, "malformed stats line");
                    p.stats.queries = parse_count(c, a[1]);
                    p.stats.sat = parse_count(c, a[3]);
                    p.stats.unsat = parse_count(c, a[5]);
                    p.stats.unknown = parse_count(c, a[7]);
                    p.stats.escalated = parse_count(c, a[9]);
                } else if (c.key == "overlap") {
                    p.entries.push_back(entry_from(c));
                } else {
                    fail(c, "unexpected '" + c.key + "' in pair");
                }
            }
            doc.pairs.push_back(std::move(p));
        } else {
            fail(s, "unexpected '" + s.key + "' in report");
        }
    }
    return doc;
}

namespace {

json maps_json(const MapSet& m) {
    json j = json::object();
    for (Sort s : kAllSorts) {
        if (m[index_of(s)].empty()) continue;
        json x = json::object();
        for (const auto& [a, b] : m[index_of(s)]) x[a] = b;
        j[std::string(sort_name(s))] = std::move(x);
    }
    return j;
}

MapSet maps_from_json(const json& j) {
    MapSet m{};
    for (const auto& [k, v] : j.items()) {
        auto s = parse_sort(k);
        if (!s) throw InvalidInput("unknown sort '" + k + "'");
        for (const auto& [a, b] : v.items()) m[index_of(*s)][a] = b.get<std::string>();
    }
    return m;
}

}  // namespace

std::string print_report_json(const ReportDocument& doc) {
    json j;
    j["version"] = doc.version;
    json solver{{"backend", doc.backend}};
    if (!doc.command.empty()) solver["command"] = doc.command;
    solver["timeout_ms"] = doc.timeout_ms;
    solver["logic"] = doc.logic;
    j["solver"] = std::move(solver);
    j["mode"] = doc.mode;
    j["verdict"] = verdict_word(doc.conflicting);
    if (doc.elapsed_ms) j["elapsed_ms"] = fmt_ms(*doc.elapsed_ms);
    j["pairs"] = json::array();
    for (const auto& p : doc.pairs) {
        json pj{{"rule1", p.rule1},
                {"rule2", p.rule2},
                {"verdict", verdict_word(p.conflicting)},
                {"gluing_skipped", p.gluing_skipped},
                {"stats",
                 {{"queries", p.stats.queries},
                  {"sat", p.stats.sat},
                  {"unsat", p.stats.unsat},
                  {"unknown", p.stats.unknown},
                  {"escalated", p.stats.escalated}}}};
        json entries = json::array();
        for (const auto& e : p.entries) {
            json ej{{"index", e.index}, {"classification", std::string(to_string(e.classification))}};
            if (e.indeterminate) ej["indeterminate"] = true;
            if (e.untracked_confluent) ej["untracked_confluent"] = true;
            json ctx = graph_json(*e.context.graph);
            ctx["formula"] = to_string(e.context.formula);
            ej["context"] = std::move(ctx);
            ej["o1"] = maps_json(e.o1);
            ej["o2"] = maps_json(e.o2);
            if (!e.evidence.empty()) {
                json ev = json::array();
                for (const auto& d : e.evidence)
                    ev.push_back({{"missing", d.missing},
                                  {"deleting_rule", d.deleting_rule},
                                  {"sort", std::string(sort_name(d.sort))},
                                  {"element", d.element}});
                ej["evidence"] = std::move(ev);
            }
            if (e.has_witness) {
                ej["witness"] = {{"close1", maps_json(e.close1)},
                                 {"close2", maps_json(e.close2)},
                                 {"x1_formula", to_string(e.x1_formula)},
                                 {"x2_formula", to_string(e.x2_formula)},
                                 {"iso", maps_json(e.iso)}};
            }
            entries.push_back(std::move(ej));
        }
        pj["overlaps"] = std::move(entries);
        j["pairs"].push_back(std::move(pj));
    }
    return j.dump(2) + "\n";
}

ReportDocument parse_report_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        rethrow_json(e, text);
    }
    ReportDocument doc;
    try {
        doc.version = j.at("version").get<std::string>();
        const auto& s = j.at("solver");
        doc.backend = s.at("backend").get<std::string>();
        doc.command = s.value("command", std::string());
        doc.timeout_ms = s.at("timeout_ms").get<int>();
        doc.logic = s.at("logic").get<std::string>();
        doc.mode = j.at("mode").get<std::string>();
        doc.conflicting = j.at("verdict").get<std::string>() == "conflicting";
        if (j.contains("elapsed_ms")) doc.elapsed_ms = std::stod(j.at("elapsed_ms").get<std::string>());
        for (const auto& pj : j.at("pairs")) {
            PairRecord p;
            p.rule1 = pj.at("rule1").get<std::string>();
            p.rule2 = pj.at("rule2").get<std::string>();
            p.conflicting = pj.at("verdict").get<std::string>() == "conflicting";
            p.gluing_skipped = pj.at("gluing_skipped").get<std::size_t>();
            const auto& st = pj.at("stats");
            p.stats.queries = st.at("queries").get<std::uint64_t>();
            p.stats.sat = st.at("sat").get<std::uint64_t>();
            p.stats.unsat = st.at("unsat").get<std::uint64_t>();
            p.stats.unknown = st.at("unknown").get<std::uint64_t>();
            p.stats.escalated = st.at("escalated").get<std::uint64_t>();
            for (const auto& ej : pj.at("overlaps")) {
                EntryRecord e;
                e.index = ej.at("index").get<std::size_t>();
                auto cls = parse_classification(ej.at("classification").get<std::string>());
                if (!cls) throw InvalidInput("unknown classification");
                e.classification = *cls;
                e.indeterminate = ej.value("indeterminate", false);
                e.untracked_confluent = ej.value("untracked_confluent", false);
                e.context.graph = share(graph_from_json(ej.at("context"), false, {}));
                e.context.formula = parse_formula(ej.at("context").at("formula").get<std::string>());
                e.o1 = maps_from_json(ej.at("o1"));
                e.o2 = maps_from_json(ej.at("o2"));
                for (const auto& d : ej.value("evidence", json::array())) {
                    auto sort = parse_sort(d.at("sort").get<std::string>());
                    if (!sort) throw InvalidInput("unknown sort in evidence");
                    e.evidence.push_back({d.at("missing").get<std::string>(), d.at("deleting_rule").get<std::string>(),
                                          *sort, d.at("element").get<std::string>()});
                }
                if (ej.contains("witness")) {
                    const auto& w = ej.at("witness");
                    e.has_witness = true;
                    e.close1 = maps_from_json(w.at("close1"));
                    e.close2 = maps_from_json(w.at("close2"));
                    e.x1_formula = parse_formula(w.at("x1_formula").get<std::string>());
                    e.x2_formula = parse_formula(w.at("x2_formula").get<std::string>());
                    e.iso = maps_from_json(w.at("iso"));
                }
                p.entries.push_back(std::move(e));
            }
            doc.pairs.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed report: ") + e.what());
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Derivation traces

std::string print_derivation(const Derivation& d, int indent) {
    std::ostringstream os;
    os << pad(indent) << "derivation " << d.rule.name << ' ' << to_string(d.kind) << " {\n";
    print_block(os, indent + 1, "match", print_maps(d.match.maps, indent + 2));
    std::string in = print_graph_body(*d.input.graph, indent + 2);
    in += pad(indent + 2) + "formula " + to_string(d.input.formula) + "\n";
    print_block(os, indent + 1, "input", in);
    std::string out = print_graph_body(*d.output.graph, indent + 2);
    out += pad(indent + 2) + "formula " + to_string(d.output.formula) + "\n";
    print_block(os, indent + 1, "output", out);
    print_block(os, indent + 1, "comatch", print_maps(d.comatch.maps, indent + 2));
    os << pad(indent) << "}\n";
    return os.str();
}

}  // namespace sygra
