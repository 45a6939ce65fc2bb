#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sys/wait.h>

#include "support.hpp"

using namespace sygra;
using namespace sygra::testing;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string(SYGRA_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string rules_path(const char* f) { return std::string(SYGRA_RULES_DIR) + "/" + f; }

std::string temp_file(const std::string& name, const std::string& content) {
    std::string path = "/tmp/sygra_cli_" + name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("analyze the increments") {
    auto r = cli("analyze " + rules_path("running.sygra"));
    CHECK(r.status == 0);
    auto doc = parse_report(r.out);
    CHECK_FALSE(doc.conflicting);
    CHECK(doc.pairs.size() == 4);
    CHECK(r.out.find("DirectlyConfluent") != std::string::npos);
}

TEST_CASE("analyze increment against reset") {
    auto r = cli("analyze --no-self " + rules_path("conflict.sygra"));
    CHECK(r.status == 1);
    auto doc = parse_report(r.out);
    CHECK(doc.conflicting);
    CHECK(doc.pairs.size() == 2);
    CHECK(r.out.find("context {") != std::string::npos);
}

TEST_CASE("analyze an empty rule set") {
    auto r = cli("analyze " + temp_file("empty.sygra", "algebra int\n"));
    CHECK(r.status == 0);
    CHECK(parse_report(r.out).pairs.empty());
}

TEST_CASE("JSON output by extension") {
    std::string out = "/tmp/sygra_cli_report.json";
    auto r = cli("analyze " + rules_path("running.sygra") + " --out " + out);
    CHECK(r.status == 0);
    std::ifstream in(out);
    std::string json((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK_FALSE(parse_report_json(json).conflicting);
}

TEST_CASE("usage and parse errors exit with 2") {
    CHECK(cli("").status == 2);
    CHECK(cli("analyze").status == 2);
    CHECK(cli("analyze --solver magic " + rules_path("running.sygra")).status == 2);
    CHECK(cli("analyze /nonexistent.sygra").status == 2);
    CHECK(cli("analyze " + temp_file("bad.sygra", "rule r {\n")).status == 2);
}

TEST_CASE("solver launch failure exits with 3") {
    auto r = cli("analyze --solver external --smt-cmd /nonexistent/z3 " + rules_path("running.sygra"));
    CHECK(r.status == 3);
}

TEST_CASE("external backend gives the same verdicts") {
    if (!have_z3()) return;
    auto a = cli("analyze " + rules_path("conflict.sygra"));
    auto b = cli("analyze --solver external --smt-cmd '" SYGRA_Z3 " -in' " + rules_path("conflict.sygra"));
    CHECK(b.status == a.status);
    auto da = parse_report(a.out);
    auto db = parse_report(b.out);
    REQUIRE(da.pairs.size() == db.pairs.size());
    for (std::size_t i = 0; i < da.pairs.size(); ++i) {
        REQUIRE(da.pairs[i].entries.size() == db.pairs[i].entries.size());
        for (std::size_t j = 0; j < da.pairs[i].entries.size(); ++j)
            CHECK(da.pairs[i].entries[j].classification == db.pairs[i].entries[j].classification);
    }
}

TEST_CASE("apply prints the derivation") {
    auto r = cli("apply " + rules_path("running.sygra") + " --rule inc1 --host g42");
    CHECK(r.status == 0);
    CHECK(r.out.find("matches 1") != std::string::npos);
    CHECK(r.out.find("attr b: n -> c_43") != std::string::npos);
}

TEST_CASE("apply without a match exits with 1") {
    std::string f = temp_file("nomatch.sygra", "rule r {\n  lhs {\n    node n\n  }\n  interface {\n    node n\n  }\n"
                                               "  rhs {\n    node n\n  }\n}\nhost h {\n}\n");
    CHECK(cli("apply " + f + " --rule r --host h").status == 1);
    CHECK(cli("apply " + f + " --rule nope --host h").status == 2);
}

TEST_CASE("apply with an empty left-hand side") {
    std::string f = temp_file("emptylhs.sygra", "rule mk {\n  lhs {\n  }\n  interface {\n  }\n  rhs {\n    node n\n  }\n}\n"
                                                "host h {\n  node m\n}\n");
    auto r = cli("apply " + f + " --rule mk --host h");
    CHECK(r.status == 0);
    CHECK(r.out.find("matches 1") != std::string::npos);
}

TEST_CASE("apply by narrowing notes fresh variables") {
    std::string f = temp_file("narrow.sygra", "rule inc1 {\n  labels x x'\n  lhs {\n    node n\n    attr a: n -> x\n  }\n"
                                              "  interface {\n    node n\n  }\n  rhs {\n    node n\n    attr b: n -> x'\n  }\n"
                                              "  formula x' = x + 1\n}\nhost h {\n  node n\n  label y\n  attr a: n -> y\n"
                                              "  formula y >= 0\n}\n");
    CHECK(cli("apply " + f + " --rule inc1 --host h --mode symbolic").status == 1);
    auto r = cli("apply " + f + " --rule inc1 --host h --mode narrowing");
    CHECK(r.status == 0);
    CHECK(r.out.find("fresh _v0") != std::string::npos);
}

TEST_CASE("oracle command") {
    auto r = cli("oracle " + rules_path("running.sygra") + " --trials 100");
    CHECK(r.status == 0);
    CHECK(r.out.find("violations 0") != std::string::npos);
    auto zero = cli("oracle " + rules_path("running.sygra") + " --trials 0");
    CHECK(zero.status == 0);
    CHECK(zero.out.find("trials 0") != std::string::npos);
    auto c = cli("oracle " + rules_path("conflict.sygra") + " --pairs inc1:setZero --trials 50");
    CHECK(c.status == 0);
    CHECK(c.out.find("row inc1 setZero") != std::string::npos);
}

TEST_CASE("same input, same report") {
    auto a = cli("analyze " + rules_path("pool.sygra"));
    auto b = cli("analyze " + rules_path("pool.sygra"));
    CHECK(a.out == b.out);
}
