#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stacl/diagram.hpp"
#include "stacl/generator.hpp"
#include "stacl/model.hpp"
#include "stacl/parser.hpp"

#include <set>

using namespace stacl;

namespace {

DataGenerator gen(std::string id, std::map<std::string, std::string> m) {
    DataGenerator g;
    g.id = std::move(id);
    for (const auto& [x, t] : m) g.assign[x] = t.empty() ? std::nullopt : std::optional(parse_causal_term(t));
    return g;
}

std::vector<Assign> set(const std::string& text) { return make_assigns(parse_assigns(text)); }

}  // namespace

TEST_CASE("causal terms classify atoms lexically") {
    auto t = parse_causal_term("f2(x, c1, n)");
    REQUIRE(t.kind == CausalTerm::Kind::App);
    CHECK(t.args[0].kind == CausalTerm::Kind::Var);
    CHECK(t.args[1].kind == CausalTerm::Kind::Const);
    CHECK(t.args[2].kind == CausalTerm::Kind::Name);
    CHECK(fv(t) == std::set<std::string>{"x"});
    CHECK(fnc(t) == std::set<std::string>{"c1", "n"});
    CHECK(to_string(t) == "f2(x, c1, n)");
    CHECK(parse_causal_term("1").kind == CausalTerm::Kind::Const);
    CHECK_THROWS_AS(parse_causal_term("f(g(x))"), std::invalid_argument);
    CHECK_THROWS_AS(parse_causal_term("f"), std::invalid_argument);
    CHECK_THROWS_AS(parse_causal_term("dsep"), std::invalid_argument);
}

TEST_CASE("validate: acyclic, cyclic and open generators") {
    CHECK(validate(gen("g1", {{"x", "f(z)"}, {"z", "f(c1)"}})).ok());

    auto r2 = validate(gen("g2", {{"x", "f(z)"}, {"z", "f(x)"}}));
    REQUIRE(r2.violations.size() == 1);
    CHECK(r2.violations[0].kind == Violation::Kind::Cycle);
    CHECK(r2.violations[0].vars == std::vector<std::string>{"x", "z"});

    auto r3 = validate(gen("g3", {{"x", "f(y)"}}));
    REQUIRE_FALSE(r3.ok());
    CHECK(r3.violations[0].kind == Violation::Kind::NotClosed);
    CHECK(r3.violations[0].vars == std::vector<std::string>{"x"});

    auto r4 = validate(gen("g4", {{"x", "f(w)"}, {"w", ""}}));
    REQUIRE_FALSE(r4.ok());
    CHECK(r4.violations[0].kind == Violation::Kind::NotClosed);

    auto r5 = validate(gen("g5", {{"x", "x"}}));
    REQUIRE_FALSE(r5.ok());
    CHECK(r5.violations[0].kind == Violation::Kind::Cycle);
    CHECK_THROWS_AS(require_valid(gen("g2", {{"x", "f(z)"}, {"z", "f(x)"}})), std::invalid_argument);
}

TEST_CASE("topological order") {
    auto g = gen("g", {{"z", "f3(x, y)"}, {"y", "f2(x, c1)"}, {"x", "f1(n)"}});
    CHECK(topo_order(g) == std::vector<std::string>{"x", "y", "z"});
    CHECK(topo_order(gen("g", {{"b", "n"}, {"a", "m"}})) == std::vector<std::string>{"a", "b"});
    CHECK(topo_order(gen("g", {{"x", "n"}})) == std::vector<std::string>{"x"});
}

TEST_CASE("diagram of the example generator") {
    auto g = gen("g", {{"x", "f1(n)"}, {"y", "f2(x, c1)"}, {"z", "f3(x, y)"}, {"w", ""}});
    Diagram d(g);
    using E = std::pair<std::string, std::string>;
    std::vector<E> want{{"c1", "y"}, {"n", "x"}, {"x", "y"}, {"x", "z"}, {"y", "z"}};
    CHECK(d.edges() == want);
    CHECK(d.endogenous() == std::vector<std::string>{"x", "y", "z"});
    CHECK(d.exogenous() == std::set<std::string>{"c1", "n"});
    Diagram single(gen("g", {{"x", "n"}}));
    CHECK(single.edges() == std::vector<E>{{"n", "x"}});
}

TEST_CASE("eager intervention") {
    auto g = gen("g", {{"x", "f1(z, n1)"}, {"y", "f2(n2, x)"}, {"z", "n3"}});
    auto e = intervene_eager(g, set("x:=c1"));
    CHECK(e.at("x") == CausalTerm::constant("c1"));
    CHECK(e.at("y") == g.at("y"));
    CHECK(intervene_eager(gen("g", {{"x", "c0"}}), set("x:=c1")).at("x") == CausalTerm::constant("c1"));
    CHECK(intervene_eager(e, set("x:=c1")) == e);
    CHECK_THROWS_AS(intervene_eager(g, set("q:=c1")), std::invalid_argument);

    // Simultaneous and sequential interventions on disjoint variables agree.
    CHECK(intervene_eager(g, set("x:=c1,z:=c0")) == intervene_eager(intervene_eager(g, set("x:=c1")), set("z:=c0")));
    Diagram d(e);
    for (const auto& [from, to] : d.edges())
        if (to == "x") CHECK(from == "c1");
}

TEST_CASE("lazy intervention") {
    auto g = gen("g", {{"x", "f1(z, n1)"}, {"y", "f2(n2, x)"}, {"z", "n3"}});
    auto l = intervene_lazy(g, set("x:=c1"));
    CHECK(l.at("x") == g.at("x"));
    CHECK(to_string(l.at("y")) == "f2(n2, c1)");
    CHECK(l.at("z") == g.at("z"));
    Diagram d(l);
    for (const auto& [from, to] : d.edges()) CHECK(from != "x");
    auto leaf = gen("g", {{"x", "n"}, {"y", "f(x)"}});
    CHECK(intervene_lazy(leaf, set("y:=c0")) == leaf);
    CHECK(validate(l).ok());
}

TEST_CASE("expansion") {
    auto g = gen("g", {{"y", "f(x)"}, {"x", "n"}});
    auto e = expand(g);
    CHECK(e.at("x") == CausalTerm::name("n"));
    CHECK(e.at("x'") == CausalTerm::var("x"));
    CHECK(to_string(e.at("y")) == "f(x')");
    CHECK(e.at("y'") == CausalTerm::var("y"));
    CHECK(e.assign.size() == 4);
    CHECK(validate(e).ok());
    CHECK_THROWS_AS(expand(gen("g", {{"x", "n"}, {"x'", "x"}})), std::invalid_argument);
}

TEST_CASE("intervention steps from a generator reference") {
    auto g = gen("drug", {{"x", "fx(z, nx)"}, {"y", "fy(x, z, ny)"}, {"z", "nz"}});
    auto ref = parse_genref("drug[x:=c1]E[z:=c0]L");
    auto h = apply_steps(g, ref);
    CHECK(h.at("x") == CausalTerm::constant("c1"));
    CHECK(to_string(h.at("x")) == "c1");
    CHECK(to_string(h.at("y")) == "fy(x, c0, ny)");
    CHECK(h.id == "drug[x:=c1]E[z:=c0]L");
}

TEST_CASE("model files") {
    auto m = load_model(std::string(STACL_DATA_DIR) + "/drug.json");
    CHECK(m.gen.id == "drug");
    CHECK(m.interp.domain == 2);
    CHECK(m.interp.functions.at("fy").arity == 3);
    CHECK(m.interp.const_value("c1") == 1);
    CHECK(m.interp.const_value("1") == 1);
    CHECK_THROWS_AS(m.interp.const_value("2"), std::invalid_argument);

    auto round = model_from_json(model_to_json(m));
    CHECK(model_to_json(round) == model_to_json(m));

    auto doc = model_to_json(m);
    doc["generator"]["x"] = "fq(z)";
    CHECK_THROWS_AS(model_from_json(doc), std::invalid_argument);
    doc = model_to_json(m);
    doc["names"]["nz"] = nlohmann::json::array({"1/2", "1/3"});
    CHECK_THROWS_AS(model_from_json(doc), std::invalid_argument);
    doc = model_to_json(m);
    doc["functions"]["fx"]["table"].erase("0,1");
    CHECK_THROWS_AS(model_from_json(doc), std::invalid_argument);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), std::invalid_argument);
}
