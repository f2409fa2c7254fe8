#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stacl/parser.hpp"
#include "stacl/proof.hpp"
#include "stacl/semantics.hpp"

#include <chrono>

using namespace stacl;

namespace {

std::string data(const std::string& f) { return std::string(STACL_DATA_DIR) + "/" + f; }

std::shared_ptr<const Model> drug() { return std::make_shared<const Model>(load_model(data("drug.json"))); }

FormulaP F(const std::string& s) { return parse_formula(s); }

FormulaP inst(const std::string& rule, const Bindings& b, const std::string& g = "drug",
              const Model* m = nullptr) {
    return instantiate_axiom(rule, b, parse_genref(g), m);
}

DerivationNode leaf(const std::string& rule, const Bindings& b, const std::string& g = "drug",
                    const Model* m = nullptr) {
    return DerivationNode{rule, b, inst(rule, b, g, m), std::nullopt, {}};
}

DerivationNode node(const std::string& rule, FormulaP c, std::vector<DerivationNode> ps, Bindings b = {}) {
    return DerivationNode{rule, std::move(b), std::move(c), std::nullopt, std::move(ps)};
}

Derivation on_drug(DerivationNode root, Layer layer = Layer::AXGCP, std::vector<FormulaP> hyps = {}) {
    Derivation d;
    d.generator_file = "drug.json";
    d.model = drug();
    d.layer = layer;
    d.hypotheses = std::move(hyps);
    d.root = std::move(root);
    return d;
}

bool valid_on_drug(const FormulaP& f) { return World(drug()).satisfies(f); }

}  // namespace

TEST_CASE("schema instances") {
    CHECK(same_formula(inst("Effect_EI", {{"a", "x:=c1"}}), F("[x:=c1]E (<x> == c1)")));
    CHECK(same_formula(inst("Effect_EI", {{"a", "x:=c1,z:=c0"}}), F("[x:=c1,z:=c0]E (<x,z> == tuple(c1, c0))")));
    CHECK(same_formula(inst("MPD", {{"x1", "<x,z>"}, {"x2", "<x>"}}), F("margin(<x,z>; <x>) == <x>")));
    CHECK(same_formula(inst("PaToDsep", {{"z", "<z>"}, {"a", "x:=c1"}, {"y", "<y>"}}),
                       F("pa(<z>, <x>) -> [x:=c1]L dsep(<x>; <y>; <z>)")));
    CHECK(same_formula(inst("EqN", {{"x", "<y,z>"}}, "drug[x:=c1]E"), F("#n(drug[x:=c1]E; <y,z>) == <y,z>")));
    CHECK(same_formula(inst("EqF", {{"k", "cond(<y>; <z>; x=c1)"}}),
                       F("#f(drug; cond(<y>; <z>; x=c1)) == cond(<y>; <z>; x=c1)")));
    CHECK(same_formula(inst("DsepCInd1", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}}),
                       F("(dsep(<x>; <y>; <z>) & pos(<z>)) -> cond(<y>; <x,z>;) == cond(<y>; <z>;)")));
    // x1' = x1 \ x2 for overlapping simultaneous interventions.
    CHECK(same_formula(inst("Simul_EI", {{"a1", "x:=c1,z:=c0"}, {"a2", "x:=c0"}, {"phi", "pos(<y>)"}}),
                       F("[x:=c1,z:=c0]E [x:=c0]E pos(<y>) -> [x:=c0,z:=c0]E pos(<y>)")));
    CHECK(same_formula(inst("Nanc4", {{"a", "x:=c1"}, {"y", "<z>"}}),
                       F("nanc(<x>; <z>) -> [x:=c1]E dsep(<x>; <z>; <>)")));
}

TEST_CASE("schema side conditions") {
    CHECK_THROWS_AS(inst("MPD", {{"x1", "<x>"}, {"x2", "<z>"}}), std::invalid_argument);
    CHECK_THROWS_AS(inst("Eq_EI", {{"u1", "<y>"}, {"u2", "n0"}, {"a", "x:=c1"}}), std::invalid_argument);
    CHECK_THROWS_AS(inst("DsepSm", {{"x", "<x>"}, {"y", "<x>"}, {"z", "<z>"}}), std::invalid_argument);
    CHECK_THROWS_AS(inst("Simul_LI", {{"a1", "x:=c1"}, {"a2", "x:=c0"}, {"phi", "pos(<y>)"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(inst("Effect_EI", {}), std::invalid_argument);
    CHECK_THROWS_AS(inst("Effect_EI", {{"a", "x:=c1"}, {"b", "<y>"}}), std::invalid_argument);
    CHECK_THROWS_AS(inst("MPD", {{"x1", "<x"}, {"x2", "<x>"}}), std::invalid_argument);
    CHECK_THROWS_AS(inst("PD", {{"x", "<z>"}, {"y", "<y>"}, {"n0", "<z>"}, {"n1", "n1"}, {"f", "fy"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(inst("Bogus", {}), std::invalid_argument);
    // The diagram axioms need a concrete generator.
    CHECK_THROWS_AS(inst("DsepDG", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}}, "drug[x:=c1]L"),
                    std::invalid_argument);
}

TEST_CASE("Eq2 replacement checks") {
    // Term replacement at an equation side and inside a unary application.
    auto e = inst("Eq2", {{"u1", "n0"}, {"u2", "<y>"}, {"phi1", "fx(n0) == n1"}, {"phi2", "fx(<y>) == n1"}});
    CHECK(same_formula(e, F("n0 == <y> -> (fx(n0) == n1 -> fx(<y>) == n1)")));
    // Replacement in one argument of a binary application is not admissible.
    CHECK_THROWS_AS(inst("Eq2", {{"u1", "n0"}, {"u2", "n1"}, {"phi1", "fy(n0, n1) == n1"},
                                 {"phi2", "fy(n1, n1) == n1"}}),
                    std::invalid_argument);
    // Non-rigid terms are not replaced under a modality; rigid ones are.
    CHECK_THROWS_AS(inst("Eq2", {{"u1", "<y>"}, {"u2", "n0"}, {"phi1", "[x:=c1]E (n1 == <y>)"},
                                 {"phi2", "[x:=c1]E (n1 == n0)"}}),
                    std::invalid_argument);
    CHECK_NOTHROW(inst("Eq2", {{"u1", "n0"}, {"u2", "n1"}, {"phi1", "[x:=c1]E (n1 == n0)"},
                               {"phi2", "[x:=c1]E (n1 == n1)"}}));
    // Margins need matching labels on both sides of the replacement.
    CHECK_THROWS_AS(inst("Eq2", {{"u1", "<y,z>"}, {"u2", "<y>"}, {"phi1", "margin(<y,z>; <y>) == n0"},
                                 {"phi2", "margin(<y>; <y>) == n0"}}),
                    std::invalid_argument);
    // Conditional variables carry a positivity guard.
    auto g = inst("Eq2", {{"k1", "cond(<y>; <z>; x=c1)"}, {"k2", "cond(<y>; <z>;)"},
                          {"phi1", "fy == cond(<y>; <z>; x=c1)"}, {"phi2", "fy == cond(<y>; <z>;)"}});
    CHECK(same_formula(g, F("((pos(<x,z>) & pos(<x,z>; x=c1)) & pos(<z>)) & cond(<y>; <z>; x=c1) == cond(<y>; "
                            "<z>;) -> (fy == cond(<y>; <z>; x=c1) -> fy == cond(<y>; <z>;))")));
    // ... and are not replaced next to another conditional variable.
    CHECK_THROWS_AS(inst("Eq2", {{"k1", "cond(<y>; <z>; x=c1)"}, {"k2", "cond(<y>; <z>; x=c0)"},
                                 {"phi1", "cond(<y>; <x,z>;) == cond(<y>; <z>; x=c1)"},
                                 {"phi2", "cond(<y>; <x,z>;) == cond(<y>; <z>; x=c0)"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(inst("Eq2", {{"k1", "fy"}, {"k2", "cond(<y>; <x,z>;)"}, {"phi1", "fy == fy"},
                                 {"phi2", "fy == cond(<y>; <x,z>;)"}}),
                    std::invalid_argument);
    // Function symbols are rigid and may be replaced anywhere.
    CHECK_NOTHROW(inst("Eq2", {{"k1", "fx"}, {"k2", "fy"}, {"phi1", "[x:=c1]E (fx(n0) == n1)"},
                               {"phi2", "[x:=c1]E (fy(n0) == n1)"}}));
}

TEST_CASE("derived schemas") {
    // Do1 with no replaced occurrence leaves a trivially true consequent.
    auto d1 = derived_schema("Do1", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}, {"phi0", "fy == cond(<y>; <z>;)"}});
    CHECK(same_formula(d1, F("(dsep(<x>; <y>; <z>) & pos(<z>)) -> (fy == cond(<y>; <z>;) <-> fy == cond(<y>; "
                             "<z>;))")));
    auto d1r = derived_schema("Do1", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}, {"occ", "0"},
                                      {"phi0", "#f(drug; cond(<y>; <z>;)) == cond(<y>; <z>;)"}});
    CHECK(same_formula(d1r, F("(dsep(<x>; <y>; <z>) & (pos(<x,z>) & pos(<z>))) -> (#f(drug; cond(<y>; <z>;)) == "
                              "cond(<y>; <z>;) <-> #f(drug; cond(<y>; <z>;)) == cond(<y>; <x,z>;))")));
    // A plain function symbol on the other side is not an admissible occurrence.
    CHECK_THROWS_AS(derived_schema("Do1", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}, {"occ", "0"},
                                           {"phi0", "fy == cond(<y>; <z>;)"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(derived_schema("Do1", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}, {"occ", "3"},
                                           {"phi0", "#f(drug; cond(<y>; <z>;)) == cond(<y>; <z>;)"}}),
                    std::invalid_argument);

    // The Do2 leaf of the backdoor derivation, with v empty.
    auto d2 = derived_schema("Do2", {{"x", "x:=c1"}, {"y", "<y>"}, {"z", "<z>"},
                                     {"phi0", "#f(drug; cond(<y>; <z>; x=c1)) == cond(<y>; <z>;)"}});
    CHECK(same_formula(d2, F("[x:=c1]L (dsep(<x>; <y>; <z>) & ((pos(<x,z>) & pos(<x,z>; x=c1)) & pos(<z>))) -> "
                             "([x:=c1]E (#f(drug; cond(<y>; <z>; x=c1)) == cond(<y>; <z>;)) <-> "
                             "#f(drug; cond(<y>; <z>; x=c1)) == cond(<y>; <z>; x=c1))")));
    CHECK(valid_on_drug(d2));
    CHECK_THROWS_AS(derived_schema("Do2", {{"x", "x:=c1"}, {"y", "<y>"}, {"z", "<z>"}, {"phi0", "pos(<y>)"}}),
                    std::invalid_argument);

    // The Do3 leaf over the name of z.
    auto d3 = derived_schema("Do3", {{"x1", "x:=c1"}, {"y", "<z>"}, {"phi", "#n(drug; <z>) == <z>"}});
    CHECK(same_formula(d3, F("(allnanc(<x>; <x>; <z>) & [x:=c1]E dsep(<x>; <z>; <>)) -> (#n(drug; <z>) == <z> "
                             "<-> [x:=c1]E (#n(drug; <z>) == <z>))")));
    CHECK(valid_on_drug(d3));
    // Only y|z may occur, and a bare tuple only when z is empty.
    CHECK_THROWS_AS(derived_schema("Do3", {{"x1", "x:=c1"}, {"y", "<y>"}, {"z", "<z>"}, {"phi", "n0 == <y>"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(derived_schema("Do3", {{"y", "<z>"}, {"phi", "n0 == <z>"}}), std::invalid_argument);
    CHECK_THROWS_AS(derived_schema("PD", {}), std::invalid_argument);
}

TEST_CASE("propositional consequence") {
    CHECK(tautological_consequence({}, F("!pos(<x>) -> !pos(<x>)")));
    CHECK(tautological_consequence({F("pos(<x>)"), F("pos(<x>) -> pos(<y>)")}, F("pos(<y>)")));
    CHECK_FALSE(tautological_consequence({F("pos(<x>) -> pos(<y>)")}, F("pos(<y>)")));
    CHECK(tautological_consequence({}, F("top")));
    CHECK(tautological_consequence({F("!top")}, F("pos(<z>)")));
    // Modal formulas are opaque atoms.
    CHECK_FALSE(tautological_consequence({F("[x:=c1]E (pos(<x>) & pos(<y>))")}, F("[x:=c1]E pos(<x>)")));
    CHECK(tautological_consequence({F("(pos(<x>) <-> pos(<y>)) & (pos(<y>) <-> pos(<z>))")},
                                   F("pos(<x>) <-> pos(<z>)")));
}

TEST_CASE("modus ponens and premise shapes") {
    auto mpd = leaf("MPD", {{"x1", "<x,z>"}, {"x2", "<x>"}});
    auto imp = F("margin(<x,z>; <x>) == <x> -> pos(<x>)");
    auto hyp = node("Hyp", imp, {});
    auto ok = on_drug(node("MP", F("pos(<x>)"), {mpd, hyp}), Layer::AX, {imp});
    CHECK_FALSE(check_derivation(ok));

    auto bad = on_drug(node("MP", F("pos(<x>)"), {leaf("MPD", {{"x1", "<x,z>"}, {"x2", "<z>"}}), hyp}),
                       Layer::AX, {imp});
    auto r = check_derivation(bad);
    REQUIRE(r);
    CHECK(r->path == "root");
    CHECK(r->message.find("premise shape") != std::string::npos);

    // A skipped premise.
    auto skipped = on_drug(node("MP", F("pos(<x>)"), {hyp}), Layer::AX, {imp});
    r = check_derivation(skipped);
    REQUIRE(r);
    CHECK(r->message.find("premise shape") != std::string::npos);

    // Hyp must cite the context.
    auto stray = on_drug(node("MP", F("pos(<x>)"), {mpd, hyp}), Layer::AX);
    r = check_derivation(stray);
    REQUIRE(r);
    CHECK(r->path == "root.premises[1]");
}

TEST_CASE("deduction and propositional steps") {
    auto p = F("pos(<x>)");
    auto d = on_drug(node("Deduction", F("pos(<x>) -> pos(<x>)"), {node("Hyp", p, {})}));
    CHECK_FALSE(check_derivation(d));
    auto bad = on_drug(node("PT", F("pos(<x>) -> pos(<y>)"), {}));
    auto r = check_derivation(bad);
    REQUIRE(r);
    CHECK(r->message.find("tautological") != std::string::npos);
    auto mismatch = on_drug(node("Effect_EI", F("[x:=c1]E (<x> == c0)"), {}, {{"a", "x:=c1"}}));
    r = check_derivation(mismatch);
    REQUIRE(r);
    CHECK(r->message.find("schema instance") != std::string::npos);
}

TEST_CASE("generator-shifting rules") {
    // Round trip through the intervened generator: elimination, then introduction.
    auto eff = leaf("Effect_EI", {{"a", "x:=c1"}});
    auto elim = node("DG_EI", F("<x> == c1"), {eff}, {{"a", "x:=c1"}, {"dir", "elim"}});
    elim.generator = parse_genref("drug[x:=c1]E");
    auto intro = node("DG_EI", F("[x:=c1]E (<x> == c1)"), {elim}, {{"a", "x:=c1"}});
    CHECK_FALSE(check_derivation(on_drug(intro)));

    auto r = check_derivation(on_drug(node("DG_EI", F("<x> == c1"), {eff}, {{"a", "x:=c1"}, {"dir", "elim"}})));
    REQUIRE(r);
    CHECK(r->message.find("does not end with") != std::string::npos);

    // The premise of an introduction lives at the intervened generator with an empty context.
    auto h = F("pos(<x>)");
    auto wrong = node("DG_LI", F("[x:=c1]L pos(<x>)"), {node("Hyp", h, {})}, {{"a", "x:=c1"}});
    r = check_derivation(on_drug(wrong, Layer::AX, {h}));
    REQUIRE(r);
    CHECK(r->path == "root.premises[0]");

    auto eqn = leaf("EqN", {{"x", "<z>"}}, "drug[x:=c1]L");
    eqn.generator = parse_genref("drug[x:=c1]E");
    r = check_derivation(on_drug(node("DG_LI", F("[x:=c1]L (#n(drug[x:=c1]L; <z>) == <z>)"), {eqn}, {{"a", "x:=c1"}})));
    REQUIRE(r);
    CHECK(r->message.find("generator mismatch") != std::string::npos);
    CHECK_FALSE(check_derivation(on_drug(node("DG_LI", F("[x:=c1]L (#n(drug[x:=c1]L; <z>) == <z>)"),
                                              {leaf("EqN", {{"x", "<z>"}}, "drug[x:=c1]L")}, {{"a", "x:=c1"}}))));
    r = check_derivation(on_drug(node("DG_LI", F("<z> == <z>"), {leaf("Eq1", {{"u", "<z>"}})},
                                      {{"a", "x:=c1"}, {"dir", "elim"}})));
    REQUIRE(r);
}

TEST_CASE("restricted schemas") {
    auto m = drug();
    // Conditional variables fixing a shared variable to different values are not interchangeable.
    CHECK_THROWS_AS(inst("Eq2", {{"k1", "cond(<y>; <>; x=c1,z=c0)"}, {"k2", "cond(<y>; <>; x=c0,z=c0)"},
                                 {"phi1", "fy == cond(<y>; <>; x=c1,z=c0)"},
                                 {"phi2", "fy == cond(<y>; <>; x=c0,z=c0)"}}),
                    std::invalid_argument);
    CHECK_NOTHROW(inst("Eq2", {{"k1", "cond(<y>; <>; x=c1)"}, {"k2", "cond(<y>; <>; z=c0)"},
                               {"phi1", "fy == cond(<y>; <>; x=c1)"}, {"phi2", "fy == cond(<y>; <>; z=c0)"}}));
    // Single-variable forms only.
    CHECK_THROWS_AS(inst("PaToNanc", {{"x", "<z>"}, {"y", "<x,y>"}}), std::invalid_argument);
    CHECK(same_formula(inst("PaToNanc", {{"x", "<z>"}, {"y", "<x>"}}), F("pa(<z>; <x>) -> nanc(<x>; <z>)")));
    CHECK_THROWS_AS(inst("Effect_LI", {{"a", "x:=c1,z:=c0"}, {"u", "n0"}}), std::invalid_argument);
    CHECK_NOTHROW(inst("Effect_LI", {{"a", "x:=c1"}, {"u", "n0"}}));
    // Dsep_EI1 needs parentless z in the concrete generator.
    CHECK_THROWS_AS(inst("Dsep_EI1", {{"x", "<x>"}, {"y", "<y>"}, {"a", "z:=c0"}}, "drug", m.get()),
                    std::invalid_argument);
    CHECK_NOTHROW(inst("Dsep_EI1", {{"x", "<x>"}, {"y", "<y>"}, {"a", "z:=c0"}}, "drug[z:=c1]E", m.get()));
    // PaToDsep holds in drug, where nx is read by x alone.
    auto ptd = leaf("PaToDsep", {{"z", "<z>"}, {"a", "x:=c1"}, {"y", "<y>"}}, "drug", m.get());
    CHECK_FALSE(check_derivation(on_drug(ptd, Layer::AXCP)));
    CHECK(valid_on_drug(ptd.conclusion));
    // Without a model the generator conditions cannot be checked.
    auto bare = on_drug(ptd, Layer::AXCP);
    bare.model = nullptr;
    auto r = check_derivation(bare);
    REQUIRE(r);
    CHECK(r->message.find("concrete generator") != std::string::npos);
}

TEST_CASE("diagram axioms and layers") {
    auto m = drug();
    // Lazy intervention on x cuts x -> y, so z separates (pa-induced).
    auto sep = leaf("DsepDG", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}}, "drug[x:=c1]L", m.get());
    CHECK(same_formula(sep.conclusion, F("dsep(<x>; <y>; <z>)")));
    CHECK_THROWS_AS(inst("DsepDG", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}}, "drug", m.get()),
                    std::invalid_argument);
    CHECK_THROWS_AS(inst("DsepDG", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}}, "other", m.get()),
                    std::invalid_argument);
    CHECK(same_formula(inst("PaDG", {{"x", "<z>"}, {"y", "<x>"}}, "drug", m.get()), F("pa(<z>, <x>)")));
    CHECK(same_formula(inst("NancDG", {{"x", "<y>"}, {"y", "<x>"}}, "drug", m.get()), F("nanc(<y>; <x>)")));
    auto dgeq = inst("DG_Eq", {{"x", "<y>"}}, "drug", m.get());
    CHECK(same_formula(dgeq, F("<y> == fy(<x>, <z>, ny)")));
    CHECK(valid_on_drug(dgeq));
    CHECK(same_formula(inst("DG_Eq", {{"x", "<x>"}}, "drug[x:=c1]E", m.get()), F("<x> == c1")));

    auto lifted = node("DG_LI", F("[x:=c1]L dsep(<x>; <y>; <z>)"), {sep}, {{"a", "x:=c1"}});
    CHECK_FALSE(check_derivation(on_drug(lifted)));
    auto r = check_derivation(on_drug(lifted, Layer::AXCP));
    REQUIRE(r);
    CHECK(r->path == "root.premises[0]");
    CHECK(r->message.find("layer") != std::string::npos);
    r = check_derivation(on_drug(leaf("DsepSm", {{"x", "<x>"}, {"y", "<y>"}, {"z", "<z>"}}), Layer::AX));
    REQUIRE(r);
}

TEST_CASE("bundled derivations") {
    auto start = std::chrono::steady_clock::now();
    for (const char* f : {"backdoor.proof.json", "do2.proof.json", "do3.proof.json"}) {
        CAPTURE(f);
        auto d = load_derivation_file(data(f));
        auto r = check_derivation(d);
        CHECK_MESSAGE(!r, (r ? r->path + ": " + r->message : std::string()));
        auto s = evaluate_on_model(d);
        CHECK(s.hypotheses_hold);
        CHECK(s.conclusion_holds);
        // Printing and re-loading preserves the tree.
        auto again = load_derivation(derivation_to_json(d), STACL_DATA_DIR);
        CHECK(same_node(again.root, d.root));
        CHECK(again.layer == d.layer);
        CHECK(again.hypotheses.size() == d.hypotheses.size());
    }
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));

    auto do2 = load_derivation_file(data("do2.proof.json"));
    CHECK(same_formula(do2.root.conclusion,
                       derived_schema("Do2", {{"v", "v:=c0"}, {"x", "x:=c1"}, {"y", "<y>"}, {"z", "<z>"},
                                              {"phi0", "#f(gdo2[v:=c0]E; cond(<y>; <z>; x=c1)) == cond(<y>; <z>;)"}})));
    auto do3 = load_derivation_file(data("do3.proof.json"));
    CHECK(same_formula(do3.root.conclusion,
                       derived_schema("Do3", {{"v", "v:=c0"}, {"x1", "x:=c1"}, {"y", "<y>"}, {"z", "<z>"},
                                              {"phi", "#f(gdo3[v:=c0]E[x:=c1]E; cond(<y>; <z>;)) == cond(<y>; <z>;)"}})));
    // Neither derivation uses the derived schemas themselves.
    std::function<bool(const DerivationNode&)> uses_do = [&](const DerivationNode& n) {
        if (n.rule == "Do1" || n.rule == "Do2" || n.rule == "Do3") return true;
        for (const auto& p : n.premises)
            if (uses_do(p)) return true;
        return false;
    };
    CHECK_FALSE(uses_do(do2.root));
    CHECK_FALSE(uses_do(do3.root));
}

TEST_CASE("tampered derivations are rejected") {
    auto d = load_derivation_file(data("backdoor.proof.json"));
    // The inner tree under DG_EI: corrupting one leaf is reported at that leaf.
    auto& leaf0 = d.root.premises[0].premises[0].premises[0];
    leaf0.conclusion = F("pos(<z>)");
    auto r = check_derivation(d);
    REQUIRE(r);
    CHECK(r->path == "root.premises[0].premises[0].premises[0]");

    auto e = load_derivation_file(data("backdoor.proof.json"));
    e.hypotheses.pop_back();
    r = check_derivation(e);
    REQUIRE(r);
    CHECK(r->message.find("hypothesis") != std::string::npos);

    auto g = load_derivation_file(data("backdoor.proof.json"));
    g.root.premises.pop_back();
    CHECK(check_derivation(g));
}

TEST_CASE("derivation json errors") {
    nlohmann::json doc = {{"generator_file", "drug.json"},
                          {"root", {{"rule", "Eq1"}, {"bind", {{"u", "<x>"}}}, {"conclusion", "<x> == <x>"}}}};
    auto d = load_derivation(doc, STACL_DATA_DIR);
    CHECK(d.layer == Layer::AXGCP);
    CHECK_FALSE(check_derivation(d));
    doc["root"]["conclusion"] = "<x> ==";
    CHECK_THROWS_AS(load_derivation(doc, STACL_DATA_DIR), std::invalid_argument);
    doc["root"]["conclusion"] = "<x> == <x>";
    doc["root"]["premises"] = {{{"rule", "Eq1"}}};
    try {
        load_derivation(doc, STACL_DATA_DIR);
        FAIL("expected a load error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("root.premises[0]") != std::string::npos);
    }
    CHECK_THROWS_AS(load_derivation(nlohmann::json::array(), STACL_DATA_DIR), std::invalid_argument);
    CHECK_THROWS_AS(load_derivation_file("/nonexistent.proof.json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_layer("AXX"), std::invalid_argument);
    auto unknown = on_drug(node("Magic", F("top"), {}));
    auto r = check_derivation(unknown);
    REQUIRE(r);
    CHECK(r->message.find("unknown rule") != std::string::npos);
}
