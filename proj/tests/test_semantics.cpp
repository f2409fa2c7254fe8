#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stacl/parser.hpp"
#include "stacl/semantics.hpp"

using namespace stacl;

namespace {

std::shared_ptr<const Model> load(const std::string& file) {
    return std::make_shared<const Model>(load_model(std::string(STACL_DATA_DIR) + "/" + file));
}

Rational R(const char* s) { return parse_rational(s); }

// Oracle: the drug trial as raw patient counts indexed by (x, y, z), with
// z = 0 male, x = 1 treated, y = 1 recovered.  200 patients in total.
int counts(int x, int y, int z) {
    static const int recovered[2][2] = {{68, 12}, {18, 55}};  // [x][z]
    static const int group[2][2] = {{80, 20}, {20, 80}};
    return y ? recovered[x][z] : group[x][z] - recovered[x][z];
}

Rational oracle_p(int x, int y, int z) {
    Rational r(counts(x, y, z), 200);
    r.canonicalize();
    return r;
}

Rational oracle_do(int c) {
    // Adjust for z using the count table directly.
    Rational total = 0;
    for (int z = 0; z < 2; ++z) {
        Rational pz = 0, pxz = 0, pyxz = 0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) pz += oracle_p(x, y, z);
        for (int y = 0; y < 2; ++y) pxz += oracle_p(c, y, z);
        pyxz = oracle_p(c, 1, z);
        total += pz * pyxz / pxz;
    }
    return total;
}

Rational at(const Dist& d, std::vector<int> k) {
    auto it = d.find(k);
    return it == d.end() ? Rational(0) : it->second;
}

bool sat(const World& w, const std::string& f) { return w.satisfies(parse_formula(f)); }

}  // namespace

TEST_CASE("drug world joint matches the count table") {
    World w(load("drug.json"));
    auto j = w.marginal(VarTuple({"x", "y", "z"}));
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z) CHECK(at(j, {x, y, z}) == oracle_p(x, y, z));
    auto y = w.interpret(parse_term("<y>"));
    REQUIRE(y);
    CHECK(at(*y, {1}) == Rational(153, 200));
}

TEST_CASE("conditional kernels reproduce the recovery rates") {
    World w(load("drug.json"));
    auto k1 = w.interpret_cond(parse_kernel("cond(<y>; <z>; x=c1)").cv);
    // Rows are labelled by target and given variables in sorted order: (y, z).
    CHECK(at(k1.rows.at({0}), {1, 0}) == R("18/20"));
    CHECK(at(k1.rows.at({1}), {1, 1}) == R("55/80"));
    auto k0 = w.interpret_cond(parse_kernel("cond(<y>; <z>; x=c0)").cv);
    CHECK(at(k0.rows.at({0}), {1, 0}) == R("68/80"));
    CHECK(at(k0.rows.at({1}), {1, 1}) == R("12/20"));
    auto kx = w.interpret_cond(parse_kernel("cond(<y>; <x>;)").cv);
    CHECK(at(kx.rows.at({1}), {1, 1}) == R("73/100"));
    CHECK(at(kx.rows.at({0}), {0, 1}) == R("80/100"));
    auto k_empty = w.interpret_cond(parse_kernel("cond(<y>; <>;)").cv);
    REQUIRE(k_empty.rows.size() == 1);
    CHECK(k_empty.rows.at({}) == *w.interpret(parse_term("<y>")));
}

TEST_CASE("causal effects agree with truncated factorization and the count oracle") {
    auto m = load("drug.json");
    World w(m);
    for (int c = 0; c < 2; ++c) {
        std::vector<Assign> a{{"x", Const{std::to_string(c)}}};
        auto eager = causal_effect(w, a, VarTuple({"y"}));
        auto tf = truncated_factorization(*m, a, VarTuple({"y"}));
        CHECK(eager == tf);
        CHECK(at(eager, {1}) == oracle_do(c));
    }
    // Frozen after the oracle agreed.
    CHECK(oracle_do(1) == Rational(127, 160));
    CHECK(oracle_do(0) == Rational(29, 40));
}

TEST_CASE("backdoor adjustment term") {
    World w(load("drug.json"));
    for (const char* c : {"c0", "c1"}) {
        std::string t = std::string("margin(cond(<y>; <z>; x=") + c + ")(<z>); <y>)";
        auto adj = w.interpret(parse_term(t));
        REQUIRE(adj);
        auto eff = causal_effect(w, {{"x", Const{c}}}, VarTuple({"y"}));
        CHECK(*adj == eff);
    }
    CHECK(sat(w, "[x:=c1]E (n0 == <y>)"));
    CHECK_FALSE(sat(w, "[x:=c0]E (n0 == <y>)"));
}

TEST_CASE("names, tuples and margins") {
    World w(load("drug.json"));
    auto nn = w.interpret(parse_term("tuple(n1, n1)"));
    REQUIRE(nn);
    CHECK(*nn == Dist{{{0, 0}, R("1/2")}, {{1, 1}, R("1/2")}});
    auto nm = w.interpret(parse_term("tuple(n1, nx)"));
    REQUIRE(nm);
    CHECK(nm->size() == 4);
    CHECK(*w.interpret(parse_term("margin(<x,z>; <x>)")) == *w.interpret(parse_term("<x>")));
    CHECK(*w.interpret(parse_term("c1")) == point_mass({1}));
    // A margin over an unlabelled body is undefined.
    CHECK_FALSE(w.interpret(parse_term("margin(fx(<z>, n1); <x>)")));
    CHECK(sat(w, "margin(fx(<z>, n1); <x>) == margin(fx(<z>, n1); <z>)"));
    CHECK_FALSE(sat(w, "margin(fx(<z>, n1); <x>) == <x>"));
    CHECK_THROWS_AS(w.interpret(parse_term("<q>")), std::invalid_argument);
}

TEST_CASE("pushforward through a stochastic function") {
    World w(load("drug.json"));
    // fx(z, nx) is the mechanism of x, so the pushforward of the joint of its inputs is p(x).
    CHECK(*w.interpret(parse_term("fx(<z>, nx)")) == w.marginal(VarTuple({"x"})));
    CHECK_FALSE(w.interpret(parse_term("fx(<z>)")));
}

TEST_CASE("satisfaction on the drug world") {
    World w(load("drug.json"));
    CHECK(sat(w, "pos(<x,z>)"));
    CHECK(sat(w, "pa(<z>, <x>)"));
    CHECK(sat(w, "[x:=c1]E (<x> == c1)"));
    CHECK(sat(w, "[x:=c0]E (<x> == c0)"));
    CHECK(sat(w, "[x:=c1]L (<x> == margin(<x,z>; <x>))"));
    CHECK(sat(w, "[x:=c1]E !pos(<x>)"));
    CHECK(sat(w, "[x:=c1]E pos(<x,z>; x=c1)"));
    CHECK(sat(w, "[x:=c1]L dsep(<x>; <y>; <z>)"));
    CHECK_FALSE(sat(w, "dsep(<x>; <y>; <z>)"));
    CHECK_FALSE(sat(w, "fy == cond(<y>; <x,z>;)"));
    CHECK(sat(w, "pos(<>)"));
}

TEST_CASE("canonical symbols") {
    World w(load("drug.json"));
    CHECK(sat(w, "#n(drug; <z>) == <z>"));
    CHECK(sat(w, "#f(drug; cond(<y>; <z>; x=c1)) == cond(<y>; <z>; x=c1)"));
    CHECK(sat(w, "[x:=c1]E (#n(drug[x:=c1]E; <y>) == <y>)"));
    CHECK(sat(w, "#n(drug[x:=c1]E; <y>) == n0"));
    // The adjustment formula with canonical symbols.
    CHECK(sat(w, "n0 == margin(#f(drug; cond(<y>; <z>; x=c1))(#n(drug; <z>)); <y>)"));
    CHECK_THROWS_AS(w.interpret(parse_term("#n(other; <z>)")), std::invalid_argument);
}

TEST_CASE("kernel equality") {
    World w(load("drug.json"));
    // The conditional over a subset of the context is compared cylindrically.
    CHECK(sat(w, "cond(<y>; <z>; x=c1) == cond(<y>; <x,z>;)"));
    CHECK_FALSE(sat(w, "cond(<y>; <z>; x=c1) == cond(<y>; <z>;)"));
    // Conflicting fixed values leave no common row, so equality holds vacuously.
    CHECK(sat(w, "cond(<y>; <z>; x=c1) == cond(<y>; <z>; x=c0)"));
    CHECK_FALSE(sat(w, "#f(drug; cond(<y>; <z>; x=c1)) == cond(<y>; <z>; x=c0)"));
    CHECK_FALSE(sat(w, "cond(<z>; <>;) == cond(<z>; <y>;)"));
    CHECK(sat(w, "fx == fx"));
    CHECK_FALSE(sat(w, "fx == fy"));
}

TEST_CASE("lazy and eager interventions agree away from the target") {
    World w(load("drug.json"));
    auto e = w.intervened(make_assigns({{"x", Const{"c1"}}}), false);
    auto l = w.intervened(make_assigns({{"x", Const{"c1"}}}), true);
    CHECK(e.marginal(VarTuple({"y", "z"})) == l.marginal(VarTuple({"y", "z"})));
    CHECK(l.marginal(VarTuple({"x"})) == w.marginal(VarTuple({"x"})));
    CHECK(e.marginal(VarTuple({"x"})) == point_mass({1}));

    // Eager on primed variables of the expansion matches lazy on the original.
    auto m = std::make_shared<const Model>(load_model(std::string(STACL_DATA_DIR) + "/drug.json"));
    World ex(m, expand(m->gen));
    auto ep = ex.intervened(make_assigns({{"x'", Const{"c1"}}}), false);
    CHECK(ep.marginal(VarTuple({"x", "y", "z"})) == l.marginal(VarTuple({"x", "y", "z"})));
}

TEST_CASE("distribution json") {
    Dist d{{{0}, R("33/160")}, {{1}, R("127/160")}};
    CHECK(dist_to_json(d).dump() == R"({"0":"33/160","1":"127/160"})");
    CHECK(dist_to_json(point_mass({})).dump() == R"({"":"1/1"})");
}
