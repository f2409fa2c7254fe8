#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stacl/parser.hpp"
#include "stacl/rational.hpp"
#include "stacl/syntax.hpp"

#include <random>

using namespace stacl;

TEST_CASE("rationals print in lowest terms") {
    CHECK(rational_string(parse_rational("2/4")) == "1/2");
    CHECK(rational_string(parse_rational("1")) == "1/1");
    CHECK(rational_string(parse_rational("0/7")) == "0/1");
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("0.5"), std::invalid_argument);
}

TEST_CASE("merge_tuples") {
    CHECK(merge_tuples(VarTuple({"x"}), VarTuple({"z"})) == VarTuple({"x", "z"}));
    CHECK(merge_tuples(VarTuple({"y"}), VarTuple()) == VarTuple({"y"}));
    CHECK_THROWS_AS(merge_tuples(VarTuple({"x"}), VarTuple({"x"})), std::invalid_argument);
    CHECK(VarTuple({"z", "a", "m"}).vars() == std::vector<std::string>{"a", "m", "z"});
    CHECK_THROWS_AS(VarTuple({"x", "x"}), std::invalid_argument);
}

TEST_CASE("parse the experiment formula") {
    auto f = parse_formula("[x:=c1]E (n0 == <y>)");
    REQUIRE(f->kind == Formula::Kind::Modal);
    CHECK_FALSE(f->iv.lazy);
    REQUIRE(f->iv.assigns.size() == 1);
    CHECK(f->iv.assigns[0].var == "x");
    CHECK(f->iv.assigns[0].value.id == "c1");
    REQUIRE(f->a->kind == Formula::Kind::EqTerm);
    CHECK(f->a->lt->kind == Term::Kind::Name);
    CHECK(f->a->rt->kind == Term::Kind::Vars);
    CHECK(f->a->rt->vars == VarTuple({"y"}));
    CHECK(to_string(f) == "[x:=c1]E n0 == <y>");
}

TEST_CASE("parse the adjustment conjunction") {
    auto f = parse_formula("f == cond(<y>; <z>; x=c1) & n1 == <z> & n0 == margin(f(n1); <y>)");
    REQUIRE(f->kind == Formula::Kind::And);
    REQUIRE(f->a->kind == Formula::Kind::And);
    auto k = f->a->a;
    REQUIRE(k->kind == Formula::Kind::EqKernel);
    CHECK(k->lk.kind == KernelRef::Kind::Fsym);
    CHECK(k->rk.kind == KernelRef::Kind::Cond);
    CHECK(k->rk.cv.fixed == VarTuple({"x"}));
    auto m = f->b->rt;
    REQUIRE(m->kind == Term::Kind::Margin);
    CHECK(m->vars == VarTuple({"y"}));
    CHECK(m->args[0]->kind == Term::Kind::App);
    CHECK(to_string(f) == "f == cond(<y>; <z>; x=c1) & n1 == <z> & n0 == margin(f(n1); <y>)");
}

TEST_CASE("top and basic errors") {
    CHECK(parse_formula("top")->kind == Formula::Kind::Top);
    try {
        parse_formula("n0 == \n  <y");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(parse_formula("[x:=c1,x:=c0]E top"), ParseError);
    CHECK_THROWS_AS(parse_formula("n0 == f"), ParseError);
    CHECK_THROWS_AS(parse_formula("<x>::<x> == <x>"), ParseError);
    CHECK_THROWS_AS(parse_formula("dsep(<x>; <y>)"), ParseError);
    CHECK_THROWS_AS(parse_formula("cond(<y>; <y>;) == f"), ParseError);
}

TEST_CASE("double colon normalizes away") {
    CHECK(to_string(parse_term("<x::y>")) == "<x,y>");
    CHECK(to_string(parse_term("<z>::<x>")) == "<x,z>");
    CHECK(to_string(parse_formula("pos(<z>::<x>)")) == "pos(<x,z>)");
}

TEST_CASE("derived connectives sugar and print") {
    auto f = parse_formula("pos(<x>) -> n0 == <x>");
    FormulaP l, r;
    REQUIRE(as_imp(f, l, r));
    CHECK(l->kind == Formula::Kind::Pos);
    CHECK(same_formula(f, parse_formula("!(pos(<x>) & !(n0 == <x>))")));
    CHECK(to_string(parse_formula("!(pos(<x>) & !(n0 == <x>))")) == "pos(<x>) -> n0 == <x>");
    CHECK(to_string(parse_formula("top <-> pos(<x>) & top")) == "top <-> pos(<x>) & top");
    CHECK(to_string(parse_formula("(top -> top) -> top")) == "(top -> top) -> top");
    CHECK(to_string(parse_formula("top -> top -> top")) == "top -> top -> top");
    CHECK(to_string(parse_formula("![x:=c1]L (top & top)")) == "![x:=c1]L (top & top)");
}

TEST_CASE("substitution examples") {
    auto u = parse_term("f2(n2, <x>)");
    CHECK(to_string(substitute(u, "x", t_const("c"))) == "f2(n2, c)");
    CHECK(to_string(substitute(t_name("n"), "x", t_const("c"))) == "n");
    CHECK(to_string(substitute(parse_term("f(<x>, <x>)"), "x", t_const("c"))) == "f(c, c)");
}

TEST_CASE("free variables") {
    CHECK(free_vars(parse_term("f(c1, n)")).empty());
    CHECK(free_vars(parse_term("f1(<z>, n1)")) == VarTuple({"z"}));
    CHECK(free_vars(parse_term("margin(<x,y>; <x>)")) == VarTuple({"x", "y"}));
    CHECK(free_vars(parse_term("#n(g; <x>)")).empty());
    CHECK(free_vars(parse_kernel("#f(g; cond(<y>; <z>;))")).empty());
}

TEST_CASE("conditioning variables") {
    auto s = cond_vars(parse_formula("f == cond(<y>; <z>; x=c1)"));
    REQUIRE(s.size() == 2);
    std::vector<std::string> printed;
    for (const auto& p : s) printed.push_back(to_string(p));
    CHECK(std::find(printed.begin(), printed.end(), "pos(<x,z>)") != printed.end());
    CHECK(std::find(printed.begin(), printed.end(), "pos(<x,z>; x=c1)") != printed.end());
    CHECK(cond_vars(parse_formula("n == <y>")).empty());
    auto t = cond_vars(parse_formula("f == cond(<y>; <z>;)"));
    REQUIRE(t.size() == 1);
    CHECK(to_string(*t.begin()) == "pos(<z>)");
    auto p1 = parse_formula("f == cond(<y>; <z>;)");
    auto both = cond_vars(f_and(p1, parse_formula("f == cond(<w>; <v>; x=c0)")));
    auto u1 = cond_vars(p1);
    auto u2 = cond_vars(parse_formula("f == cond(<w>; <v>; x=c0)"));
    u1.insert(u2.begin(), u2.end());
    CHECK(both == u1);
}

TEST_CASE("canonical symbols and generator ids") {
    auto f = parse_formula("#n(drug[x:=c1]E; <z>) == <z> & #f(drug; cond(<y>; <z>; x=c1))(#n(drug; <z>)) == n0");
    CHECK(to_string(f) == "#n(drug[x:=c1]E; <z>) == <z> & #f(drug; cond(<y>; <z>; x=c1))(#n(drug; <z>)) == n0");
    GenRef g = parse_genref("drug[x:=c1,w:=c0]E[y:=1]L");
    CHECK(g.base == "drug");
    REQUIRE(g.steps.size() == 2);
    CHECK(g.steps[1].lazy);
    CHECK(to_string(g) == "drug[w:=c0,x:=c1]E[y:=1]L");
    CHECK(to_string(*g.parent()) == "drug[w:=c0,x:=c1]E");
}

// Independent oracle: substitution computed directly on the printed form.
namespace {

std::string oracle_subst(const TermP& u, const std::string& x, const std::string& r) {
    switch (u->kind) {
    case Term::Kind::Vars: {
        if (!u->vars.contains(x)) return to_string(u);
        if (u->vars.size() == 1) return r;
        std::string s = "tuple(";
        bool first = true;
        for (const auto& v : u->vars.vars()) {
            if (!first) s += ", ";
            first = false;
            s += v == x ? r : "<" + v + ">";
        }
        return s + ")";
    }
    case Term::Kind::App:
    case Term::Kind::Tuple: {
        std::string s = u->kind == Term::Kind::App ? to_string(u->head) : "tuple";
        s += "(";
        for (std::size_t i = 0; i < u->args.size(); ++i) {
            if (i) s += ", ";
            s += oracle_subst(u->args[i], x, r);
        }
        return s + ")";
    }
    case Term::Kind::Margin:
        return "margin(" + oracle_subst(u->args[0], x, r) + "; " + to_string(u->vars) + ")";
    default:
        return to_string(u);
    }
}

struct Gen {
    std::mt19937_64 rng;
    int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }
    VarTuple vt(int maxlen = 3) {
        static const char* vars[] = {"x", "y", "z", "w"};
        std::vector<std::string> v;
        for (int i = 0; i < 4; ++i)
            if (pick(2) && static_cast<int>(v.size()) < maxlen) v.push_back(vars[i]);
        return VarTuple(v);
    }
    CondVar cv() {
        CondVar c;
        c.target = VarTuple({"y"});
        c.given = pick(2) ? VarTuple({"z"}) : VarTuple();
        if (pick(2)) {
            c.fixed = VarTuple({"x"});
            c.vals = {Const{pick(2) ? "c1" : "0"}};
        }
        return c;
    }
    GenRef gid() {
        GenRef g{"g", {}};
        if (pick(2)) g.steps.push_back(Intervention{pick(2) == 1, {{"x", Const{"c0"}}}});
        return g;
    }
    KernelRef head() {
        switch (pick(3)) {
        case 0: return KernelRef::fsym(pick(2) ? "f" : "f2");
        case 1: return KernelRef::canon(gid(), cv());
        default: return KernelRef::cond(cv());
        }
    }
    TermP term(int depth) {
        int k = depth <= 0 ? pick(4) : pick(7);
        switch (k) {
        case 0: return t_vars(vt());
        case 1: return t_name(pick(2) ? "n0" : "n1");
        case 2: return t_const(pick(2) ? "c1" : "2");
        case 3: return t_canon_name(gid(), vt());
        case 4: {
            std::vector<TermP> args;
            int n = pick(3);
            for (int i = 0; i < n; ++i) args.push_back(term(depth - 1));
            return t_app(head(), args);
        }
        case 5: return t_margin(term(depth - 1), vt());
        default: {
            std::vector<TermP> items;
            int n = pick(3);
            for (int i = 0; i < n; ++i) items.push_back(term(depth - 1));
            return t_tuple(items);
        }
        }
    }
    FormulaP formula(int depth) {
        int k = depth <= 0 ? pick(5) : pick(10);
        switch (k) {
        case 0: return f_top();
        case 1: {
            PosTarget p;
            p.vars = vt();
            if (p.vars.contains("x") && pick(2)) {
                p.fixed = VarTuple({"x"});
                p.vals = {Const{"c1"}};
            }
            return f_pos(p);
        }
        case 2: {
            static const char* preds[] = {"pa", "npa", "anc", "nanc", "allnanc", "dsep"};
            std::string name = preds[pick(6)];
            std::vector<VarTuple> args;
            for (std::size_t i = 0; i < causal_pred_arity(name); ++i) args.push_back(vt());
            return f_cpred(name, args);
        }
        case 3: return f_eq(term(2), term(2));
        case 4: return f_keq(head(), head());
        case 5: return f_not(formula(depth - 1));
        case 6: return f_and(formula(depth - 1), formula(depth - 1));
        case 7: return f_imp(formula(depth - 1), formula(depth - 1));
        case 8: return f_iff(formula(depth - 1), formula(depth - 1));
        default: {
            std::vector<Assign> a = {{"x", Const{"c1"}}};
            if (pick(2)) a.push_back({"w", Const{"0"}});
            return f_modal(Intervention{pick(2) == 1, a}, formula(depth - 1));
        }
        }
    }
};

}  // namespace

TEST_CASE("random print/parse round trip") {
    Gen g{std::mt19937_64(7)};
    for (int i = 0; i < 2000; ++i) {
        auto f = g.formula(4);
        auto text = to_string(f);
        INFO(text);
        auto back = parse_formula(text);
        CHECK(same_formula(f, back));
        CHECK(to_string(back) == text);
    }
}

TEST_CASE("random substitution against the printing oracle") {
    Gen g{std::mt19937_64(11)};
    for (int i = 0; i < 2000; ++i) {
        auto u = g.term(3);
        auto r = g.term(1);
        INFO(to_string(u));
        CHECK(to_string(substitute(u, "x", r)) == oracle_subst(u, "x", to_string(r)));
        auto s = substitute(u, "x", r);
        CHECK(free_vars(s).minus(free_vars(r)).subset_of(free_vars(u)));
    }
}

TEST_CASE("sortedness of produced tuples") {
    Gen g{std::mt19937_64(3)};
    for (int i = 0; i < 500; ++i) {
        auto a = g.vt(4), b = g.vt(4);
        for (const auto& t : {a.unite(b), a.minus(b), a.intersect(b)})
            CHECK(std::is_sorted(t.vars().begin(), t.vars().end()));
    }
}

TEST_CASE("labels of terms") {
    CHECK(*term_labels(parse_term("<x,y>")) == std::vector<std::string>{"x", "y"});
    CHECK(*term_labels(parse_term("#f(g; cond(<y>; <z>; x=c1))(n1)")) == std::vector<std::string>{"y", "z"});
    CHECK(*term_labels(parse_term("tuple(<z>, #n(g; <x,y>))")) == std::vector<std::string>{"z", "x", "y"});
    CHECK_FALSE(term_labels(parse_term("f(n1)")).has_value());
    CHECK_FALSE(term_labels(parse_term("tuple(<x>, <x>)")).has_value());
    CHECK(is_rigid(parse_term("f(n1, #n(g; <x>))")));
    CHECK_FALSE(is_rigid(parse_term("f(<x>)")));
    CHECK_FALSE(is_rigid(parse_term("cond(<y>; <z>;)(n1)")));
}
