// Writes the bundled derivations into a data directory and checks them.
#include "stacl/parser.hpp"
#include "stacl/proof.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

using namespace stacl;

namespace {

FormulaP F(const std::string& s) { return parse_formula(s); }

struct Builder {
    const Model* model = nullptr;

    DerivationNode ax(const std::string& rule, Bindings b, const GenRef& g) const {
        DerivationNode n;
        n.rule = rule;
        n.bind = std::move(b);
        n.conclusion = instantiate_axiom(rule, n.bind, g, model);
        return n;
    }
};

DerivationNode pt(std::vector<DerivationNode> premises, FormulaP conclusion) {
    DerivationNode n;
    n.rule = "PT";
    n.conclusion = std::move(conclusion);
    n.premises = std::move(premises);
    return n;
}

DerivationNode hyp(FormulaP f) {
    DerivationNode n;
    n.rule = "Hyp";
    n.conclusion = std::move(f);
    return n;
}

Intervention step(const std::string& a, bool lazy) { return Intervention{lazy, make_assigns(parse_assigns(a))}; }

// Introduces [a]E or [a]L over a premise proved at the intervened generator.
DerivationNode dg_intro(const std::string& a, bool lazy, DerivationNode premise, const GenRef& at) {
    premise.generator = at.then(step(a, lazy));
    DerivationNode n;
    n.rule = lazy ? "DG_LI" : "DG_EI";
    n.bind = {{"a", a}};
    n.conclusion = f_modal(step(a, lazy), premise.conclusion);
    n.premises.push_back(std::move(premise));
    return n;
}

// Distribution instances that move [a] through every ! and & of phi.
void distribute(const Builder& b, bool lazy, const std::string& a, const FormulaP& phi, const GenRef& g,
                std::vector<DerivationNode>& out, std::set<std::string>& seen) {
    const std::string pre = lazy ? "DistrLI_" : "DistrEI_";
    if (phi->kind == Formula::Kind::Not) {
        if (seen.insert("!" + to_string(phi)).second)
            out.push_back(b.ax(pre + "not", {{"a", a}, {"phi", to_string(phi->a)}}, g));
        distribute(b, lazy, a, phi->a, g, out, seen);
    } else if (phi->kind == Formula::Kind::And) {
        if (seen.insert("&" + to_string(phi)).second)
            out.push_back(
                b.ax(pre + "and", {{"a", a}, {"phi1", to_string(phi->a)}, {"phi2", to_string(phi->b)}}, g));
        distribute(b, lazy, a, phi->a, g, out, seen);
        distribute(b, lazy, a, phi->b, g, out, seen);
    }
}

void append(std::vector<DerivationNode>& to, std::vector<DerivationNode> from) {
    for (auto& n : from) to.push_back(std::move(n));
}

std::vector<DerivationNode> distribution(const Builder& b, bool lazy, const std::string& a, const FormulaP& phi,
                                         const GenRef& g) {
    std::vector<DerivationNode> out;
    std::set<std::string> seen;
    distribute(b, lazy, a, phi, g, out, seen);
    return out;
}

// u2 == u1 from u1 == u2.
std::vector<DerivationNode> term_symmetry(const Builder& b, const std::string& u1, const std::string& u2,
                                          const GenRef& g) {
    return {b.ax("Eq1", {{"u", u1}}, g),
            b.ax("Eq2", {{"u1", u1}, {"u2", u2}, {"phi1", u1 + " == " + u1}, {"phi2", u2 + " == " + u1}}, g)};
}

Derivation backdoor(const std::shared_ptr<const Model>& m) {
    Builder b{m.get()};
    const GenRef g = parse_genref("drug");
    const GenRef ge = parse_genref("drug[x:=c1]E");
    const std::string a = "x:=c1";
    const std::string Fk = "#f(drug; cond(<y>; <z>; x=c1))";
    const std::string K0 = "cond(<y>; <z>;)";
    const std::string K1 = "cond(<y>; <z>; x=c1)";
    const std::string N1 = "#n(drug; <z>)";
    const std::string N2 = "#n(drug[x:=c1]E; <y,z>)";
    const std::string FN = Fk + "(" + N1 + ")";
    const std::string Q = "margin(" + FN + "; <y>)";
    const std::string M2 = "margin(" + N2 + "; <y>)";

    // At drug[x:=c1]E: the pre-intervention kernel and name determine the effect.
    std::vector<DerivationNode> t1;
    t1.push_back(b.ax("PD", {{"x", "<z>"}, {"y", "<y>"}, {"n0", N1}, {"n1", N2}, {"f", Fk}}, ge));
    t1.push_back(b.ax("EqN", {{"x", "<y,z>"}}, ge));
    t1.push_back(b.ax("MPD", {{"x1", "<y,z>"}, {"x2", "<y>"}}, ge));
    t1.push_back(b.ax("Eq1", {{"u", M2}}, ge));
    t1.push_back(b.ax("Eq2", {{"u1", N2}, {"u2", "<y,z>"}, {"phi1", M2 + " == " + M2},
                              {"phi2", M2 + " == margin(<y,z>; <y>)"}},
                      ge));
    t1.push_back(b.ax("Eq2", {{"u1", "margin(<y,z>; <y>)"}, {"u2", "<y>"},
                              {"phi1", M2 + " == margin(<y,z>; <y>)"}, {"phi2", M2 + " == <y>"}},
                      ge));
    t1.push_back(b.ax("Eq2", {{"u1", N2}, {"u2", FN}, {"phi1", M2 + " == <y>"}, {"phi2", Q + " == <y>"}}, ge));
    append(t1, term_symmetry(b, Q, "<y>", ge));
    t1.push_back(b.ax("Eq2", {{"u1", "<y>"}, {"u2", Q}, {"phi1", "n0 == <y>"}, {"phi2", "n0 == " + Q}}, ge));
    t1.push_back(b.ax("Eq2", {{"u1", Q}, {"u2", "<y>"}, {"phi1", "n0 == " + Q}, {"phi2", "n0 == <y>"}}, ge));
    auto T1 = F("(pos(<z>) & " + N1 + " == <z> & " + Fk + " == " + K0 + ") -> (n0 == <y> <-> n0 == " + Q + ")");
    auto inner = pt(std::move(t1), T1);

    std::vector<DerivationNode> top;
    top.push_back(dg_intro(a, false, std::move(inner), g));
    append(top, distribution(b, false, a, T1, g));

    // Do2: the post-intervention kernel of y given z is the conditional at x=c1.
    auto do2 = b.ax("Do2", {{"x", a}, {"y", "<y>"}, {"z", "<z>"}, {"phi0", Fk + " == " + K0}}, g);
    top.push_back(do2);
    const std::string S = "pos(<x,z>) & pos(<x,z>; x=c1) & pos(<z>)";
    top.push_back(b.ax("DistrLI_and", {{"a", a}, {"phi1", "dsep(<x>; <y>; <z>)"}, {"phi2", S}}, g));
    top.push_back(hyp(F("[x:=c1]L dsep(<x>; <y>; <z>)")));
    top.push_back(hyp(F("[x:=c1]L (" + S + ")")));
    top.push_back(b.ax("EqF", {{"k", K1}}, g));

    // Do3: z is not a descendant of x, so its name survives the intervention.
    top.push_back(b.ax("Do3", {{"x1", a}, {"y", "<z>"}, {"phi", N1 + " == <z>"}}, g));
    top.push_back(b.ax("Nanc4", {{"a", a}, {"y", "<z>"}}, g));
    top.push_back(hyp(F("nanc(<x>; <z>)")));
    top.push_back(hyp(F("allnanc(<x>; <x>; <z>)")));
    top.push_back(b.ax("EqN", {{"x", "<z>"}}, g));

    top.push_back(hyp(F("[x:=c1]E pos(<z>)")));
    top.push_back(b.ax("Eq_EI", {{"u1", "n0"}, {"u2", Q}, {"a", a}}, g));

    Derivation d;
    d.generator_file = "drug.json";
    d.model = m;
    d.layer = Layer::AXCP;
    d.hypotheses = {F("[x:=c1]L dsep(<x>; <y>; <z>)"), F("nanc(<x>; <z>)"), F("pos(<x,z>)"),
                    F("[x:=c1]L (" + S + ")"), F("[x:=c1]E pos(<z>)"), F("allnanc(<x>; <x>; <z>)")};
    d.root = pt(std::move(top), F("([x:=c1]E (n0 == <y>)) <-> ((" + Fk + " == " + K1 + " & " + N1 +
                                  " == <z>) & n0 == " + Q + ")"));
    return d;
}

Bindings do2_bindings() {
    return {{"v", "v:=c0"},
            {"x", "x:=c1"},
            {"y", "<y>"},
            {"z", "<z>"},
            {"phi0", "#f(gdo2[v:=c0]E; cond(<y>; <z>; x=c1)) == cond(<y>; <z>;)"}};
}

Derivation do2_instance(const std::shared_ptr<const Model>& m) {
    Builder b{m.get()};
    const GenRef g = parse_genref("gdo2");
    const GenRef g0 = parse_genref("gdo2[v:=c0]E");
    const GenRef gl = parse_genref("gdo2[v:=c0]E[x:=c1]L");
    const std::string K0 = "cond(<y>; <z>;)";
    const std::string K1 = "cond(<y>; <z>; x=c1)";
    const std::string Fk = "#f(gdo2[v:=c0]E; " + K1 + ")";
    const std::string pre = "dsep(<x>; <y>; <z>) & (pos(<x,z>) & pos(<x,z>; x=c1) & pos(<z>))";

    // At the lazily intervened generator: independence turns K1 into K0.
    std::vector<DerivationNode> t;
    t.push_back(b.ax("DsepCInd2", {{"a", "x:=c1"}, {"y", "<y>"}, {"z", "<z>"}}, gl));
    t.push_back(b.ax("Eq2", {{"k1", K1}, {"k2", K0}, {"phi1", Fk + " == " + K1}, {"phi2", Fk + " == " + K0}}, gl));
    t.push_back(b.ax("Eq1", {{"k", K1}}, gl));
    t.push_back(b.ax("Eq2", {{"k1", K1}, {"k2", K0}, {"phi1", K1 + " == " + K1}, {"phi2", K0 + " == " + K1}}, gl));
    t.push_back(b.ax("Eq2", {{"k1", K0}, {"k2", K1}, {"phi1", Fk + " == " + K0}, {"phi2", Fk + " == " + K1}}, gl));
    auto T = F("(" + pre + ") -> (" + Fk + " == " + K1 + " <-> " + Fk + " == " + K0 + ")");

    // At gdo2[v:=c0]E: move from the lazy to the eager intervention on x.
    std::vector<DerivationNode> u;
    u.push_back(dg_intro("x:=c1", true, pt(std::move(t), T), g0));
    append(u, distribution(b, true, "x:=c1", T, g0));
    u.push_back(b.ax("Cond_LI", {{"a", "x:=c1"}, {"f", Fk}, {"y", "<y>"}, {"z", "<z>"}}, g0));
    u.push_back(b.ax("Excd_EILI", {{"a", "x:=c1"}, {"f", Fk}, {"y", "<y>"}, {"z", "<z>"}}, g0));
    auto U = F("pos(<z>) -> (([x:=c1]L (" + pre + ")) -> (" + Fk + " == " + K1 + " <-> [x:=c1]E (" + Fk +
               " == " + K0 + ")))");

    std::vector<DerivationNode> top;
    top.push_back(dg_intro("v:=c0", false, pt(std::move(u), U), g));
    append(top, distribution(b, false, "v:=c0", U, g));
    top.push_back(hyp(F("[v:=c0]E pos(<z>)")));
    const std::string phi0 = Fk + " == " + K0;
    top.push_back(b.ax("Simul_EI", {{"a1", "v:=c0"}, {"a2", "x:=c1"}, {"phi", phi0}}, g));
    top.push_back(b.ax("Split_EI", {{"a1", "v:=c0"}, {"a2", "x:=c1"}, {"phi", phi0}}, g));

    Derivation d;
    d.generator_file = "gdo2.json";
    d.model = m;
    d.layer = Layer::AXCP;
    d.hypotheses = {F("[v:=c0]E pos(<z>)")};
    d.root = pt(std::move(top), derived_schema("Do2", do2_bindings()));
    return d;
}

Bindings do3_bindings() {
    return {{"v", "v:=c0"},
            {"x1", "x:=c1"},
            {"y", "<y>"},
            {"z", "<z>"},
            {"phi", "#f(gdo3[v:=c0]E[x:=c1]E; cond(<y>; <z>;)) == cond(<y>; <z>;)"}};
}

Derivation do3_instance(const std::shared_ptr<const Model>& m) {
    Builder b{m.get()};
    const GenRef g = parse_genref("gdo3");
    const GenRef g0 = parse_genref("gdo3[v:=c0]E");
    const std::string K = "cond(<y>; <z>;)";
    const std::string Fk = "#f(gdo3[v:=c0]E[x:=c1]E; " + K + ")";
    const std::string phi = Fk + " == " + K;
    const std::string pre = "allnanc(<x>; <x>; <y>) & [x:=c1]E (dsep(<x>; <y>; <z>) & pos(<z>))";

    std::vector<DerivationNode> t;
    t.push_back(b.ax("AllNanc", {{"x", "<x>"}, {"y", "<x>"}, {"z", "<y>"}}, g0));
    // The diagram supplies the non-ancestry of the conditioning set.
    t.push_back(b.ax("NancDG", {{"x", "<x>"}, {"y", "<z>"}}, g0));
    t.push_back(b.ax("Nanc2", {{"a", "x:=c1"}, {"f", Fk}, {"y", "<y>"}, {"z", "<z>"}}, g0));
    auto T = F("(" + pre + ") -> (" + phi + " <-> [x:=c1]E (" + phi + "))");

    std::vector<DerivationNode> top;
    top.push_back(dg_intro("v:=c0", false, pt(std::move(t), T), g));
    append(top, distribution(b, false, "v:=c0", T, g));
    top.push_back(b.ax("Simul_EI", {{"a1", "v:=c0"}, {"a2", "x:=c1"}, {"phi", phi}}, g));
    top.push_back(b.ax("Split_EI", {{"a1", "v:=c0"}, {"a2", "x:=c1"}, {"phi", phi}}, g));

    Derivation d;
    d.generator_file = "gdo3.json";
    d.model = m;
    d.layer = Layer::AXGCP;
    d.root = pt(std::move(top), derived_schema("Do3", do3_bindings()));
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Write the bundled derivations"};
    std::string dir = "data";
    app.add_option("dir", dir, "data directory holding drug.json, gdo2.json and gdo3.json");
    CLI11_PARSE(app, argc, argv);

    int status = 0;
    try {
        auto load = [&](const std::string& f) {
            return std::make_shared<const Model>(load_model((std::filesystem::path(dir) / f).string()));
        };
        std::vector<std::pair<std::string, Derivation>> out;
        out.emplace_back("backdoor.proof.json", backdoor(load("drug.json")));
        out.emplace_back("do2.proof.json", do2_instance(load("gdo2.json")));
        out.emplace_back("do3.proof.json", do3_instance(load("gdo3.json")));
        for (const auto& [file, d] : out) {
            auto path = (std::filesystem::path(dir) / file).string();
            std::ofstream(path) << derivation_to_json(d).dump(2) << "\n";
            auto reload = load_derivation_file(path);
            if (auto r = check_derivation(reload)) {
                std::cerr << file << ": rejected at " << r->path << ": " << r->message << "\n";
                status = 1;
                continue;
            }
            auto s = evaluate_on_model(reload);
            std::cout << file << ": accepted; hypotheses " << (s.hypotheses_hold ? "hold" : "FAIL")
                      << ", conclusion " << (s.conclusion_holds ? "holds" : "FAILS") << "\n";
            if (!s.hypotheses_hold || !s.conclusion_holds) status = 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return status;
}
