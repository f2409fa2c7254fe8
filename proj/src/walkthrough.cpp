#include "stacl/walkthrough.hpp"

#include "stacl/parser.hpp"
#include "stacl/semantics.hpp"

#include <numeric>
#include <stdexcept>

namespace stacl {

using json = nlohmann::json;

namespace {

Rational at(const Dist& d, const std::vector<int>& k) {
    auto it = d.find(k);
    return it == d.end() ? Rational(0) : it->second;
}

Rational frac(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

// p(y=1 | x=c, z=g) read from the conditional kernel; rows are labelled (y, z).
Rational stratum_rate(const World& w, int c, int g) {
    auto k = w.interpret_cond(parse_kernel("cond(<y>; <z>; x=c" + std::to_string(c) + ")").cv);
    auto it = k.rows.find({g});
    if (it == k.rows.end()) throw std::invalid_argument("stratum x=" + std::to_string(c) + ", z=" + std::to_string(g) + " has no mass");
    return at(it->second, {1, g});
}

Rational marginal_rate(const World& w, int c) {
    auto k = w.interpret_cond(parse_kernel("cond(<y>; <x>;)").cv);
    auto it = k.rows.find({c});
    if (it == k.rows.end()) throw std::invalid_argument("x=" + std::to_string(c) + " has no mass");
    return at(it->second, {c, 1});
}

}  // namespace

bool SimpsonReport::ok() const {
    for (const auto& r : rates)
        if (r.rate != r.expected) return false;
    for (const auto& e : effects)
        if (e.do_effect != e.truncated || e.do_effect != e.adjusted || !e.rct || !e.bda || e.rct_model_n0 != e.bda_model_n0)
            return false;
    return precondition && paradox;
}

json SimpsonReport::to_json() const {
    json j;
    j["population"] = population;
    j["rates"] = json::array();
    for (const auto& r : rates)
        j["rates"].push_back({{"condition", r.condition},
                              {"rate", rational_string(r.rate)},
                              {"count", r.count},
                              {"matches", r.rate == r.expected}});
    j["effects"] = json::array();
    for (const auto& e : effects)
        j["effects"].push_back({{"do", "x=" + std::to_string(e.c)},
                                {"p_y1", rational_string(e.do_effect)},
                                {"truncated_factorization", rational_string(e.truncated)},
                                {"backdoor_adjustment", rational_string(e.adjusted)},
                                {"rct_canonical", e.rct},
                                {"bda_canonical", e.bda},
                                {"rct_iff_bda_model_n0", e.rct_model_n0 == e.bda_model_n0}});
    j["precondition"] = precondition;
    j["paradox"] = paradox;
    j["ok"] = ok();
    return j;
}

SimpsonReport simpson_walkthrough(std::shared_ptr<const Model> m) {
    World w(m);
    SimpsonReport r;

    // Smallest population in which every (x, y, z) cell is an integer count.
    auto joint = w.marginal(VarTuple({"x", "y", "z"}));
    mpz_class n = 1;
    for (const auto& [k, p] : joint) n = lcm(n, mpz_class(p.get_den()));
    r.population = static_cast<int>(n.get_si());
    auto cell = [&](int x, int y, int z) { return Rational(at(joint, {x, y, z}) * n); };

    struct Spec {
        int c;
        int g;  // -1 aggregates over z
        Rational expected;
    };
    const std::vector<Spec> table{{1, 0, frac(18, 20)}, {0, 0, frac(68, 80)}, {1, 1, frac(55, 80)},
                                  {0, 1, frac(12, 20)}, {1, -1, frac(73, 100)}, {0, -1, frac(80, 100)}};
    for (const auto& s : table) {
        RateRow row;
        row.condition = "x=" + std::to_string(s.c) + (s.g < 0 ? "" : ",z=" + std::to_string(s.g));
        row.rate = s.g < 0 ? marginal_rate(w, s.c) : stratum_rate(w, s.c, s.g);
        Rational rec = 0, tot = 0;
        for (int z = 0; z < 2; ++z) {
            if (s.g >= 0 && z != s.g) continue;
            rec += cell(s.c, 1, z);
            tot += cell(s.c, 0, z) + cell(s.c, 1, z);
        }
        if (tot == 0 || rec / tot != row.rate) throw std::logic_error("count and kernel rates disagree for " + row.condition);
        row.count = rec.get_num().get_str() + "/" + tot.get_num().get_str();
        row.expected = s.expected;
        r.rates.push_back(row);
    }

    auto holds = [&](const std::string& f) { return w.satisfies(parse_formula(f)); };
    r.precondition = holds("pa(<z>; <x>) & pos(<x,z>)");
    for (int c = 0; c < 2; ++c) {
        BackdoorRow e;
        e.c = c;
        const std::string cs = "c" + std::to_string(c);
        std::vector<Assign> a{{"x", Const{cs}}};
        e.do_effect = at(causal_effect(w, a, VarTuple({"y"})), {1});
        e.truncated = at(truncated_factorization(*m, a, VarTuple({"y"})), {1});
        auto adj = w.interpret(parse_term("margin(cond(<y>; <z>; x=" + cs + ")(<z>); <y>)"));
        if (!adj) throw std::logic_error("backdoor adjustment term is undefined");
        e.adjusted = at(*adj, {1});

        const std::string g = m->gen.id;
        const std::string K = "cond(<y>; <z>; x=" + cs + ")";
        const std::string f = "#f(" + g + "; " + K + ")";
        const std::string n1 = "#n(" + g + "; <z>)";
        auto rct = [&](const std::string& n0) { return "[x:=" + cs + "]E (" + n0 + " == <y>)"; };
        auto bda = [&](const std::string& n0) {
            return "(" + f + " == " + K + " & " + n1 + " == <z>) & " + n0 + " == margin(" + f + "(" + n1 + "); <y>)";
        };
        const std::string n0 = "#n(" + g + "[x:=" + cs + "]E; <y>)";
        e.rct = holds(rct(n0));
        e.bda = holds(bda(n0));
        if (m->interp.names.count("n0")) {
            e.rct_model_n0 = holds(rct("n0"));
            e.bda_model_n0 = holds(bda("n0"));
        }
        r.effects.push_back(e);
    }
    const auto& e0 = r.effects[0];
    const auto& e1 = r.effects[1];
    r.paradox = e1.do_effect > e0.do_effect && r.rates[4].rate < r.rates[5].rate &&
                r.rates[0].rate > r.rates[1].rate && r.rates[2].rate > r.rates[3].rate;
    return r;
}

}  // namespace stacl
